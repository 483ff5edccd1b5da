#pragma once

#include "fastrd/kinetics.hpp"
#include "fastrd/mesh.hpp"
#include "fastrd/solver_config.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace fastrd {

/// Initial profile as a function of the 1D coordinate.
using Profile = std::function<double(double)>;

/// Concentrations (u_K, v_K) at one time level.
struct State {
    std::vector<double> u;
    std::vector<double> v;
    std::size_t level = 0;
    double time = 0.0;
};

struct PairField {
    std::vector<double> u;
    std::vector<double> v;
};

struct Trajectory {
    std::vector<State> states;     ///< requested levels, increasing
    std::vector<StepStats> stats;  ///< one entry per step taken
};

/// Called on every level (including level 0) during integration.
using StateObserver = std::function<void(const State&)>;

/// Cell averages u_K = (1/m_K)∫_K u0 by n-point Gauss-Legendre per cell
/// (n = 1 is the midpoint rule). 1D meshes only.
State project_initial(const Mesh& mesh, const Profile& u0, const Profile& v0,
                      int quadrature_order = 1);

/// Residual of the implicit scheme for the pair `guess` at the new level:
///   R_u = m(u − u_prev) − dt·a·Σ T(u_L − u_K) + dt·m·α̂(r_A(u) − r_B(v))
///   R_v = m(v − v_prev) − dt·b·Σ T(v_L − v_K) − dt·m·β̂(r_A(u) − r_B(v))
PairField residual(const Mesh& mesh, const Kinetics& kin, double dt, const State& prev,
                   const State& guess);

/// One implicit step from `prev`, solved by damped Newton with the
/// previous level as initial guess (block Gauss-Seidel fallback when
/// Newton stalls). Throws NumericalError on non-convergence and
/// ConsistencyError if the result leaves the admissible envelope by more
/// than 10·newton_tol.
State step(const Mesh& mesh, const Kinetics& kin, double dt, const State& prev,
           const SolverConfig& config, StepStats* stats = nullptr);

/// Apply step() over the whole grid. `output_levels` selects which levels
/// are stored (the final level is always stored); an empty list stores all.
Trajectory integrate(const Mesh& mesh, const Kinetics& kin, const TimeGrid& grid,
                     const State& initial, const SolverConfig& config,
                     const std::vector<std::size_t>& output_levels = {},
                     const StateObserver& observer = {});

/// Implicit Euler solution of the space-homogeneous reaction system
/// started at (U, V); one pair per level of `grid`.
std::vector<std::pair<double, double>> ode_upper_solution(const Kinetics& kin,
                                                          const TimeGrid& grid, double U,
                                                          double V, double tolerance = 1e-14);

/// Σ_K m_K (u_K/α + v_K/β)
double conserved_mass(const Mesh& mesh, const Kinetics& kin, const State& state);

} // namespace fastrd
