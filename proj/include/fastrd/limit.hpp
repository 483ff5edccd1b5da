#pragma once

#include "fastrd/fvscheme.hpp"

#include <vector>

namespace fastrd {

/// Conserved variable w_K = u_K/α + v_K/β at one level.
struct WState {
    std::vector<double> w;
    std::size_t level = 0;
    double time = 0.0;
};

struct WTrajectory {
    std::vector<WState> states;
    std::vector<StepStats> stats;
};

using WStateObserver = std::function<void(const WState&)>;

/// w_K^(0) = u_K^(0)/α + v_K^(0)/β with the same cell quadrature as
/// project_initial.
WState project_initial_w(const Mesh& mesh, const Kinetics& kin, const Profile& u0,
                         const Profile& v0, int quadrature_order = 1);

/// Residual m_K(w_K − w_K^prev) − dt·Σ T_{K|L}(φ(w_L) − φ(w_K)).
std::vector<double> residual_w(const Mesh& mesh, const Kinetics& kin, double dt,
                               const WState& prev, const WState& guess);

/// One implicit step of w_t = Δφ(w) with homogeneous Neumann boundary.
WState step_w(const Mesh& mesh, const Kinetics& kin, double dt, const WState& prev,
              const SolverConfig& config, StepStats* stats = nullptr);

WTrajectory integrate_w(const Mesh& mesh, const Kinetics& kin, const TimeGrid& grid,
                        const WState& initial, const SolverConfig& config,
                        const std::vector<std::size_t>& output_levels = {},
                        const WStateObserver& observer = {});

} // namespace fastrd
