#include "fastrd/fvscheme.hpp"

#include "fastrd/errors.hpp"
#include "fastrd/quadrature.hpp"
#include "fastrd/root_finding.hpp"
#include "newton.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace fastrd {

namespace {

void check_shape(const Mesh& mesh, const State& s, const char* what) {
    if (s.u.size() != mesh.num_cells() || s.v.size() != mesh.num_cells()) {
        throw InvalidArgument(std::string(what) + ": state size does not match mesh");
    }
}

Eigen::VectorXd interleave(const State& s) {
    const std::size_t n = s.u.size();
    Eigen::VectorXd x(2 * n);
    for (std::size_t k = 0; k < n; ++k) {
        x[2 * k] = s.u[k];
        x[2 * k + 1] = s.v[k];
    }
    return x;
}

/// Residual of the scheme on the interleaved unknowns (u_0, v_0, u_1, ...).
void assemble_residual(const Mesh& mesh, const Kinetics& kin, double dt, const State& prev,
                       const Eigen::VectorXd& x, Eigen::VectorXd& r) {
    const double a = kin.diffusion_u();
    const double b = kin.diffusion_v();
    const double ah = kin.alpha_hat();
    const double bh = kin.beta_hat();
    const std::size_t n = mesh.num_cells();
    r.resize(static_cast<Eigen::Index>(2 * n));
    for (std::size_t k = 0; k < n; ++k) {
        const double m = mesh.cell(k).measure;
        const double uk = x[2 * k];
        const double vk = x[2 * k + 1];
        double flux_u = 0.0;
        double flux_v = 0.0;
        for (const auto& nb : mesh.neighbors(k)) {
            const double t = mesh.faces()[nb.face].transmissibility;
            flux_u += t * (x[2 * nb.cell] - uk);
            flux_v += t * (x[2 * nb.cell + 1] - vk);
        }
        const double reaction = (ah != 0.0 || bh != 0.0) ? kin.rate_a(uk) - kin.rate_b(vk) : 0.0;
        r[2 * k] = m * (uk - prev.u[k]) - dt * a * flux_u + dt * m * ah * reaction;
        r[2 * k + 1] = m * (vk - prev.v[k]) - dt * b * flux_v - dt * m * bh * reaction;
    }
}

Eigen::SparseMatrix<double> assemble_jacobian(const Mesh& mesh, const Kinetics& kin, double dt,
                                              const Eigen::VectorXd& x) {
    const double a = kin.diffusion_u();
    const double b = kin.diffusion_v();
    const double ah = kin.alpha_hat();
    const double bh = kin.beta_hat();
    const std::size_t n = mesh.num_cells();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(4 * n + 4 * mesh.faces().size());
    for (std::size_t k = 0; k < n; ++k) {
        const int iu = static_cast<int>(2 * k);
        const int iv = iu + 1;
        const double m = mesh.cell(k).measure;
        const double da = ah != 0.0 || bh != 0.0 ? kin.rate_a_derivative(x[iu]) : 0.0;
        const double db = ah != 0.0 || bh != 0.0 ? kin.rate_b_derivative(x[iv]) : 0.0;
        const double tsum = mesh.transmissibility_sum(k);
        trip.emplace_back(iu, iu, m + dt * a * tsum + dt * m * ah * da);
        trip.emplace_back(iu, iv, -dt * m * ah * db);
        trip.emplace_back(iv, iv, m + dt * b * tsum + dt * m * bh * db);
        trip.emplace_back(iv, iu, -dt * m * bh * da);
        for (const auto& nb : mesh.neighbors(k)) {
            const double t = mesh.faces()[nb.face].transmissibility;
            const int ju = static_cast<int>(2 * nb.cell);
            trip.emplace_back(iu, ju, -dt * a * t);
            trip.emplace_back(iv, ju + 1, -dt * b * t);
        }
    }
    Eigen::SparseMatrix<double> J(static_cast<Eigen::Index>(2 * n), static_cast<Eigen::Index>(2 * n));
    J.setFromTriplets(trip.begin(), trip.end());
    return J;
}

/// Nonlinear block Gauss-Seidel: each cell's 2x2 reaction system is solved
/// exactly with neighbour values frozen. Returns the last max update.
double gauss_seidel_sweeps(const Mesh& mesh, const Kinetics& kin, double dt, const State& prev,
                           Eigen::VectorXd& x, int sweeps, double tol) {
    const double a = kin.diffusion_u();
    const double b = kin.diffusion_v();
    const double alpha = kin.alpha();
    const double beta = kin.beta();
    const double ah = kin.alpha_hat();
    double change = 0.0;
    for (int s = 0; s < sweeps; ++s) {
        change = 0.0;
        for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
            const double m = mesh.cell(k).measure;
            const double tsum = mesh.transmissibility_sum(k);
            double nu = 0.0;
            double nv = 0.0;
            for (const auto& nb : mesh.neighbors(k)) {
                const double t = mesh.faces()[nb.face].transmissibility;
                nu += t * x[2 * nb.cell];
                nv += t * x[2 * nb.cell + 1];
            }
            const double du = m + dt * a * tsum;
            const double dv = m + dt * b * tsum;
            const double qu = m * prev.u[k] + dt * a * nu;
            const double qv = m * prev.v[k] + dt * b * nv;
            // Weighted sum of the two equations eliminates the reaction:
            // du·u/α + dv·v/β = qu/α + qv/β.
            const double c = qu / alpha + qv / beta;
            auto v_of = [&](double u) { return beta * (c - du * u / alpha) / dv; };
            double u_new = qu / du;
            if (ah != 0.0) {
                auto f = [&](double u) {
                    return du * u - qu + dt * m * ah * (kin.rate_a(u) - kin.rate_b(v_of(u)));
                };
                auto df = [&](double u) {
                    return du + dt * m * ah *
                                    (kin.rate_a_derivative(u) +
                                     kin.rate_b_derivative(v_of(u)) * beta * du / (alpha * dv));
                };
                u_new = solve_increasing_from(f, df, 0.0, x[2 * k], 1e-3 * std::max(1.0, std::abs(x[2 * k])),
                                              {1e-15, 400}, "cell relaxation");
            }
            const double v_new = ah != 0.0 ? v_of(u_new) : qv / dv;
            change = std::max({change, std::abs(u_new - x[2 * k]) / std::max(1.0, std::abs(u_new)),
                               std::abs(v_new - x[2 * k + 1]) / std::max(1.0, std::abs(v_new))});
            x[2 * k] = u_new;
            x[2 * k + 1] = v_new;
        }
        if (change <= tol) {
            break;
        }
    }
    return change;
}

} // namespace

State project_initial(const Mesh& mesh, const Profile& u0, const Profile& v0,
                      int quadrature_order) {
    if (mesh.dimension() != 1) {
        throw InvalidArgument("project_initial: only 1D meshes are supported");
    }
    const GaussLegendre rule(quadrature_order);
    State s;
    s.u.resize(mesh.num_cells());
    s.v.resize(mesh.num_cells());
    for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
        const auto [lo, hi] = cell_interval_1d(mesh.cell(k));
        auto checked = [&](const Profile& f, const char* name) {
            return [&f, name, k](double x) {
                const double y = f(x);
                if (!(y >= 0.0) || !std::isfinite(y)) {
                    throw InvalidArgument(std::string("initial ") + name +
                                          " is negative or non-finite in cell " + std::to_string(k));
                }
                return y;
            };
        };
        const double m = mesh.cell(k).measure;
        s.u[k] = rule.integrate(checked(u0, "u"), lo, hi) / m;
        s.v[k] = rule.integrate(checked(v0, "v"), lo, hi) / m;
    }
    return s;
}

PairField residual(const Mesh& mesh, const Kinetics& kin, double dt, const State& prev,
                   const State& guess) {
    check_shape(mesh, prev, "residual");
    check_shape(mesh, guess, "residual");
    Eigen::VectorXd r;
    assemble_residual(mesh, kin, dt, prev, interleave(guess), r);
    PairField out;
    const std::size_t n = mesh.num_cells();
    out.u.resize(n);
    out.v.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        out.u[k] = r[2 * k];
        out.v[k] = r[2 * k + 1];
    }
    return out;
}

State step(const Mesh& mesh, const Kinetics& kin, double dt, const State& prev,
           const SolverConfig& config, StepStats* stats) {
    check_shape(mesh, prev, "step");
    if (!(dt > 0.0)) {
        throw InvalidArgument("step: dt must be positive");
    }
    const std::size_t n = mesh.num_cells();
    detail::NewtonProblem problem;
    problem.residual = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r) {
        assemble_residual(mesh, kin, dt, prev, x, r);
    };
    problem.jacobian = [&](const Eigen::VectorXd& x) { return assemble_jacobian(mesh, kin, dt, x); };
    problem.measure.resize(2 * n);
    for (std::size_t k = 0; k < n; ++k) {
        problem.measure[2 * k] = problem.measure[2 * k + 1] = mesh.cell(k).measure;
    }

    Eigen::VectorXd x = interleave(prev);
    auto result = detail::newton_solve(problem, x, config);
    bool fallback = false;
    if (!result.converged && config.fallback_sweeps > 0) {
        fallback = true;
        x = interleave(prev);
        gauss_seidel_sweeps(mesh, kin, dt, prev, x, config.fallback_sweeps, config.newton_tol);
        auto retry = detail::newton_solve(problem, x, config);
        retry.trace.insert(retry.trace.begin(), result.trace.begin(), result.trace.end());
        retry.iterations += result.iterations;
        result = std::move(retry);
    }
    if (!result.converged) {
        throw NumericalError("Newton did not converge (scaled residual " +
                                 std::to_string(result.residual) + ")",
                             result.trace);
    }

    State next;
    next.u.resize(n);
    next.v.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        next.u[k] = x[2 * k];
        next.v[k] = x[2 * k + 1];
    }
    next.level = prev.level + 1;
    next.time = prev.time + dt;

    // Envelope implied by the comparison principle, with prev as initial data.
    const double U = *std::max_element(prev.u.begin(), prev.u.end());
    const double V = *std::max_element(prev.v.begin(), prev.v.end());
    const double u_cap = U + kin.alpha() / kin.beta() * V;
    const double v_cap = V + kin.beta() / kin.alpha() * U;
    const double slack = 10.0 * config.newton_tol;
    for (std::size_t k = 0; k < n; ++k) {
        if (next.u[k] < -slack || next.v[k] < -slack ||
            next.u[k] > u_cap + slack * std::max(1.0, u_cap) ||
            next.v[k] > v_cap + slack * std::max(1.0, v_cap)) {
            throw ConsistencyError("step produced a state outside the admissible envelope at cell " +
                                   std::to_string(k) + " (u = " + std::to_string(next.u[k]) +
                                   ", v = " + std::to_string(next.v[k]) + ")");
        }
    }

    if (stats != nullptr) {
        *stats = StepStats{next.level, dt, result.iterations, result.residual, fallback};
    }
    return next;
}

Trajectory integrate(const Mesh& mesh, const Kinetics& kin, const TimeGrid& grid,
                     const State& initial, const SolverConfig& config,
                     const std::vector<std::size_t>& output_levels, const StateObserver& observer) {
    check_shape(mesh, initial, "integrate");
    config.validate();
    const std::size_t last = grid.num_steps();
    std::set<std::size_t> wanted(output_levels.begin(), output_levels.end());
    const bool keep_all = output_levels.empty();
    auto keep = [&](std::size_t level) { return keep_all || level == last || wanted.count(level) > 0; };

    Trajectory traj;
    traj.stats.reserve(last);
    State current = initial;
    current.level = 0;
    current.time = grid.time(0);
    if (observer) {
        observer(current);
    }
    if (keep(0)) {
        traj.states.push_back(current);
    }
    for (std::size_t n = 0; n < last; ++n) {
        StepStats st;
        try {
            current = step(mesh, kin, grid.step(n), current, config, &st);
        } catch (const NumericalError& e) {
            throw NumericalError("level " + std::to_string(n + 1) + ": " + e.what(), e.trace());
        } catch (const ConsistencyError& e) {
            throw ConsistencyError("level " + std::to_string(n + 1) + ": " + e.what());
        }
        current.time = grid.time(n + 1);
        traj.stats.push_back(st);
        if (observer) {
            observer(current);
        }
        if (keep(n + 1)) {
            traj.states.push_back(current);
        }
    }
    return traj;
}

std::vector<std::pair<double, double>> ode_upper_solution(const Kinetics& kin,
                                                          const TimeGrid& grid, double U,
                                                          double V, double tolerance) {
    if (!(U >= 0.0) || !(V >= 0.0)) {
        throw InvalidArgument("ode_upper_solution: bounds must be nonnegative");
    }
    const double alpha = kin.alpha();
    const double beta = kin.beta();
    const double k = kin.rate_factor();
    const double c = U / alpha + V / beta;
    std::vector<std::pair<double, double>> out;
    out.reserve(grid.num_levels());
    out.emplace_back(U, V);
    double ubar = U;
    for (std::size_t n = 0; n < grid.num_steps(); ++n) {
        const double dt = grid.step(n);
        const double up = ubar;
        auto vbar = [&](double u) { return beta * (c - u / alpha); };
        auto f = [&](double u) {
            return u - up + alpha * k * dt * (kin.rate_a(u) - kin.rate_b(vbar(u)));
        };
        auto df = [&](double u) {
            return 1.0 + alpha * k * dt *
                             (kin.rate_a_derivative(u) + kin.rate_b_derivative(vbar(u)) * beta / alpha);
        };
        ubar = k == 0.0 ? up : solve_increasing(f, df, 0.0, 0.0, alpha * c, {tolerance, 400}, "ODE upper solution");
        out.emplace_back(ubar, vbar(ubar));
    }
    return out;
}

double conserved_mass(const Mesh& mesh, const Kinetics& kin, const State& state) {
    check_shape(mesh, state, "conserved_mass");
    double s = 0.0;
    for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
        s += mesh.cell(k).measure * (state.u[k] / kin.alpha() + state.v[k] / kin.beta());
    }
    return s;
}

} // namespace fastrd
