#include "fastrd/limit.hpp"

#include "fastrd/errors.hpp"
#include "newton.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace fastrd {

namespace {

void check_shape(const Mesh& mesh, const WState& s, const char* what) {
    if (s.w.size() != mesh.num_cells()) {
        throw InvalidArgument(std::string(what) + ": state size does not match mesh");
    }
}

void assemble_residual(const Mesh& mesh, const Kinetics& kin, double dt, const WState& prev,
                       const Eigen::VectorXd& w, Eigen::VectorXd& r) {
    const std::size_t n = mesh.num_cells();
    std::vector<double> phi(n);
    for (std::size_t k = 0; k < n; ++k) {
        phi[k] = kin.phi_extended(w[static_cast<Eigen::Index>(k)]);
    }
    r.resize(static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) {
        double flux = 0.0;
        for (const auto& nb : mesh.neighbors(k)) {
            flux += mesh.faces()[nb.face].transmissibility * (phi[nb.cell] - phi[k]);
        }
        r[k] = mesh.cell(k).measure * (w[k] - prev.w[k]) - dt * flux;
    }
}

Eigen::SparseMatrix<double> assemble_jacobian(const Mesh& mesh, const Kinetics& kin, double dt,
                                              const Eigen::VectorXd& w) {
    const std::size_t n = mesh.num_cells();
    std::vector<double> dphi(n);
    for (std::size_t k = 0; k < n; ++k) {
        dphi[k] = kin.phi_derivative_extended(w[static_cast<Eigen::Index>(k)]);
    }
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(n + 2 * mesh.faces().size());
    for (std::size_t k = 0; k < n; ++k) {
        const int i = static_cast<int>(k);
        trip.emplace_back(i, i, mesh.cell(k).measure + dt * mesh.transmissibility_sum(k) * dphi[k]);
        for (const auto& nb : mesh.neighbors(k)) {
            trip.emplace_back(i, static_cast<int>(nb.cell),
                              -dt * mesh.faces()[nb.face].transmissibility * dphi[nb.cell]);
        }
    }
    Eigen::SparseMatrix<double> J(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    J.setFromTriplets(trip.begin(), trip.end());
    return J;
}

} // namespace

WState project_initial_w(const Mesh& mesh, const Kinetics& kin, const Profile& u0,
                         const Profile& v0, int quadrature_order) {
    const State s = project_initial(mesh, u0, v0, quadrature_order);
    WState out;
    out.w.resize(mesh.num_cells());
    for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
        out.w[k] = s.u[k] / kin.alpha() + s.v[k] / kin.beta();
    }
    return out;
}

std::vector<double> residual_w(const Mesh& mesh, const Kinetics& kin, double dt,
                               const WState& prev, const WState& guess) {
    check_shape(mesh, prev, "residual_w");
    check_shape(mesh, guess, "residual_w");
    Eigen::VectorXd r;
    assemble_residual(mesh, kin, dt, prev,
                      Eigen::Map<const Eigen::VectorXd>(guess.w.data(), static_cast<Eigen::Index>(guess.w.size())), r);
    return {r.begin(), r.end()};
}

WState step_w(const Mesh& mesh, const Kinetics& kin, double dt, const WState& prev,
              const SolverConfig& config, StepStats* stats) {
    check_shape(mesh, prev, "step_w");
    if (!(dt > 0.0)) {
        throw InvalidArgument("step_w: dt must be positive");
    }
    const std::size_t n = mesh.num_cells();
    detail::NewtonProblem problem;
    problem.residual = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r) {
        assemble_residual(mesh, kin, dt, prev, x, r);
    };
    problem.jacobian = [&](const Eigen::VectorXd& x) { return assemble_jacobian(mesh, kin, dt, x); };
    problem.measure.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        problem.measure[k] = mesh.cell(k).measure;
    }
    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(prev.w.data(), static_cast<Eigen::Index>(n));
    const auto result = detail::newton_solve(problem, x, config);
    if (!result.converged) {
        throw NumericalError("Newton did not converge on the limit problem (scaled residual " +
                                 std::to_string(result.residual) + ")",
                             result.trace);
    }
    WState next;
    next.w.assign(x.begin(), x.end());
    next.level = prev.level + 1;
    next.time = prev.time + dt;

    const auto [lo_it, hi_it] = std::minmax_element(prev.w.begin(), prev.w.end());
    const double slack = 10.0 * config.newton_tol * std::max(1.0, std::abs(*hi_it));
    for (std::size_t k = 0; k < n; ++k) {
        if (next.w[k] < *lo_it - slack || next.w[k] > *hi_it + slack) {
            throw ConsistencyError("limit step violated the maximum principle at cell " +
                                   std::to_string(k));
        }
    }
    if (stats != nullptr) {
        *stats = StepStats{next.level, dt, result.iterations, result.residual, false};
    }
    return next;
}

WTrajectory integrate_w(const Mesh& mesh, const Kinetics& kin, const TimeGrid& grid,
                        const WState& initial, const SolverConfig& config,
                        const std::vector<std::size_t>& output_levels,
                        const WStateObserver& observer) {
    check_shape(mesh, initial, "integrate_w");
    config.validate();
    const std::size_t last = grid.num_steps();
    std::set<std::size_t> wanted(output_levels.begin(), output_levels.end());
    const bool keep_all = output_levels.empty();
    auto keep = [&](std::size_t level) { return keep_all || level == last || wanted.count(level) > 0; };

    WTrajectory traj;
    WState current = initial;
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
            current = step_w(mesh, kin, grid.step(n), current, config, &st);
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

} // namespace fastrd
