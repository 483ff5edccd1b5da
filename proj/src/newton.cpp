#include "newton.hpp"

#include "fastrd/errors.hpp"
#include "fastrd/linear_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace fastrd::detail {

namespace {

double scaled_two_norm(const Eigen::VectorXd& r, const Eigen::VectorXd& x,
                       const std::vector<double>& measure) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        const double q = r[i] / (measure[i] * std::max(1.0, std::abs(x[i])));
        s += q * q;
    }
    return std::sqrt(s);
}

std::string trace_line(int it, double rnorm, double inc, double lambda) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "iter %d: residual %.3e increment %.3e damping %.3g", it,
                  rnorm, inc, lambda);
    return buf;
}

} // namespace

double scaled_max_norm(const Eigen::VectorXd& r, const Eigen::VectorXd& x,
                       const std::vector<double>& measure) {
    double m = 0.0;
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        m = std::max(m, std::abs(r[i]) / (measure[i] * std::max(1.0, std::abs(x[i]))));
    }
    return m;
}

NewtonResult newton_solve(const NewtonProblem& problem, Eigen::VectorXd& x,
                          const SolverConfig& config) {
    NewtonResult result;
    Eigen::VectorXd r(x.size());
    Eigen::VectorXd trial(x.size());
    Eigen::VectorXd r_trial(x.size());
    problem.residual(x, r);

    for (int it = 0; it < config.newton_max_iter; ++it) {
        const double rnorm = scaled_max_norm(r, x, problem.measure);
        result.residual = rnorm;
        result.iterations = it;
        if (!std::isfinite(rnorm)) {
            result.trace.push_back("non-finite residual");
            return result;
        }
        if (rnorm <= config.newton_tol) {
            result.converged = true;
            return result;
        }

        const Eigen::SparseMatrix<double> J = problem.jacobian(x);
        Eigen::VectorXd delta = solve_linear(J, -r, config);
        if (!delta.allFinite()) {
            result.trace.push_back("linear solve produced non-finite increment");
            return result;
        }
        double inc = 0.0;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            inc = std::max(inc, std::abs(delta[i]) / std::max(1.0, std::abs(x[i])));
        }

        double lambda = 1.0;
        trial = x + delta;
        problem.residual(trial, r_trial);
        if (inc > config.newton_tol && config.linesearch) {
            const double base = scaled_two_norm(r, x, problem.measure);
            int cuts = 0;
            while (!(r_trial.allFinite() &&
                     scaled_two_norm(r_trial, trial, problem.measure) <= (1.0 - 1e-4 * lambda) * base)) {
                if (++cuts > 30) {
                    result.trace.push_back(trace_line(it, rnorm, inc, lambda));
                    result.trace.push_back("line search failed");
                    return result;
                }
                lambda *= 0.5;
                trial = x + lambda * delta;
                problem.residual(trial, r_trial);
            }
        }
        result.trace.push_back(trace_line(it, rnorm, inc, lambda));
        x.swap(trial);
        r.swap(r_trial);
        if (lambda == 1.0 && inc <= config.newton_tol) {
            result.converged = true;
            result.iterations = it + 1;
            result.residual = scaled_max_norm(r, x, problem.measure);
            return result;
        }
    }
    result.iterations = config.newton_max_iter;
    result.residual = scaled_max_norm(r, x, problem.measure);
    if (result.residual <= config.newton_tol) {
        result.converged = true;
    }
    return result;
}

} // namespace fastrd::detail
