#pragma once

#include "fastrd/solver_config.hpp"

#include <Eigen/Sparse>

#include <functional>
#include <string>
#include <vector>

namespace fastrd::detail {

struct NewtonProblem {
    std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)> residual;
    std::function<Eigen::SparseMatrix<double>(const Eigen::VectorXd&)> jacobian;
    /// Residual scale of unknown i (m_K of its cell); multiplied by max(1, |x_i|).
    std::vector<double> measure;
};

struct NewtonResult {
    bool converged = false;
    int iterations = 0;
    double residual = 0.0;  ///< scaled max-norm at exit
    std::vector<std::string> trace;
};

/// Damped Newton. Converged when the scaled residual max-norm or the
/// scaled full Newton increment is <= newton_tol. Returns with
/// converged = false on stall or iteration cap; `x` then holds the last
/// accepted iterate.
NewtonResult newton_solve(const NewtonProblem& problem, Eigen::VectorXd& x,
                          const SolverConfig& config);

double scaled_max_norm(const Eigen::VectorXd& r, const Eigen::VectorXd& x,
                       const std::vector<double>& measure);

} // namespace fastrd::detail
