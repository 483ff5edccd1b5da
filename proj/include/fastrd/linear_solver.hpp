#pragma once

#include "fastrd/solver_config.hpp"

#include <Eigen/Sparse>

namespace fastrd {

/// Solve A x = b with the backend selected in `config`. Throws
/// NumericalError when the factorisation or iteration fails.
Eigen::VectorXd solve_linear(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b,
                             const SolverConfig& config);

} // namespace fastrd
