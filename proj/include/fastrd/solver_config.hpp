#pragma once

#include <cstddef>
#include <string>

namespace fastrd {

enum class LinearSolverKind { dense_direct, sparse_direct, iterative };

std::string to_string(LinearSolverKind kind);
LinearSolverKind linear_solver_from_string(const std::string& name);

struct SolverConfig {
    /// Newton stops when the scaled residual max-norm or the scaled Newton
    /// increment drops below this. Scale per component: m_K·max(1, |x_K|).
    double newton_tol = 1e-12;
    int newton_max_iter = 50;
    bool linesearch = true;
    LinearSolverKind linear_solver = LinearSolverKind::sparse_direct;
    double linear_tol = 1e-14;   ///< iterative solver only
    int linear_max_iter = 2000;  ///< iterative solver only
    /// Block Gauss-Seidel sweeps tried when Newton stalls.
    int fallback_sweeps = 500;

    void validate() const;

    bool operator==(const SolverConfig&) const = default;
};

/// Per-step Newton statistics.
struct StepStats {
    std::size_t level = 0;  ///< index of the level produced by the step
    double dt = 0.0;
    int newton_iterations = 0;
    double residual = 0.0;  ///< final scaled residual max-norm
    bool used_fallback = false;
};

} // namespace fastrd
