#include "fastrd/linear_solver.hpp"

#include "fastrd/errors.hpp"

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>

namespace fastrd {

std::string to_string(LinearSolverKind kind) {
    switch (kind) {
    case LinearSolverKind::dense_direct: return "dense-direct";
    case LinearSolverKind::sparse_direct: return "sparse-direct";
    case LinearSolverKind::iterative: return "iterative";
    }
    return "unknown";
}

LinearSolverKind linear_solver_from_string(const std::string& name) {
    if (name == "dense-direct") return LinearSolverKind::dense_direct;
    if (name == "sparse-direct") return LinearSolverKind::sparse_direct;
    if (name == "iterative") return LinearSolverKind::iterative;
    throw InvalidArgument("unknown linear solver '" + name +
                          "' (expected dense-direct, sparse-direct or iterative)");
}

void SolverConfig::validate() const {
    if (!(newton_tol > 0.0) || !(linear_tol > 0.0)) {
        throw InvalidArgument("solver tolerances must be positive");
    }
    if (newton_max_iter < 1 || linear_max_iter < 1 || fallback_sweeps < 0) {
        throw InvalidArgument("solver iteration limits must be positive");
    }
}

Eigen::VectorXd solve_linear(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b,
                             const SolverConfig& config) {
    switch (config.linear_solver) {
    case LinearSolverKind::dense_direct: {
        Eigen::MatrixXd dense(A);
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(dense);
        return lu.solve(b);
    }
    case LinearSolverKind::sparse_direct: {
        Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
        lu.compute(A);
        if (lu.info() != Eigen::Success) {
            throw NumericalError("sparse LU factorisation failed: " + lu.lastErrorMessage());
        }
        return lu.solve(b);
    }
    case LinearSolverKind::iterative: {
        Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> it;
        it.setTolerance(config.linear_tol);
        it.setMaxIterations(config.linear_max_iter);
        it.compute(A);
        Eigen::VectorXd x = it.solve(b);
        if (it.info() != Eigen::Success) {
            throw NumericalError("BiCGSTAB did not converge (error " + std::to_string(it.error()) +
                                 " after " + std::to_string(it.iterations()) + " iterations)");
        }
        return x;
    }
    }
    throw InvalidArgument("unknown linear solver kind");
}

} // namespace fastrd
