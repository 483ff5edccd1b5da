#pragma once

#include <functional>
#include <string>

namespace fastrd {

struct ScalarRootOptions {
    double tolerance = 1e-12;  ///< |f(x) - target| <= tolerance·(1 + |target|)
    int max_iterations = 200;
};

/// Solve f(x) = target for a nondecreasing f on the bracket [lo, hi] with
/// f(lo) <= target <= f(hi). Newton steps are taken while they stay inside
/// the current bracket and shrink the residual; otherwise bisection.
/// Throws NumericalError (with the final bracket) on non-convergence.
double solve_increasing(const std::function<double(double)>& f,
                        const std::function<double(double)>& df, double target, double lo,
                        double hi, const ScalarRootOptions& options, const std::string& what);

/// Grow [0, hi] (or [lo, 0] for negative targets) by doubling until it
/// brackets `target`, then solve_increasing. Requires f(0) = 0.
double invert_increasing(const std::function<double(double)>& f,
                         const std::function<double(double)>& df, double target,
                         const ScalarRootOptions& options, const std::string& what);

} // namespace fastrd

namespace fastrd {

/// Solve f(x) = target for a strictly increasing f defined on all of ℝ,
/// expanding a bracket around `guess` in steps that double from `spread`.
double solve_increasing_from(const std::function<double(double)>& f,
                             const std::function<double(double)>& df, double target,
                             double guess, double spread, const ScalarRootOptions& options,
                             const std::string& what);

} // namespace fastrd
