#pragma once

#include <functional>
#include <vector>

namespace fastrd {

/// n-point Gauss-Legendre rule on [-1, 1]. n = 1 is the midpoint rule.
struct GaussLegendre {
    explicit GaussLegendre(int n_points);

    /// ∫_lo^hi f(x) dx
    double integrate(const std::function<double(double)>& f, double lo, double hi) const;

    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Adaptive Gauss-Kronrod ∫_lo^hi f; endpoints are never evaluated, so
/// integrands with a removable singularity at an endpoint are fine.
double integrate_adaptive(const std::function<double(double)>& f, double lo, double hi,
                          double tolerance);

} // namespace fastrd
