#include "fastrd/quadrature.hpp"

#include "fastrd/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>

namespace fastrd {

GaussLegendre::GaussLegendre(int n_points) {
    if (n_points < 1 || n_points > 64) {
        throw InvalidArgument("quadrature order must be in [1, 64]");
    }
    const int n = n_points;
    nodes.resize(n);
    weights.resize(n);
    // Newton on P_n from the Chebyshev-like initial guess.
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            const double pn = (n == 1) ? x : p1;
            const double pnm1 = (n == 1) ? 1.0 : p0;
            dp = n * (x * pn - pnm1) / (x * x - 1.0);
            const double dx = pn / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        if (n == 1) {
            x = 0.0;
            dp = 1.0;
        }
        nodes[i] = x;
        weights[i] = (n == 1) ? 2.0 : 2.0 / ((1.0 - x * x) * dp * dp);
    }
}

double GaussLegendre::integrate(const std::function<double(double)>& f, double lo,
                                double hi) const {
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    double s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        s += weights[i] * f(mid + half * nodes[i]);
    }
    return half * s;
}

double integrate_adaptive(const std::function<double(double)>& f, double lo, double hi,
                          double tolerance) {
    if (lo == hi) {
        return 0.0;
    }
    double error = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, lo, hi, 15, tolerance, &error);
    return value;
}

} // namespace fastrd
