#include "fastrd/root_finding.hpp"

#include "fastrd/errors.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <vector>

namespace fastrd {

namespace {

std::string num(double x) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

} // namespace

double solve_increasing(const std::function<double(double)>& f,
                        const std::function<double(double)>& df, double target, double lo,
                        double hi, const ScalarRootOptions& options, const std::string& what) {
    const double tol = options.tolerance * (1.0 + std::abs(target));
    double flo = f(lo) - target;
    double fhi = f(hi) - target;
    if (std::abs(flo) <= tol) {
        return lo;
    }
    if (std::abs(fhi) <= tol) {
        return hi;
    }
    if (flo > 0.0 || fhi < 0.0) {
        throw NumericalError(what + ": target " + num(target) + " not bracketed by [" + num(lo) +
                             ", " + num(hi) + "]");
    }
    double x = 0.5 * (lo + hi);
    double fx = f(x) - target;
    for (int it = 0; it < options.max_iterations; ++it) {
        if (std::abs(fx) <= tol) {
            // One extra Newton polish when it stays in the bracket; cheap and
            // usually lands on the correctly rounded root.
            const double d = df(x);
            if (d > 0.0 && std::isfinite(d)) {
                const double xn = x - fx / d;
                if (xn >= lo && xn <= hi) {
                    const double fn = f(xn) - target;
                    if (std::abs(fn) <= std::abs(fx)) {
                        return xn;
                    }
                }
            }
            return x;
        }
        if (fx < 0.0) {
            lo = x;
        } else {
            hi = x;
        }
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi))) {
            return x;
        }
        double next = 0.5 * (lo + hi);
        const double d = df(x);
        if (d > 0.0 && std::isfinite(d)) {
            const double newton = x - fx / d;
            if (newton > lo && newton < hi) {
                next = newton;
            }
        }
        double fnext = f(next) - target;
        if (next != 0.5 * (lo + hi) && std::abs(fnext) > 0.5 * std::abs(fx)) {
            // Newton made poor progress: fall back to bisection this round.
            const double mid = 0.5 * (lo + hi);
            const double fmid = f(mid) - target;
            if (std::abs(fmid) < std::abs(fnext)) {
                next = mid;
                fnext = fmid;
            }
        }
        x = next;
        fx = fnext;
    }
    throw NumericalError(what + ": no convergence after " + std::to_string(options.max_iterations) +
                             " iterations",
                         {"bracket [" + num(lo) + ", " + num(hi) + "]",
                          "last iterate " + num(x) + ", residual " + num(fx)});
}

double invert_increasing(const std::function<double(double)>& f,
                         const std::function<double(double)>& df, double target,
                         const ScalarRootOptions& options, const std::string& what) {
    if (target == 0.0) {
        return 0.0;
    }
    if (!std::isfinite(target)) {
        throw NumericalError(what + ": non-finite target");
    }
    double edge = 1.0;
    for (int i = 0; i < 2100; ++i) {
        const double probe = target > 0.0 ? edge : -edge;
        const double fp = f(probe);
        if ((target > 0.0 && fp >= target) || (target < 0.0 && fp <= target)) {
            return target > 0.0 ? solve_increasing(f, df, target, 0.0, edge, options, what)
                                : solve_increasing(f, df, target, -edge, 0.0, options, what);
        }
        if (!std::isfinite(fp) || edge > 0.5 * std::numeric_limits<double>::max()) {
            break;
        }
        edge *= 2.0;
    }
    throw NumericalError(what + ": target " + num(target) + " outside the range of the map");
}

} // namespace fastrd

namespace fastrd {

double solve_increasing_from(const std::function<double(double)>& f,
                             const std::function<double(double)>& df, double target,
                             double guess, double spread, const ScalarRootOptions& options,
                             const std::string& what) {
    const double f0 = f(guess) - target;
    if (f0 == 0.0) {
        return guess;
    }
    double width = spread > 0.0 ? spread : 1.0;
    double lo = guess;
    double hi = guess;
    for (int i = 0; i < 2100; ++i) {
        if (f0 < 0.0) {
            hi = guess + width;
            if (f(hi) - target >= 0.0) {
                return solve_increasing(f, df, target, lo, hi, options, what);
            }
            lo = hi;
        } else {
            lo = guess - width;
            if (f(lo) - target <= 0.0) {
                return solve_increasing(f, df, target, lo, hi, options, what);
            }
            hi = lo;
        }
        if (!std::isfinite(width) || width > 1e300) {
            break;
        }
        width *= 2.0;
    }
    throw NumericalError(what + ": could not bracket target " + num(target));
}

} // namespace fastrd
