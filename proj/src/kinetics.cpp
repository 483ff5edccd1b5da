#include "fastrd/kinetics.hpp"

#include "fastrd/errors.hpp"
#include "fastrd/root_finding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fastrd {

namespace {

void require_nonnegative(double x, const char* what) {
    if (!(x >= 0.0)) {
        throw DomainError(std::string(what) + " requires a nonnegative argument");
    }
}

} // namespace

RateLaw RateLaw::power(double coefficient, double exponent, double domain_bound) {
    if (!(coefficient > 0.0)) {
        throw InvalidArgument("rate coefficient must be positive");
    }
    if (!(exponent >= 1.0)) {
        throw InvalidArgument("rate exponent must be >= 1");
    }
    RateLaw law;
    law.name = "power";
    law.domain_bound = domain_bound;
    const double c = coefficient;
    const double p = exponent;
    if (p == 1.0) {
        law.value = [c](double s) { return c * s; };
        law.derivative = [c](double) { return c; };
        law.inverse = [c](double y) { return y / c; };
    } else if (p == 2.0) {
        law.value = [c](double s) { return c * s * std::abs(s); };
        law.derivative = [c](double s) { return 2.0 * c * std::abs(s); };
        law.inverse = [c](double y) { return std::copysign(std::sqrt(std::abs(y) / c), y); };
    } else {
        law.value = [c, p](double s) { return std::copysign(c * std::pow(std::abs(s), p), s); };
        law.derivative = [c, p](double s) { return c * p * std::pow(std::abs(s), p - 1.0); };
        law.inverse = [c, p](double y) { return std::copysign(std::pow(std::abs(y) / c, 1.0 / p), y); };
    }
    return law;
}

Kinetics::Kinetics(double alpha, double beta, double diffusion_u, double diffusion_v,
                   double rate_factor, RateLaw rate_a, RateLaw rate_b, InversionOptions inversion)
    : alpha_(alpha), beta_(beta), a_(diffusion_u), b_(diffusion_v), k_(rate_factor),
      ra_(std::move(rate_a)), rb_(std::move(rate_b)), inversion_(inversion) {
    if (!(alpha_ > 0.0) || !(beta_ > 0.0)) {
        throw InvalidArgument("stoichiometric coefficients must be positive");
    }
    if (!(a_ > 0.0) || !(b_ > 0.0)) {
        throw InvalidArgument("diffusion coefficients must be positive");
    }
    if (!(k_ >= 0.0) || !std::isfinite(k_)) {
        throw InvalidArgument("rate factor must be finite and nonnegative");
    }
    if (!ra_.value || !ra_.derivative || !rb_.value || !rb_.derivative) {
        throw InvalidArgument("rate laws need value and derivative callables");
    }
    if (!(inversion_.tolerance > 0.0) || inversion_.max_iterations < 1) {
        throw InvalidArgument("inversion tolerance must be positive");
    }
}

Kinetics Kinetics::with_rate_factor(double k) const {
    return Kinetics(alpha_, beta_, a_, b_, k, ra_, rb_, inversion_);
}

double Kinetics::rate_b_inverse(double y) const {
    if (rb_.inverse) {
        return rb_.inverse(y);
    }
    return invert_increasing(rb_.value, rb_.derivative, y,
                             {inversion_.tolerance, inversion_.max_iterations}, "r_B inverse");
}

double Kinetics::eta(double u) const {
    require_nonnegative(u, "eta");
    if (u == 0.0) {
        return 0.0;
    }
    return rate_b_inverse(rate_a(u));
}

double Kinetics::eta_derivative(double u) const {
    require_nonnegative(u, "eta derivative");
    const double db = rate_b_derivative(eta(u));
    const double da = rate_a_derivative(u);
    if (da == 0.0) {
        return 0.0;
    }
    if (!(db > 0.0)) {
        return std::numeric_limits<double>::infinity();
    }
    return da / db;
}

double Kinetics::conserved(double u) const {
    require_nonnegative(u, "H");
    return u / alpha_ + eta(u) / beta_;
}

double Kinetics::conserved_inverse(double w) const {
    require_nonnegative(w, "H inverse");
    if (w == 0.0) {
        return 0.0;
    }
    // H(u) >= u/α, so the root lies in [0, α·w].
    auto h = [this](double u) { return u / alpha_ + eta(std::max(u, 0.0)) / beta_; };
    auto dh = [this](double u) {
        const double d = eta_derivative(std::max(u, 0.0));
        return 1.0 / alpha_ + (std::isfinite(d) ? d : 0.0) / beta_;
    };
    return solve_increasing(h, dh, w, 0.0, alpha_ * w,
                            {inversion_.tolerance, inversion_.max_iterations}, "H inverse");
}

double Kinetics::v_from_w(double w) const {
    return eta(conserved_inverse(w));
}

double Kinetics::phi(double w) const {
    const double u = conserved_inverse(w);
    return a_ / alpha_ * u + b_ / beta_ * eta(u);
}

double Kinetics::phi_derivative(double w) const {
    require_nonnegative(w, "phi derivative");
    const double u = conserved_inverse(w);
    const double d = eta_derivative(u);
    if (std::isinf(d)) {
        return b_;
    }
    if (std::isfinite(d)) {
        return (a_ / alpha_ + b_ / beta_ * d) / (1.0 / alpha_ + d / beta_);
    }
    // Fallback: one-sided difference quotient.
    const double hstep = 1e-7 * std::max(1.0, w);
    return (phi(w + hstep) - phi(w)) / hstep;
}

double Kinetics::phi_extended(double w) const {
    return w >= 0.0 ? phi(w) : -phi(-w);
}

double Kinetics::phi_derivative_extended(double w) const {
    return phi_derivative(std::abs(w));
}

std::vector<std::string> Kinetics::validate() const {
    std::vector<std::string> problems;
    if (rate_a(0.0) != 0.0) {
        problems.emplace_back("r_A(0) != 0");
    }
    if (rate_b(0.0) != 0.0) {
        problems.emplace_back("r_B(0) != 0");
    }
    auto check_law = [&](const RateLaw& law, const char* tag) {
        const double top = law.domain_bound;
        double prev_r = law.value(0.0);
        for (int i = 0; i <= 60; ++i) {
            const double s = top * std::pow(10.0, -12.0 + 12.0 * i / 60.0);
            const double r = law.value(s);
            if (!(r > prev_r)) {
                problems.push_back(std::string(tag) + " not strictly increasing near s = " +
                                   std::to_string(s));
            }
            const double hs = 1e-6 * s;
            const double fd = (law.value(s + hs) - law.value(s - hs)) / (2.0 * hs);
            const double d = law.derivative(s);
            if (std::abs(fd - d) > 1e-6 * std::max(std::abs(d), 1e-300) &&
                std::abs(fd - d) > 1e-12 * std::abs(r) / s) {
                problems.push_back(std::string(tag) + "' disagrees with finite differences at s = " +
                                   std::to_string(s));
            }
            prev_r = r;
        }
    };
    check_law(ra_, "r_A");
    check_law(rb_, "r_B");
    try {
        const double y = rate_a(ra_.domain_bound);
        const double v = rate_b_inverse(y);
        if (std::abs(rate_b(v) - y) > 1e-8 * (1.0 + std::abs(y))) {
            problems.emplace_back("r_A(domain) not contained in r_B(R+)");
        }
    } catch (const NumericalError&) {
        problems.emplace_back("r_A(domain) not contained in r_B(R+)");
    }
    return problems;
}

Kinetics DimerisationConstants::kinetics() const {
    if (!(k1 > 0.0) || !(k2 > 0.0)) {
        throw InvalidArgument("dimerisation rate constants must be positive");
    }
    RateLaw ra = RateLaw::power(k1, 2.0);
    ra.name = "k1*u^2";
    RateLaw rb = RateLaw::power(k2, 1.0);
    rb.name = "k2*v";
    return Kinetics(2.0, 1.0, a, b, k, std::move(ra), std::move(rb));
}

Kinetics PowerLawConstants::kinetics() const {
    return Kinetics(alpha, beta, a, b, k, RateLaw::power(c_a, p), RateLaw::power(c_b, q));
}

double closed_form_h(const DimerisationConstants& c, double y) {
    require_nonnegative(y, "closed-form h");
    const double alpha = 2.0;
    const double beta = 1.0;
    const double lead = alpha * c.k1 / (beta * c.k2);
    const double disc = lead * lead + y * 4.0 * c.k2 / (beta * c.k1);
    if (disc < 0.0) {
        throw DomainError("closed-form h: negative discriminant");
    }
    return 0.5 * (std::sqrt(disc) - alpha * c.k2 / (beta * c.k1));
}

double closed_form_g(const DimerisationConstants& c, double h) {
    const double alpha = 2.0;
    const double beta = 1.0;
    return h * c.a / alpha + h * h * c.b * c.k1 / (beta * c.k2);
}

ClosedFormDiscrepancy closed_form_discrepancy(const DimerisationConstants& c,
                                              std::span<const double> samples) {
    const Kinetics kin = c.kinetics();
    ClosedFormDiscrepancy d;
    d.samples = samples.size();
    for (double y : samples) {
        const double h = closed_form_h(c, y);
        const double u = kin.conserved_inverse(y);
        const double dh = std::abs(h - u);
        if (dh > d.max_h_vs_inverse) {
            d.max_h_vs_inverse = dh;
            d.y_at_max_h = y;
        }
        const double gh = closed_form_g(c, h);
        d.max_gh_vs_v = std::max(d.max_gh_vs_v, std::abs(gh - kin.eta(u)));
        const double ph = kin.phi(y);
        d.max_gh_vs_phi = std::max(d.max_gh_vs_phi, std::abs(gh - ph));
        d.max_g_of_inverse_vs_phi = std::max(d.max_g_of_inverse_vs_phi, std::abs(closed_form_g(c, u) - ph));
    }
    return d;
}

} // namespace fastrd
