#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace fastrd {

/// A strictly increasing rate function r with r(0) = 0, given as paired
/// value/derivative callables valid on all of ℝ. `inverse` is optional;
/// when empty the inverse is found numerically.
struct RateLaw {
    std::string name;
    std::function<double(double)> value;
    std::function<double(double)> derivative;
    std::function<double(double)> inverse;
    /// Upper end of the sampling interval used by Kinetics::validate().
    double domain_bound = 1.0;

    /// r(s) = c·s^p for s >= 0, extended to s < 0 as -r(-s). Requires
    /// c > 0 and p >= 1 (so the extension stays C¹).
    static RateLaw power(double coefficient, double exponent, double domain_bound = 10.0);
};

struct InversionOptions {
    double tolerance = 1e-12;  ///< mixed absolute/relative: |f(x) - y| <= tol·(1 + |y|)
    int max_iterations = 200;
};

/// Reaction/diffusion data of the coupled system and the maps of its
/// instantaneous-reaction limit:
///   η = r_B⁻¹∘r_A,  H(s) = s/α + η(s)/β,  φ = (a/α·id + b/β·η)∘H⁻¹.
class Kinetics {
public:
    Kinetics(double alpha, double beta, double diffusion_u, double diffusion_v,
             double rate_factor, RateLaw rate_a, RateLaw rate_b, InversionOptions inversion = {});

    double alpha() const noexcept { return alpha_; }
    double beta() const noexcept { return beta_; }
    double diffusion_u() const noexcept { return a_; }
    double diffusion_v() const noexcept { return b_; }
    double rate_factor() const noexcept { return k_; }
    double alpha_hat() const noexcept { return k_ * alpha_; }
    double beta_hat() const noexcept { return k_ * beta_; }
    const InversionOptions& inversion() const noexcept { return inversion_; }
    const RateLaw& law_a() const noexcept { return ra_; }
    const RateLaw& law_b() const noexcept { return rb_; }

    Kinetics with_rate_factor(double k) const;

    double rate_a(double s) const { return ra_.value(s); }
    double rate_b(double s) const { return rb_.value(s); }
    double rate_a_derivative(double s) const { return ra_.derivative(s); }
    double rate_b_derivative(double s) const { return rb_.derivative(s); }
    double rate_b_inverse(double y) const;

    // The following require a nonnegative argument and throw DomainError
    // otherwise; inversion failures throw NumericalError.
    double eta(double u) const;
    double eta_derivative(double u) const;
    double conserved(double u) const;          ///< H(u)
    double conserved_inverse(double w) const;  ///< H⁻¹(w)
    double v_from_w(double w) const;           ///< η(H⁻¹(w))
    double phi(double w) const;
    double phi_derivative(double w) const;

    /// φ on all of ℝ, odd extension for w < 0. Used by the limit solver
    /// where Newton iterates may transiently cross zero.
    double phi_extended(double w) const;
    double phi_derivative_extended(double w) const;

    /// Spot checks of the structural hypotheses; one message per failure.
    std::vector<std::string> validate() const;

private:
    double alpha_;
    double beta_;
    double a_;
    double b_;
    double k_;
    RateLaw ra_;
    RateLaw rb_;
    InversionOptions inversion_;
};

/// 2A ⇌ B with r_A(u) = k1·u², r_B(v) = k2·v, α = 2, β = 1.
struct DimerisationConstants {
    double k1 = 1.072e-4;
    double k2 = 2.363e-6;
    double a = 1.579e-9;  ///< m²/s
    double b = 1.042e-9;  ///< m²/s
    double k = 1.0;

    Kinetics kinetics() const;

    bool operator==(const DimerisationConstants&) const = default;
};

/// r_A = cA·s^p, r_B = cB·s^q.
struct PowerLawConstants {
    double alpha = 1.0;
    double beta = 1.0;
    double c_a = 1.0;
    double p = 1.0;
    double c_b = 1.0;
    double q = 1.0;
    double a = 1.0;
    double b = 1.0;
    double k = 1.0;

    Kinetics kinetics() const;

    bool operator==(const PowerLawConstants&) const = default;
};

/// Reference closed form for the dimerisation u-representation,
///   h(y) = ½(√((αk1/(βk2))² + 4y·k2/(βk1)) − αk2/(βk1)).
/// Cross-check channel only; the solver never uses it.
double closed_form_h(const DimerisationConstants& c, double y);

/// g(h) = h·a/α + h²·b·k1/(βk2).
double closed_form_g(const DimerisationConstants& c, double h);

struct ClosedFormDiscrepancy {
    std::size_t samples = 0;
    double max_h_vs_inverse = 0.0;  ///< max |h(y) − H⁻¹(y)|
    double y_at_max_h = 0.0;
    double max_gh_vs_v = 0.0;       ///< max |g(h(y)) − η(H⁻¹(y))|
    double max_gh_vs_phi = 0.0;     ///< max |g(h(y)) − φ(y)|
    double max_g_of_inverse_vs_phi = 0.0;  ///< max |g(H⁻¹(y)) − φ(y)|
};

ClosedFormDiscrepancy closed_form_discrepancy(const DimerisationConstants& c,
                                              std::span<const double> samples);

} // namespace fastrd
