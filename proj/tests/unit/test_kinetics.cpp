#include "fastrd/errors.hpp"
#include "fastrd/kinetics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace fastrd;

namespace {

const DimerisationConstants kDimer{};

/// Positive root of c·u² + u/2 − w = 0, c = k1/k2.
double quadratic_root(double w) {
    const double c = kDimer.k1 / kDimer.k2;
    return (-0.5 + std::sqrt(0.25 + 4.0 * c * w)) / (2.0 * c);
}

std::vector<double> log_samples(double lo, double hi, int n) {
    std::vector<double> out;
    for (int i = 0; i < n; ++i) {
        out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
    }
    return out;
}

Kinetics symmetric(double a = 1.0) {
    return PowerLawConstants{1.0, 1.0, 1.0, 1.5, 1.0, 1.5, a, a, 1.0}.kinetics();
}

} // namespace

TEST(Dimerisation, Eta) {
    const Kinetics kin = kDimer.kinetics();
    EXPECT_EQ(kin.eta(0.0), 0.0);
    EXPECT_NEAR(kin.eta(1.0), 1.072e-4 / 2.363e-6, 1e-10);
    EXPECT_NEAR(kin.eta(1.0), 45.3660, 1e-4);
    EXPECT_THROW(kin.eta(-1.0), DomainError);
}

TEST(Dimerisation, ConservedMap) {
    const Kinetics kin = kDimer.kinetics();
    EXPECT_EQ(kin.conserved(0.0), 0.0);
    EXPECT_NEAR(kin.conserved(1.0), 0.5 + 1.072e-4 / 2.363e-6, 1e-10);
    EXPECT_NEAR(kin.conserved_inverse(kin.conserved(0.3)), 0.3, 1e-10);
    EXPECT_EQ(kin.conserved_inverse(0.0), 0.0);
}

TEST(Dimerisation, QuadraticOracle) {
    const Kinetics kin = kDimer.kinetics();
    EXPECT_NEAR(kin.conserved_inverse(1.0), quadratic_root(1.0), 1e-10);
    EXPECT_NEAR(kin.v_from_w(1.0), kDimer.k1 / kDimer.k2 * std::pow(quadratic_root(1.0), 2), 1e-10);
    const double u = quadratic_root(1.0);
    EXPECT_NEAR(kin.phi(1.0), kDimer.a / 2.0 * u + kDimer.b * kDimer.k1 / kDimer.k2 * u * u, 1e-20);
    for (double w : log_samples(1e-8, 10.0, 40)) {
        EXPECT_NEAR(kin.conserved_inverse(w), quadratic_root(w), 1e-10 * (1.0 + quadratic_root(w))) << w;
    }
}

TEST(Dimerisation, VFromWDefiningIdentity) {
    const Kinetics kin = kDimer.kinetics();
    EXPECT_EQ(kin.v_from_w(0.0), 0.0);
    for (double w : log_samples(1e-9, 50.0, 60)) {
        const double lhs = kin.conserved_inverse(w) / kin.alpha() + kin.v_from_w(w) / kin.beta();
        EXPECT_NEAR(lhs, w, 1e-10 * (1.0 + w)) << w;
    }
}

TEST(Dimerisation, ChemicalEquilibrium) {
    const Kinetics kin = kDimer.kinetics();
    for (double w : log_samples(1e-9, 50.0, 60)) {
        const double ra = kin.rate_a(kin.conserved_inverse(w));
        const double rb = kin.rate_b(kin.v_from_w(w));
        EXPECT_NEAR(ra, rb, 1e-12 * (1.0 + ra)) << w;
    }
}

TEST(Dimerisation, HypothesisThirty) {
    const Kinetics kin = kDimer.kinetics();
    for (double s : log_samples(1e-6, 5.0, 20)) {
        EXPECT_NEAR(s * kin.rate_a_derivative(s) / kin.rate_a(s), 2.0, 1e-12);
        EXPECT_NEAR(s * kin.rate_b_derivative(s) / kin.rate_b(s), 1.0, 1e-12);
    }
}

TEST(Dimerisation, ValidateIsClean) {
    EXPECT_TRUE(kDimer.kinetics().validate().empty());
}

TEST(Kinetics, RejectsNonPositiveCoefficients) {
    EXPECT_THROW((PowerLawConstants{0.0, 1, 1, 1, 1, 1, 1, 1, 1}.kinetics()), InvalidArgument);
    EXPECT_THROW((PowerLawConstants{1, 1, 1, 1, 1, 1, -1.0, 1, 1}.kinetics()), InvalidArgument);
    EXPECT_THROW((PowerLawConstants{1, 1, 1, 1, 1, 1, 1, 1, -1.0}.kinetics()), InvalidArgument);
    EXPECT_THROW((DimerisationConstants{0.0, 1.0, 1.0, 1.0, 1.0}.kinetics()), InvalidArgument);
}

TEST(Kinetics, SymmetricCase) {
    const Kinetics kin = symmetric(0.7);
    for (double s : log_samples(1e-6, 5.0, 25)) {
        EXPECT_NEAR(kin.eta(s), s, 1e-12 * (1.0 + s));
        EXPECT_NEAR(kin.conserved(s), 2.0 * s, 1e-12 * (1.0 + s));
        EXPECT_NEAR(kin.phi(s), 0.7 * s, 1e-12 * (1.0 + s));
    }
    EXPECT_EQ(kin.phi(0.0), 0.0);
}

TEST(Kinetics, Monotonicity) {
    const std::vector<Kinetics> all{kDimer.kinetics(), symmetric(),
                                    PowerLawConstants{3.0, 0.5, 2.0, 1.3, 0.4, 2.5, 1.0, 2.0, 1.0}.kinetics()};
    for (const auto& kin : all) {
        const auto s = log_samples(1e-5, 3.0, 50);
        for (std::size_t i = 1; i < s.size(); ++i) {
            EXPECT_LT(kin.rate_a(s[i - 1]), kin.rate_a(s[i]));
            EXPECT_LT(kin.rate_b(s[i - 1]), kin.rate_b(s[i]));
            EXPECT_LT(kin.conserved(s[i - 1]), kin.conserved(s[i]));
            EXPECT_LT(kin.phi(kin.conserved(s[i - 1])), kin.phi(kin.conserved(s[i])));
        }
    }
}

TEST(Kinetics, RoundTrips) {
    const Kinetics kin = PowerLawConstants{3.0, 0.5, 2.0, 1.3, 0.4, 2.5, 1.0, 2.0, 1.0}.kinetics();
    for (double x : log_samples(1e-6, 3.0, 40)) {
        const double w = kin.conserved(x);
        EXPECT_NEAR(kin.conserved(kin.conserved_inverse(w)), w, 1e-12 * (1.0 + w));
        EXPECT_NEAR(kin.rate_b(kin.eta(x)), kin.rate_a(x), 1e-12 * (1.0 + kin.rate_a(x)));
    }
}

TEST(Kinetics, DerivativesMatchFiniteDifferences) {
    const std::vector<Kinetics> all{kDimer.kinetics(),
                                    PowerLawConstants{3.0, 0.5, 2.0, 1.3, 0.4, 2.5, 1.0, 2.0, 1.0}.kinetics()};
    for (const auto& kin : all) {
        for (double s : log_samples(1e-3, 3.0, 20)) {
            const double h = 1e-6 * s;
            const double fd_a = (kin.rate_a(s + h) - kin.rate_a(s - h)) / (2 * h);
            const double fd_b = (kin.rate_b(s + h) - kin.rate_b(s - h)) / (2 * h);
            EXPECT_NEAR(kin.rate_a_derivative(s), fd_a, 1e-6 * std::abs(fd_a));
            EXPECT_NEAR(kin.rate_b_derivative(s), fd_b, 1e-6 * std::abs(fd_b));
            const double w = kin.conserved(s);
            const double hw = 1e-6 * w;
            const double fd_phi = (kin.phi(w + hw) - kin.phi(w - hw)) / (2 * hw);
            EXPECT_NEAR(kin.phi_derivative(w), fd_phi, 1e-6 * std::abs(fd_phi));
        }
    }
}

TEST(Kinetics, PhiExtendedIsOdd) {
    const Kinetics kin = kDimer.kinetics();
    for (double w : {1e-6, 0.01, 0.3, 2.0}) {
        EXPECT_DOUBLE_EQ(kin.phi_extended(-w), -kin.phi_extended(w));
        EXPECT_DOUBLE_EQ(kin.phi_extended(w), kin.phi(w));
    }
}

TEST(Kinetics, RateFactorAccessors) {
    const Kinetics kin = kDimer.kinetics().with_rate_factor(3.0);
    EXPECT_DOUBLE_EQ(kin.alpha_hat(), 6.0);
    EXPECT_DOUBLE_EQ(kin.beta_hat(), 3.0);
    EXPECT_THROW(kDimer.kinetics().with_rate_factor(-1.0), InvalidArgument);
}

TEST(Kinetics, ValidateFlagsBrokenRateLaw) {
    RateLaw bad = RateLaw::power(1.0, 2.0);
    bad.derivative = [](double s) { return 3.0 * s; };
    const Kinetics kin(1.0, 1.0, 1.0, 1.0, 1.0, bad, RateLaw::power(1.0, 1.0));
    EXPECT_FALSE(kin.validate().empty());
}

TEST(ClosedForm, ReferenceFormulas) {
    const double lead = 2.0 * kDimer.k1 / kDimer.k2;
    const double expected_h0 = 0.5 * (lead - 2.0 * kDimer.k2 / kDimer.k1);
    EXPECT_NEAR(closed_form_h(kDimer, 0.0), expected_h0, 1e-12 * expected_h0);
    EXPECT_EQ(closed_form_g(kDimer, 0.0), 0.0);
    EXPECT_THROW(closed_form_h(kDimer, -1.0), DomainError);
}

TEST(ClosedForm, DiscrepancyReport) {
    const auto samples = log_samples(1e-6, 1.0, 30);
    const auto d = closed_form_discrepancy(kDimer, samples);
    EXPECT_EQ(d.samples, samples.size());
    // Measured: the closed-form h does not invert H, it is offset by about h(0).
    EXPECT_GT(d.max_h_vs_inverse, 1.0);
    EXPECT_TRUE(std::isfinite(d.max_gh_vs_v));
    EXPECT_TRUE(std::isfinite(d.max_gh_vs_phi));
    // g evaluated at the true H⁻¹ is exactly φ.
    EXPECT_LT(d.max_g_of_inverse_vs_phi, 1e-18);
}
