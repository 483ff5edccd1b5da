#include "fastrd/errors.hpp"
#include "fastrd/fvscheme.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace fastrd;

namespace {

Kinetics linear(double k = 1.0, double a = 1.0, double b = 1.0) {
    return PowerLawConstants{1.0, 1.0, 1.0, 1.0, 1.0, 1.0, a, b, k}.kinetics();
}

State make_state(std::vector<double> u, std::vector<double> v) {
    State s;
    s.u = std::move(u);
    s.v = std::move(v);
    return s;
}

State random_state(std::size_t n, std::mt19937_64& rng, double hi = 0.5) {
    std::uniform_real_distribution<double> d(0.0, hi);
    State s;
    for (std::size_t i = 0; i < n; ++i) {
        s.u.push_back(d(rng));
        s.v.push_back(d(rng));
    }
    return s;
}

SolverConfig tight() {
    SolverConfig c;
    c.newton_tol = 1e-13;
    return c;
}

} // namespace

TEST(ProjectInitial, Constant) {
    const Mesh mesh = build_uniform_1d(1.0, 7);
    const State s = project_initial(mesh, [](double) { return 0.3; }, [](double) { return 1.2; });
    for (std::size_t k = 0; k < 7; ++k) {
        EXPECT_DOUBLE_EQ(s.u[k], 0.3);
        EXPECT_DOUBLE_EQ(s.v[k], 1.2);
    }
    EXPECT_EQ(s.level, 0u);
    EXPECT_EQ(s.time, 0.0);
}

TEST(ProjectInitial, LinearMidpointIsExact) {
    const Mesh mesh = build_uniform_1d(1.0, 9);
    const State s = project_initial(mesh, [](double x) { return x; }, [](double) { return 0.0; });
    for (std::size_t k = 0; k < 9; ++k) {
        EXPECT_NEAR(s.u[k], mesh.cell(k).center[0], 1e-15);
    }
}

TEST(ProjectInitial, HigherOrderQuadrature) {
    const Mesh mesh = build_uniform_1d(1.0, 4);
    const State s = project_initial(mesh, [](double x) { return x * x * x; }, [](double) { return 0.0; }, 3);
    for (std::size_t k = 0; k < 4; ++k) {
        const double lo = 0.25 * static_cast<double>(k);
        const double hi = lo + 0.25;
        EXPECT_NEAR(s.u[k], (std::pow(hi, 4) - std::pow(lo, 4)) / 4.0 / 0.25, 1e-15);
    }
}

TEST(ProjectInitial, DimerisationLeftCellsVanish) {
    const Mesh mesh = build_uniform_1d(0.1, 50);
    const auto u0 = [](double x) {
        return x <= 0.03 ? 0.0 : 0.5 * std::sin(50.0 * M_PI / 7.0 * (x - 0.03));
    };
    const State s = project_initial(mesh, u0, [](double) { return 0.0; }, 4);
    for (std::size_t k = 0; k < 15; ++k) {
        EXPECT_EQ(s.u[k], 0.0) << k;
    }
    EXPECT_GT(s.u[15], 0.0);
}

TEST(ProjectInitial, RejectsNegativeData) {
    const Mesh mesh = build_uniform_1d(1.0, 4);
    EXPECT_THROW(project_initial(mesh, [](double x) { return x - 0.5; }, [](double) { return 0.0; }),
                 InvalidArgument);
}

TEST(Residual, EquilibriumStateIsStationary) {
    const Mesh mesh = build_uniform_1d(0.1, 5);
    const Kinetics kin = DimerisationConstants{}.kinetics();
    const double u = 0.2;
    const State s = make_state(std::vector<double>(5, u), std::vector<double>(5, kin.eta(u)));
    const PairField r = residual(mesh, kin, 10.0, s, s);
    for (std::size_t k = 0; k < 5; ++k) {
        EXPECT_NEAR(r.u[k], 0.0, 1e-18);
        EXPECT_NEAR(r.v[k], 0.0, 1e-18);
    }
}

TEST(Residual, SingleCellNoReaction) {
    const Mesh mesh = build_uniform_1d(2.0, 1);
    const Kinetics kin = linear(0.0);
    const PairField r = residual(mesh, kin, 1.0, make_state({1.0}, {0.5}), make_state({1.5}, {0.5}));
    EXPECT_DOUBLE_EQ(r.u[0], 2.0 * 0.5);
    EXPECT_DOUBLE_EQ(r.v[0], 0.0);
}

TEST(Residual, TwoCellFlux) {
    const Mesh mesh = build_uniform_1d(2.0, 2);  // m = 1, T = 1
    const Kinetics kin = linear(0.0);
    const State s = make_state({0.0, 1.0}, {0.0, 0.0});
    const PairField r = residual(mesh, kin, 1.0, s, s);
    EXPECT_DOUBLE_EQ(r.u[0], -1.0);
    EXPECT_DOUBLE_EQ(r.u[1], 1.0);
}

TEST(Step, SingleCellLinearOracle) {
    const Mesh mesh = build_uniform_1d(1.0, 1);
    StepStats stats;
    const State next = step(mesh, linear(), 1.0, make_state({1.0}, {0.0}), tight(), &stats);
    EXPECT_NEAR(next.u[0], 2.0 / 3.0, 1e-12);
    EXPECT_NEAR(next.v[0], 1.0 / 3.0, 1e-12);
    EXPECT_EQ(next.level, 1u);
    EXPECT_DOUBLE_EQ(next.time, 1.0);
    EXPECT_GE(stats.newton_iterations, 1);
}

TEST(Step, EquilibriumIsFixedPoint) {
    const Mesh mesh = build_uniform_1d(0.1, 10);
    const Kinetics kin = DimerisationConstants{}.kinetics();
    const State s = make_state(std::vector<double>(10, 0.1), std::vector<double>(10, kin.eta(0.1)));
    const State next = step(mesh, kin, 1e3, s, tight());
    for (std::size_t k = 0; k < 10; ++k) {
        EXPECT_NEAR(next.u[k], 0.1, 1e-12);
        EXPECT_NEAR(next.v[k], kin.eta(0.1), 1e-12);
    }
}

class LinearSolvers : public ::testing::TestWithParam<LinearSolverKind> {};

TEST_P(LinearSolvers, ConservationAndAgreement) {
    const Mesh mesh = build_uniform_1d(0.1, 20);
    const Kinetics kin = DimerisationConstants{}.kinetics();
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        const State prev = random_state(mesh.num_cells(), rng);
        SolverConfig cfg = tight();
        cfg.linear_solver = GetParam();
        const State next = step(mesh, kin, 1e3, prev, cfg);
        const double m0 = conserved_mass(mesh, kin, prev);
        EXPECT_NEAR(conserved_mass(mesh, kin, next), m0, 1e-12 * m0);
        const State ref = step(mesh, kin, 1e3, prev, tight());
        for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
            EXPECT_NEAR(next.u[k], ref.u[k], 1e-9);
            EXPECT_NEAR(next.v[k], ref.v[k], 1e-9);
        }
    }
}

INSTANTIATE_TEST_SUITE_P(All, LinearSolvers,
                         ::testing::Values(LinearSolverKind::dense_direct,
                                           LinearSolverKind::sparse_direct,
                                           LinearSolverKind::iterative));

TEST(Step, StiffStepStaysBounded) {
    const Mesh mesh = build_uniform_1d(0.1, 16);
    const Kinetics kin = DimerisationConstants{}.kinetics().with_rate_factor(1e3);
    std::mt19937_64 rng(5);
    const State prev = random_state(16, rng);
    double U = 0.0;
    double V = 0.0;
    for (std::size_t k = 0; k < 16; ++k) {
        U = std::max(U, prev.u[k]);
        V = std::max(V, prev.v[k]);
    }
    const State next = step(mesh, kin, 1e6, prev, tight());
    for (std::size_t k = 0; k < 16; ++k) {
        EXPECT_GE(next.u[k], -1e-12);
        EXPECT_GE(next.v[k], -1e-12);
        EXPECT_LE(next.u[k], U + 2.0 * V + 1e-12);
        EXPECT_LE(next.v[k], V + 0.5 * U + 1e-12);
    }
}

TEST(Integrate, ZeroSteps) {
    const Mesh mesh = build_uniform_1d(1.0, 3);
    const State s = make_state({1, 2, 3}, {0, 0, 0});
    const Trajectory t = integrate(mesh, linear(), TimeGrid({0.0}), s, tight());
    ASSERT_EQ(t.states.size(), 1u);
    EXPECT_EQ(t.states[0].u, s.u);
    EXPECT_TRUE(t.stats.empty());
}

TEST(Integrate, ConstantDataWithoutReaction) {
    const Mesh mesh = build_uniform_1d(1.0, 6);
    const State s = make_state(std::vector<double>(6, 0.4), std::vector<double>(6, 0.9));
    const Trajectory t = integrate(mesh, linear(0.0), build_time_grid_uniform(1.0, 5), s, tight());
    ASSERT_EQ(t.states.size(), 6u);
    for (const auto& st : t.states) {
        for (std::size_t k = 0; k < 6; ++k) {
            EXPECT_NEAR(st.u[k], 0.4, 1e-14);
            EXPECT_NEAR(st.v[k], 0.9, 1e-14);
        }
    }
}

TEST(Integrate, OutputLevelsAndObserver) {
    const Mesh mesh = build_uniform_1d(1.0, 4);
    const State s = make_state({1, 0, 0, 0}, {0, 0, 0, 1});
    std::vector<std::size_t> seen;
    const Trajectory t = integrate(mesh, linear(), build_time_grid_uniform(1.0, 10), s, tight(), {0, 4},
                                   [&](const State& st) { seen.push_back(st.level); });
    ASSERT_EQ(t.states.size(), 3u);
    EXPECT_EQ(t.states[0].level, 0u);
    EXPECT_EQ(t.states[1].level, 4u);
    EXPECT_EQ(t.states[2].level, 10u);
    EXPECT_EQ(t.stats.size(), 10u);
    ASSERT_EQ(seen.size(), 11u);
    for (std::size_t i = 0; i < seen.size(); ++i) EXPECT_EQ(seen[i], i);
}

TEST(Integrate, FailureReportsLevel) {
    const Mesh mesh = build_uniform_1d(0.1, 8);
    const Kinetics kin = DimerisationConstants{}.kinetics();
    SolverConfig cfg;
    cfg.newton_max_iter = 1;
    cfg.fallback_sweeps = 1;
    cfg.newton_tol = 1e-15;
    std::mt19937_64 rng(3);
    try {
        integrate(mesh, kin, build_time_grid_uniform(1e6, 3), random_state(8, rng), cfg);
        FAIL() << "expected a NumericalError";
    } catch (const NumericalError& e) {
        EXPECT_NE(std::string(e.what()).find("level 1:"), std::string::npos) << e.what();
        EXPECT_FALSE(e.trace().empty());
    }
}

TEST(Property, ComparisonAndContraction) {
    const Mesh mesh = build_uniform_1d(0.1, 12);
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> bump(0.0, 0.2);
    for (double k : {0.0, 1.0, 1e3}) {
        const Kinetics kin = DimerisationConstants{}.kinetics().with_rate_factor(k);
        for (int trial = 0; trial < 5; ++trial) {
            State lo = random_state(12, rng);
            State hi = lo;
            for (std::size_t i = 0; i < 12; ++i) {
                hi.u[i] += bump(rng);
                hi.v[i] += bump(rng);
            }
            const TimeGrid grid = build_time_grid_uniform(1e5, 10);
            const auto a = integrate(mesh, kin, grid, lo, tight());
            const auto b = integrate(mesh, kin, grid, hi, tight());
            for (std::size_t n = 0; n < a.states.size(); ++n) {
                for (std::size_t i = 0; i < 12; ++i) {
                    EXPECT_LE(a.states[n].u[i], b.states[n].u[i] + 1e-12);
                    EXPECT_LE(a.states[n].v[i], b.states[n].v[i] + 1e-12);
                }
            }
        }
    }
}

TEST(Property, ExactConservationAlongTrajectory) {
    const Mesh mesh = build_uniform_1d(0.1, 30);
    const Kinetics kin = DimerisationConstants{}.kinetics();
    std::mt19937_64 rng(9);
    const State s = random_state(30, rng);
    const double m0 = conserved_mass(mesh, kin, s);
    const auto traj = integrate(mesh, kin, build_time_grid_ramped(1e-4, 1.5, 1e7), s, tight());
    for (const auto& st : traj.states) {
        EXPECT_NEAR(conserved_mass(mesh, kin, st), m0, 1e-12 * m0);
    }
}

TEST(OdeUpperSolution, Equilibrium) {
    const Kinetics kin = DimerisationConstants{}.kinetics();
    const auto seq = ode_upper_solution(kin, build_time_grid_uniform(1.0, 5), 0.3, kin.eta(0.3));
    for (const auto& [u, v] : seq) {
        EXPECT_NEAR(u, 0.3, 1e-12);
        EXPECT_NEAR(v, kin.eta(0.3), 1e-10);
    }
}

TEST(OdeUpperSolution, LinearOracleAndConservation) {
    const auto seq = ode_upper_solution(linear(), build_time_grid_uniform(5.0, 5), 1.0, 0.0);
    ASSERT_EQ(seq.size(), 6u);
    EXPECT_NEAR(seq[1].first, 2.0 / 3.0, 1e-12);
    EXPECT_NEAR(seq[1].second, 1.0 / 3.0, 1e-12);
    for (const auto& [u, v] : seq) EXPECT_NEAR(u + v, 1.0, 1e-12);
}

TEST(OdeUpperSolution, DominatesScheme) {
    const Mesh mesh = build_uniform_1d(0.1, 10);
    const Kinetics kin = DimerisationConstants{}.kinetics().with_rate_factor(10.0);
    std::mt19937_64 rng(1);
    const State s = random_state(10, rng);
    double U = 0.0;
    double V = 0.0;
    for (std::size_t k = 0; k < 10; ++k) {
        U = std::max(U, s.u[k]);
        V = std::max(V, s.v[k]);
    }
    const TimeGrid grid = build_time_grid_ramped(1e-2, 1.3, 1e5);
    const auto traj = integrate(mesh, kin, grid, s, tight());
    const auto upper = ode_upper_solution(kin, grid, U, V);
    ASSERT_EQ(traj.states.size(), upper.size());
    for (std::size_t n = 0; n < upper.size(); ++n) {
        for (std::size_t k = 0; k < 10; ++k) {
            EXPECT_LE(traj.states[n].u[k], upper[n].first + 1e-12);
            EXPECT_LE(traj.states[n].v[k], upper[n].second + 1e-12);
        }
    }
}
