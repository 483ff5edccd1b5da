// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "fastrd/diagnostics.hpp"
#include "fastrd/experiment.hpp"
#include "fastrd/fvscheme.hpp"
#include "fastrd/kinetics.hpp"
#include "fastrd/limit.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

using namespace fastrd;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& title, const std::string& detail) {
    std::printf("criterion %d: %s  %s (%s)\n", id, ok ? "PASS" : "FAIL", title.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), f, a);
    return buf;
}

struct Envelope {
    double U = 0.0;
    double V = 0.0;
    double alpha = 1.0;
    double beta = 1.0;
    double worst = 0.0;  ///< largest violation seen

    void check(double u, double v) {
        worst = std::max({worst, -u, -v, u - (U + alpha / beta * V), v - (V + beta / alpha * U)});
    }
};

double max_of(const std::vector<double>& x) { return *std::max_element(x.begin(), x.end()); }

/// Relative L² distance on a common coarse mesh; `fine` is restricted by averaging.
double restricted_error(const std::vector<double>& coarse, const std::vector<double>& fine) {
    const std::size_t ratio = fine.size() / coarse.size();
    double s = 0.0;
    for (std::size_t k = 0; k < coarse.size(); ++k) {
        double avg = 0.0;
        for (std::size_t j = 0; j < ratio; ++j) avg += fine[k * ratio + j];
        avg /= static_cast<double>(ratio);
        s += (coarse[k] - avg) * (coarse[k] - avg);
    }
    return std::sqrt(s / static_cast<double>(coarse.size()));
}

} // namespace

int main() {
    const auto started = std::chrono::steady_clock::now();
    const SolverConfig solver;
    const double slack = 10.0 * solver.newton_tol;
    Envelope envelope;
    envelope.alpha = 2.0;
    envelope.beta = 1.0;

    // Dimerisation run at T = 1e5 s, every level kept; feeds criteria 1, 3, 4, 6.
    ExperimentConfig short_cfg = preset_config("dimerisation-short");
    short_cfg.output.every = 1;
    const RunResult short_run = run_experiment(short_cfg, 1.0);
    const auto& levels = short_run.report.levels;
    const double U0 = max_of(short_run.trajectory.states.front().u);
    const double V0 = max_of(short_run.trajectory.states.front().v);

    // 1. Conservation.
    {
        const double m0 = levels.front().mass_w;
        double drift = 0.0;
        for (const auto& l : levels) drift = std::max(drift, std::abs(l.mass_w - m0) / m0);
        const double limit_drift = short_run.report.limit_mass_drift.value_or(1.0);
        report(1, drift < 1e-10 && limit_drift < 1e-10, "conservation of sum m_K w_K",
               "coupled drift " + fmt("%.3e", drift) + ", limit drift " + fmt("%.3e", limit_drift) + " over " +
                   std::to_string(levels.size()) + " levels");
    }

    // 2 and 3. Randomised comparison / contraction trials.
    {
        const Mesh mesh = build_uniform_1d(0.1, 16);
        const TimeGrid grid = build_time_grid_uniform(5e5, 50);
        std::mt19937_64 rng(20240601);
        std::uniform_real_distribution<double> base(0.0, 0.5);
        std::uniform_real_distribution<double> bump(0.0, 0.25);
        double worst_order = 0.0;
        double worst_l1 = 0.0;
        int trials = 0;
        Envelope env;
        env.alpha = 2.0;
        env.beta = 1.0;
        for (double k : {0.0, 1.0, 1e3}) {
            const Kinetics kin = DimerisationConstants{}.kinetics().with_rate_factor(k);
            for (int t = 0; t < 100; ++t) {
                State lo;
                State hi;
                for (std::size_t i = 0; i < 16; ++i) {
                    lo.u.push_back(base(rng));
                    lo.v.push_back(base(rng));
                    hi.u.push_back(lo.u.back() + bump(rng));
                    hi.v.push_back(lo.v.back() + bump(rng));
                }
                const auto a = integrate(mesh, kin, grid, lo, solver);
                const auto b = integrate(mesh, kin, grid, hi, solver);
                for (const auto* traj : {&a, &b}) {
                    env.U = max_of(traj->states.front().u);
                    env.V = max_of(traj->states.front().v);
                    for (const auto& s : traj->states) {
                        for (std::size_t i = 0; i < 16; ++i) env.check(s.u[i], s.v[i]);
                    }
                }
                double prev = l1_distance(mesh, kin, a.states[0], b.states[0]);
                for (std::size_t n = 0; n < a.states.size(); ++n) {
                    for (std::size_t i = 0; i < 16; ++i) {
                        worst_order = std::max({worst_order, a.states[n].u[i] - b.states[n].u[i],
                                                a.states[n].v[i] - b.states[n].v[i]});
                    }
                    const double cur = l1_distance(mesh, kin, a.states[n], b.states[n]);
                    worst_l1 = std::max(worst_l1, cur - prev);
                    prev = cur;
                }
                ++trials;
            }
        }
        report(2, worst_order <= slack && worst_l1 <= slack, "comparison principle and L1 contraction",
               std::to_string(trials) + " paired trials, worst ordering violation " + fmt("%.3e", worst_order) +
                   ", worst l1 increase " + fmt("%.3e", worst_l1));

        envelope.U = U0;
        envelope.V = V0;
        for (const auto& s : short_run.trajectory.states) {
            for (std::size_t i = 0; i < s.u.size(); ++i) envelope.check(s.u[i], s.v[i]);
        }
        const double worst = std::max(envelope.worst, env.worst);
        report(3, worst <= slack, "L-infinity envelope",
               "worst excursion " + fmt("%.3e", worst) + " in the dimerisation run and all trials");
    }

    // 4. Lyapunov decay.
    {
        const double bound = slack * static_cast<double>(short_run.mesh.num_cells());
        double worst = -1e300;
        for (std::size_t n = 1; n < levels.size(); ++n) {
            worst = std::max(worst, levels[n].lyapunov - levels[n - 1].lyapunov);
        }
        report(4, worst <= bound, "Lyapunov functional nonincreasing",
               "largest per-step change " + fmt("%.3e", worst) + ", allowed " + fmt("%.1e", bound) +
                   ", first " + fmt("%.6g", levels.front().lyapunov) + ", last " +
                   fmt("%.6g", levels.back().lyapunov));
    }

    // 5. k-uniform estimates over the table sweep at T = 1e11 s.
    const auto rows = run_sweep(preset_config("dimerisation-sweep"));
    const auto& first = rows.front();
    {
        double max_ratio_grad = 0.0;
        double max_ratio_defect = 0.0;
        std::string table;
        for (const auto& r : rows) {
            max_ratio_grad = std::max({max_ratio_grad, r.gradient.u / first.gradient.u, r.gradient.v / first.gradient.v});
            max_ratio_defect = std::max(max_ratio_defect, r.reaction_defect / first.reaction_defect);
            char line[200];
            std::snprintf(line, sizeof(line), "    k %8.1e  J_u %10.3e  J_v %10.3e  E_u %10.4e  E_v %10.4e  R %10.4e\n",
                          r.k, r.limit.j_u, r.limit.j_v, r.gradient.u, r.gradient.v, r.reaction_defect);
            table += line;
        }
        std::printf("sweep at T = 1e11 s:\n%s", table.c_str());
        report(5, max_ratio_grad < 3.0 && max_ratio_defect < 3.0,
               "gradient energy and reaction defect below 3x their k = 1e-7 values",
               "max gradient ratio " + fmt("%.3f", max_ratio_grad) + ", max reaction-defect ratio " +
                   fmt("%.3f", max_ratio_defect));
    }

    // 6. Quantitative fast-reaction limit at T = 1e5 s.
    {
        const auto& lim = *short_run.report.limit;
        const bool ok = lim.j_u > 4.74e-3 / 3 && lim.j_u < 4.74e-3 * 3 && lim.j_v > 4.032e-3 / 3 &&
                        lim.j_v < 4.032e-3 * 3;
        report(6, ok, "J at T = 1e5 s within a factor 3 of 4.74e-3 / 4.032e-3",
               "J_u " + fmt("%.4e", lim.j_u) + ", J_v " + fmt("%.4e", lim.j_v));
    }

    // 7. Qualitative fast-reaction limit over the sweep.
    {
        const auto& last = rows.back();
        const double drop_u = std::log10(first.limit.j_u / std::max(last.limit.j_u, 1e-300));
        const double drop_v = std::log10(first.limit.j_v / std::max(last.limit.j_v, 1e-300));
        const bool ok = drop_u >= 8.0 && drop_v >= 8.0 && last.limit.j_u < 1e-10 && last.limit.j_v < 1e-10;
        report(7, ok, "J decays by at least 8 decades across the sweep",
               "decades u " + fmt("%.2f", drop_u) + ", v " + fmt("%.2f", drop_v) + "; largest k J_u " +
                   fmt("%.3e", last.limit.j_u) + ", J_v " + fmt("%.3e", last.limit.j_v));
    }

    // 8. Scheme order for pure diffusion.
    {
        const Kinetics kin = PowerLawConstants{1, 1, 1, 1, 1, 1, 1.0, 1.0, 0.0}.kinetics();
        SolverConfig cfg;
        cfg.newton_tol = 1e-14;
        const auto u0 = [](double x) { return 1.0 + std::cos(M_PI * x); };
        const auto v0 = [](double) { return 0.0; };
        auto final_u = [&](std::size_t cells, std::size_t steps) {
            const Mesh mesh = build_uniform_1d(1.0, cells);
            const auto traj = integrate(mesh, kin, build_time_grid_uniform(0.1, steps),
                                        project_initial(mesh, u0, v0, 4), cfg);
            return traj.states.back().u;
        };

        const std::vector<std::size_t> meshes{10, 20, 40, 80};
        const auto ref_space = final_u(1280, 100);
        std::vector<double> err_space;
        for (std::size_t n : meshes) err_space.push_back(restricted_error(final_u(n, 100), ref_space));
        std::vector<double> order_space;
        for (std::size_t i = 1; i < err_space.size(); ++i) order_space.push_back(std::log2(err_space[i - 1] / err_space[i]));

        const std::vector<std::size_t> steps{10, 20, 40, 80};
        const auto ref_time = final_u(40, 10240);
        std::vector<double> err_time;
        for (std::size_t n : steps) err_time.push_back(restricted_error(final_u(40, n), ref_time));
        std::vector<double> order_time;
        for (std::size_t i = 1; i < err_time.size(); ++i) order_time.push_back(std::log2(err_time[i - 1] / err_time[i]));

        bool ok = true;
        std::string detail = "space";
        for (double p : order_space) {
            ok = ok && std::abs(p - 2.0) <= 0.2;
            detail += fmt(" %.3f", p);
        }
        detail += ", time";
        for (double p : order_time) {
            ok = ok && std::abs(p - 1.0) <= 0.2;
            detail += fmt(" %.3f", p);
        }
        report(8, ok, "Richardson orders 2 in space, 1 in time", detail);
    }

    // 9. Kinetics oracles.
    {
        const DimerisationConstants c;
        const Kinetics kin = c.kinetics();
        const double ratio = c.k1 / c.k2;
        double worst_round = 0.0;
        double worst_eq = 0.0;
        double worst_quad = 0.0;
        std::vector<double> samples;
        for (int i = 0; i <= 200; ++i) samples.push_back(1e-9 * std::pow(1e11, i / 200.0));
        for (double w : samples) {
            const double u = kin.conserved_inverse(w);
            worst_round = std::max(worst_round, std::abs(kin.conserved(u) - w) / (1.0 + w));
            worst_eq = std::max(worst_eq, std::abs(kin.rate_a(u) - kin.rate_b(kin.v_from_w(w))) / (1.0 + kin.rate_a(u)));
            const double quad = (-0.5 + std::sqrt(0.25 + 4.0 * ratio * w)) / (2.0 * ratio);
            worst_quad = std::max(worst_quad, std::abs(u - quad) / (1.0 + quad));
        }
        const auto d = closed_form_discrepancy(c, samples);
        std::printf("closed-form discrepancy over %zu samples: max|h - H^-1| %.4e (at w = %.3e), "
                    "max|g(h) - v| %.4e, max|g(h) - phi| %.4e, max|g(H^-1) - phi| %.4e\n",
                    d.samples, d.max_h_vs_inverse, d.y_at_max_h, d.max_gh_vs_v, d.max_gh_vs_phi,
                    d.max_g_of_inverse_vs_phi);
        const bool ok = worst_round <= 1e-10 && worst_eq <= 1e-10 && worst_quad <= 1e-10 && d.samples == samples.size();
        report(9, ok, "kinetics oracles agree to 1e-10 and discrepancy report generated",
               "round trip " + fmt("%.2e", worst_round) + ", equilibrium " + fmt("%.2e", worst_eq) +
                   ", quadratic " + fmt("%.2e", worst_quad));
    }

    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    std::printf("%d criterion failure(s), %.1f s\n", failures, secs);
    return failures == 0 ? 0 : 1;
}
