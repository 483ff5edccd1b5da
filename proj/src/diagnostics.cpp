#include "fastrd/diagnostics.hpp"

#include "fastrd/errors.hpp"
#include "fastrd/quadrature.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>

namespace fastrd {

namespace {

constexpr double kEntropyQuadratureTol = 1e-10;

void check_state(const Mesh& mesh, const State& s, const char* what) {
    if (s.u.size() != mesh.num_cells() || s.v.size() != mesh.num_cells()) {
        throw InvalidArgument(std::string(what) + ": state size does not match mesh");
    }
}

/// σ r'(σ)/r(σ), continuously extended where r underflows.
double log_slope(const RateLaw& law, double sigma, double scale) {
    const double r = law.value(sigma);
    if (r > 0.0 && std::isfinite(r)) {
        const double q = sigma * law.derivative(sigma) / r;
        if (std::isfinite(q)) {
            return q;
        }
    }
    const double s = scale * 1e-30;
    return s * law.derivative(s) / law.value(s);
}

double entropy(const RateLaw& law, double coeff, double ref, double s) {
    if (!(s >= 0.0)) {
        throw DomainError("entropy requires a nonnegative state");
    }
    const double r_ref = law.value(ref);
    double log_term = 0.0;
    if (s > 0.0) {
        const double r = law.value(s);
        if (r > 0.0) {
            log_term = s * std::log(r / r_ref);
        }
    }
    const double integral = integrate_adaptive(
        [&](double sigma) { return log_slope(law, sigma, ref); }, s, ref, kEntropyQuadratureTol);
    return (log_term + integral) / coeff;
}

std::string num(double x) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

} // namespace

EquilibriumPair default_reference(const Mesh& mesh, const Kinetics& kin, const State& initial) {
    check_state(mesh, initial, "default_reference");
    const double a = mesh.integrate(initial.u) / mesh.total_measure();
    if (!(a > 0.0)) {
        throw InvalidArgument("default_reference: mean of u vanishes; supply a reference pair");
    }
    return {a, kin.eta(a)};
}

double entropy_a(const Kinetics& kin, const EquilibriumPair& ref, double s) {
    return entropy(kin.law_a(), kin.alpha(), ref.a, s);
}

double entropy_b(const Kinetics& kin, const EquilibriumPair& ref, double s) {
    return entropy(kin.law_b(), kin.beta(), ref.b, s);
}

double lyapunov(const Mesh& mesh, const Kinetics& kin, const State& state,
                const EquilibriumPair& ref) {
    check_state(mesh, state, "lyapunov");
    if (!(ref.a > 0.0) || !(ref.b > 0.0)) {
        throw InvalidArgument("lyapunov: reference pair must be positive");
    }
    const double ra = kin.rate_a(ref.a);
    const double rb = kin.rate_b(ref.b);
    if (std::abs(ra - rb) > 1e-10 * std::max(std::abs(ra), std::abs(rb))) {
        throw InvalidArgument("lyapunov: reference pair is not in chemical equilibrium (r_A(a) = " +
                              num(ra) + ", r_B(b) = " + num(rb) + ")");
    }
    double total = 0.0;
    for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
        total += mesh.cell(k).measure *
                 (entropy_a(kin, ref, state.u[k]) + entropy_b(kin, ref, state.v[k]));
    }
    return total;
}

double gradient_increment(const Mesh& mesh, std::span<const double> field) {
    double s = 0.0;
    for (const auto& f : mesh.faces()) {
        const double d = field[f.right] - field[f.left];
        s += f.transmissibility * d * d;
    }
    return s;
}

double reaction_increment(const Mesh& mesh, const Kinetics& kin, const State& state) {
    double s = 0.0;
    for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
        const double d = kin.rate_a(state.u[k]) - kin.rate_b(state.v[k]);
        s += mesh.cell(k).measure * d * d;
    }
    return s;
}

namespace {

void require_full(const TimeGrid& grid, std::span<const State> states, const char* what) {
    if (states.size() != grid.num_levels()) {
        throw InvalidArgument(std::string(what) + ": trajectory must hold every level of the grid");
    }
}

} // namespace

GradientEnergy gradient_energy(const Mesh& mesh, const TimeGrid& grid,
                               std::span<const State> states) {
    require_full(grid, states, "gradient_energy");
    GradientEnergy e;
    for (std::size_t n = 0; n < grid.num_steps(); ++n) {
        check_state(mesh, states[n + 1], "gradient_energy");
        e.u += grid.step(n) * gradient_increment(mesh, states[n + 1].u);
        e.v += grid.step(n) * gradient_increment(mesh, states[n + 1].v);
    }
    return e;
}

double reaction_defect(const Mesh& mesh, const TimeGrid& grid, const Kinetics& kin,
                       std::span<const State> states) {
    require_full(grid, states, "reaction_defect");
    if (kin.rate_factor() == 0.0) {
        return 0.0;
    }
    double r = 0.0;
    for (std::size_t n = 0; n < grid.num_steps(); ++n) {
        check_state(mesh, states[n + 1], "reaction_defect");
        r += grid.step(n) * reaction_increment(mesh, kin, states[n + 1]);
    }
    return kin.rate_factor() * r;
}

double l1_distance(const Mesh& mesh, const Kinetics& kin, const State& s1, const State& s2) {
    check_state(mesh, s1, "l1_distance");
    check_state(mesh, s2, "l1_distance");
    const double wa = kin.rate_factor() > 0.0 ? 1.0 / kin.alpha_hat() : 1.0 / kin.alpha();
    const double wb = kin.rate_factor() > 0.0 ? 1.0 / kin.beta_hat() : 1.0 / kin.beta();
    double s = 0.0;
    for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
        s += mesh.cell(k).measure *
             (std::abs(s1.u[k] - s2.u[k]) * wa + std::abs(s1.v[k] - s2.v[k]) * wb);
    }
    return s;
}

LimitComparison compare_to_limit(const Mesh& mesh, const State& state, const WState& wstate,
                                 const Kinetics& kin,
                                 const std::optional<DimerisationConstants>& dimerisation) {
    check_state(mesh, state, "compare_to_limit");
    if (wstate.w.size() != mesh.num_cells()) {
        throw InvalidArgument("compare_to_limit: limit state does not match the mesh");
    }
    if (std::abs(state.time - wstate.time) > 1e-12 * std::max(1.0, std::abs(state.time))) {
        throw InvalidArgument("compare_to_limit: states are at different times (" + num(state.time) +
                              " vs " + num(wstate.time) + ")");
    }
    LimitComparison c;
    c.has_closed_form = dimerisation.has_value();
    for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
        // Solver slack can leave w a hair below zero.
        const double w = std::max(wstate.w[k], 0.0);
        const double u_lim = kin.conserved_inverse(w);
        c.j_u = std::max(c.j_u, std::abs(state.u[k] - u_lim));
        c.j_v = std::max(c.j_v, std::abs(state.v[k] - kin.eta(u_lim)));
        if (dimerisation) {
            const double h = closed_form_h(*dimerisation, w);
            c.j_u_closed_form = std::max(c.j_u_closed_form, std::abs(state.u[k] - h));
            c.j_v_closed_form = std::max(c.j_v_closed_form, std::abs(state.v[k] - closed_form_g(*dimerisation, h)));
        }
    }
    return c;
}

namespace {

/// Piecewise-constant reconstruction support for a 1D mesh: cells sorted by
/// position with their edges.
struct Line {
    std::vector<std::size_t> order;  ///< cell index by position
    std::vector<double> edges;       ///< order.size() + 1 edges

    explicit Line(const Mesh& mesh) {
        order.resize(mesh.num_cells());
        for (std::size_t k = 0; k < order.size(); ++k) {
            order[k] = k;
        }
        std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
            return mesh.cell(i).center[0] < mesh.cell(j).center[0];
        });
        edges.push_back(cell_interval_1d(mesh.cell(order.front()))[0]);
        for (std::size_t k : order) {
            edges.push_back(cell_interval_1d(mesh.cell(k))[1]);
        }
    }

    std::size_t cell_at(double x) const {
        auto it = std::upper_bound(edges.begin(), edges.end(), x);
        std::size_t pos = static_cast<std::size_t>(std::distance(edges.begin(), it));
        pos = std::clamp<std::size_t>(pos, 1, order.size());
        return order[pos - 1];
    }
};

double space_translate(const Line& line, std::span<const double> f, double shift) {
    const double lo = line.edges.front();
    const double hi = line.edges.back() - shift;
    std::vector<double> cuts{lo, hi};
    for (double e : line.edges) {
        if (e > lo && e < hi) cuts.push_back(e);
        if (e - shift > lo && e - shift < hi) cuts.push_back(e - shift);
    }
    std::sort(cuts.begin(), cuts.end());
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double len = cuts[i + 1] - cuts[i];
        if (len <= 0.0) continue;
        const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
        const double d = f[line.cell_at(mid + shift)] - f[line.cell_at(mid)];
        s += len * d * d;
    }
    return s;
}

/// Level whose value the reconstruction takes at time t ∈ (t^(n), t^(n+1)].
std::size_t level_at(const TimeGrid& grid, double t) {
    const auto lv = grid.levels();
    auto it = std::lower_bound(lv.begin(), lv.end(), t);
    std::size_t idx = static_cast<std::size_t>(std::distance(lv.begin(), it));
    return std::clamp<std::size_t>(idx, 1, grid.num_levels() - 1);
}

} // namespace

TranslateTable translate_seminorms(const Mesh& mesh, const TimeGrid& grid, const Kinetics& kin,
                                   std::span<const State> states, std::span<const double> shifts,
                                   std::span<const double> lags) {
    if (mesh.dimension() != 1) {
        throw InvalidArgument("translate_seminorms: 1D meshes only");
    }
    require_full(grid, states, "translate_seminorms");
    const Line line(mesh);
    const double length = line.edges.back() - line.edges.front();
    const std::size_t n = mesh.num_cells();
    std::vector<std::vector<double>> w(states.size(), std::vector<double>(n));
    for (std::size_t l = 0; l < states.size(); ++l) {
        check_state(mesh, states[l], "translate_seminorms");
        for (std::size_t k = 0; k < n; ++k) {
            w[l][k] = states[l].u[k] / kin.alpha() + states[l].v[k] / kin.beta();
        }
    }

    TranslateTable table;
    for (double xi : shifts) {
        const double shift = std::abs(xi);
        if (shift > length) {
            throw InvalidArgument("translate_seminorms: shift " + num(xi) + " exceeds the domain");
        }
        TranslateRow row{xi, 0.0, 0.0, 0.0};
        for (std::size_t s = 0; s < grid.num_steps(); ++s) {
            const double dt = grid.step(s);
            row.space_u += dt * space_translate(line, states[s + 1].u, shift);
            row.space_v += dt * space_translate(line, states[s + 1].v, shift);
            row.space_w += dt * space_translate(line, w[s + 1], shift);
        }
        table.space.push_back(row);
    }

    const double T = grid.final_time();
    for (double tau : lags) {
        if (!(tau >= 0.0) || tau > T) {
            throw InvalidArgument("translate_seminorms: lag " + num(tau) + " outside [0, T]");
        }
        LagRow row{tau, 0.0, 0.0, 0.0};
        if (tau > 0.0) {
            const double end = T - tau;
            std::vector<double> cuts{0.0, end};
            for (double t : grid.levels()) {
                if (t > 0.0 && t < end) cuts.push_back(t);
                if (t - tau > 0.0 && t - tau < end) cuts.push_back(t - tau);
            }
            std::sort(cuts.begin(), cuts.end());
            for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
                const double len = cuts[i + 1] - cuts[i];
                if (len <= 0.0) continue;
                const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
                const std::size_t l0 = level_at(grid, mid);
                const std::size_t l1 = level_at(grid, mid + tau);
                if (l0 == l1) continue;
                double su = 0.0;
                double sv = 0.0;
                double sw = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double m = mesh.cell(k).measure;
                    const double du = states[l1].u[k] - states[l0].u[k];
                    const double dv = states[l1].v[k] - states[l0].v[k];
                    const double dw = w[l1][k] - w[l0][k];
                    su += m * du * du;
                    sv += m * dv * dv;
                    sw += m * dw * dw;
                }
                row.time_u += len * su;
                row.time_v += len * sv;
                row.time_w += len * sw;
            }
        }
        table.time.push_back(row);
    }
    return table;
}

DiagnosticsAccumulator::DiagnosticsAccumulator(const Mesh& mesh, const Kinetics& kin,
                                               EquilibriumPair reference)
    : mesh_(&mesh), kin_(&kin) {
    report_.reference = reference;
}

void DiagnosticsAccumulator::observe(const State& state) {
    check_state(*mesh_, state, "diagnostics");
    LevelDiagnostics d;
    d.level = state.level;
    d.time = state.time;
    d.mass_w = conserved_mass(*mesh_, *kin_, state);
    const auto [umin, umax] = std::minmax_element(state.u.begin(), state.u.end());
    const auto [vmin, vmax] = std::minmax_element(state.v.begin(), state.v.end());
    d.min_u = *umin;
    d.max_u = *umax;
    d.min_v = *vmin;
    d.max_v = *vmax;
    if (report_.reference.a > 0.0) {
        d.lyapunov = lyapunov(*mesh_, *kin_, state, report_.reference);
    }
    if (!report_.levels.empty()) {
        const auto& prev = report_.levels.back();
        const double dt = state.time - prev_time_;
        d.gradient_energy_u = prev.gradient_energy_u + dt * gradient_increment(*mesh_, state.u);
        d.gradient_energy_v = prev.gradient_energy_v + dt * gradient_increment(*mesh_, state.v);
        d.reaction_defect = prev.reaction_defect +
                            kin_->rate_factor() * dt * reaction_increment(*mesh_, *kin_, state);
    }
    prev_time_ = state.time;
    report_.levels.push_back(d);
}

void write_diagnostics_csv(const DiagnosticsReport& report, std::ostream& os) {
    os << "level,t,mass_w,min_u,max_u,min_v,max_v,lyapunov,gradient_energy_u,gradient_energy_v,"
          "reaction_defect\n";
    for (const auto& d : report.levels) {
        os << d.level << ',' << num(d.time) << ',' << num(d.mass_w) << ',' << num(d.min_u) << ','
           << num(d.max_u) << ',' << num(d.min_v) << ',' << num(d.max_v) << ',' << num(d.lyapunov)
           << ',' << num(d.gradient_energy_u) << ',' << num(d.gradient_energy_v) << ','
           << num(d.reaction_defect) << '\n';
    }
}

void write_diagnostics_summary(const DiagnosticsReport& report, std::ostream& os) {
    os << "== diagnostics ==\n";
    if (report.levels.empty()) {
        os << "(no levels)\n";
        return;
    }
    const auto& first = report.levels.front();
    const auto& last = report.levels.back();
    double drift = 0.0;
    double lyap_rise = 0.0;
    for (std::size_t i = 0; i < report.levels.size(); ++i) {
        const auto& d = report.levels[i];
        drift = std::max(drift, std::abs(d.mass_w - first.mass_w) / std::max(std::abs(first.mass_w), 1e-300));
        if (i > 0) {
            lyap_rise = std::max(lyap_rise, d.lyapunov - report.levels[i - 1].lyapunov);
        }
    }
    os << "levels                 " << report.levels.size() << '\n'
       << "final time             " << num(last.time) << '\n'
       << "reference (a, b)       " << num(report.reference.a) << ", " << num(report.reference.b) << '\n'
       << "mass drift (relative)  " << num(drift) << '\n'
       << "u range (final)        [" << num(last.min_u) << ", " << num(last.max_u) << "]\n"
       << "v range (final)        [" << num(last.min_v) << ", " << num(last.max_v) << "]\n"
       << "lyapunov first/last    " << num(first.lyapunov) << " / " << num(last.lyapunov) << '\n'
       << "lyapunov max increase  " << num(lyap_rise) << '\n'
       << "gradient energy u, v   " << num(last.gradient_energy_u) << ", " << num(last.gradient_energy_v) << '\n'
       << "reaction defect        " << num(last.reaction_defect) << '\n';
    if (report.limit_mass_drift) {
        os << "limit mass drift       " << num(*report.limit_mass_drift) << '\n';
    }
    if (report.limit) {
        os << "J_u, J_v               " << num(report.limit->j_u) << ", " << num(report.limit->j_v) << '\n';
        if (report.limit->has_closed_form) {
            os << "J_u, J_v (closed form) " << num(report.limit->j_u_closed_form) << ", "
               << num(report.limit->j_v_closed_form) << '\n';
        }
    }
}

} // namespace fastrd
