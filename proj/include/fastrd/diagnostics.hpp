#pragma once

#include "fastrd/fvscheme.hpp"
#include "fastrd/limit.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace fastrd {

/// Equilibrium pair (a, b) with r_A(a) = r_B(b), the reference point of
/// the Lyapunov functional.
struct EquilibriumPair {
    double a = 0.0;
    double b = 0.0;
};

/// a = measure-weighted mean of u, b = η(a).
EquilibriumPair default_reference(const Mesh& mesh, const Kinetics& kin, const State& initial);

/// V_A(s) = (1/α)(s·ln(r_A(s)/r_A(a)) + ∫_s^a σ r_A'(σ)/r_A(σ) dσ), continuous at 0.
double entropy_a(const Kinetics& kin, const EquilibriumPair& ref, double s);
double entropy_b(const Kinetics& kin, const EquilibriumPair& ref, double s);

/// Λ = Σ_K m_K (V_A(u_K) + V_B(v_K)).
double lyapunov(const Mesh& mesh, const Kinetics& kin, const State& state,
                const EquilibriumPair& ref);

struct GradientEnergy {
    double u = 0.0;
    double v = 0.0;
};

/// Σ_n t_δ^(n) Σ_{(K,L)} T_{K|L}(f_L^(n+1) − f_K^(n+1))² for f = u, v, each
/// interior face counted once. `states` must hold every level of `grid`.
GradientEnergy gradient_energy(const Mesh& mesh, const TimeGrid& grid,
                               std::span<const State> states);

/// k·Σ_n t_δ^(n) Σ_K m_K (r_A(u_K^(n+1)) − r_B(v_K^(n+1)))².
double reaction_defect(const Mesh& mesh, const TimeGrid& grid, const Kinetics& kin,
                       std::span<const State> states);

/// Σ_K m_K (|u1 − u2|/α̂ + |v1 − v2|/β̂). For k = 0 the weights fall back
/// to 1/α and 1/β.
double l1_distance(const Mesh& mesh, const Kinetics& kin, const State& s1, const State& s2);

/// Per-step summands of gradient_energy / reaction_defect (index n is the
/// contribution of step n -> n+1).
double gradient_increment(const Mesh& mesh, std::span<const double> field);
double reaction_increment(const Mesh& mesh, const Kinetics& kin, const State& state);

struct LimitComparison {
    double j_u = 0.0;          ///< max_K |u_K − H⁻¹(w_K)|
    double j_v = 0.0;          ///< max_K |v_K − η(H⁻¹(w_K))|
    double j_u_closed_form = 0.0;  ///< same with closed_form_h
    double j_v_closed_form = 0.0;  ///< same with closed_form_g∘closed_form_h
    bool has_closed_form = false;
};

/// Final-time comparison of the coupled system against the limit problem. When
/// `dimerisation` is given, also reports the closed-form variant.
LimitComparison compare_to_limit(const Mesh& mesh, const State& state, const WState& wstate,
                                 const Kinetics& kin,
                                 const std::optional<DimerisationConstants>& dimerisation = {});

struct TranslateRow {
    double shift = 0.0;
    double space_u = 0.0;
    double space_v = 0.0;
    double space_w = 0.0;
};

struct LagRow {
    double lag = 0.0;
    double time_u = 0.0;
    double time_v = 0.0;
    double time_w = 0.0;
};

struct TranslateTable {
    std::vector<TranslateRow> space;
    std::vector<LagRow> time;
};

/// Discrete L² space/time translate seminorms of the piecewise-constant
/// reconstruction f(x, t) = f_K^(n+1) on K × (t^(n), t^(n+1)]:
///   ∫_0^T ∫_{x, x+ξ ∈ Ω} (f(x+ξ, t) − f(x, t))² dx dt
///   ∫_0^{T−τ} ∫_Ω (f(x, t+τ) − f(x, t))² dx dt
/// for f = u, v, w. 1D only; every level of `grid` must be present.
TranslateTable translate_seminorms(const Mesh& mesh, const TimeGrid& grid, const Kinetics& kin,
                                   std::span<const State> states, std::span<const double> shifts,
                                   std::span<const double> lags);

/// Per-level diagnostic record.
struct LevelDiagnostics {
    std::size_t level = 0;
    double time = 0.0;
    double mass_w = 0.0;
    double min_u = 0.0;
    double max_u = 0.0;
    double min_v = 0.0;
    double max_v = 0.0;
    double lyapunov = 0.0;
    double gradient_energy_u = 0.0;  ///< cumulative up to this level
    double gradient_energy_v = 0.0;
    double reaction_defect = 0.0;    ///< cumulative up to this level
};

struct DiagnosticsReport {
    EquilibriumPair reference;
    std::vector<LevelDiagnostics> levels;
    std::optional<LimitComparison> limit;
    std::optional<double> limit_mass_drift;  ///< max relative drift of Σ m w in the limit run
};

/// Streaming accumulator: feed every level in order. A reference pair with
/// a <= 0 disables the Lyapunov column (recorded as 0).
class DiagnosticsAccumulator {
public:
    DiagnosticsAccumulator(const Mesh& mesh, const Kinetics& kin, EquilibriumPair reference);

    void observe(const State& state);
    const DiagnosticsReport& report() const noexcept { return report_; }
    DiagnosticsReport& report() noexcept { return report_; }

private:
    const Mesh* mesh_;
    const Kinetics* kin_;
    DiagnosticsReport report_;
    double prev_time_ = 0.0;
};

/// CSV: level,t,mass_w,min_u,max_u,min_v,max_v,lyapunov,gradient_energy_u,
/// gradient_energy_v,reaction_defect
void write_diagnostics_csv(const DiagnosticsReport& report, std::ostream& os);

/// Human-readable summary block.
void write_diagnostics_summary(const DiagnosticsReport& report, std::ostream& os);

} // namespace fastrd
