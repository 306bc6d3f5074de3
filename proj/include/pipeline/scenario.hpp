#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pipeline/core_model.hpp"
#include "pipeline/data_ingest.hpp"
#include "pipeline/state.hpp"

namespace pipeline {

enum class Projection { none, hold_last, linear_trend };

const char* to_string(Projection projection);

/// One named simulation configuration: regime, inflow scaling, optional
/// projection beyond the data window, and initial downstream stocks.
/// Unset initial stocks resolve to defaults at run time: F_0 = K_F and
/// P_0 = p_GP * g_G * G_0 / (a_P + p_PF(F_0)), the stationary postdoc
/// level given the initial conditions.
struct ScenarioSpec {
    std::string label = "baseline";
    Regime regime = Regime::vacancy_limited;
    double inflow_scale = 1.0;
    Projection projection = Projection::none;
    int horizon = 0;
    std::optional<double> initial_P;
    std::optional<double> initial_F;
    ModelParams params;
    bool override_feasibility = false;
};

/// Scales the degree series and appends projected years per the spec's
/// projection mode. hold_last repeats the final row; linear_trend
/// extrapolates each channel with the least-squares slope of its last 10
/// observed years, floored at 0.
DegreeSeries build_scenario(const DegreeSeries& series,
                            const ScenarioSpec& spec);

struct FeasibilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Runs one trajectory. The vacancy-limited regime takes the reconstructed
/// graduate stocks as exogenous inputs and evolves only (P, F); the
/// unconstrained regime steps the full four-stage recurrence with
/// B(t) = scaled bachelors series * (g_U + a_U) / g_U, the input-consistent
/// inflow for the reconstructed undergraduate stock.
/// Refuses infeasible parameters unless the override flag is set.
Trajectory run_scenario(const ScenarioSpec& spec, const DegreeSeries& series);

/// Resolved initial downstream stocks for a scenario, given the first
/// graduate stock of the scenario table.
std::pair<double, double> resolve_initial_PF(const ScenarioSpec& spec,
                                             double G0);

/// Candidates per opening for one step; absent when no vacancies opened.
std::optional<double> market_pressure(const StepLedger& ledger);

/// Fraction of hires drawn from the postdoc pool; absent when no hires.
std::optional<double> postdoc_share(const StepLedger& ledger);

/// Smallest year whose P/F ratio strictly exceeds the threshold (years
/// with F = 0 are skipped); absent if never exceeded.
std::optional<int> first_threshold_year(const Trajectory& trajectory,
                                        double threshold);

/// Derived per-year metrics. Entries with zero denominators are absent.
/// market_pressure and competition_intensity are both candidates per
/// opening; which name applies is a property of the regime, so only the
/// matching column is populated.
struct MetricSeries {
    std::vector<int> years; ///< one entry per ledger (length = states - 1)
    std::vector<std::optional<double>> candidates_per_opening;
    std::vector<std::optional<double>> postdoc_share;
    std::vector<std::optional<double>> pf_ratio;
    std::vector<std::optional<double>> P_index; ///< P_t / P_0
    std::vector<std::optional<double>> F_index; ///< F_t / F_0
    Regime regime = Regime::vacancy_limited;
};

MetricSeries compute_metrics(const Trajectory& trajectory);

} // namespace pipeline
