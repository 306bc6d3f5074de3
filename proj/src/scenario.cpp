#include "pipeline/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pipeline {

const char* to_string(Regime regime) {
    return regime == Regime::unconstrained ? "unconstrained"
                                           : "vacancy_limited";
}

const char* to_string(Projection projection) {
    switch (projection) {
    case Projection::none: return "none";
    case Projection::hold_last: return "hold_last";
    case Projection::linear_trend: return "linear_trend";
    }
    return "none";
}

namespace {

// Least-squares slope of the last `window` values against their index.
double trailing_slope(const std::vector<double>& values, std::size_t window) {
    const std::size_t n = std::min(window, values.size());
    const std::size_t start = values.size() - n;
    double mean_x = 0.0, mean_y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_x += static_cast<double>(i);
        mean_y += values[start + i];
    }
    mean_x /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = static_cast<double>(i) - mean_x;
        sxx += dx * dx;
        sxy += dx * (values[start + i] - mean_y);
    }
    return sxx > 0.0 ? sxy / sxx : 0.0;
}

} // namespace

DegreeSeries build_scenario(const DegreeSeries& series,
                            const ScenarioSpec& spec) {
    if (!(spec.inflow_scale > 0.0))
        throw std::invalid_argument("inflow_scale must be positive");
    if (spec.horizon < 0)
        throw std::invalid_argument("projection horizon must be nonnegative");
    if (spec.horizon > 0 && spec.projection == Projection::none)
        throw std::invalid_argument(
            "projection horizon given but projection mode is 'none'");

    DegreeSeries table;
    table.records.reserve(series.size() + static_cast<std::size_t>(spec.horizon));
    for (const auto& r : series.records) {
        table.records.push_back({r.year, r.bachelors * spec.inflow_scale,
                                 r.masters * spec.inflow_scale,
                                 r.doctorates * spec.inflow_scale});
    }

    if (spec.projection == Projection::none || spec.horizon == 0)
        return table;

    const auto& last = table.records.back();
    if (spec.projection == Projection::hold_last) {
        for (int k = 1; k <= spec.horizon; ++k)
            table.records.push_back({last.year + k, last.bachelors,
                                     last.masters, last.doctorates});
        return table;
    }

    std::vector<double> b, m, d;
    for (const auto& r : table.records) {
        b.push_back(r.bachelors);
        m.push_back(r.masters);
        d.push_back(r.doctorates);
    }
    const double sb = trailing_slope(b, 10);
    const double sm = trailing_slope(m, 10);
    const double sd = trailing_slope(d, 10);
    for (int k = 1; k <= spec.horizon; ++k) {
        table.records.push_back({last.year + k,
                                 std::max(0.0, last.bachelors + sb * k),
                                 std::max(0.0, last.masters + sm * k),
                                 std::max(0.0, last.doctorates + sd * k)});
    }
    return table;
}

std::pair<double, double> resolve_initial_PF(const ScenarioSpec& spec,
                                             double G0) {
    const double F0 = spec.initial_F.value_or(spec.params.K_F);
    double P0;
    if (spec.initial_P) {
        P0 = *spec.initial_P;
    } else {
        // Stationary postdoc level given the initial graduate stock and
        // faculty population; avoids an artificial start-up transient.
        const double drain = spec.params.a_P + p_pf(F0, spec.params);
        P0 = drain > 0.0
                 ? spec.params.p_GP * spec.params.g_G * G0 / drain
                 : 0.0;
    }
    if (P0 < 0.0 || F0 < 0.0)
        throw std::invalid_argument("initial stocks must be nonnegative");
    return {P0, F0};
}

Trajectory run_scenario(const ScenarioSpec& spec, const DegreeSeries& series) {
    spec.params.validate();
    const auto report = feasibility_check(spec.params);
    if (!report.positivity_ok() && !spec.override_feasibility) {
        throw FeasibilityError("infeasible parameters: condition '" +
                               report.first_positivity_failure() +
                               "' violated (pass the override flag to run anyway)");
    }

    const DegreeSeries table = build_scenario(series, spec);
    const ReconstructedStocks stocks = reconstruct_stocks(table, spec.params);
    const auto [P0, F0] = resolve_initial_PF(spec, stocks.G.front());

    Trajectory trajectory;
    trajectory.label = spec.label;
    trajectory.regime = spec.regime;
    const std::size_t T = table.size();
    trajectory.states.reserve(T);
    trajectory.ledgers.reserve(T - 1);

    if (spec.regime == Regime::vacancy_limited) {
        double P = P0, F = F0;
        for (std::size_t i = 0; i < T; ++i) {
            trajectory.states.push_back(
                {stocks.U[i], stocks.G[i], P, F, stocks.years[i]});
            if (i + 1 == T)
                break;
            auto step = step_vacancy_limited(stocks.G[i], P, F, spec.params);
            // Informational upstream flows; U and G are exogenous here.
            step.ledger.inflow = 0.0;
            step.ledger.undergrad_completions = spec.params.g_U * stocks.U[i];
            step.ledger.p_ug_eff = p_ug(stocks.G[i], spec.params);
            trajectory.ledgers.push_back(step.ledger);
            P = step.P_next;
            F = step.F_next;
        }
        return trajectory;
    }

    // Unconstrained regime: full four-stage recurrence. The inflow keeps
    // the reconstructed undergraduate series self-consistent:
    // B(t) = (g_U + a_U) * B_s(t) / g_U.
    PipelineState state{stocks.U.front(), stocks.G.front(), P0, F0,
                        stocks.years.front()};
    trajectory.states.push_back(state);
    for (std::size_t i = 0; i + 1 < T; ++i) {
        const double inflow = (spec.params.g_U + spec.params.a_U) *
                              table.records[i].bachelors / spec.params.g_U;
        auto [next, ledger] = step_unconstrained(state, inflow, spec.params);
        next.t = stocks.years[i + 1];
        trajectory.ledgers.push_back(ledger);
        trajectory.states.push_back(next);
        state = next;
    }
    return trajectory;
}

std::optional<double> market_pressure(const StepLedger& ledger) {
    if (!(ledger.vacancies > 0.0))
        return std::nullopt;
    return (ledger.c_dir + ledger.c_post) / ledger.vacancies;
}

std::optional<double> postdoc_share(const StepLedger& ledger) {
    if (!(ledger.hires_total > 0.0))
        return std::nullopt;
    return ledger.hires_post / ledger.hires_total;
}

std::optional<int> first_threshold_year(const Trajectory& trajectory,
                                        double threshold) {
    if (!(threshold > 0.0))
        throw std::invalid_argument("threshold must be positive");
    for (const auto& state : trajectory.states) {
        if (state.F > 0.0 && state.P / state.F > threshold)
            return state.t;
    }
    return std::nullopt;
}

MetricSeries compute_metrics(const Trajectory& trajectory) {
    MetricSeries metrics;
    metrics.regime = trajectory.regime;
    const double P0 = trajectory.initial().P;
    const double F0 = trajectory.initial().F;
    for (std::size_t k = 0; k < trajectory.ledgers.size(); ++k) {
        const auto& ledger = trajectory.ledgers[k];
        const auto& state = trajectory.states[k];
        metrics.years.push_back(state.t);
        metrics.candidates_per_opening.push_back(market_pressure(ledger));
        metrics.postdoc_share.push_back(postdoc_share(ledger));
        metrics.pf_ratio.push_back(
            state.F > 0.0 ? std::optional<double>(state.P / state.F)
                          : std::nullopt);
        metrics.P_index.push_back(
            P0 > 0.0 ? std::optional<double>(state.P / P0) : std::nullopt);
        metrics.F_index.push_back(
            F0 > 0.0 ? std::optional<double>(state.F / F0) : std::nullopt);
    }
    return metrics;
}

} // namespace pipeline
