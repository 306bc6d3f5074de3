#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "pipeline/scenario.hpp"

using namespace pipeline;

namespace {

DegreeSeries constant_series(int years, double B, double M, double D) {
    DegreeSeries s;
    for (int i = 0; i < years; ++i)
        s.records.push_back({1970 + i, B, M, D});
    return s;
}

const DegreeSeries& bundled() {
    static const DegreeSeries s =
        parse_degree_csv_file("data/degrees_synthetic.csv");
    return s;
}

double mean_tail(const std::vector<std::optional<double>>& xs, std::size_t n) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = xs.size() >= n ? xs.size() - n : 0; i < xs.size();
         ++i) {
        REQUIRE(xs[i].has_value());
        sum += *xs[i];
        ++count;
    }
    return sum / static_cast<double>(count);
}

} // namespace

TEST_CASE("build_scenario identity and scaling") {
    const auto s = constant_series(3, 1000.0, 80.0, 20.0);

    ScenarioSpec spec;
    auto table = build_scenario(s, spec);
    REQUIRE(table.size() == 3);
    CHECK(table.records[0].bachelors == 1000.0);
    CHECK(table.records[2].doctorates == 20.0);

    spec.inflow_scale = 1.25;
    table = build_scenario(s, spec);
    CHECK(table.records[0].bachelors == doctest::Approx(1250.0));
    CHECK(table.records[1].masters == doctest::Approx(100.0));
}

TEST_CASE("build_scenario hold_last projection") {
    DegreeSeries s = constant_series(2, 500.0, 40.0, 10.0);
    s.records.push_back({1972, 100.0, 80.0, 20.0});

    ScenarioSpec spec;
    spec.projection = Projection::hold_last;
    spec.horizon = 5;
    const auto table = build_scenario(s, spec);
    REQUIRE(table.size() == 8);
    for (int k = 0; k < 5; ++k) {
        const auto& r = table.records[3 + k];
        CHECK(r.year == 1973 + k);
        CHECK(r.bachelors == 100.0);
        CHECK(r.masters == 80.0);
        CHECK(r.doctorates == 20.0);
    }
}

TEST_CASE("build_scenario linear_trend extrapolates the trailing slope") {
    // Exactly linear channels: the least-squares slope is the true slope,
    // so extrapolation continues the line exactly.
    DegreeSeries s;
    for (int i = 0; i < 15; ++i)
        s.records.push_back(
            {1970 + i, 1000.0 + 10.0 * i, 200.0 + 5.0 * i, 50.0});
    ScenarioSpec spec;
    spec.projection = Projection::linear_trend;
    spec.horizon = 4;
    const auto table = build_scenario(s, spec);
    REQUIRE(table.size() == 19);
    for (int k = 1; k <= 4; ++k) {
        const auto& r = table.records[14 + k];
        CHECK(r.bachelors == doctest::Approx(1140.0 + 10.0 * k).epsilon(1e-10));
        CHECK(r.masters == doctest::Approx(270.0 + 5.0 * k).epsilon(1e-10));
        CHECK(r.doctorates == doctest::Approx(50.0).epsilon(1e-10));
    }
}

TEST_CASE("build_scenario linear_trend floors at zero") {
    DegreeSeries s;
    for (int i = 0; i < 12; ++i)
        s.records.push_back({1970 + i, 1000.0 - 80.0 * i, 10.0, 10.0});
    ScenarioSpec spec;
    spec.projection = Projection::linear_trend;
    spec.horizon = 20;
    const auto table = build_scenario(s, spec);
    for (const auto& r : table.records)
        CHECK(r.bachelors >= 0.0);
    CHECK(table.records.back().bachelors == 0.0);
}

TEST_CASE("build_scenario spec errors") {
    const auto s = constant_series(3, 100.0, 10.0, 5.0);
    ScenarioSpec spec;
    spec.horizon = 5; // projection still 'none'
    CHECK_THROWS_AS(build_scenario(s, spec), std::invalid_argument);

    spec.horizon = 0;
    spec.inflow_scale = 0.0;
    CHECK_THROWS_AS(build_scenario(s, spec), std::invalid_argument);
}

TEST_CASE("resolve_initial_PF defaults and overrides") {
    ScenarioSpec spec;
    const double G0 = 10000.0;
    auto [P0, F0] = resolve_initial_PF(spec, G0);
    CHECK(F0 == doctest::Approx(spec.params.K_F));
    const double drain = spec.params.a_P + p_pf(F0, spec.params);
    CHECK(P0 ==
          doctest::Approx(spec.params.p_GP * spec.params.g_G * G0 / drain));

    spec.initial_P = 123.0;
    spec.initial_F = 456.0;
    std::tie(P0, F0) = resolve_initial_PF(spec, G0);
    CHECK(P0 == 123.0);
    CHECK(F0 == 456.0);

    spec.initial_P = -1.0;
    CHECK_THROWS_AS(resolve_initial_PF(spec, G0), std::invalid_argument);
}

TEST_CASE("run_scenario zero downstream trajectory") {
    const auto s = constant_series(10, 0.0, 0.0, 0.0);
    ScenarioSpec spec;
    spec.initial_P = 0.0;
    spec.initial_F = 0.0;
    const auto traj = run_scenario(spec, s);
    REQUIRE(traj.states.size() == 10);
    REQUIRE(traj.ledgers.size() == 9);
    for (const auto& state : traj.states) {
        CHECK(state.P == 0.0);
        CHECK(state.F == 0.0);
        CHECK(state.G == 0.0);
    }
}

TEST_CASE("run_scenario refuses infeasible params and honors the override") {
    ScenarioSpec spec;
    spec.params.g_U = 0.9;
    spec.params.a_U = 0.2;
    CHECK_THROWS_WITH_AS(run_scenario(spec, bundled()),
                         doctest::Contains("g_U + a_U <= 1"),
                         FeasibilityError);
    spec.override_feasibility = true;
    CHECK_NOTHROW(run_scenario(spec, bundled()));
}

TEST_CASE("constant inflow converges to the downstream fixed point") {
    const auto s = constant_series(20, 1400.0, 800.0, 200.0);
    ScenarioSpec spec;
    spec.projection = Projection::hold_last;
    spec.horizon = 400;
    const auto traj = run_scenario(spec, s);

    // Oracle: iterate the two-dimensional downstream map at the constant
    // graduate stock until successive iterates differ by < 1e-10.
    const double G = (800.0 + 200.0) / spec.params.g_G;
    auto [P, F] = resolve_initial_PF(spec, G);
    for (int i = 0; i < 1000000; ++i) {
        const auto step = step_vacancy_limited(G, P, F, spec.params);
        const double dP = std::abs(step.P_next - P);
        const double dF = std::abs(step.F_next - F);
        P = step.P_next;
        F = step.F_next;
        if (dP < 1e-10 && dF < 1e-10)
            break;
    }
    const auto& last = traj.final_state();
    REQUIRE(last.F > 0.0);
    CHECK(last.P == doctest::Approx(P).epsilon(1e-6));
    CHECK(last.F == doctest::Approx(F).epsilon(1e-6));

    // Ratio approaches its limit monotonically after the transient.
    const double limit = P / F;
    double prev_gap = std::abs(traj.states[100].P / traj.states[100].F - limit);
    for (std::size_t i = 101; i < traj.states.size(); ++i) {
        const double gap =
            std::abs(traj.states[i].P / traj.states[i].F - limit);
        CHECK(gap <= prev_gap + 1e-12); // absolute slack for converged noise
        prev_gap = gap;
    }
}

TEST_CASE("inflow scale ordering on the bundled dataset") {
    std::vector<double> terminal_P, terminal_F, shares;
    std::vector<double> tail_pressure;
    for (const double scale : {0.75, 1.0, 1.25}) {
        ScenarioSpec spec;
        spec.inflow_scale = scale;
        const auto traj = run_scenario(spec, bundled());
        terminal_P.push_back(traj.final_state().P);
        terminal_F.push_back(traj.final_state().F);
        const auto metrics = compute_metrics(traj);
        tail_pressure.push_back(mean_tail(metrics.candidates_per_opening, 10));
        const auto share = postdoc_share(traj.ledgers.back());
        REQUIRE(share.has_value());
        shares.push_back(*share);
    }

    // Terminal P strictly increasing in scale; F moves strictly less.
    CHECK(terminal_P[0] < terminal_P[1]);
    CHECK(terminal_P[1] < terminal_P[2]);
    CHECK(std::abs(terminal_F[1] - terminal_F[0]) <
          std::abs(terminal_P[1] - terminal_P[0]));
    CHECK(std::abs(terminal_F[2] - terminal_F[1]) <
          std::abs(terminal_P[2] - terminal_P[1]));

    // Final-decade competition pressure nondecreasing in scale.
    CHECK(tail_pressure[0] <= tail_pressure[1]);
    CHECK(tail_pressure[1] <= tail_pressure[2]);

    // Postdoc share of hires stays stable relative to how much terminal P
    // moves across the scales.
    const auto [sh_min, sh_max] = std::minmax_element(shares.begin(), shares.end());
    const auto [tp_min, tp_max] =
        std::minmax_element(terminal_P.begin(), terminal_P.end());
    const double share_spread = (*sh_max - *sh_min) / *sh_max;
    const double p_spread = (*tp_max - *tp_min) / *tp_max;
    CHECK(share_spread < p_spread);
}

TEST_CASE("unconstrained terminal faculty dominates vacancy-limited") {
    ScenarioSpec capped;
    const auto capped_traj = run_scenario(capped, bundled());

    ScenarioSpec open = capped;
    open.regime = Regime::unconstrained;
    const auto open_traj = run_scenario(open, bundled());

    CHECK(open_traj.final_state().F >= capped_traj.final_state().F);
}

TEST_CASE("market_pressure on ledgers") {
    StepLedger ledger;
    ledger.c_dir = 136.0;
    ledger.c_post = 90.0;
    ledger.vacancies = 120.0;
    REQUIRE(market_pressure(ledger).has_value());
    CHECK(*market_pressure(ledger) == doctest::Approx(226.0 / 120.0));

    ledger.c_dir = 0.0;
    ledger.c_post = 0.0;
    CHECK(*market_pressure(ledger) == 0.0);

    ledger.vacancies = 0.0;
    CHECK_FALSE(market_pressure(ledger).has_value());
}

TEST_CASE("postdoc_share on ledgers") {
    StepLedger ledger;
    ledger.hires_total = 120.0;
    ledger.hires_post = 90.0;
    CHECK(*postdoc_share(ledger) == doctest::Approx(0.75));

    ledger.hires_post = 120.0;
    CHECK(*postdoc_share(ledger) == doctest::Approx(1.0));

    ledger.hires_total = 0.0;
    CHECK_FALSE(postdoc_share(ledger).has_value());
}

TEST_CASE("first_threshold_year") {
    Trajectory traj;
    auto push = [&](int year, double P, double F) {
        traj.states.push_back({0, 0, P, F, year});
    };
    push(2000, 20.0, 100.0);  // 0.2
    push(2001, 90.0, 100.0);  // 0.9
    push(2002, 140.0, 100.0); // 1.4
    push(2003, 110.0, 100.0); // 1.1
    CHECK(first_threshold_year(traj, 1.0) == 2002);
    CHECK_FALSE(first_threshold_year(traj, 2.0).has_value());
    CHECK(first_threshold_year(traj, 0.1) == 2000);

    // Years with zero faculty are skipped, not treated as exceedance.
    Trajectory zero;
    zero.states.push_back({0, 0, 50.0, 0.0, 2000});
    zero.states.push_back({0, 0, 50.0, 10.0, 2001});
    CHECK(first_threshold_year(zero, 1.0) == 2001);

    CHECK_THROWS_AS(first_threshold_year(traj, 0.0), std::invalid_argument);
}

TEST_CASE("compute_metrics is a pure function of the trajectory") {
    ScenarioSpec spec;
    const auto traj = run_scenario(spec, bundled());
    const auto a = compute_metrics(traj);
    const auto b = compute_metrics(traj);
    REQUIRE(a.years == b.years);
    for (std::size_t i = 0; i < a.years.size(); ++i) {
        CHECK(a.pf_ratio[i] == b.pf_ratio[i]);
        CHECK(a.candidates_per_opening[i] == b.candidates_per_opening[i]);
        CHECK(a.postdoc_share[i] == b.postdoc_share[i]);
        CHECK(a.P_index[i] == b.P_index[i]);
        CHECK(a.F_index[i] == b.F_index[i]);
    }
    // Index series start at 1 by definition.
    REQUIRE(!a.P_index.empty());
    CHECK(*a.P_index.front() == doctest::Approx(1.0));
    CHECK(*a.F_index.front() == doctest::Approx(1.0));
}
