#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pipeline/scenario.hpp"

namespace pipeline {

/// Scalar outcomes of one vacancy-limited (or unconstrained) run.
struct OutcomeSummary {
    double final_F = 0.0;
    double peak_F = 0.0;
    double final_P = 0.0;
    double peak_P = 0.0;
    std::optional<double> terminal_pf_ratio;
    std::optional<int> first_threshold_year;
};

OutcomeSummary summarize(const Trajectory& trajectory, double threshold);

/// The seven sweep-eligible parameters. g_U and g_G are deliberately not
/// listed: they enter only through algebraic reconstruction of the
/// upstream stocks, so perturbing them rescales candidate supply without
/// touching the hiring mechanisms under study.
const std::vector<std::string>& sweep_parameter_names();

bool is_sweep_parameter(const std::string& name);

/// Returns params with the named sweep parameter replaced.
/// Throws std::invalid_argument on unknown names.
ModelParams with_parameter(const ModelParams& params, const std::string& name,
                           double value);

double get_parameter(const ModelParams& params, const std::string& name);

/// One-at-a-time sweep: one simulation per value with all other
/// parameters at the base scenario's values, run on the vacancy-limited
/// regime over the scenario window. Infeasible values throw unless
/// skip_infeasible is set, in which case the row is omitted.
struct OatRow {
    double value = 0.0;
    OutcomeSummary outcome;
};

std::vector<OatRow> oat_sweep(const ScenarioSpec& base,
                              const DegreeSeries& series,
                              const std::string& param_name,
                              const std::vector<double>& values,
                              double threshold = 1.0,
                              bool skip_infeasible = false);

/// Evenly spaced sweep grid spanning +/-span around the base value,
/// clipped to the parameter's feasible interval.
std::vector<double> oat_grid(const ModelParams& base, const std::string& name,
                             int points, double span);

/// Deterministic splitmix64 generator. All randomness in the sensitivity
/// module flows through this, with hand-rolled uniform draws, so output
/// bytes depend only on the seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next_u64();
    double next_unit(); ///< uniform in [0, 1)
    std::size_t next_below(std::size_t bound);

private:
    std::uint64_t state_;
};

struct ParameterRange {
    std::string name;
    double low = 0.0;
    double high = 0.0;
};

/// Latin hypercube sample: n rows, one column per range; per column
/// exactly one sample falls in each of the n equal-width strata.
struct LhsSample {
    std::vector<ParameterRange> ranges;
    std::vector<std::vector<double>> rows; ///< rows[i][j] = sample i, param j
    std::uint64_t seed = 0;
};

LhsSample lhs_sample(const std::vector<ParameterRange>& ranges, int n,
                     std::uint64_t seed);

struct PrccResult {
    std::vector<std::string> parameters;
    std::vector<double> coefficients; ///< each in [-1, 1]
    int n = 0;
    std::vector<ParameterRange> ranges;
    std::uint64_t seed = 0;
};

struct DegeneracyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Partial rank correlation coefficients: rank-transform every column and
/// the outcome (average ranks on ties), residualize parameter j and the
/// outcome against all other parameters by OLS with intercept, and
/// correlate the residuals. Rank-deficient regressions raise
/// DegeneracyError.
PrccResult prcc(const LhsSample& samples,
                const std::vector<double>& outcomes);

/// Default +/-50% ranges around the base values for all seven sweep
/// parameters, clipped to feasibility.
std::vector<ParameterRange> default_prcc_ranges(const ModelParams& base,
                                                double span = 0.5);

/// Full PRCC analysis: LHS-sample the ranges, run one simulation per
/// sample (per-sample resolved initial stocks), and correlate against the
/// final faculty population.
PrccResult prcc_final_faculty(const ScenarioSpec& base,
                              const DegreeSeries& series,
                              const std::vector<ParameterRange>& ranges,
                              int n, std::uint64_t seed);

struct HeatmapCell {
    double a_F = 0.0;
    double K_F = 0.0;
    std::optional<double> terminal_ratio;
    std::optional<int> first_threshold_year;
};

/// One vacancy-limited run per (a_F, K_F) grid cell, row-major over
/// aF_values then KF_values. Infeasible cells are marked absent and the
/// sweep continues.
std::vector<HeatmapCell> heatmap_sweep(const std::vector<double>& aF_values,
                                       const std::vector<double>& KF_values,
                                       const ScenarioSpec& base,
                                       const DegreeSeries& series,
                                       double threshold);

std::vector<double> linspace(double low, double high, int points);

} // namespace pipeline
