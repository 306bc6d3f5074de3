#include "pipeline/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace pipeline {

OutcomeSummary summarize(const Trajectory& trajectory, double threshold) {
    OutcomeSummary summary;
    summary.final_F = trajectory.final_state().F;
    summary.final_P = trajectory.final_state().P;
    for (const auto& state : trajectory.states) {
        summary.peak_F = std::max(summary.peak_F, state.F);
        summary.peak_P = std::max(summary.peak_P, state.P);
    }
    if (trajectory.final_state().F > 0.0)
        summary.terminal_pf_ratio =
            trajectory.final_state().P / trajectory.final_state().F;
    summary.first_threshold_year = first_threshold_year(trajectory, threshold);
    return summary;
}

const std::vector<std::string>& sweep_parameter_names() {
    static const std::vector<std::string> names = {
        "alpha_F", "a_P", "a_F", "p_PF_max", "K_F", "p_GF", "p_GP"};
    return names;
}

bool is_sweep_parameter(const std::string& name) {
    const auto& names = sweep_parameter_names();
    return std::find(names.begin(), names.end(), name) != names.end();
}

ModelParams with_parameter(const ModelParams& params, const std::string& name,
                           double value) {
    ModelParams out = params;
    if (name == "alpha_F") out.alpha_F = value;
    else if (name == "a_P") out.a_P = value;
    else if (name == "a_F") out.a_F = value;
    else if (name == "p_PF_max") out.p_PF_max = value;
    else if (name == "K_F") out.K_F = value;
    else if (name == "p_GF") out.p_GF = value;
    else if (name == "p_GP") out.p_GP = value;
    else
        throw std::invalid_argument("unknown sweep parameter: " + name);
    return out;
}

double get_parameter(const ModelParams& params, const std::string& name) {
    if (name == "alpha_F") return params.alpha_F;
    if (name == "a_P") return params.a_P;
    if (name == "a_F") return params.a_F;
    if (name == "p_PF_max") return params.p_PF_max;
    if (name == "K_F") return params.K_F;
    if (name == "p_GF") return params.p_GF;
    if (name == "p_GP") return params.p_GP;
    throw std::invalid_argument("unknown sweep parameter: " + name);
}

std::vector<OatRow> oat_sweep(const ScenarioSpec& base,
                              const DegreeSeries& series,
                              const std::string& param_name,
                              const std::vector<double>& values,
                              double threshold, bool skip_infeasible) {
    if (!is_sweep_parameter(param_name))
        throw std::invalid_argument("unknown sweep parameter: " + param_name);

    std::vector<OatRow> rows;
    rows.reserve(values.size());
    for (double value : values) {
        ScenarioSpec spec = base;
        spec.regime = Regime::vacancy_limited;
        spec.params = with_parameter(base.params, param_name, value);
        try {
            spec.params.validate();
            const auto report = feasibility_check(spec.params);
            if (!report.positivity_ok())
                throw FeasibilityError("condition '" +
                                       report.first_positivity_failure() +
                                       "' violated");
        } catch (const std::exception& e) {
            if (skip_infeasible)
                continue;
            std::ostringstream msg;
            msg << "infeasible value " << value << " for " << param_name
                << ": " << e.what();
            throw FeasibilityError(msg.str());
        }
        rows.push_back({value, summarize(run_scenario(spec, series), threshold)});
    }
    return rows;
}

namespace {

struct Interval {
    double low, high;
};

// Feasible interval per sweep parameter, given the other baselines.
Interval feasible_interval(const ModelParams& base, const std::string& name) {
    if (name == "alpha_F") return {0.0, std::numeric_limits<double>::max()};
    if (name == "a_P") return {0.0, 1.0 - base.p_PF_max};
    if (name == "a_F") return {0.0, 1.0};
    if (name == "p_PF_max") return {0.0, 1.0 - base.a_P};
    if (name == "K_F") return {std::numeric_limits<double>::min(),
                               std::numeric_limits<double>::max()};
    if (name == "p_GF") return {0.0, 1.0 - base.p_GP};
    if (name == "p_GP") return {0.0, 1.0 - base.p_GF};
    throw std::invalid_argument("unknown sweep parameter: " + name);
}

} // namespace

std::vector<double> linspace(double low, double high, int points) {
    if (points < 1)
        throw std::invalid_argument("grid needs at least one point");
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(points));
    if (points == 1) {
        values.push_back(low);
        return values;
    }
    for (int i = 0; i < points; ++i)
        values.push_back(low + (high - low) * i / (points - 1));
    return values;
}

std::vector<double> oat_grid(const ModelParams& base, const std::string& name,
                             int points, double span) {
    const double center = get_parameter(base, name);
    const auto bounds = feasible_interval(base, name);
    const double low = std::max(center * (1.0 - span), bounds.low);
    const double high = std::min(center * (1.0 + span), bounds.high);
    return linspace(low, high, points);
}

std::uint64_t Rng::next_u64() {
    // splitmix64
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double Rng::next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::size_t Rng::next_below(std::size_t bound) {
    // Bias is negligible for the small bounds used here.
    return static_cast<std::size_t>(next_u64() % bound);
}

LhsSample lhs_sample(const std::vector<ParameterRange>& ranges, int n,
                     std::uint64_t seed) {
    if (n < 2)
        throw std::invalid_argument("LHS needs at least 2 samples");
    for (const auto& range : ranges) {
        if (!(range.low < range.high))
            throw std::invalid_argument("invalid range for " + range.name +
                                        ": low must be less than high");
    }

    Rng rng(seed);
    LhsSample sample;
    sample.ranges = ranges;
    sample.seed = seed;
    sample.rows.assign(static_cast<std::size_t>(n),
                       std::vector<double>(ranges.size(), 0.0));

    std::vector<std::size_t> strata(static_cast<std::size_t>(n));
    for (std::size_t j = 0; j < ranges.size(); ++j) {
        std::iota(strata.begin(), strata.end(), 0);
        // Fisher-Yates on the stratum assignment.
        for (std::size_t i = strata.size(); i > 1; --i)
            std::swap(strata[i - 1], strata[rng.next_below(i)]);
        const double width = (ranges[j].high - ranges[j].low) / n;
        for (std::size_t i = 0; i < strata.size(); ++i) {
            const double u = rng.next_unit();
            sample.rows[i][j] =
                ranges[j].low + (static_cast<double>(strata[i]) + u) * width;
        }
    }
    return sample;
}

namespace {

// Average ranks with tie handling.
std::vector<double> rank_transform(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return values[a] < values[b];
    });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]])
            ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k)
            ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

// Residuals of y after OLS on the given predictor columns plus intercept.
// Solved via normal equations; near-zero pivots signal rank deficiency.
std::vector<double> ols_residuals(const std::vector<std::vector<double>>& X,
                                  const std::vector<double>& y) {
    const std::size_t n = y.size();
    const std::size_t k = X.size() + 1; // intercept first
    std::vector<std::vector<double>> A(k, std::vector<double>(k + 1, 0.0));

    auto col = [&](std::size_t j, std::size_t i) -> double {
        return j == 0 ? 1.0 : X[j - 1][i];
    };
    for (std::size_t r = 0; r < k; ++r) {
        for (std::size_t c = 0; c < k; ++c) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                s += col(r, i) * col(c, i);
            A[r][c] = s;
        }
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            s += col(r, i) * y[i];
        A[r][k] = s;
    }

    // Gaussian elimination with partial pivoting.
    for (std::size_t p = 0; p < k; ++p) {
        std::size_t pivot = p;
        for (std::size_t r = p + 1; r < k; ++r)
            if (std::abs(A[r][p]) > std::abs(A[pivot][p]))
                pivot = r;
        std::swap(A[p], A[pivot]);
        if (std::abs(A[p][p]) < 1e-9 * n)
            throw DegeneracyError(
                "rank-deficient regression in PRCC (collinear inputs)");
        for (std::size_t r = p + 1; r < k; ++r) {
            const double f = A[r][p] / A[p][p];
            for (std::size_t c = p; c <= k; ++c)
                A[r][c] -= f * A[p][c];
        }
    }
    std::vector<double> beta(k, 0.0);
    for (std::size_t p = k; p-- > 0;) {
        double s = A[p][k];
        for (std::size_t c = p + 1; c < k; ++c)
            s -= A[p][c] * beta[c];
        beta[p] = s / A[p][p];
    }

    std::vector<double> residuals(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double fit = beta[0];
        for (std::size_t j = 1; j < k; ++j)
            fit += beta[j] * col(j, i);
        residuals[i] = y[i] - fit;
    }
    return residuals;
}

double centered_sum_sq(const std::vector<double>& x) {
    double mean = 0.0;
    for (const double v : x)
        mean += v;
    mean /= static_cast<double>(x.size());
    double s = 0.0;
    for (const double v : x)
        s += (v - mean) * (v - mean);
    return s;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (!(sxx > 0.0) || !(syy > 0.0))
        throw DegeneracyError("zero-variance residuals in PRCC");
    return sxy / std::sqrt(sxx * syy);
}

} // namespace

PrccResult prcc(const LhsSample& samples, const std::vector<double>& outcomes) {
    const std::size_t n = samples.rows.size();
    const std::size_t k = samples.ranges.size();
    if (outcomes.size() != n)
        throw std::invalid_argument("outcome count must match sample rows");
    if (n < k + 2)
        throw std::invalid_argument("PRCC needs at least k + 2 samples");

    std::vector<std::vector<double>> ranked(k);
    for (std::size_t j = 0; j < k; ++j) {
        std::vector<double> column(n);
        for (std::size_t i = 0; i < n; ++i)
            column[i] = samples.rows[i][j];
        bool constant = std::all_of(column.begin(), column.end(), [&](double v) {
            return v == column.front();
        });
        if (constant)
            throw DegeneracyError("constant input column in PRCC: " +
                                  samples.ranges[j].name);
        ranked[j] = rank_transform(column);
    }
    const std::vector<double> outcome_ranks = rank_transform(outcomes);

    PrccResult result;
    result.n = static_cast<int>(n);
    result.ranges = samples.ranges;
    result.seed = samples.seed;
    for (std::size_t j = 0; j < k; ++j) {
        std::vector<std::vector<double>> others;
        others.reserve(k - 1);
        for (std::size_t m = 0; m < k; ++m)
            if (m != j)
                others.push_back(ranked[m]);
        const auto rx = ols_residuals(others, ranked[j]);
        const auto ry = ols_residuals(others, outcome_ranks);
        result.parameters.push_back(samples.ranges[j].name);
        if (!(centered_sum_sq(rx) > 0.0))
            throw DegeneracyError("parameter " + samples.ranges[j].name +
                                  " is collinear with the other inputs");
        // A zero-variance outcome residual means the other parameters
        // already explain the outcome exactly; nothing is left to
        // attribute to this one.
        result.coefficients.push_back(
            centered_sum_sq(ry) > 0.0 ? pearson(rx, ry) : 0.0);
    }
    return result;
}

std::vector<ParameterRange> default_prcc_ranges(const ModelParams& base,
                                                double span) {
    std::vector<ParameterRange> ranges;
    for (const auto& name : sweep_parameter_names()) {
        const double center = get_parameter(base, name);
        const auto bounds = feasible_interval(base, name);
        ranges.push_back({name, std::max(center * (1.0 - span), bounds.low),
                          std::min(center * (1.0 + span), bounds.high)});
    }
    return ranges;
}

PrccResult prcc_final_faculty(const ScenarioSpec& base,
                              const DegreeSeries& series,
                              const std::vector<ParameterRange>& ranges,
                              int n, std::uint64_t seed) {
    const LhsSample samples = lhs_sample(ranges, n, seed);
    std::vector<double> outcomes;
    outcomes.reserve(samples.rows.size());
    for (const auto& row : samples.rows) {
        ScenarioSpec spec = base;
        for (std::size_t j = 0; j < ranges.size(); ++j)
            spec.params = with_parameter(spec.params, ranges[j].name, row[j]);
        outcomes.push_back(run_scenario(spec, series).final_state().F);
    }
    return prcc(samples, outcomes);
}

std::vector<HeatmapCell> heatmap_sweep(const std::vector<double>& aF_values,
                                       const std::vector<double>& KF_values,
                                       const ScenarioSpec& base,
                                       const DegreeSeries& series,
                                       double threshold) {
    if (aF_values.empty() || KF_values.empty())
        throw std::invalid_argument("heatmap grids must be nonempty");

    std::vector<HeatmapCell> cells;
    cells.reserve(aF_values.size() * KF_values.size());
    for (double aF : aF_values) {
        for (double KF : KF_values) {
            HeatmapCell cell;
            cell.a_F = aF;
            cell.K_F = KF;
            ScenarioSpec spec = base;
            spec.regime = Regime::vacancy_limited;
            spec.params = with_parameter(spec.params, "a_F", aF);
            spec.params = with_parameter(spec.params, "K_F", KF);
            try {
                spec.params.validate();
                const auto outcome =
                    summarize(run_scenario(spec, series), threshold);
                cell.terminal_ratio = outcome.terminal_pf_ratio;
                cell.first_threshold_year = outcome.first_threshold_year;
            } catch (const std::exception&) {
                // Infeasible cell stays absent; the sweep continues.
            }
            cells.push_back(cell);
        }
    }
    return cells;
}

} // namespace pipeline
