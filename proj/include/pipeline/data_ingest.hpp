#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pipeline/params.hpp"

namespace pipeline {

struct DegreeRecord {
    int year = 0;
    double bachelors = 0.0;
    double masters = 0.0;
    double doctorates = 0.0;
};

/// Observed annual degree completions, the only empirical input.
/// Years are strictly increasing and contiguous; at least 2 records.
struct DegreeSeries {
    std::vector<DegreeRecord> records;

    std::size_t size() const { return records.size(); }
    int first_year() const { return records.front().year; }
    double graduate_total(std::size_t i) const {
        return records[i].masters + records[i].doctorates;
    }
};

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parses CSV with header "year,bachelors,masters,doctorates" (LF or CRLF).
/// Malformed rows, negative counts, and non-contiguous years raise
/// ParseError naming the offending row.
DegreeSeries parse_degree_csv(std::istream& in);
DegreeSeries parse_degree_csv_file(const std::string& path);

std::string serialize_degree_csv(const DegreeSeries& series);

/// Degree composition split (r_M, r_D) estimated from the full series.
/// Throws std::invalid_argument when the series carries no graduate degrees.
std::pair<double, double> estimate_composition(const DegreeSeries& series);

/// Latent stocks recovered by inverting the observation equations.
struct ReconstructedStocks {
    std::vector<int> years;
    std::vector<double> U; ///< B_s(t) / g_U
    std::vector<double> G; ///< (M_s(t) + D_s(t)) / g_G
    double g_U = 0.0, g_G = 0.0, r_M = 0.0, r_D = 0.0;
};

ReconstructedStocks reconstruct_stocks(const DegreeSeries& series,
                                       const ModelParams& params);

struct ImpliedFlows {
    std::vector<int> years;
    std::vector<double> bachelors; ///< g_U * U_t
    std::vector<double> masters;   ///< r_M * g_G * G_t
    std::vector<double> doctorates; ///< r_D * g_G * G_t
};

ImpliedFlows implied_degree_flows(const ReconstructedStocks& stocks,
                                  const ModelParams& params);

struct ChannelError {
    int year = 0;
    std::string channel; ///< "bachelors" | "masters" | "doctorates"
    double observed = 0.0;
    double implied = 0.0;
    double rel_error = 0.0;
};

/// Per-year comparison of observed degree flows against the flows implied
/// by the reconstructed stocks. Because reconstruction inverts the
/// observation equations, this is an in-sample consistency check, not
/// validation: the bachelor channel matches by construction and the M/D
/// errors reflect only the fixed composition split versus year-to-year
/// drift in the observed master's share.
struct ConsistencyReport {
    std::vector<ChannelError> rows;
    double max_rel_error_bachelors = 0.0;
    double max_rel_error_masters = 0.0;
    double max_rel_error_doctorates = 0.0;
};

ConsistencyReport consistency_report(const DegreeSeries& series,
                                     const ModelParams& params);

} // namespace pipeline
