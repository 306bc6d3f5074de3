#include "pipeline/data_ingest.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <istream>
#include <sstream>

#include "pipeline/csv.hpp"

namespace pipeline {

namespace {

constexpr const char* kHeader = "year,bachelors,masters,doctorates";

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    return line;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ','))
        fields.push_back(field);
    if (!line.empty() && line.back() == ',')
        fields.emplace_back();
    return fields;
}

double parse_count(const std::string& text, int row, const char* name) {
    std::size_t consumed = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &consumed);
    } catch (const std::exception&) {
        consumed = 0;
    }
    if (consumed != text.size() || text.empty()) {
        std::ostringstream msg;
        msg << "row " << row << ": field " << name << " is not a number: '"
            << text << "'";
        throw ParseError(msg.str());
    }
    if (value < 0.0 || !std::isfinite(value)) {
        std::ostringstream msg;
        msg << "row " << row << ": field " << name << " is negative";
        throw ParseError(msg.str());
    }
    return value;
}

} // namespace

DegreeSeries parse_degree_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw ParseError("missing header");
    if (strip_cr(line) != kHeader)
        throw ParseError("missing header: expected '" + std::string(kHeader) +
                         "', got '" + strip_cr(line) + "'");

    DegreeSeries series;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        line = strip_cr(line);
        if (line.empty())
            continue;
        const auto fields = split_fields(line);
        if (fields.size() != 4) {
            std::ostringstream msg;
            msg << "row " << row << ": expected 4 fields, got "
                << fields.size();
            throw ParseError(msg.str());
        }
        DegreeRecord record;
        const double year = parse_count(fields[0], row, "year");
        if (year != std::floor(year)) {
            std::ostringstream msg;
            msg << "row " << row << ": field year is not an integer";
            throw ParseError(msg.str());
        }
        record.year = static_cast<int>(year);
        record.bachelors = parse_count(fields[1], row, "bachelors");
        record.masters = parse_count(fields[2], row, "masters");
        record.doctorates = parse_count(fields[3], row, "doctorates");
        if (!series.records.empty() &&
            record.year != series.records.back().year + 1) {
            std::ostringstream msg;
            msg << "row " << row << ": non-contiguous years (" << record.year
                << " after " << series.records.back().year << ")";
            throw ParseError(msg.str());
        }
        series.records.push_back(record);
    }
    if (series.records.size() < 2)
        throw ParseError("series needs at least 2 records, got " +
                         std::to_string(series.records.size()));
    return series;
}

DegreeSeries parse_degree_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParseError("cannot open degree file: " + path);
    return parse_degree_csv(in);
}

std::string serialize_degree_csv(const DegreeSeries& series) {
    std::string out = kHeader;
    out.push_back('\n');
    for (const auto& r : series.records) {
        out += std::to_string(r.year);
        out.push_back(',');
        out += format_double(r.bachelors);
        out.push_back(',');
        out += format_double(r.masters);
        out.push_back(',');
        out += format_double(r.doctorates);
        out.push_back('\n');
    }
    return out;
}

std::pair<double, double> estimate_composition(const DegreeSeries& series) {
    double masters_total = 0.0;
    double graduate_total = 0.0;
    for (const auto& r : series.records) {
        masters_total += r.masters;
        graduate_total += r.masters + r.doctorates;
    }
    if (!(graduate_total > 0.0))
        throw std::invalid_argument(
            "degenerate composition: series has no graduate degrees");
    const double r_M = masters_total / graduate_total;
    return {r_M, 1.0 - r_M};
}

ReconstructedStocks reconstruct_stocks(const DegreeSeries& series,
                                       const ModelParams& params) {
    if (!(params.g_U > 0.0) || !(params.g_G > 0.0))
        throw std::invalid_argument(
            "reconstruction requires positive completion probabilities");
    ReconstructedStocks stocks;
    stocks.g_U = params.g_U;
    stocks.g_G = params.g_G;
    stocks.r_M = params.r_M;
    stocks.r_D = params.r_D;
    stocks.years.reserve(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& r = series.records[i];
        stocks.years.push_back(r.year);
        stocks.U.push_back(r.bachelors / params.g_U);
        stocks.G.push_back(series.graduate_total(i) / params.g_G);
    }
    return stocks;
}

ImpliedFlows implied_degree_flows(const ReconstructedStocks& stocks,
                                  const ModelParams& params) {
    ImpliedFlows flows;
    flows.years = stocks.years;
    for (std::size_t i = 0; i < stocks.years.size(); ++i) {
        flows.bachelors.push_back(params.g_U * stocks.U[i]);
        flows.masters.push_back(params.r_M * params.g_G * stocks.G[i]);
        flows.doctorates.push_back(params.r_D * params.g_G * stocks.G[i]);
    }
    return flows;
}

namespace {

double rel_error(double observed, double implied) {
    if (observed == 0.0)
        return implied == 0.0 ? 0.0
                              : std::numeric_limits<double>::infinity();
    return std::abs(implied - observed) / observed;
}

} // namespace

ConsistencyReport consistency_report(const DegreeSeries& series,
                                     const ModelParams& params) {
    const auto stocks = reconstruct_stocks(series, params);
    const auto flows = implied_degree_flows(stocks, params);

    ConsistencyReport report;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& r = series.records[i];
        const double eb = rel_error(r.bachelors, flows.bachelors[i]);
        const double em = rel_error(r.masters, flows.masters[i]);
        const double ed = rel_error(r.doctorates, flows.doctorates[i]);
        report.rows.push_back(
            {r.year, "bachelors", r.bachelors, flows.bachelors[i], eb});
        report.rows.push_back(
            {r.year, "masters", r.masters, flows.masters[i], em});
        report.rows.push_back(
            {r.year, "doctorates", r.doctorates, flows.doctorates[i], ed});
        report.max_rel_error_bachelors =
            std::max(report.max_rel_error_bachelors, eb);
        report.max_rel_error_masters = std::max(report.max_rel_error_masters, em);
        report.max_rel_error_doctorates =
            std::max(report.max_rel_error_doctorates, ed);
    }
    return report;
}

} // namespace pipeline
