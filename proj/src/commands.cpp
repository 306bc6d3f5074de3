#include "pipeline/commands.hpp"

#include <filesystem>
#include <functional>
#include <future>
#include <iostream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "pipeline/csv.hpp"
#include "pipeline/sensitivity.hpp"

namespace pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json params_to_json(const ModelParams& p) {
    return json{{"g_U", p.g_U},           {"a_U", p.a_U},
                {"g_G", p.g_G},           {"a_G", p.a_G},
                {"p_GP", p.p_GP},         {"p_GF", p.p_GF},
                {"a_P", p.a_P},           {"a_F", p.a_F},
                {"p_UG_max", p.p_UG_max}, {"K_G", p.K_G},
                {"p_PF_max", p.p_PF_max}, {"K_F", p.K_F},
                {"alpha_F", p.alpha_F},   {"r_M", p.r_M},
                {"r_D", p.r_D}};
}

/// Collects emitted files and writes the run manifest last.
class Manifest {
public:
    Manifest(const RunConfig& config, std::string command)
        : config_(config), command_(std::move(command)) {}

    void set_input_checksum(const std::string& checksum) {
        input_checksum_ = checksum;
    }

    void emit(const std::string& name, const std::string& content) {
        const fs::path path = fs::path(config_.out_dir) / name;
        write_file(path.string(), content);
        files_[name] = fnv1a_hex(content);
    }

    void write() const {
        json manifest;
        manifest["command"] = command_;
        manifest["seed"] = config_.seed;
        manifest["data"] = config_.data_path;
        manifest["data_checksum"] = input_checksum_;
        manifest["params"] = params_to_json(config_.params);
        manifest["files"] = files_;
        const fs::path path = fs::path(config_.out_dir) / "manifest.json";
        write_file(path.string(), manifest.dump(2) + "\n");
    }

private:
    const RunConfig& config_;
    std::string command_;
    std::string input_checksum_;
    std::map<std::string, std::string> files_;
};

struct LoadedData {
    DegreeSeries series;
    std::string checksum;
};

LoadedData load_series(const RunConfig& config) {
    const std::string bytes = read_file(config.data_path);
    std::istringstream in(bytes);
    return {parse_degree_csv(in), fnv1a_hex(bytes)};
}

/// Defaults r_M/r_D to the composition estimated from the loaded series
/// unless the config pinned them.
ModelParams resolve_params(const RunConfig& config,
                           const DegreeSeries& series) {
    ModelParams params = config.params;
    if (!config.composition_overridden) {
        const auto [r_M, r_D] = estimate_composition(series);
        params.r_M = r_M;
        params.r_D = r_D;
    }
    params.validate();
    return params;
}

/// CLI-level gate: refuses parameters failing any Theorem condition
/// (positivity or boundedness) unless the override flag is set.
void gate_feasibility(const RunConfig& config, const ModelParams& params) {
    if (config.override_feasibility)
        return;
    const auto report = feasibility_check(params);
    for (const auto& c : report.positivity)
        if (!c.ok)
            throw FeasibilityError("positivity condition '" + c.name +
                                   "' violated (" + c.detail + ")");
    for (const auto& c : report.boundedness)
        if (!c.ok)
            throw FeasibilityError("boundedness condition '" + c.name +
                                   "' violated (" + c.detail + ")");
}

std::string trajectory_csv(const Trajectory& trajectory) {
    const MetricSeries metrics = compute_metrics(trajectory);
    std::string out =
        "year,U,G,P,F,V,c_dir,c_post,H,H_post,market_pressure,"
        "competition_intensity,postdoc_share,pf_ratio\n";
    for (std::size_t i = 0; i < trajectory.states.size(); ++i) {
        const auto& s = trajectory.states[i];
        out += std::to_string(s.t);
        out += "," + format_double(s.U) + "," + format_double(s.G) + "," +
               format_double(s.P) + "," + format_double(s.F);
        if (i < trajectory.ledgers.size()) {
            const auto& l = trajectory.ledgers[i];
            const auto pressure = market_pressure(l);
            const bool unconstrained =
                trajectory.regime == Regime::unconstrained;
            out += "," + format_double(l.vacancies) + "," +
                   format_double(l.c_dir) + "," + format_double(l.c_post) +
                   "," + format_double(l.hires_total) + "," +
                   format_double(l.hires_post);
            out += "," + (unconstrained ? format_cell(pressure) : std::string());
            out += "," + (unconstrained ? std::string() : format_cell(pressure));
            out += "," + format_cell(metrics.postdoc_share[i]);
            out += "," + format_cell(metrics.pf_ratio[i]);
        } else {
            out += ",,,,,,,,,";
            if (s.F > 0.0)
                out += format_double(s.P / s.F);
        }
        out += "\n";
    }
    return out;
}

std::string reconstruction_csv(const ReconstructedStocks& stocks) {
    std::string out = "year,U,G\n";
    for (std::size_t i = 0; i < stocks.years.size(); ++i) {
        out += std::to_string(stocks.years[i]) + "," +
               format_double(stocks.U[i]) + "," + format_double(stocks.G[i]) +
               "\n";
    }
    return out;
}

std::string consistency_csv(const ConsistencyReport& report) {
    std::string out = "year,channel,observed,implied,rel_error\n";
    for (const auto& row : report.rows) {
        out += std::to_string(row.year) + "," + row.channel + "," +
               format_double(row.observed) + "," + format_double(row.implied) +
               "," + format_double(row.rel_error) + "\n";
    }
    return out;
}

std::string oat_csv(const std::vector<OatRow>& rows) {
    std::string out = "value,final_F,peak_F,final_P,peak_P\n";
    for (const auto& row : rows) {
        out += format_double(row.value) + "," +
               format_double(row.outcome.final_F) + "," +
               format_double(row.outcome.peak_F) + "," +
               format_double(row.outcome.final_P) + "," +
               format_double(row.outcome.peak_P) + "\n";
    }
    return out;
}

std::string prcc_csv(const PrccResult& result) {
    std::string out = "parameter,coefficient,n,low,high,seed\n";
    for (std::size_t j = 0; j < result.parameters.size(); ++j) {
        out += result.parameters[j] + "," +
               format_double(result.coefficients[j]) + "," +
               std::to_string(result.n) + "," +
               format_double(result.ranges[j].low) + "," +
               format_double(result.ranges[j].high) + "," +
               std::to_string(result.seed) + "\n";
    }
    return out;
}

std::string heatmap_csv(const std::vector<HeatmapCell>& cells) {
    std::string out = "a_F,K_F,terminal_ratio,first_threshold_year\n";
    for (const auto& cell : cells) {
        out += format_double(cell.a_F) + "," + format_double(cell.K_F) + "," +
               format_cell(cell.terminal_ratio) + "," +
               format_cell(cell.first_threshold_year) + "\n";
    }
    return out;
}

void ensure_out_dir(const RunConfig& config) {
    fs::create_directories(config.out_dir);
}

void write_heatmap(Manifest& manifest, const RunConfig& config,
                   const DegreeSeries& series, const ModelParams& params) {
    const auto& hm = config.sensitivity.heatmap;
    ScenarioSpec base;
    base.params = params;
    base.override_feasibility = config.override_feasibility;
    const auto cells =
        heatmap_sweep(linspace(hm.a_F.low, hm.a_F.high, hm.a_F.points),
                      linspace(hm.K_F.low, hm.K_F.high, hm.K_F.points), base,
                      series, hm.threshold);
    manifest.emit("heatmap.csv", heatmap_csv(cells));
}

int run_command(const char* name, const std::function<void()>& body) {
    try {
        body();
        return 0;
    } catch (const std::exception& e) {
        std::cerr << name << ": " << e.what() << "\n";
        return 1;
    }
}

} // namespace

int cmd_ingest(const RunConfig& config) {
    return run_command("ingest", [&] {
        ensure_out_dir(config);
        const LoadedData data = load_series(config);
        RunConfig resolved = config;
        resolved.params = resolve_params(config, data.series);

        Manifest manifest(resolved, "ingest");
        manifest.set_input_checksum(data.checksum);
        manifest.emit("reconstruction.csv",
                      reconstruction_csv(
                          reconstruct_stocks(data.series, resolved.params)));
        const auto report = consistency_report(data.series, resolved.params);
        manifest.emit("consistency.csv", consistency_csv(report));
        manifest.write();

        std::cout << "max relative error bachelors: "
                  << format_double(report.max_rel_error_bachelors) << "\n"
                  << "max relative error masters: "
                  << format_double(report.max_rel_error_masters) << "\n"
                  << "max relative error doctorates: "
                  << format_double(report.max_rel_error_doctorates) << "\n";
    });
}

int cmd_simulate(const RunConfig& config) {
    return run_command("simulate", [&] {
        ensure_out_dir(config);
        const LoadedData data = load_series(config);
        RunConfig resolved = config;
        resolved.params = resolve_params(config, data.series);
        gate_feasibility(config, resolved.params);

        std::vector<ScenarioSpec> specs = resolved.scenarios;
        for (auto& spec : specs) {
            ModelParams params = resolved.params;
            // Scenario blocks inherit the resolved composition but keep
            // their own structural overrides from config parsing.
            params = spec.params;
            params.r_M = resolved.params.r_M;
            params.r_D = resolved.params.r_D;
            spec.params = params;
        }

        // Scenario runs are independent; evaluate in parallel when asked,
        // then write in fixed order so output bytes do not depend on the
        // thread count.
        std::vector<Trajectory> trajectories(specs.size());
        if (config.threads > 1) {
            std::vector<std::future<Trajectory>> futures;
            futures.reserve(specs.size());
            for (const auto& spec : specs)
                futures.push_back(std::async(std::launch::async, [&, spec] {
                    return run_scenario(spec, data.series);
                }));
            for (std::size_t i = 0; i < futures.size(); ++i)
                trajectories[i] = futures[i].get();
        } else {
            for (std::size_t i = 0; i < specs.size(); ++i)
                trajectories[i] = run_scenario(specs[i], data.series);
        }

        Manifest manifest(resolved, "simulate");
        manifest.set_input_checksum(data.checksum);
        std::string combined =
            "scenario,year,market_pressure,competition_intensity,"
            "postdoc_share,pf_ratio,P_index,F_index\n";
        for (std::size_t i = 0; i < specs.size(); ++i) {
            manifest.emit("scenario_" + specs[i].label + ".csv",
                          trajectory_csv(trajectories[i]));
            const MetricSeries metrics = compute_metrics(trajectories[i]);
            const bool unconstrained =
                metrics.regime == Regime::unconstrained;
            for (std::size_t k = 0; k < metrics.years.size(); ++k) {
                combined += specs[i].label + "," +
                            std::to_string(metrics.years[k]) + ",";
                combined += unconstrained
                                ? format_cell(metrics.candidates_per_opening[k])
                                : std::string();
                combined += ",";
                combined += unconstrained
                                ? std::string()
                                : format_cell(metrics.candidates_per_opening[k]);
                combined += "," + format_cell(metrics.postdoc_share[k]) + "," +
                            format_cell(metrics.pf_ratio[k]) + "," +
                            format_cell(metrics.P_index[k]) + "," +
                            format_cell(metrics.F_index[k]) + "\n";
            }
        }
        manifest.emit("metrics.csv", combined);
        manifest.write();
    });
}

int cmd_sensitivity(const RunConfig& config) {
    return run_command("sensitivity", [&] {
        ensure_out_dir(config);
        const LoadedData data = load_series(config);
        RunConfig resolved = config;
        resolved.params = resolve_params(config, data.series);
        gate_feasibility(config, resolved.params);

        Manifest manifest(resolved, "sensitivity");
        manifest.set_input_checksum(data.checksum);

        ScenarioSpec base;
        base.params = resolved.params;
        base.override_feasibility = config.override_feasibility;

        const auto& oat = resolved.sensitivity.oat;
        for (const auto& name : oat.parameters) {
            if (!is_sweep_parameter(name))
                throw std::invalid_argument(
                    "parameter not sweep-eligible: " + name);
            const auto values =
                oat_grid(resolved.params, name, oat.points, oat.span);
            const auto rows = oat_sweep(base, data.series, name, values,
                                        resolved.threshold,
                                        oat.skip_infeasible);
            manifest.emit("oat_" + name + ".csv", oat_csv(rows));
        }

        ScenarioSpec prcc_base = base;
        prcc_base.regime = resolved.sensitivity.prcc.regime;
        const auto ranges = default_prcc_ranges(
            resolved.params, resolved.sensitivity.prcc.span);
        const auto result =
            prcc_final_faculty(prcc_base, data.series, ranges,
                               resolved.sensitivity.prcc.n, resolved.seed);
        manifest.emit("prcc.csv", prcc_csv(result));

        write_heatmap(manifest, resolved, data.series, resolved.params);
        manifest.write();
    });
}

int cmd_sweep(const RunConfig& config) {
    return run_command("sweep", [&] {
        ensure_out_dir(config);
        const LoadedData data = load_series(config);
        RunConfig resolved = config;
        resolved.params = resolve_params(config, data.series);
        gate_feasibility(config, resolved.params);

        Manifest manifest(resolved, "sweep");
        manifest.set_input_checksum(data.checksum);
        write_heatmap(manifest, resolved, data.series, resolved.params);
        manifest.write();
    });
}

} // namespace pipeline
