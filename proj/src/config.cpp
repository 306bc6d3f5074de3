#include "pipeline/config.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "pipeline/csv.hpp"
#include "pipeline/sensitivity.hpp"

namespace pipeline {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& object, const std::set<std::string>& known,
                         const std::string& where) {
    for (const auto& item : object.items()) {
        if (!known.count(item.key()))
            throw std::runtime_error("unknown config key '" + item.key() +
                                     "' in " + where);
    }
}

Regime parse_regime(const std::string& text) {
    if (text == "unconstrained") return Regime::unconstrained;
    if (text == "vacancy_limited") return Regime::vacancy_limited;
    throw std::runtime_error("unknown regime: " + text);
}

Projection parse_projection(const std::string& text) {
    if (text == "none") return Projection::none;
    if (text == "hold_last") return Projection::hold_last;
    if (text == "linear_trend") return Projection::linear_trend;
    throw std::runtime_error("unknown projection: " + text);
}

ModelParams parse_params(const json& block, ModelParams base) {
    static const std::set<std::string> known = {
        "g_U", "a_U", "g_G", "a_G", "p_GP", "p_GF", "a_P", "a_F",
        "p_UG_max", "K_G", "p_PF_max", "K_F", "alpha_F", "r_M", "r_D"};
    reject_unknown_keys(block, known, "params");
    auto get = [&](const char* key, double& field) {
        if (block.contains(key))
            field = block.at(key).get<double>();
    };
    get("g_U", base.g_U);
    get("a_U", base.a_U);
    get("g_G", base.g_G);
    get("a_G", base.a_G);
    get("p_GP", base.p_GP);
    get("p_GF", base.p_GF);
    get("a_P", base.a_P);
    get("a_F", base.a_F);
    get("p_UG_max", base.p_UG_max);
    get("K_G", base.K_G);
    get("p_PF_max", base.p_PF_max);
    get("K_F", base.K_F);
    get("alpha_F", base.alpha_F);
    get("r_M", base.r_M);
    get("r_D", base.r_D);
    return base;
}

ScenarioSpec parse_scenario(const json& block, const ModelParams& params) {
    static const std::set<std::string> known = {
        "label", "regime", "inflow_scale", "projection", "horizon",
        "initial_P", "initial_F"};
    reject_unknown_keys(block, known, "scenario");
    ScenarioSpec spec;
    spec.params = params;
    if (block.contains("label"))
        spec.label = block.at("label").get<std::string>();
    if (block.contains("regime"))
        spec.regime = parse_regime(block.at("regime").get<std::string>());
    if (block.contains("inflow_scale"))
        spec.inflow_scale = block.at("inflow_scale").get<double>();
    if (block.contains("projection"))
        spec.projection =
            parse_projection(block.at("projection").get<std::string>());
    if (block.contains("horizon"))
        spec.horizon = block.at("horizon").get<int>();
    if (block.contains("initial_P") && !block.at("initial_P").is_null())
        spec.initial_P = block.at("initial_P").get<double>();
    if (block.contains("initial_F") && !block.at("initial_F").is_null())
        spec.initial_F = block.at("initial_F").get<double>();
    return spec;
}

GridAxis parse_axis(const json& block, GridAxis axis, const char* where) {
    static const std::set<std::string> known = {"low", "high", "points"};
    reject_unknown_keys(block, known, where);
    if (block.contains("low")) axis.low = block.at("low").get<double>();
    if (block.contains("high")) axis.high = block.at("high").get<double>();
    if (block.contains("points")) axis.points = block.at("points").get<int>();
    return axis;
}

SensitivityConfig parse_sensitivity(const json& block, SensitivityConfig cfg) {
    static const std::set<std::string> known = {"oat", "prcc", "heatmap"};
    reject_unknown_keys(block, known, "sensitivity");
    if (block.contains("oat")) {
        const auto& oat = block.at("oat");
        static const std::set<std::string> oat_keys = {
            "parameters", "points", "span", "skip_infeasible"};
        reject_unknown_keys(oat, oat_keys, "sensitivity.oat");
        if (oat.contains("parameters"))
            cfg.oat.parameters =
                oat.at("parameters").get<std::vector<std::string>>();
        if (oat.contains("points"))
            cfg.oat.points = oat.at("points").get<int>();
        if (oat.contains("span"))
            cfg.oat.span = oat.at("span").get<double>();
        if (oat.contains("skip_infeasible"))
            cfg.oat.skip_infeasible = oat.at("skip_infeasible").get<bool>();
    }
    if (block.contains("prcc")) {
        const auto& prcc = block.at("prcc");
        static const std::set<std::string> prcc_keys = {"n", "span", "regime"};
        reject_unknown_keys(prcc, prcc_keys, "sensitivity.prcc");
        if (prcc.contains("n"))
            cfg.prcc.n = prcc.at("n").get<int>();
        if (prcc.contains("span"))
            cfg.prcc.span = prcc.at("span").get<double>();
        if (prcc.contains("regime"))
            cfg.prcc.regime =
                parse_regime(prcc.at("regime").get<std::string>());
    }
    if (block.contains("heatmap")) {
        const auto& hm = block.at("heatmap");
        static const std::set<std::string> hm_keys = {"a_F", "K_F",
                                                      "threshold"};
        reject_unknown_keys(hm, hm_keys, "sensitivity.heatmap");
        if (hm.contains("a_F"))
            cfg.heatmap.a_F =
                parse_axis(hm.at("a_F"), cfg.heatmap.a_F, "heatmap.a_F");
        if (hm.contains("K_F"))
            cfg.heatmap.K_F =
                parse_axis(hm.at("K_F"), cfg.heatmap.K_F, "heatmap.K_F");
        if (hm.contains("threshold"))
            cfg.heatmap.threshold = hm.at("threshold").get<double>();
    }
    return cfg;
}

} // namespace

RunConfig parse_config(const std::string& json_text) {
    const json root = json::parse(json_text);
    static const std::set<std::string> known = {
        "data", "out", "seed", "params", "override_feasibility", "threshold",
        "scenarios", "sensitivity", "threads"};
    reject_unknown_keys(root, known, "config root");

    RunConfig config;
    if (root.contains("data"))
        config.data_path = root.at("data").get<std::string>();
    if (root.contains("out"))
        config.out_dir = root.at("out").get<std::string>();
    if (root.contains("seed"))
        config.seed = root.at("seed").get<std::uint64_t>();
    if (root.contains("params")) {
        config.params = parse_params(root.at("params"), config.params);
        config.composition_overridden = root.at("params").contains("r_M") ||
                                        root.at("params").contains("r_D");
    }
    if (root.contains("override_feasibility"))
        config.override_feasibility =
            root.at("override_feasibility").get<bool>();
    if (root.contains("threshold"))
        config.threshold = root.at("threshold").get<double>();
    if (root.contains("threads"))
        config.threads = root.at("threads").get<int>();
    if (root.contains("sensitivity"))
        config.sensitivity =
            parse_sensitivity(root.at("sensitivity"), config.sensitivity);

    if (root.contains("scenarios")) {
        for (const auto& block : root.at("scenarios"))
            config.scenarios.push_back(parse_scenario(block, config.params));
    }
    if (config.scenarios.empty()) {
        for (auto [label, scale] :
             {std::pair{"reduced", 0.75}, {"baseline", 1.0},
              {"expanded", 1.25}}) {
            ScenarioSpec spec;
            spec.label = label;
            spec.inflow_scale = scale;
            spec.params = config.params;
            config.scenarios.push_back(spec);
        }
    }
    if (config.sensitivity.oat.parameters.empty())
        config.sensitivity.oat.parameters = sweep_parameter_names();

    for (auto& spec : config.scenarios)
        spec.override_feasibility = config.override_feasibility;
    return config;
}

RunConfig load_config(const std::string& path) {
    return parse_config(read_file(path));
}

} // namespace pipeline
