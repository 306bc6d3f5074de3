#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pipeline/scenario.hpp"

namespace pipeline {

struct OatConfig {
    std::vector<std::string> parameters; ///< defaults to all sweep-eligible
    int points = 21;
    double span = 0.5;
    bool skip_infeasible = false;
};

struct PrccConfig {
    int n = 1000;
    double span = 0.5;
    /// Regime for the PRCC outcome runs. The global analysis defaults to
    /// the unconstrained regime: under vacancy-limited hiring with ample
    /// candidate supply, hires exactly replace exits and the final faculty
    /// population carries no parameter signal to correlate.
    Regime regime = Regime::unconstrained;
};

struct GridAxis {
    double low = 0.0;
    double high = 0.0;
    int points = 0;
};

struct HeatmapConfig {
    GridAxis a_F{0.01, 0.08, 8};
    GridAxis K_F{2000.0, 8000.0, 7};
    double threshold = 1.0;
};

struct SensitivityConfig {
    OatConfig oat;
    PrccConfig prcc;
    HeatmapConfig heatmap;
};

/// Resolved run configuration. Parsed from a JSON document; every field
/// has a default so an empty config is valid.
struct RunConfig {
    std::string data_path = "data/degrees_synthetic.csv";
    std::string out_dir = "out";
    std::uint64_t seed = 20260823;
    ModelParams params; ///< Table-default baselines plus any overrides
    /// True when the config fixed r_M/r_D explicitly; otherwise the
    /// commands estimate the composition from the loaded series.
    bool composition_overridden = false;
    bool override_feasibility = false;
    double threshold = 1.0; ///< congestion threshold (postdocs per faculty)
    std::vector<ScenarioSpec> scenarios;
    SensitivityConfig sensitivity;
    int threads = 1;
};

/// Parses the JSON config text. Unknown keys raise std::runtime_error;
/// missing keys keep their defaults. When no scenarios are given, the
/// three named inflow scenarios (reduced 0.75, baseline 1.0,
/// expanded 1.25) are installed.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

} // namespace pipeline
