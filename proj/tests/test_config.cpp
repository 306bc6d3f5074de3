#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "pipeline/commands.hpp"
#include "pipeline/config.hpp"
#include "pipeline/csv.hpp"

using namespace pipeline;
namespace fs = std::filesystem;

namespace {

/// Fresh scratch directory, removed when the guard leaves scope.
struct TempDir {
    fs::path path;
    TempDir() {
        static std::mt19937_64 rng(std::random_device{}());
        path = fs::temp_directory_path() /
               ("pipeline_test_" + std::to_string(rng()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str() const { return path.string(); }
};

} // namespace

TEST_CASE("empty config resolves to documented defaults") {
    const auto config = parse_config("{}");
    CHECK(config.data_path == "data/degrees_synthetic.csv");
    CHECK(config.out_dir == "out");
    CHECK(config.seed == 20260823);
    CHECK(config.threshold == 1.0);
    CHECK_FALSE(config.composition_overridden);
    CHECK_FALSE(config.override_feasibility);

    REQUIRE(config.scenarios.size() == 3);
    CHECK(config.scenarios[0].label == "reduced");
    CHECK(config.scenarios[0].inflow_scale == 0.75);
    CHECK(config.scenarios[1].label == "baseline");
    CHECK(config.scenarios[1].inflow_scale == 1.0);
    CHECK(config.scenarios[2].label == "expanded");
    CHECK(config.scenarios[2].inflow_scale == 1.25);
    for (const auto& spec : config.scenarios)
        CHECK(spec.regime == Regime::vacancy_limited);

    CHECK(config.sensitivity.oat.parameters.size() == 7);
    CHECK(config.sensitivity.oat.points == 21);
    CHECK(config.sensitivity.prcc.n == 1000);
    CHECK(config.sensitivity.prcc.regime == Regime::unconstrained);
    CHECK(config.sensitivity.heatmap.a_F.points == 8);
    CHECK(config.sensitivity.heatmap.K_F.points == 7);
}

TEST_CASE("config parses overrides") {
    const auto config = parse_config(R"({
        "data": "somewhere.csv",
        "out": "results",
        "seed": 42,
        "threshold": 1.5,
        "threads": 4,
        "params": {"a_F": 0.05, "r_M": 0.7, "r_D": 0.3},
        "scenarios": [
            {"label": "probe", "regime": "unconstrained",
             "inflow_scale": 1.1, "projection": "hold_last",
             "horizon": 10, "initial_P": 500.0}
        ],
        "sensitivity": {
            "oat": {"parameters": ["a_F"], "points": 5, "span": 0.2,
                    "skip_infeasible": true},
            "prcc": {"n": 100, "span": 0.3, "regime": "vacancy_limited"},
            "heatmap": {"a_F": {"low": 0.02, "high": 0.06, "points": 3},
                        "threshold": 2.0}
        }
    })");
    CHECK(config.data_path == "somewhere.csv");
    CHECK(config.out_dir == "results");
    CHECK(config.seed == 42);
    CHECK(config.threshold == 1.5);
    CHECK(config.threads == 4);
    CHECK(config.params.a_F == 0.05);
    CHECK(config.params.r_M == 0.7);
    CHECK(config.composition_overridden);

    REQUIRE(config.scenarios.size() == 1);
    const auto& spec = config.scenarios[0];
    CHECK(spec.label == "probe");
    CHECK(spec.regime == Regime::unconstrained);
    CHECK(spec.inflow_scale == 1.1);
    CHECK(spec.projection == Projection::hold_last);
    CHECK(spec.horizon == 10);
    CHECK(spec.initial_P == 500.0);
    CHECK_FALSE(spec.initial_F.has_value());
    CHECK(spec.params.a_F == 0.05); // scenarios inherit the params block

    CHECK(config.sensitivity.oat.parameters ==
          std::vector<std::string>{"a_F"});
    CHECK(config.sensitivity.oat.points == 5);
    CHECK(config.sensitivity.oat.skip_infeasible);
    CHECK(config.sensitivity.prcc.n == 100);
    CHECK(config.sensitivity.prcc.regime == Regime::vacancy_limited);
    CHECK(config.sensitivity.heatmap.a_F.low == 0.02);
    CHECK(config.sensitivity.heatmap.a_F.points == 3);
    CHECK(config.sensitivity.heatmap.K_F.points == 7); // untouched default
    CHECK(config.sensitivity.heatmap.threshold == 2.0);
}

TEST_CASE("config rejects unknown keys and bad enums") {
    CHECK_THROWS_WITH_AS(parse_config(R"({"tpyo": 1})"),
                         doctest::Contains("tpyo"), std::runtime_error);
    CHECK_THROWS_WITH_AS(parse_config(R"({"params": {"aF": 0.1}})"),
                         doctest::Contains("aF"), std::runtime_error);
    CHECK_THROWS_AS(
        parse_config(R"({"scenarios": [{"regime": "magic"}]})"),
        std::runtime_error);
    CHECK_THROWS_AS(
        parse_config(R"({"scenarios": [{"projection": "spline"}]})"),
        std::runtime_error);
    CHECK_THROWS_AS(parse_config("not json"), std::exception);
}

TEST_CASE("override_feasibility propagates into scenario specs") {
    const auto config = parse_config(R"({"override_feasibility": true})");
    CHECK(config.override_feasibility);
    for (const auto& spec : config.scenarios)
        CHECK(spec.override_feasibility);
}

TEST_CASE("load_config reads from disk") {
    TempDir dir;
    const auto path = dir.path / "config.json";
    std::ofstream(path) << R"({"seed": 7})";
    const auto config = load_config(path.string());
    CHECK(config.seed == 7);
    CHECK_THROWS_AS(load_config((dir.path / "missing.json").string()),
                    std::exception);
}

TEST_CASE("cmd_ingest writes reports and a complete manifest") {
    TempDir dir;
    RunConfig config;
    config.out_dir = dir.str();
    REQUIRE(cmd_ingest(config) == 0);
    CHECK(fs::exists(dir.path / "reconstruction.csv"));
    CHECK(fs::exists(dir.path / "consistency.csv"));
    CHECK(fs::exists(dir.path / "manifest.json"));

    const auto manifest = read_file((dir.path / "manifest.json").string());
    CHECK(manifest.find("reconstruction.csv") != std::string::npos);
    CHECK(manifest.find("consistency.csv") != std::string::npos);
    CHECK(manifest.find("data_checksum") != std::string::npos);

    const auto consistency = read_file((dir.path / "consistency.csv").string());
    CHECK(consistency.rfind("year,channel,observed,implied,rel_error\n", 0) ==
          0);
}

TEST_CASE("cmd_ingest fails cleanly on a missing data file") {
    TempDir dir;
    RunConfig config;
    config.data_path = (dir.path / "nope.csv").string();
    config.out_dir = dir.str();
    CHECK(cmd_ingest(config) != 0);
}

TEST_CASE("cmd_simulate emits one file per scenario plus metrics") {
    TempDir dir;
    RunConfig config = parse_config("{}");
    config.out_dir = dir.str();
    REQUIRE(cmd_simulate(config) == 0);
    CHECK(fs::exists(dir.path / "scenario_reduced.csv"));
    CHECK(fs::exists(dir.path / "scenario_baseline.csv"));
    CHECK(fs::exists(dir.path / "scenario_expanded.csv"));
    CHECK(fs::exists(dir.path / "metrics.csv"));
    CHECK(fs::exists(dir.path / "manifest.json"));

    const auto baseline =
        read_file((dir.path / "scenario_baseline.csv").string());
    CHECK(baseline.rfind("year,U,G,P,F,V,c_dir,c_post,H,H_post,"
                         "market_pressure,competition_intensity,"
                         "postdoc_share,pf_ratio\n",
                         0) == 0);

    // Rerun into a second directory: byte-identical outputs.
    TempDir dir2;
    RunConfig again = parse_config("{}");
    again.out_dir = dir2.str();
    REQUIRE(cmd_simulate(again) == 0);
    for (const char* name :
         {"scenario_reduced.csv", "scenario_baseline.csv",
          "scenario_expanded.csv", "metrics.csv"}) {
        CHECK(read_file((dir.path / name).string()) ==
              read_file((dir2.path / name).string()));
    }
}

TEST_CASE("cmd_simulate parallel run matches the serial bytes") {
    TempDir serial_dir, parallel_dir;
    RunConfig serial = parse_config("{}");
    serial.out_dir = serial_dir.str();
    RunConfig parallel = parse_config(R"({"threads": 3})");
    parallel.out_dir = parallel_dir.str();
    REQUIRE(cmd_simulate(serial) == 0);
    REQUIRE(cmd_simulate(parallel) == 0);
    for (const char* name :
         {"scenario_reduced.csv", "scenario_baseline.csv",
          "scenario_expanded.csv", "metrics.csv"}) {
        CHECK(read_file((serial_dir.path / name).string()) ==
              read_file((parallel_dir.path / name).string()));
    }
}

TEST_CASE("cmd_simulate refuses a_F = 0 without the override") {
    TempDir dir;
    RunConfig config = parse_config(R"({"params": {"a_F": 0.0}})");
    config.out_dir = dir.str();
    CHECK(cmd_simulate(config) != 0);
    CHECK_FALSE(fs::exists(dir.path / "manifest.json"));

    RunConfig forced = parse_config(
        R"({"params": {"a_F": 0.0}, "override_feasibility": true})");
    forced.out_dir = dir.str();
    CHECK(cmd_simulate(forced) == 0);
}

TEST_CASE("cmd_sensitivity emits the documented file set") {
    TempDir dir;
    // Trimmed settings keep this unit test fast; the full-size run lives
    // in the acceptance suite.
    RunConfig config = parse_config(R"({
        "sensitivity": {
            "oat": {"points": 3},
            "prcc": {"n": 30},
            "heatmap": {"a_F": {"low": 0.02, "high": 0.04, "points": 2},
                        "K_F": {"low": 3000, "high": 5000, "points": 2}}
        }
    })");
    config.out_dir = dir.str();
    REQUIRE(cmd_sensitivity(config) == 0);
    for (const char* name :
         {"oat_alpha_F.csv", "oat_a_P.csv", "oat_a_F.csv", "oat_p_PF_max.csv",
          "oat_K_F.csv", "oat_p_GF.csv", "oat_p_GP.csv", "prcc.csv",
          "heatmap.csv", "manifest.json"}) {
        CHECK(fs::exists(dir.path / name));
    }
    const auto prcc = read_file((dir.path / "prcc.csv").string());
    CHECK(prcc.rfind("parameter,coefficient,n,low,high,seed\n", 0) == 0);
    const auto heatmap = read_file((dir.path / "heatmap.csv").string());
    CHECK(heatmap.rfind("a_F,K_F,terminal_ratio,first_threshold_year\n", 0) ==
          0);
}

TEST_CASE("cmd_sensitivity rejects non-sweepable parameters") {
    TempDir dir;
    RunConfig config = parse_config(
        R"({"sensitivity": {"oat": {"parameters": ["g_U"]}}})");
    config.out_dir = dir.str();
    CHECK(cmd_sensitivity(config) != 0);
}

TEST_CASE("cmd_sweep writes only the heatmap") {
    TempDir dir;
    RunConfig config = parse_config(R"({
        "sensitivity": {
            "heatmap": {"a_F": {"low": 0.02, "high": 0.04, "points": 2},
                        "K_F": {"low": 3000, "high": 5000, "points": 2}}
        }
    })");
    config.out_dir = dir.str();
    REQUIRE(cmd_sweep(config) == 0);
    CHECK(fs::exists(dir.path / "heatmap.csv"));
    CHECK(fs::exists(dir.path / "manifest.json"));
    CHECK_FALSE(fs::exists(dir.path / "prcc.csv"));
}
