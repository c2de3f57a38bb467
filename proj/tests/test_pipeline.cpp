#include "doctest.h"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

#include "isingmap/csv.hpp"
#include "isingmap/pipeline.hpp"
#include "isingmap/synthetic.hpp"
#include "test_util.hpp"

using namespace isingmap;
namespace fs = std::filesystem;

namespace {

// Small bundle with sampler settings scaled down for test runtime.
RunConfig demo_config(const testutil::TempDir& dir, std::size_t units = 48,
                      std::uint64_t seed = 5) {
    SyntheticSpec spec;
    spec.units = units;
    spec.seed = seed;
    const SyntheticBundle bundle = write_synthetic_bundle(spec, dir.path().string());
    RunConfig config = load_config(bundle.config_json);
    config.chain.n_iter = 4000;
    config.replicate_count = 40;
    config.base_chains = 3;
    config.configs_per_replicate = 100;
    config.diagnostic_samples = 60;
    config.bootstrap_r = 40;
    config.bootstrap_m = 100;
    return config;
}

std::vector<std::string> unit_column(const fs::path& csv_path) {
    const CsvTable csv = read_csv(csv_path);
    std::vector<std::string> ids;
    ids.reserve(csv.rows.size());
    for (const auto& row : csv.rows) ids.push_back(row[0]);
    return ids;
}

}  // namespace

TEST_CASE("pipeline produces every artifact and a clean manifest") {
    testutil::TempDir dir;
    RunConfig config = demo_config(dir);

    const PipelineResult result = run_pipeline(config);
    REQUIRE(result.ok);
    CHECK(result.failed_stage.empty());
    CHECK(result.timings.size() == 7);

    const fs::path out = config.output_dir;
    for (const char* name :
         {"indices.csv", "field.csv", "pca_summary.json", "edges.csv", "graph_summary.json",
          "marginals.csv", "energy_trace.csv", "diagnostics.json", "intervals.csv",
          "conformal_summary.json", "map_data.csv", "uncertainty_map.geojson", "manifest.json"})
        CHECK(fs::exists(out / name));

    const auto manifest = nlohmann::json::parse(testutil::read_file(out / "manifest.json"));
    CHECK(manifest.at("status") == "ok");
    CHECK(manifest.at("config_hash") == config_hash(config));
    CHECK(manifest.at("seed") == config.chain.seed);
    CHECK(manifest.at("timings_seconds").size() == 7);

    // every per-unit artifact preserves the input roster order
    const std::vector<std::string> roster = unit_column(config.input);
    CHECK(unit_column(out / "indices.csv") == roster);
    CHECK(unit_column(out / "field.csv") == roster);
    CHECK(unit_column(out / "marginals.csv") == roster);
    CHECK(unit_column(out / "intervals.csv") == roster);
    CHECK(unit_column(out / "map_data.csv") == roster);
}

TEST_CASE("pipeline reruns are byte-identical across worker counts") {
    testutil::TempDir dir;
    RunConfig config = demo_config(dir, 40, 11);

    RunConfig first = config;
    first.output_dir = (dir.path() / "out_a").string();
    REQUIRE(run_pipeline(first).ok);

    RunConfig second = config;
    second.output_dir = (dir.path() / "out_b").string();
    REQUIRE(run_pipeline(second).ok);

    RunConfig parallel = config;
    parallel.output_dir = (dir.path() / "out_c").string();
    parallel.workers = 3;
    REQUIRE(run_pipeline(parallel).ok);

    for (const char* name : {"marginals.csv", "intervals.csv", "indices.csv", "field.csv"}) {
        const std::string a = testutil::read_file(fs::path(first.output_dir) / name);
        CHECK(a == testutil::read_file(fs::path(second.output_dir) / name));
        CHECK(a == testutil::read_file(fs::path(parallel.output_dir) / name));
    }
}

TEST_CASE("re-running a stage reproduces its artifact exactly") {
    testutil::TempDir dir;
    RunConfig config = demo_config(dir, 36, 3);
    REQUIRE(run_pipeline(config).ok);

    const fs::path out = config.output_dir;
    const std::string indices_before = testutil::read_file(out / "indices.csv");
    const std::string intervals_before = testutil::read_file(out / "intervals.csv");

    run_stage(config, "indices");
    run_stage(config, "conformal");
    CHECK(testutil::read_file(out / "indices.csv") == indices_before);
    CHECK(testutil::read_file(out / "intervals.csv") == intervals_before);
}

TEST_CASE("stages demand their prerequisites") {
    testutil::TempDir dir;
    RunConfig config = demo_config(dir, 36, 7);

    CHECK_THROWS_AS(run_stage(config, "simulate"), Error);
    try {
        run_stage(config, "conformal");
        FAIL("expected a missing-artifact error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("simulate") != std::string::npos);
    }
    CHECK_THROWS_AS(run_stage(config, "bogus"), ConfigError);
}

TEST_CASE("a failing stage leaves an incomplete manifest") {
    testutil::TempDir dir;
    RunConfig config = demo_config(dir, 36, 13);
    config.input = dir.str("missing.csv");

    const PipelineResult result = run_pipeline(config);
    CHECK_FALSE(result.ok);
    CHECK(result.failed_stage == "indices");
    CHECK(!result.error.empty());

    const auto manifest =
        nlohmann::json::parse(testutil::read_file(fs::path(config.output_dir) / "manifest.json"));
    CHECK(manifest.at("status") == "incomplete");
    CHECK(manifest.at("failed_stage") == "indices");
}

TEST_CASE("map export joins intervals with geometry") {
    testutil::TempDir dir;

    std::vector<PredictionInterval> intervals(2);
    intervals[0].unit_id = "u1";
    intervals[0].lower = intervals[0].upper = 0.4;  // zero width, stays off the highlight layer
    intervals[1].unit_id = "u2";
    intervals[1].lower = 0.1;
    intervals[1].upper = 0.9;
    intervals[1].covered = true;
    intervals[1].adaptivity_class = AdaptivityClass::intermediate;

    const nlohmann::json geometry = {
        {"type", "FeatureCollection"},
        {"features",
         {{{"type", "Feature"},
           {"properties", {{"unit_id", "u1"}, {"name", "alpha"}}},
           {"geometry", {{"type", "Point"}, {"coordinates", {0.0, 0.0}}}}},
          {{"type", "Feature"},
           {"properties", {{"unit_id", "u2"}}},
           {"geometry", {{"type", "Point"}, {"coordinates", {1.0, 1.0}}}}}}}};
    testutil::write_file(dir.path() / "geo.json", geometry.dump());

    export_map_data(intervals, dir.str("geo.json"), dir.str("map.csv"), dir.str("map.geojson"));

    const CsvTable csv = read_csv(dir.path() / "map.csv");
    REQUIRE(csv.rows.size() == 2);
    CHECK(csv.rows[0][0] == "u1");
    CHECK(csv.rows[0][1] == "zero_width");
    CHECK(csv.rows[1][3] == "1");

    const auto layer = nlohmann::json::parse(testutil::read_file(dir.path() / "map.geojson"));
    REQUIRE(layer.at("features").size() == 1);  // only the nonzero-width unit
    const auto& feature = layer.at("features")[0];
    CHECK(feature.at("properties").at("unit_id") == "u2");
    CHECK(feature.at("properties").at("adaptivity_class") == "intermediate");
    CHECK(feature.at("properties").at("covered") == true);

    intervals[1].unit_id = "u9";
    CHECK_THROWS_AS(
        export_map_data(intervals, dir.str("geo.json"), dir.str("map.csv"), dir.str("map.geojson")),
        GeometryJoinError);
}

TEST_CASE("map export works without geometry") {
    testutil::TempDir dir;
    std::vector<PredictionInterval> intervals(1);
    intervals[0].unit_id = "solo";
    intervals[0].lower = 0.2;
    intervals[0].upper = 0.8;
    export_map_data(intervals, std::nullopt, dir.str("map.csv"), std::nullopt);
    const CsvTable csv = read_csv(dir.path() / "map.csv");
    REQUIRE(csv.rows.size() == 1);
    CHECK(csv.rows[0][0] == "solo");
    CHECK_FALSE(fs::exists(dir.path() / "map.geojson"));
}
