#include "isingmap/synthetic.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numbers>

#include <json.hpp>

#include "isingmap/csv.hpp"
#include "isingmap/rng.hpp"

namespace isingmap {

namespace {

struct IndicatorMeta {
    const char* name;
    int polarity;
    const char* group;
    double base;
    double amplitude;
};

// Groups MPI1..MPI5 carry independent signals; MPI6 is filled with exact
// copies of MPI1's columns after generation, planting the collinear pair that
// the index pipeline must neutralize via a zero eigenvalue.
constexpr IndicatorMeta kIndicators[] = {
    {"ind01", +1, "MPI1", 52.0, 4.0},  {"ind02", +1, "MPI1", 130.0, 6.0},
    {"ind03", -1, "MPI1", 18.0, 3.0},  {"ind04", +1, "MPI1", 75.0, 5.0},
    {"ind05", +1, "MPI2", 40.0, 4.0},  {"ind06", -1, "MPI2", 12.0, 2.5},
    {"ind07", +1, "MPI2", 95.0, 5.0},  {"ind08", +1, "MPI3", 60.0, 3.5},
    {"ind09", -1, "MPI3", 22.0, 4.0},  {"ind10", +1, "MPI4", 110.0, 6.0},
    {"ind11", +1, "MPI4", 33.0, 2.0},  {"ind12", -1, "MPI4", 47.0, 3.0},
    {"ind13", +1, "MPI5", 88.0, 5.0},  {"ind14", -1, "MPI5", 15.0, 2.0},
    {"ind15", +1, "MPI5", 66.0, 4.0},  {"ind16", +1, "MPI6", 52.0, 4.0},
    {"ind17", +1, "MPI6", 130.0, 6.0}, {"ind18", -1, "MPI6", 18.0, 3.0},
    {"ind19", +1, "MPI6", 75.0, 5.0},
};
constexpr std::size_t kIndicatorCount = std::size(kIndicators);
constexpr std::size_t kDuplicateOffset = 15;  // ind16..ind19 mirror ind01..ind04
constexpr double kNoiseSd = 2.0;
constexpr double kMixProbability = 0.01;     // chance of drawing the other community's profile
constexpr double kBorderProbability = 0.08;  // chance of drawing a shared border profile instead

constexpr AttributeProfile kHubProfiles[] = {
    {1, 3, 2, 0, 1},
    {1, 3, 3, 1, 1},
    {2, 3, 2, 0, 1},
    {1, 2, 2, 1, 1},
};
constexpr AttributeProfile kPeripheralProfiles[] = {
    {2, 1, 1, 0, 3},
    {3, 1, 1, 0, 3},
    {2, 1, 2, 0, 2},
    {1, 1, 1, 1, 3},
    {3, 2, 2, 0, 2},
    {2, 2, 1, 0, 2},
};
// Drawn by either community with equal odds: these cliques split near 50/50,
// small enough that the field competes with the clique majority and the
// frozen alignment varies from chain to chain.
constexpr AttributeProfile kBorderProfiles[] = {
    {2, 2, 2, 0, 2}, {1, 2, 1, 0, 2}, {2, 2, 2, 1, 2}, {1, 2, 2, 0, 2},
    {3, 2, 1, 0, 2}, {2, 2, 1, 1, 2}, {1, 2, 1, 1, 2}, {3, 2, 2, 1, 2},
};

double standard_normal(Rng& rng) {
    const double u1 = 1.0 - rng.uniform01();  // (0, 1], keeps the log finite
    const double u2 = rng.uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

template <std::size_t K>
AttributeProfile pick(const AttributeProfile (&set)[K], Rng& rng) {
    return set[rng.below(K)];
}

}  // namespace

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
    if (spec.units < 2) throw OutOfRangeError("synthetic dataset needs at least 2 units");
    if (!(spec.hub_fraction > 0.0 && spec.hub_fraction < 1.0))
        throw OutOfRangeError("hub_fraction must lie in (0, 1)");
    if (spec.label_noise < 0.0 || spec.label_noise >= 1.0)
        throw OutOfRangeError("label_noise must lie in [0, 1)");
    if (spec.field_strength < 0.0) throw OutOfRangeError("field_strength must be >= 0");

    SyntheticData data;
    data.unit_ids.reserve(spec.units);
    data.indicator_names.reserve(kIndicatorCount);
    for (const auto& meta : kIndicators) data.indicator_names.emplace_back(meta.name);
    data.indicators.resize(static_cast<Eigen::Index>(spec.units),
                           static_cast<Eigen::Index>(kIndicatorCount));
    data.profiles.reserve(spec.units);
    data.labels.reserve(spec.units);

    const std::uint64_t master = derive_seed(spec.seed, seed_domain::synthetic);
    const int id_width = std::max<int>(4, static_cast<int>(std::to_string(spec.units).size()));
    for (std::size_t i = 0; i < spec.units; ++i) {
        Rng rng(derive_seed(master, i));

        std::string id = std::to_string(i + 1);
        id.insert(0, static_cast<std::size_t>(id_width) - id.size(), '0');
        data.unit_ids.push_back("U" + id);

        const int community = rng.uniform01() < spec.hub_fraction ? +1 : -1;
        const bool border = rng.uniform01() < kBorderProbability;
        const bool mixed = rng.uniform01() < kMixProbability;
        const bool hub_profile = (community == +1) != mixed;
        data.profiles.push_back(border       ? pick(kBorderProfiles, rng)
                                : hub_profile ? pick(kHubProfiles, rng)
                                              : pick(kPeripheralProfiles, rng));

        for (std::size_t j = 0; j < kDuplicateOffset; ++j) {
            const auto& meta = kIndicators[j];
            const double signal = spec.field_strength * static_cast<double>(community) *
                                  static_cast<double>(meta.polarity) * meta.amplitude;
            data.indicators(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                meta.base + signal + kNoiseSd * standard_normal(rng);
        }
        for (std::size_t j = kDuplicateOffset; j < kIndicatorCount; ++j)
            data.indicators(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                data.indicators(static_cast<Eigen::Index>(i),
                                static_cast<Eigen::Index>(j - kDuplicateOffset));

        const bool flip = rng.uniform01() < spec.label_noise;
        data.labels.push_back(flip ? -community : community);
    }
    return data;
}

RunConfig synthetic_config(const SyntheticSpec& spec, const std::string& directory) {
    RunConfig c;
    c.input = (std::filesystem::path(directory) / "units.csv").string();
    c.geometry = (std::filesystem::path(directory) / "geometry.geojson").string();
    c.output_dir = (std::filesystem::path(directory) / "out").string();
    for (const auto& meta : kIndicators)
        c.indicators.push_back({meta.name, meta.polarity, meta.group});
    c.group_directions = {{"MPI1", Direction::positive}, {"MPI2", Direction::positive},
                          {"MPI3", Direction::negative}, {"MPI4", Direction::positive},
                          {"MPI5", Direction::positive}, {"MPI6", Direction::positive}};
    c.schedule = {ScheduleKind::hyperbolic, 100.0};
    c.chain.n_iter = 60000;
    c.chain.burn_in_fraction = 0.10;
    c.chain.seed = spec.seed;
    c.workers = 1;
    c.replicate_mode = ReplicateMode::resample;
    c.replicate_count = 500;
    c.configs_per_replicate = 300;
    c.base_chains = 6;
    c.diagnostic_samples = 1000;
    c.diagnostic_temperature = 1.0;
    c.bootstrap_r = 200;
    c.bootstrap_m = 1000;
    c.bootstrap_alpha = 0.05;
    c.conformal_alpha = 0.05;
    c.conformal_calibration_fraction = 0.5;
    return c;
}

SyntheticBundle write_synthetic_bundle(const SyntheticSpec& spec, const std::string& directory) {
    const SyntheticData data = generate_synthetic(spec);
    std::filesystem::create_directories(directory);

    CsvTable table;
    table.columns.push_back("unit_id");
    for (const auto& name : data.indicator_names) table.columns.push_back(name);
    for (const char* name : {"ALT", "POP", "SUP", "CLITO", "DEGURB", "CLASS"})
        table.columns.emplace_back(name);
    table.rows.reserve(spec.units);
    for (std::size_t i = 0; i < spec.units; ++i) {
        std::vector<std::string> row;
        row.reserve(table.columns.size());
        row.push_back(data.unit_ids[i]);
        for (std::size_t j = 0; j < data.indicator_names.size(); ++j)
            row.push_back(format_double(
                data.indicators(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));
        const auto& p = data.profiles[i];
        row.push_back(std::to_string(p.altitude));
        row.push_back(std::to_string(p.population));
        row.push_back(std::to_string(p.area));
        row.push_back(std::to_string(p.coastal));
        row.push_back(std::to_string(p.urbanization));
        row.push_back(data.labels[i] == +1 ? "1" : "-1");
        table.rows.push_back(std::move(row));
    }

    SyntheticBundle bundle;
    bundle.units_csv = (std::filesystem::path(directory) / "units.csv").string();
    write_csv(bundle.units_csv, table.columns, table.rows);

    // The saved config uses bare names; load_config resolves them against the
    // config file's directory, so the bundle stays relocatable.
    RunConfig config = synthetic_config(spec, directory);
    config.input = "units.csv";
    config.geometry = "geometry.geojson";
    config.output_dir = "out";
    bundle.config_json = (std::filesystem::path(directory) / "config.json").string();
    save_config(config, bundle.config_json);

    // Square-cell grid so the bundle exercises the map join out of the box.
    const auto width = static_cast<std::size_t>(
        std::ceil(std::sqrt(static_cast<double>(spec.units))));
    constexpr double kLon0 = 12.0, kLat0 = 42.0, kCell = 0.01;
    nlohmann::json features = nlohmann::json::array();
    for (std::size_t i = 0; i < spec.units; ++i) {
        const double x = kLon0 + kCell * static_cast<double>(i % width);
        const double y = kLat0 + kCell * static_cast<double>(i / width);
        nlohmann::json ring = {{x, y}, {x + kCell, y}, {x + kCell, y + kCell},
                               {x, y + kCell}, {x, y}};
        features.push_back({{"type", "Feature"},
                            {"properties", {{"unit_id", data.unit_ids[i]}}},
                            {"geometry", {{"type", "Polygon"}, {"coordinates", {ring}}}}});
    }
    nlohmann::json geojson = {{"type", "FeatureCollection"}, {"features", features}};
    bundle.geometry_geojson = (std::filesystem::path(directory) / "geometry.geojson").string();
    std::ofstream out(bundle.geometry_geojson, std::ios::binary);
    if (!out) throw Error("cannot write '" + bundle.geometry_geojson + "'");
    out << geojson.dump(2) << '\n';
    return bundle;
}

}  // namespace isingmap
