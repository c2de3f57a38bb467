#pragma once

#include <cstdint>
#include <string>

#include "isingmap/config.hpp"

namespace isingmap {

// Planted two-community dataset for demos and end-to-end tests. Hubs and
// peripheral units get distinct attribute profiles (with deliberate overlap so
// some cliques mix both classes) and indicator levels shifted along the class
// label, scaled by field_strength.
struct SyntheticSpec {
    std::size_t units = 966;
    std::uint64_t seed = 1;
    double field_strength = 1.0;
    double hub_fraction = 0.40;
    // Probability that the written class label disagrees with the community
    // that generated the unit, so observed and simulated labelings differ.
    double label_noise = 0.01;
};

struct SyntheticBundle {
    std::string units_csv;
    std::string config_json;
    std::string geometry_geojson;
};

// Writes units.csv, config.json and geometry.geojson under `directory` and
// returns their paths. The config references the generated files and carries
// demo-scale sampler settings.
SyntheticBundle write_synthetic_bundle(const SyntheticSpec& spec, const std::string& directory);

// The generated table in memory: indicator columns, profiles and labels in
// the same order as the CSV rows.
struct SyntheticData {
    std::vector<std::string> unit_ids;
    std::vector<std::string> indicator_names;
    Eigen::MatrixXd indicators;
    std::vector<AttributeProfile> profiles;
    std::vector<int> labels;  // -1 or +1 as written to CLASS
};

SyntheticData generate_synthetic(const SyntheticSpec& spec);

// The demo run configuration matching generate_synthetic's schema.
RunConfig synthetic_config(const SyntheticSpec& spec, const std::string& directory);

}  // namespace isingmap
