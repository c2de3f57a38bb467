#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "isingmap/conformal.hpp"
#include "isingmap/error.hpp"
#include "isingmap/indices.hpp"
#include "isingmap/sampler.hpp"

namespace isingmap {

class ConfigError : public Error {
  public:
    explicit ConfigError(const std::string& what) : Error("config: " + what) {}
};

// How replicate marginal estimates are produced.
//   rerun:    every replicate is an independent full Metropolis chain.
//   resample: a few base chains are pooled into p_hat, then each replicate is
//             refit from Bernoulli draws against the pooled marginals.
enum class ReplicateMode { rerun, resample };

std::string to_string(ReplicateMode mode);
std::string to_string(ScheduleKind kind);
std::string to_string(Direction direction);

struct GroupDirection {
    std::string group;
    Direction direction = Direction::positive;
};

struct RunConfig {
    std::string input;                  // units CSV
    std::optional<std::string> geometry;  // GeoJSON for the uncertainty map
    std::string output_dir = "out";

    std::vector<IndicatorSpec> indicators;
    std::vector<GroupDirection> group_directions;
    int pca_components = 0;  // 0 keeps every component
    int graph_min_match = 5;

    AnnealingSchedule schedule;
    ChainSpec chain;
    std::size_t workers = 1;

    ReplicateMode replicate_mode = ReplicateMode::resample;
    std::size_t replicate_count = 20000;       // K replicate estimates
    std::uint64_t configs_per_replicate = 300; // draws behind each resampled estimate
    std::size_t base_chains = 6;               // pooled chains in resample mode
    bool write_replicate_matrix = false;

    std::size_t diagnostic_samples = 1000;
    double diagnostic_temperature = 1.0;
    std::size_t bootstrap_r = 200;
    std::size_t bootstrap_m = 1000;
    double bootstrap_alpha = 0.05;

    double conformal_alpha = 0.05;
    double conformal_calibration_fraction = 0.5;
    // Absent: the split seed is derived from chain.seed.
    std::optional<std::uint64_t> conformal_seed;

    void validate() const;

    // Seed for the conformal calibration/test split.
    std::uint64_t split_seed() const;
};

RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& config);

RunConfig load_config(const std::string& path);
void save_config(const RunConfig& config, const std::string& path);

// FNV-1a over the canonical JSON form, excluding fields that cannot change
// results (output_dir, workers). Hex string.
std::string config_hash(const RunConfig& config);

}  // namespace isingmap
