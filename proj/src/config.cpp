#include "isingmap/config.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "isingmap/rng.hpp"

namespace isingmap {

namespace {

template <typename T>
void read_if_present(const nlohmann::json& j, const char* key, T& out) {
    if (auto it = j.find(key); it != j.end()) out = it->template get<T>();
}

ScheduleKind schedule_kind_from(const std::string& name) {
    if (name == "hyperbolic") return ScheduleKind::hyperbolic;
    if (name == "fixed") return ScheduleKind::fixed;
    if (name == "logarithmic") return ScheduleKind::logarithmic;
    throw ConfigError("unknown schedule kind '" + name + "'");
}

Direction direction_from(const std::string& name) {
    if (name == "positive") return Direction::positive;
    if (name == "negative") return Direction::negative;
    throw ConfigError("unknown direction '" + name + "'");
}

ReplicateMode replicate_mode_from(const std::string& name) {
    if (name == "rerun") return ReplicateMode::rerun;
    if (name == "resample") return ReplicateMode::resample;
    throw ConfigError("unknown replicate mode '" + name + "'");
}

}  // namespace

std::string to_string(ReplicateMode mode) {
    return mode == ReplicateMode::rerun ? "rerun" : "resample";
}

std::string to_string(ScheduleKind kind) {
    switch (kind) {
        case ScheduleKind::hyperbolic: return "hyperbolic";
        case ScheduleKind::fixed: return "fixed";
        case ScheduleKind::logarithmic: return "logarithmic";
    }
    return "unknown";
}

std::string to_string(Direction direction) {
    return direction == Direction::positive ? "positive" : "negative";
}

void RunConfig::validate() const {
    if (input.empty()) throw ConfigError("input path is required");
    if (indicators.empty()) throw ConfigError("at least one indicator is required");
    for (const auto& spec : indicators) {
        if (spec.name.empty()) throw ConfigError("indicator with empty name");
        if (spec.polarity != 1 && spec.polarity != -1)
            throw ConfigError("indicator '" + spec.name + "' polarity must be -1 or +1");
        if (spec.group.empty())
            throw ConfigError("indicator '" + spec.name + "' has no group");
    }
    for (const auto& gd : group_directions) {
        const bool known = std::any_of(indicators.begin(), indicators.end(),
                                       [&](const auto& s) { return s.group == gd.group; });
        if (!known) throw ConfigError("direction given for unknown group '" + gd.group + "'");
    }
    if (pca_components < 0) throw ConfigError("pca_components must be >= 0");
    if (graph_min_match < 1 || graph_min_match > 5)
        throw ConfigError("graph min_match must lie in 1..5");
    if (!(schedule.t0 > 0.0)) throw ConfigError("schedule t0 must be positive");
    if (chain.n_iter == 0) throw ConfigError("chain n_iter must be >= 1");
    if (chain.burn_in_fraction < 0.0 || chain.burn_in_fraction >= 1.0)
        throw ConfigError("burn_in_fraction must lie in [0, 1)");
    if (workers == 0) throw ConfigError("workers must be >= 1");
    if (replicate_count == 0) throw ConfigError("replicate count must be >= 1");
    if (configs_per_replicate == 0) throw ConfigError("configs_per_replicate must be >= 1");
    if (base_chains == 0) throw ConfigError("base_chains must be >= 1");
    if (diagnostic_samples == 0) throw ConfigError("diagnostic_samples must be >= 1");
    if (!(diagnostic_temperature > 0.0))
        throw ConfigError("diagnostic_temperature must be positive");
    if (bootstrap_r == 0 || bootstrap_m == 0)
        throw ConfigError("bootstrap needs r >= 1 and m >= 1");
    if (!(bootstrap_alpha > 0.0 && bootstrap_alpha < 1.0))
        throw ConfigError("bootstrap alpha must lie in (0, 1)");
    if (!(conformal_alpha > 0.0 && conformal_alpha < 1.0))
        throw ConfigError("conformal alpha must lie in (0, 1)");
    if (!(conformal_calibration_fraction > 0.0 && conformal_calibration_fraction < 1.0))
        throw ConfigError("calibration_fraction must lie in (0, 1)");
}

std::uint64_t RunConfig::split_seed() const {
    return conformal_seed ? *conformal_seed
                          : derive_seed(chain.seed, seed_domain::conformal_split);
}

RunConfig config_from_json(const nlohmann::json& j) {
    RunConfig c;
    try {
        read_if_present(j, "input", c.input);
        if (auto it = j.find("geometry"); it != j.end() && !it->is_null())
            c.geometry = it->get<std::string>();
        read_if_present(j, "output_dir", c.output_dir);

        if (auto it = j.find("indicators"); it != j.end()) {
            for (const auto& entry : *it) {
                IndicatorSpec spec;
                spec.name = entry.at("name").get<std::string>();
                spec.polarity = entry.at("polarity").get<int>();
                spec.group = entry.at("group").get<std::string>();
                c.indicators.push_back(std::move(spec));
            }
        }
        if (auto it = j.find("groups"); it != j.end()) {
            for (const auto& entry : *it) {
                GroupDirection gd;
                gd.group = entry.at("name").get<std::string>();
                gd.direction = direction_from(entry.at("direction").get<std::string>());
                c.group_directions.push_back(std::move(gd));
            }
        }
        read_if_present(j, "pca_components", c.pca_components);
        if (auto it = j.find("graph"); it != j.end())
            read_if_present(*it, "min_match", c.graph_min_match);

        if (auto it = j.find("schedule"); it != j.end()) {
            if (auto kind = it->find("kind"); kind != it->end())
                c.schedule.kind = schedule_kind_from(kind->get<std::string>());
            read_if_present(*it, "t0", c.schedule.t0);
        }
        if (auto it = j.find("chain"); it != j.end()) {
            read_if_present(*it, "n_iter", c.chain.n_iter);
            read_if_present(*it, "burn_in_fraction", c.chain.burn_in_fraction);
            read_if_present(*it, "seed", c.chain.seed);
            read_if_present(*it, "trace_stride", c.chain.trace_stride);
        }
        read_if_present(j, "workers", c.workers);

        if (auto it = j.find("replicates"); it != j.end()) {
            if (auto mode = it->find("mode"); mode != it->end())
                c.replicate_mode = replicate_mode_from(mode->get<std::string>());
            read_if_present(*it, "count", c.replicate_count);
            read_if_present(*it, "configs_per_replicate", c.configs_per_replicate);
            read_if_present(*it, "base_chains", c.base_chains);
            read_if_present(*it, "write_matrix", c.write_replicate_matrix);
        }
        if (auto it = j.find("diagnostics"); it != j.end()) {
            read_if_present(*it, "samples", c.diagnostic_samples);
            read_if_present(*it, "temperature", c.diagnostic_temperature);
            if (auto bs = it->find("bootstrap"); bs != it->end()) {
                read_if_present(*bs, "r", c.bootstrap_r);
                read_if_present(*bs, "m", c.bootstrap_m);
                read_if_present(*bs, "alpha", c.bootstrap_alpha);
            }
        }
        if (auto it = j.find("conformal"); it != j.end()) {
            read_if_present(*it, "alpha", c.conformal_alpha);
            read_if_present(*it, "calibration_fraction", c.conformal_calibration_fraction);
            if (auto seed = it->find("seed"); seed != it->end() && !seed->is_null())
                c.conformal_seed = seed->get<std::uint64_t>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(e.what());
    }
    return c;
}

nlohmann::json config_to_json(const RunConfig& c) {
    nlohmann::json j;
    j["input"] = c.input;
    if (c.geometry) j["geometry"] = *c.geometry;
    j["output_dir"] = c.output_dir;

    j["indicators"] = nlohmann::json::array();
    for (const auto& spec : c.indicators)
        j["indicators"].push_back(
            {{"name", spec.name}, {"polarity", spec.polarity}, {"group", spec.group}});
    j["groups"] = nlohmann::json::array();
    for (const auto& gd : c.group_directions)
        j["groups"].push_back({{"name", gd.group}, {"direction", to_string(gd.direction)}});

    j["pca_components"] = c.pca_components;
    j["graph"] = {{"min_match", c.graph_min_match}};
    j["schedule"] = {{"kind", to_string(c.schedule.kind)}, {"t0", c.schedule.t0}};
    j["chain"] = {{"n_iter", c.chain.n_iter},
                  {"burn_in_fraction", c.chain.burn_in_fraction},
                  {"seed", c.chain.seed},
                  {"trace_stride", c.chain.trace_stride}};
    j["workers"] = c.workers;
    j["replicates"] = {{"mode", to_string(c.replicate_mode)},
                       {"count", c.replicate_count},
                       {"configs_per_replicate", c.configs_per_replicate},
                       {"base_chains", c.base_chains},
                       {"write_matrix", c.write_replicate_matrix}};
    j["diagnostics"] = {
        {"samples", c.diagnostic_samples},
        {"temperature", c.diagnostic_temperature},
        {"bootstrap",
         {{"r", c.bootstrap_r}, {"m", c.bootstrap_m}, {"alpha", c.bootstrap_alpha}}}};
    j["conformal"] = {{"alpha", c.conformal_alpha},
                      {"calibration_fraction", c.conformal_calibration_fraction}};
    if (c.conformal_seed) j["conformal"]["seed"] = *c.conformal_seed;
    return j;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("'" + path + "': " + e.what());
    }
    RunConfig c = config_from_json(j);

    // Relative paths in a config file are taken relative to the file itself,
    // so bundles (config + data side by side) can be moved freely.
    const auto base = std::filesystem::path(path).parent_path();
    auto resolve = [&](std::string& p) {
        if (!p.empty() && std::filesystem::path(p).is_relative())
            p = (base / p).lexically_normal().string();
    };
    resolve(c.input);
    if (c.geometry) resolve(*c.geometry);
    resolve(c.output_dir);
    return c;
}

void save_config(const RunConfig& config, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << config_to_json(config).dump(2) << '\n';
}

std::string config_hash(const RunConfig& config) {
    nlohmann::json j = config_to_json(config);
    // Result-neutral fields stay out of the hash.
    j.erase("output_dir");
    j.erase("workers");
    const std::string canonical = j.dump();

    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (const unsigned char ch : canonical) {
        hash ^= ch;
        hash *= 0x100000001b3ull;
    }
    char buffer[17];
    std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(hash));
    return std::string(buffer);
}

}  // namespace isingmap
