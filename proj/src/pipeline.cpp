#include "isingmap/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "isingmap/csv.hpp"
#include "isingmap/diagnostics.hpp"
#include "isingmap/rng.hpp"
#include "isingmap/sampler.hpp"
#include "isingmap/stats.hpp"

namespace isingmap {

namespace fs = std::filesystem;

GeometryJoinError::GeometryJoinError(const std::vector<std::string>& missing)
    : Error([&] {
          std::string msg = "geometry join failed; no feature for unit(s): ";
          const std::size_t shown = std::min<std::size_t>(missing.size(), 8);
          for (std::size_t i = 0; i < shown; ++i) {
              if (i) msg += ", ";
              msg += missing[i];
          }
          if (missing.size() > shown)
              msg += " (+" + std::to_string(missing.size() - shown) + " more)";
          return msg;
      }()) {}

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr std::size_t kSpectrumDenseCap = 5000;

fs::path out_path(const RunConfig& config, const char* name) {
    return fs::path(config.output_dir) / name;
}

CsvTable read_artifact(const RunConfig& config, const char* name, const char* producer) {
    const fs::path path = out_path(config, name);
    if (!fs::exists(path))
        throw Error("'" + path.string() + "' not found; run the '" + std::string(producer) +
                    "' stage first");
    return read_csv(path);
}

std::size_t require_column(const CsvTable& csv, const std::string& name) {
    const auto idx = csv.column_index(name);
    if (!idx) throw MissingColumnError(name);
    return *idx;
}

void require_units_aligned(const char* artifact, const std::vector<std::string>& artifact_ids,
                           const std::vector<std::string>& roster_ids) {
    if (artifact_ids != roster_ids)
        throw Error(std::string(artifact) +
                    " unit ordering does not match the input roster; regenerate the artifact");
}

// Column of doubles keyed by the artifact's own unit order.
struct UnitColumn {
    std::vector<std::string> unit_ids;
    Eigen::VectorXd values;
};

UnitColumn read_unit_column(const CsvTable& csv, const std::string& value_column,
                            const char* artifact) {
    const std::size_t vcol = require_column(csv, value_column);
    UnitColumn out;
    out.unit_ids.reserve(csv.rows.size());
    out.values.resize(static_cast<Eigen::Index>(csv.rows.size()));
    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
        out.unit_ids.push_back(csv.rows[r][0]);
        out.values[static_cast<Eigen::Index>(r)] =
            parse_double(csv.rows[r][vcol], std::string(artifact) + " row " + std::to_string(r + 2));
    }
    return out;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
}

nlohmann::json load_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    try {
        nlohmann::json j;
        in >> j;
        return j;
    } catch (const nlohmann::json::exception& e) {
        throw Error("'" + path.string() + "': " + e.what());
    }
}

Direction direction_of_group(const RunConfig& config, const std::string& group) {
    for (const auto& gd : config.group_directions)
        if (gd.group == group) return gd.direction;
    return Direction::positive;
}

Eigen::VectorXd observed_as_probability(const SpinConfiguration& reference) {
    Eigen::VectorXd y(static_cast<Eigen::Index>(reference.size()));
    for (std::size_t i = 0; i < reference.size(); ++i)
        y[static_cast<Eigen::Index>(i)] = reference.spins[i] == +1 ? 1.0 : 0.0;
    return y;
}

InteractionGraph read_graph(const RunConfig& config, std::size_t n) {
    const CsvTable csv = read_artifact(config, "edges.csv", "graph");
    const std::size_t ci = require_column(csv, "i");
    const std::size_t cj = require_column(csv, "j");
    const std::size_t cw = require_column(csv, "weight");
    std::vector<Edge> edges;
    edges.reserve(csv.rows.size());
    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
        const std::string ctx = "edges.csv row " + std::to_string(r + 2);
        Edge e;
        e.i = static_cast<std::uint32_t>(parse_int(csv.rows[r][ci], ctx));
        e.j = static_cast<std::uint32_t>(parse_int(csv.rows[r][cj], ctx));
        e.weight = parse_double(csv.rows[r][cw], ctx);
        edges.push_back(e);
    }
    return InteractionGraph::from_edges(n, std::move(edges));
}

struct MarginalsArtifact {
    std::vector<std::string> unit_ids;
    Eigen::VectorXd p_hat;
    Eigen::VectorXd sigma;
};

MarginalsArtifact read_marginals(const RunConfig& config) {
    const CsvTable csv = read_artifact(config, "marginals.csv", "simulate");
    const std::size_t cp = require_column(csv, "p_hat");
    const std::size_t cs = require_column(csv, "sigma");
    MarginalsArtifact out;
    out.unit_ids.reserve(csv.rows.size());
    out.p_hat.resize(static_cast<Eigen::Index>(csv.rows.size()));
    out.sigma.resize(static_cast<Eigen::Index>(csv.rows.size()));
    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
        const std::string ctx = "marginals.csv row " + std::to_string(r + 2);
        out.unit_ids.push_back(csv.rows[r][0]);
        out.p_hat[static_cast<Eigen::Index>(r)] = parse_double(csv.rows[r][cp], ctx);
        out.sigma[static_cast<Eigen::Index>(r)] = parse_double(csv.rows[r][cs], ctx);
    }
    return out;
}

nlohmann::json summary_to_json(const SixNumberSummary& s) {
    return {{"min", s.min},   {"q1", s.q1}, {"median", s.median},
            {"mean", s.mean}, {"q3", s.q3}, {"max", s.max}};
}

nlohmann::json bootstrap_to_json(const BootstrapCi& ci, double alpha) {
    return {{"mean", ci.mean},           {"lower", ci.lower},
            {"upper", ci.upper},         {"resamples", ci.resamples},
            {"resample_size", ci.resample_size}, {"alpha", alpha}};
}

AdaptivityClass adaptivity_from(const std::string& name) {
    if (name == "zero_width") return AdaptivityClass::zero_width;
    if (name == "intermediate") return AdaptivityClass::intermediate;
    if (name == "full") return AdaptivityClass::full;
    throw Error("unknown adaptivity class '" + name + "'");
}

}  // namespace

Dataset ingest(const std::string& csv_path, const RunConfig& config) {
    const CsvTable csv = read_csv(csv_path);
    if (csv.columns.size() < 2) throw MissingColumnError("unit id + data columns");

    std::vector<std::size_t> indicator_cols;
    indicator_cols.reserve(config.indicators.size());
    for (const auto& spec : config.indicators)
        indicator_cols.push_back(require_column(csv, spec.name));
    const std::size_t c_alt = require_column(csv, "ALT");
    const std::size_t c_pop = require_column(csv, "POP");
    const std::size_t c_sup = require_column(csv, "SUP");
    const std::size_t c_cli = require_column(csv, "CLITO");
    const std::size_t c_deg = require_column(csv, "DEGURB");
    const std::size_t c_class = require_column(csv, "CLASS");

    Dataset data;
    const std::size_t n = csv.rows.size();
    data.unit_ids.reserve(n);
    data.profiles.reserve(n);
    data.reference.spins.reserve(n);
    data.table.values.resize(static_cast<Eigen::Index>(n),
                             static_cast<Eigen::Index>(config.indicators.size()));
    data.table.specs = config.indicators;

    std::unordered_set<std::string> seen;
    seen.reserve(n);
    for (std::size_t r = 0; r < n; ++r) {
        const auto& row = csv.rows[r];
        const std::size_t line = r + 2;  // 1-based file line, after the header

        const std::string& id = row[0];
        if (!seen.insert(id).second) throw DuplicateUnitError(id);
        data.unit_ids.push_back(id);

        for (std::size_t j = 0; j < indicator_cols.size(); ++j) {
            try {
                data.table.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) =
                    parse_double(row[indicator_cols[j]], "");
            } catch (const CsvError&) {
                throw ParseError(line, config.indicators[j].name,
                                 "'" + row[indicator_cols[j]] + "' is not a number");
            }
        }

        AttributeProfile profile;
        auto attr = [&](std::size_t col, const char* name) {
            try {
                return static_cast<int>(parse_int(row[col], ""));
            } catch (const CsvError&) {
                throw ParseError(line, name, "'" + row[col] + "' is not an integer");
            }
        };
        profile.altitude = attr(c_alt, "ALT");
        profile.population = attr(c_pop, "POP");
        profile.area = attr(c_sup, "SUP");
        profile.coastal = attr(c_cli, "CLITO");
        profile.urbanization = attr(c_deg, "DEGURB");
        validate_profile(profile, r);
        data.profiles.push_back(profile);

        const std::string& label = row[c_class];
        if (label == "-1")
            data.reference.spins.push_back(-1);
        else if (label == "1" || label == "+1")
            data.reference.spins.push_back(+1);
        else
            throw InvalidClassLabelError(line, label);
    }
    data.table.unit_ids = data.unit_ids;
    data.table.validate();
    return data;
}

void stage_indices(const RunConfig& config) {
    const Dataset data = ingest(config.input, config);
    const auto groups = group_columns(config.indicators);
    const std::size_t n = data.unit_ids.size();

    std::vector<std::string> columns{"unit_id"};
    Eigen::MatrixXd scores(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(groups.size()));
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const auto& [group_name, cols] = groups[g];
        columns.push_back(group_name);

        IndicatorTable sub;
        sub.unit_ids = data.unit_ids;
        sub.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cols.size()));
        for (std::size_t k = 0; k < cols.size(); ++k) {
            sub.values.col(static_cast<Eigen::Index>(k)) = data.table.values.col(cols[k]);
            sub.specs.push_back(data.table.specs[static_cast<std::size_t>(cols[k])]);
        }
        const Eigen::MatrixXd standardized = standardize(sub);
        const CompositeIndexVector index =
            mpi(standardized, direction_of_group(config, group_name), data.unit_ids);
        scores.col(static_cast<Eigen::Index>(g)) = index.scores;
    }

    fs::create_directories(config.output_dir);
    std::vector<std::vector<std::string>> rows;
    rows.reserve(n);
    for (std::size_t r = 0; r < n; ++r) {
        std::vector<std::string> row{data.unit_ids[r]};
        for (std::size_t g = 0; g < groups.size(); ++g)
            row.push_back(format_double(
                scores(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(g))));
        rows.push_back(std::move(row));
    }
    write_csv(out_path(config, "indices.csv"), columns, rows);
}

void stage_field(const RunConfig& config) {
    const CsvTable csv = read_artifact(config, "indices.csv", "indices");
    if (csv.columns.size() < 2) throw Error("indices.csv carries no index columns");
    const std::size_t n = csv.rows.size();
    const std::size_t p = csv.columns.size() - 1;

    std::vector<std::string> unit_ids;
    unit_ids.reserve(n);
    Eigen::MatrixXd indices(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    for (std::size_t r = 0; r < n; ++r) {
        unit_ids.push_back(csv.rows[r][0]);
        for (std::size_t c = 0; c < p; ++c)
            indices(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = parse_double(
                csv.rows[r][c + 1], "indices.csv row " + std::to_string(r + 2));
    }

    const PcaDecomposition decomposition = pca(indices);
    const ExternalField field = external_field(decomposition, unit_ids, config.pca_components);

    std::vector<std::vector<std::string>> rows;
    rows.reserve(n);
    for (std::size_t r = 0; r < n; ++r)
        rows.push_back({unit_ids[r], format_double(field.h[static_cast<Eigen::Index>(r)])});
    write_csv(out_path(config, "field.csv"), {"unit_id", "value"}, rows);

    const auto kept = config.pca_components == 0 || config.pca_components >= static_cast<int>(p)
                          ? p
                          : static_cast<std::size_t>(config.pca_components);
    nlohmann::json summary;
    summary["components"] = p;
    summary["components_kept"] = kept;
    summary["lambdas"] = std::vector<double>(
        decomposition.lambdas.data(), decomposition.lambdas.data() + decomposition.lambdas.size());
    summary["sdevs"] = std::vector<double>(
        decomposition.sdevs.data(), decomposition.sdevs.data() + decomposition.sdevs.size());
    write_json(out_path(config, "pca_summary.json"), summary);
}

void stage_graph(const RunConfig& config) {
    const Dataset data = ingest(config.input, config);
    const InteractionGraph graph = build_graph(data.profiles, config.graph_min_match);

    fs::create_directories(config.output_dir);
    std::vector<std::vector<std::string>> rows;
    rows.reserve(graph.edge_count());
    for (const auto& e : graph.edges())
        rows.push_back({std::to_string(e.i), std::to_string(e.j), format_double(e.weight)});
    write_csv(out_path(config, "edges.csv"), {"i", "j", "weight"}, rows);

    nlohmann::json degree_histogram = nlohmann::json::object();
    {
        std::map<std::size_t, std::size_t> hist;
        for (std::size_t u = 0; u < graph.size(); ++u) ++hist[graph.degree(u)];
        for (const auto& [degree, count] : hist)
            degree_histogram[std::to_string(degree)] = count;
    }
    nlohmann::json summary;
    summary["n"] = graph.size();
    summary["edge_count"] = graph.edge_count();
    summary["component_count"] = graph.component_count();
    summary["degree_histogram"] = degree_histogram;
    if (graph.size() <= kSpectrumDenseCap) {
        const SpectrumSummary spectrum = spectrum_summary(graph, kSpectrumDenseCap);
        summary["spectrum"] = {{"min_eigenvalue", spectrum.min_eigenvalue},
                               {"max_eigenvalue", spectrum.max_eigenvalue},
                               {"indefinite", spectrum.indefinite}};
    }
    write_json(out_path(config, "graph_summary.json"), summary);
}

void stage_simulate(const RunConfig& config) {
    const Dataset data = ingest(config.input, config);
    const std::size_t n = data.unit_ids.size();

    const UnitColumn field = read_unit_column(read_artifact(config, "field.csv", "field"),
                                              "value", "field.csv");
    require_units_aligned("field.csv", field.unit_ids, data.unit_ids);
    const InteractionGraph graph = read_graph(config, n);

    ChainSpec chain = config.chain;
    chain.seed = derive_seed(config.chain.seed, seed_domain::chains);

    MarginalEstimate estimate;
    if (config.replicate_mode == ReplicateMode::rerun) {
        estimate = run_replicates(graph, field.values, config.schedule, chain, data.reference,
                                  config.replicate_count, config.workers, data.unit_ids);
    } else {
        estimate = run_replicates(graph, field.values, config.schedule, chain, data.reference,
                                  config.base_chains, config.workers, data.unit_ids);
        estimate = bernoulli_replicates(estimate, config.replicate_count,
                                        config.configs_per_replicate,
                                        derive_seed(config.chain.seed, seed_domain::resample),
                                        config.workers);
    }

    // The trace chain reruns replicate 0 so the energy series matches the
    // first pooled chain exactly.
    ChainSpec trace_chain = config.chain;
    trace_chain.seed = derive_seed(chain.seed, 0);
    const ChainResult trace = run_chain(graph, field.values, config.schedule, trace_chain,
                                        data.reference);

    std::vector<std::vector<std::string>> rows;
    rows.reserve(n);
    for (std::size_t r = 0; r < n; ++r)
        rows.push_back({data.unit_ids[r],
                        format_double(estimate.p_hat[static_cast<Eigen::Index>(r)]),
                        format_double(estimate.sigma[static_cast<Eigen::Index>(r)])});
    write_csv(out_path(config, "marginals.csv"), {"unit_id", "p_hat", "sigma"}, rows);

    std::vector<std::vector<std::string>> trace_rows;
    trace_rows.reserve(trace.energy_trace.size());
    for (const auto& point : trace.energy_trace)
        trace_rows.push_back({std::to_string(point.iteration), format_double(point.energy)});
    write_csv(out_path(config, "energy_trace.csv"), {"iteration", "energy"}, trace_rows);

    if (config.write_replicate_matrix) {
        std::vector<std::string> columns{"replicate"};
        columns.insert(columns.end(), data.unit_ids.begin(), data.unit_ids.end());
        std::vector<std::vector<std::string>> matrix_rows;
        matrix_rows.reserve(static_cast<std::size_t>(estimate.replicates.rows()));
        for (Eigen::Index k = 0; k < estimate.replicates.rows(); ++k) {
            std::vector<std::string> row{std::to_string(k)};
            for (Eigen::Index j = 0; j < estimate.replicates.cols(); ++j)
                row.push_back(format_double(estimate.replicates(k, j)));
            matrix_rows.push_back(std::move(row));
        }
        write_csv(out_path(config, "replicates.csv"), columns, matrix_rows);
    }
}

void stage_diagnose(const RunConfig& config) {
    const Dataset data = ingest(config.input, config);
    const std::size_t n = data.unit_ids.size();

    const UnitColumn field = read_unit_column(read_artifact(config, "field.csv", "field"),
                                              "value", "field.csv");
    require_units_aligned("field.csv", field.unit_ids, data.unit_ids);
    const InteractionGraph graph = read_graph(config, n);
    const MarginalsArtifact marginals = read_marginals(config);
    require_units_aligned("marginals.csv", marginals.unit_ids, data.unit_ids);

    const auto samples =
        sample_configurations(marginals.p_hat, config.diagnostic_samples,
                              derive_seed(config.chain.seed, seed_domain::diagnostics));
    const ScoredConfigurations scored = score_configurations(graph, field.values, data.reference,
                                                             samples, config.diagnostic_temperature);

    std::vector<double> ratios, logliks, gaps;
    ratios.reserve(scored.scores.size());
    logliks.reserve(scored.scores.size());
    for (const auto& s : scored.scores) {
        if (scored.ratio_defined) ratios.push_back(s.energy_ratio);
        logliks.push_back(s.loglik_ratio);
        if (std::isfinite(s.log_energy_gap)) gaps.push_back(s.log_energy_gap);
    }

    const Eigen::VectorXd y01 = observed_as_probability(data.reference);
    const double jsd = jensen_shannon(marginals.p_hat, y01);
    const ThresholdedPrediction predicted = threshold_marginals(marginals.p_hat);
    const MismatchMatrix mm = mismatch(data.reference, predicted.config);

    const std::uint64_t boot_master = derive_seed(config.chain.seed, seed_domain::bootstrap);
    const BootstrapCi boot_ll =
        bootstrap_ci(logliks, config.bootstrap_r, config.bootstrap_m, config.bootstrap_alpha,
                     derive_seed(boot_master, 0), config.workers);

    nlohmann::json j;
    j["samples"] = config.diagnostic_samples;
    j["temperature"] = config.diagnostic_temperature;
    j["reference_energy"] = scored.reference_energy;
    j["ratio_defined"] = scored.ratio_defined;
    j["loglik_ratio"] = summary_to_json(summarize(logliks));
    if (scored.ratio_defined) j["energy_ratio"] = summary_to_json(summarize(ratios));
    if (!gaps.empty()) {
        j["log_energy_gap"] = summary_to_json(summarize(gaps));
        j["log_energy_gap"]["count"] = gaps.size();
    }
    j["jsd"] = jsd;
    j["mismatch"] = {{"counts",
                      {{mm.counts[0][0], mm.counts[0][1]}, {mm.counts[1][0], mm.counts[1][1]}}},
                     {"accuracy", mm.accuracy()},
                     {"threshold_ties", predicted.ties}};
    j["bootstrap"] = {{"loglik_ratio", bootstrap_to_json(boot_ll, config.bootstrap_alpha)}};
    if (scored.ratio_defined) {
        const BootstrapCi boot_er =
            bootstrap_ci(ratios, config.bootstrap_r, config.bootstrap_m, config.bootstrap_alpha,
                         derive_seed(boot_master, 1), config.workers);
        j["bootstrap"]["energy_ratio"] = bootstrap_to_json(boot_er, config.bootstrap_alpha);
    }
    write_json(out_path(config, "diagnostics.json"), j);
}

void stage_conformal(const RunConfig& config) {
    const Dataset data = ingest(config.input, config);
    const std::size_t n = data.unit_ids.size();
    const MarginalsArtifact marginals = read_marginals(config);
    require_units_aligned("marginals.csv", marginals.unit_ids, data.unit_ids);

    const Eigen::VectorXd y01 = observed_as_probability(data.reference);
    const CalibrationSplit split =
        calibration_split(n, config.conformal_calibration_fraction, config.split_seed());

    Eigen::VectorXd y_cal(static_cast<Eigen::Index>(split.calibration.size()));
    Eigen::VectorXd yhat_cal(y_cal.size());
    Eigen::VectorXd sigma_cal(y_cal.size());
    for (std::size_t k = 0; k < split.calibration.size(); ++k) {
        const auto idx = static_cast<Eigen::Index>(split.calibration[k]);
        y_cal[static_cast<Eigen::Index>(k)] = y01[idx];
        yhat_cal[static_cast<Eigen::Index>(k)] = marginals.p_hat[idx];
        sigma_cal[static_cast<Eigen::Index>(k)] = marginals.sigma[idx];
    }
    const double q_hat =
        conformal_quantile(nonconformity_scores(y_cal, yhat_cal, sigma_cal),
                           config.conformal_alpha);

    // Intervals cover the full roster; the test block below carries the
    // subset with the distribution-free guarantee.
    std::vector<PredictionInterval> intervals =
        prediction_intervals(marginals.p_hat, marginals.sigma, q_hat, data.unit_ids);
    const CoverageReport report = coverage_report(intervals, y01);

    std::vector<PredictionInterval> test_intervals;
    test_intervals.reserve(split.test.size());
    Eigen::VectorXd y_test(static_cast<Eigen::Index>(split.test.size()));
    for (std::size_t k = 0; k < split.test.size(); ++k) {
        test_intervals.push_back(intervals[split.test[k]]);
        y_test[static_cast<Eigen::Index>(k)] = y01[static_cast<Eigen::Index>(split.test[k])];
    }
    const CoverageReport test_report = coverage_report(test_intervals, y_test);

    std::vector<std::vector<std::string>> rows;
    rows.reserve(n);
    std::vector<std::string> out_of_interval;
    for (std::size_t r = 0; r < n; ++r) {
        const auto& pi = intervals[r];
        if (!pi.covered) out_of_interval.push_back(pi.unit_id);
        rows.push_back({pi.unit_id,
                        format_double(y01[static_cast<Eigen::Index>(r)]),
                        format_double(pi.center),
                        format_double(marginals.sigma[static_cast<Eigen::Index>(r)]),
                        format_double(pi.lower),
                        format_double(pi.upper),
                        pi.covered ? "1" : "0",
                        to_string(pi.adaptivity_class)});
    }
    write_csv(out_path(config, "intervals.csv"),
              {"unit_id", "y_true", "y_hat", "sigma", "lower", "upper", "covered",
               "adaptivity_class"},
              rows);

    auto report_to_json = [](const CoverageReport& rep) {
        return nlohmann::json{{"coverage", rep.coverage},
                              {"miw", rep.miw},
                              {"riw", rep.riw},
                              {"riw_degenerate", rep.riw_degenerate},
                              {"class_shares",
                               {{"zero_width", rep.class_shares[0]},
                                {"intermediate", rep.class_shares[1]},
                                {"full", rep.class_shares[2]}}}};
    };
    nlohmann::json j = report_to_json(report);
    j["alpha"] = config.conformal_alpha;
    j["calibration_fraction"] = config.conformal_calibration_fraction;
    j["calibration_count"] = split.calibration.size();
    j["test_count"] = split.test.size();
    if (std::isinf(q_hat))
        j["q_hat"] = "inf";  // JSON has no infinity literal
    else
        j["q_hat"] = q_hat;
    j["out_of_interval_unit_ids"] = out_of_interval;
    j["test"] = report_to_json(test_report);
    write_json(out_path(config, "conformal_summary.json"), j);
}

void export_map_data(const std::vector<PredictionInterval>& intervals,
                     const std::optional<std::string>& geometry_path, const std::string& csv_out,
                     const std::optional<std::string>& geojson_out) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(intervals.size());
    for (const auto& pi : intervals)
        rows.push_back({pi.unit_id, to_string(pi.adaptivity_class), format_double(pi.width()),
                        pi.covered ? "1" : "0"});
    write_csv(csv_out, {"unit_id", "adaptivity_class", "width", "covered"}, rows);

    if (!geometry_path || !geojson_out) return;

    const nlohmann::json geometry = load_json(*geometry_path);
    if (!geometry.contains("features") || !geometry["features"].is_array())
        throw Error("'" + *geometry_path + "' is not a GeoJSON FeatureCollection");
    std::unordered_map<std::string, const nlohmann::json*> by_unit;
    for (const auto& feature : geometry["features"]) {
        if (!feature.contains("properties")) continue;
        const auto& properties = feature["properties"];
        if (properties.contains("unit_id") && properties["unit_id"].is_string())
            by_unit.emplace(properties["unit_id"].get<std::string>(), &feature);
    }

    std::vector<std::string> missing;
    for (const auto& pi : intervals)
        if (!by_unit.count(pi.unit_id)) missing.push_back(pi.unit_id);
    if (!missing.empty()) throw GeometryJoinError(missing);

    // Figure-style highlight layer: only units whose interval has width.
    nlohmann::json features = nlohmann::json::array();
    for (const auto& pi : intervals) {
        if (pi.width() <= 0.0) continue;
        nlohmann::json feature = *by_unit.at(pi.unit_id);
        feature["properties"]["unit_id"] = pi.unit_id;
        feature["properties"]["width"] = pi.width();
        feature["properties"]["adaptivity_class"] = to_string(pi.adaptivity_class);
        feature["properties"]["covered"] = pi.covered;
        features.push_back(std::move(feature));
    }
    write_json(*geojson_out,
               nlohmann::json{{"type", "FeatureCollection"}, {"features", features}});
}

void stage_map(const RunConfig& config) {
    const CsvTable csv = read_artifact(config, "intervals.csv", "conformal");
    const std::size_t c_lower = require_column(csv, "lower");
    const std::size_t c_upper = require_column(csv, "upper");
    const std::size_t c_covered = require_column(csv, "covered");
    const std::size_t c_class = require_column(csv, "adaptivity_class");
    const std::size_t c_center = require_column(csv, "y_hat");

    std::vector<PredictionInterval> intervals;
    intervals.reserve(csv.rows.size());
    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
        const std::string ctx = "intervals.csv row " + std::to_string(r + 2);
        PredictionInterval pi;
        pi.unit_id = csv.rows[r][0];
        pi.center = parse_double(csv.rows[r][c_center], ctx);
        pi.lower = pi.lower_raw = parse_double(csv.rows[r][c_lower], ctx);
        pi.upper = pi.upper_raw = parse_double(csv.rows[r][c_upper], ctx);
        pi.covered = parse_int(csv.rows[r][c_covered], ctx) != 0;
        pi.adaptivity_class = adaptivity_from(csv.rows[r][c_class]);
        intervals.push_back(std::move(pi));
    }

    std::optional<std::string> geojson_out;
    if (config.geometry) geojson_out = out_path(config, "uncertainty_map.geojson").string();
    export_map_data(intervals, config.geometry, out_path(config, "map_data.csv").string(),
                    geojson_out);
}

const std::vector<std::string>& stage_names() {
    static const std::vector<std::string> names{"indices", "field",    "graph",    "simulate",
                                                "diagnose", "conformal", "map"};
    return names;
}

void run_stage(const RunConfig& config, const std::string& name) {
    static const std::unordered_map<std::string, void (*)(const RunConfig&)> dispatch{
        {"indices", stage_indices}, {"field", stage_field},         {"graph", stage_graph},
        {"simulate", stage_simulate}, {"diagnose", stage_diagnose}, {"conformal", stage_conformal},
        {"map", stage_map}};
    const auto it = dispatch.find(name);
    if (it == dispatch.end()) throw ConfigError("unknown stage '" + name + "'");
    fs::create_directories(config.output_dir);
    it->second(config);
}

PipelineResult run_pipeline(const RunConfig& config) {
    config.validate();
    fs::create_directories(config.output_dir);

    PipelineResult result;
    result.manifest_path = out_path(config, "manifest.json").string();

    nlohmann::json timings = nlohmann::json::object();
    for (const auto& name : stage_names()) {
        const auto start = std::chrono::steady_clock::now();
        try {
            run_stage(config, name);
        } catch (const std::exception& e) {
            result.failed_stage = name;
            result.error = StageError(name, e.what()).what();
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        result.timings.push_back({name, seconds});
        timings[name] = seconds;
        if (!result.failed_stage.empty()) break;
    }
    result.ok = result.failed_stage.empty();

    nlohmann::json manifest;
    manifest["config_hash"] = config_hash(config);
    manifest["seed"] = config.chain.seed;
    manifest["workers"] = config.workers;
    manifest["versions"] = {
        {"isingmap", kVersion},
        {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                      "." + std::to_string(EIGEN_MINOR_VERSION)},
        {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                              std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                              std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
    manifest["status"] = result.ok ? "ok" : "incomplete";
    if (!result.ok) {
        manifest["failed_stage"] = result.failed_stage;
        manifest["error"] = result.error;
    }
    manifest["timings_seconds"] = timings;
    write_json(result.manifest_path, manifest);
    return result;
}

}  // namespace isingmap
