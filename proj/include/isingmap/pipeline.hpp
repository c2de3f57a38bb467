#pragma once

#include <optional>
#include <string>
#include <vector>

#include "isingmap/config.hpp"
#include "isingmap/conformal.hpp"
#include "isingmap/indices.hpp"
#include "isingmap/network.hpp"
#include "isingmap/spin.hpp"

namespace isingmap {

class ParseError : public Error {
  public:
    ParseError(std::size_t row, const std::string& column, const std::string& detail)
        : Error("row " + std::to_string(row) + ", column '" + column + "': " + detail) {}
};

class MissingColumnError : public Error {
  public:
    explicit MissingColumnError(const std::string& column)
        : Error("missing column '" + column + "'") {}
};

class InvalidClassLabelError : public Error {
  public:
    InvalidClassLabelError(std::size_t row, const std::string& text)
        : Error("row " + std::to_string(row) + ": class label '" + text +
                "' is not one of -1, 1, +1") {}
};

class DuplicateUnitError : public Error {
  public:
    explicit DuplicateUnitError(const std::string& id)
        : Error("duplicate unit id '" + id + "'") {}
};

class GeometryJoinError : public Error {
  public:
    explicit GeometryJoinError(const std::vector<std::string>& missing);
};

class StageError : public Error {
  public:
    StageError(const std::string& stage, const std::string& what)
        : Error("stage " + stage + ": " + what), stage_(stage) {}
    const std::string& stage() const { return stage_; }

  private:
    std::string stage_;
};

// Validated in-memory roster; unit order is the input file order and every
// artifact downstream preserves it.
struct Dataset {
    std::vector<std::string> unit_ids;
    IndicatorTable table;
    std::vector<AttributeProfile> profiles;
    SpinConfiguration reference;  // observed classes, +1 hub / -1 peripheral
};

Dataset ingest(const std::string& csv_path, const RunConfig& config);

// Pipeline stages. Each reads the persisted artifacts of earlier stages from
// config.output_dir and writes its own files there, so stages compose through
// the filesystem and re-running one reproduces identical outputs.
void stage_indices(const RunConfig& config);   // indices.csv
void stage_field(const RunConfig& config);     // field.csv, pca_summary.json
void stage_graph(const RunConfig& config);     // edges.csv, graph_summary.json
void stage_simulate(const RunConfig& config);  // marginals.csv, energy_trace.csv
void stage_diagnose(const RunConfig& config);  // diagnostics.json
void stage_conformal(const RunConfig& config); // intervals.csv, conformal_summary.json
void stage_map(const RunConfig& config);       // map_data.csv, uncertainty_map.geojson

const std::vector<std::string>& stage_names();
void run_stage(const RunConfig& config, const std::string& name);

// Joins intervals with an optional GeoJSON geometry. Always writes the flat
// CSV; with geometry also writes the highlight layer of nonzero-width units.
// Every interval's unit must appear in the geometry or the join fails.
void export_map_data(const std::vector<PredictionInterval>& intervals,
                     const std::optional<std::string>& geometry_path, const std::string& csv_out,
                     const std::optional<std::string>& geojson_out);

struct StageTiming {
    std::string stage;
    double seconds = 0.0;
};

struct PipelineResult {
    bool ok = false;
    std::string failed_stage;
    std::string error;
    std::string manifest_path;
    std::vector<StageTiming> timings;
};

// Runs every stage in order and writes manifest.json (config hash, seed,
// versions, timings). A stage failure stops the run and the manifest records
// the incomplete status.
PipelineResult run_pipeline(const RunConfig& config);

}  // namespace isingmap
