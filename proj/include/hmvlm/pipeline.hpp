#pragma once

#include "hmvlm/core_types.hpp"
#include "hmvlm/metrics.hpp"
#include "hmvlm/traj_refine.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace hmvlm {

struct RunConfig
{
  std::filesystem::path input;
  std::filesystem::path output; // directory receiving records.jsonl, summary.json, summary.txt, plots/
  RefinementConfig refinement;
  Eigen::Index target_len = kCompleteLength;
  std::size_t workers = 1;
  std::uint64_t seed = 0;
  bool emit_plots = false;
  bool refine = true;

  void validate() const;
};

/// Reads `key = value` lines (`#` starts a comment) into `cfg`. Keys mirror RunConfig:
/// input, output, workers, seed, target_len, z_threshold, min_window, max_window,
/// poly_order, keypoint_angle, keypoint_weight, emit_plots, refine.
void apply_config_file(const std::filesystem::path& path, RunConfig& cfg);
void apply_config_text(std::istream& in, RunConfig& cfg);

struct LoadDiagnostic
{
  std::size_t line = 0; // 1-based
  std::string message;
};

struct LoadResult
{
  std::vector<EvalRecord> records;
  std::vector<LoadDiagnostic> diagnostics;
};

nlohmann::json trajectory_to_json(const Trajectoryd& traj);
/// Accepts `[[x, y], ...]`; throws std::invalid_argument on any other shape.
Trajectoryd trajectory_from_json(const nlohmann::json& j);

nlohmann::json record_to_json(const EvalRecord& record);
/// Schema: {"id": str, "raw_text"?: str, "pred"?: [[x,y],...], "gt": [[x,y],...],
///          "ego_history"?: [[t,v,a],...], "nav"?: str}. Throws std::invalid_argument.
EvalRecord record_from_json(const nlohmann::json& j);

/// One JSON object per line; malformed lines are reported and skipped. Blank lines are ignored.
LoadResult read_records(std::istream& in);
/// Throws std::runtime_error when the file cannot be opened.
LoadResult load_records(const std::filesystem::path& path);

void write_records(std::ostream& out, const std::vector<EvalRecord>& records);

/// Corruption applied by stub_generate to turn ground truth into model output.
struct StubOptions
{
  double noise_sigma = 0.05;        // per-point Gaussian noise, meters
  double jitter_sigma = 0.5;        // extra noise on the last five points, meters
  double length_change_prob = 0.3;  // truncate to 14-19 or extend to 21-24 points
  double malformed_prob = 0.05;     // break the token structure

  static StubOptions clean() { return {0.0, 0.0, 0.0, 0.0}; }
  static StubOptions jitter_only(double sigma) { return {0.0, sigma, 0.0, 0.0}; }
};

/// Deterministic synthetic corpus standing in for model output: straight lines, arcs and
/// lane changes as ground truth, serialized predictions corrupted per `options`.
std::vector<EvalRecord> stub_generate(std::size_t n, std::uint64_t seed, const StubOptions& options = {});

nlohmann::json summary_to_json(const EvalSummary& summary);
nlohmann::json outcome_to_json(const RecordOutcome& outcome);

/// Ground truth, raw and refined prediction overlaid; key-points and outliers marked.
std::string render_overlay_svg(const RecordOutcome& outcome, const Trajectoryd& gt);

/// load -> parse -> normalize -> refine -> evaluate, then writes the output directory.
/// Throws std::runtime_error on fatal I/O errors. Load diagnostics go to `log`.
EvalSummary run_pipeline(const RunConfig& cfg, std::ostream& log);

} // namespace hmvlm
