#pragma once

#include "hmvlm/core_types.hpp"
#include "hmvlm/structured_io.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hmvlm {

/// Number of leading waypoints that fall inside `horizon` seconds (3 s -> 12, 5 s -> 20).
inline Eigen::Index horizon_steps(double horizon, double dt)
{
  return static_cast<Eigen::Index>(std::llround(horizon / dt));
}

/// Average displacement error: mean Euclidean distance over the waypoints within `horizon`.
template <typename Scalar>
Scalar ade(const Trajectory<Scalar>& pred, const Trajectory<Scalar>& gt, Scalar horizon)
{
  if (pred.dt() != gt.dt()) {
    throw std::invalid_argument("ade: trajectories must share dt");
  }
  const Eigen::Index steps = horizon_steps(static_cast<double>(horizon), static_cast<double>(gt.dt()));
  if (steps < 1 || steps > pred.size() || steps > gt.size()) {
    throw std::invalid_argument("ade: horizon outside trajectory span");
  }
  return (pred.points().topRows(steps) - gt.points().topRows(steps)).rowwise().norm().mean();
}

/// Mean squared second difference, (1/(n-2)) sum |p[i+1] - 2 p[i] + p[i-1]|^2. Zero below 3 points.
template <typename Scalar>
Scalar smoothness(const Trajectory<Scalar>& traj)
{
  const Eigen::Index n = traj.size();
  if (n < 3) {
    return Scalar(0);
  }
  const auto& p = traj.points();
  const auto second = p.bottomRows(n - 2) - Scalar(2) * p.middleRows(1, n - 2) + p.topRows(n - 2);
  return second.rowwise().squaredNorm().sum() / Scalar(n - 2);
}

struct EvalSummary
{
  std::optional<double> ade_3s;
  std::optional<double> ade_5s;
  std::size_t n_records = 0;
  std::size_t n_parse_failures = 0;
  std::size_t n_length_failures = 0;
  std::optional<double> mean_smoothness_pre;
  std::optional<double> mean_smoothness_post;

  friend bool operator==(const EvalSummary&, const EvalSummary&) = default;
};

enum class RecordStatus
{
  Ok,
  ParseFailure,
  LengthFailure,
};

std::string_view to_string(RecordStatus status);

struct EvalOptions
{
  RefinementConfig refinement;
  bool refine = true;
  Eigen::Index target_len = kCompleteLength;
  SpecialTokens tokens;
};

/// Everything computed for one record; the per-record diagnostics line is built from this.
struct RecordOutcome
{
  std::string id;
  RecordStatus status = RecordStatus::Ok;
  std::string error;
  std::optional<Trajectoryd> raw;     // normalized, pre-refinement
  std::optional<Trajectoryd> refined; // equals raw when refinement is disabled
  std::vector<Eigen::Index> outlier_indices;
  std::vector<Eigen::Index> keypoint_indices;
  double ade_3s = 0.0;
  double ade_5s = 0.0;
  double smoothness_pre = 0.0;
  double smoothness_post = 0.0;
};

/// parse -> normalize -> refine -> ade for a single record. Never throws for bad data;
/// failures are reported through `status`.
RecordOutcome evaluate_record(const EvalRecord& record, const EvalOptions& options);

/// Order-insensitive aggregation: values are summed in sorted order.
EvalSummary aggregate(const std::vector<RecordOutcome>& outcomes);

/// Evaluates every record on `workers` threads. The result does not depend on `workers`.
std::vector<RecordOutcome> evaluate_all(const std::vector<EvalRecord>& records, const EvalOptions& options,
                                        std::size_t workers = 1);

EvalSummary summarize(const std::vector<EvalRecord>& records, const RefinementConfig& cfg, std::size_t workers = 1);

/// Flat `key=value` lines, one per field; undefined means render as `nan`.
std::string format_summary_text(const EvalSummary& summary);

} // namespace hmvlm
