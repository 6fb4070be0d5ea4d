#pragma once

#include "hmvlm/core_types.hpp"
#include "hmvlm/metrics.hpp"
#include "hmvlm/traj_normalize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace hmvlm {

/// Central-point Savitzky-Golay weights: row 0 of the pseudo-inverse of the Vandermonde
/// matrix over offsets -h..h, so that w . f equals the least-squares polynomial of the
/// given order evaluated at the window center.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> savgol_weights(int window, int order)
{
  if (window < 1 || window % 2 == 0) {
    throw std::invalid_argument("savgol_weights: window must be odd and positive");
  }
  if (order < 0 || order >= window) {
    throw std::invalid_argument("savgol_weights: order must satisfy 0 <= order < window");
  }
  const int half = window / 2;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> vander(window, order + 1);
  for (int r = 0; r < window; ++r) {
    const Scalar x = Scalar(r - half);
    Scalar power = Scalar(1);
    for (int c = 0; c <= order; ++c) {
      vander(r, c) = power;
      power *= x;
    }
  }
  return vander.completeOrthogonalDecomposition().pseudoInverse().row(0).transpose();
}

template <typename Scalar>
struct OutlierResult
{
  Trajectory<Scalar> trajectory;
  std::vector<Eigen::Index> outlier_indices;
};

/// Step-length outlier repair. Every step |p[k+1] - p[k]| is z-scored against the mean and
/// standard deviation of the other steps; an interior point is an outlier when both the step
/// into it and the step out of it exceed `threshold` (a spike out and back). Outliers are
/// replaced by linear interpolation between the nearest unflagged points. Endpoints are never
/// flagged, and a trajectory whose steps have no spread has no outliers.
template <typename Scalar>
OutlierResult<Scalar> zscore_filter(const Trajectory<Scalar>& traj, Scalar threshold)
{
  if (!(threshold > Scalar(0))) {
    throw std::invalid_argument("zscore_filter: threshold must be positive");
  }
  const Eigen::Index n = traj.size();
  if (n < 3) {
    return {traj, {}};
  }
  const auto& p = traj.points();
  const Eigen::Index steps = n - 1;
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> length = (p.bottomRows(steps) - p.topRows(steps)).rowwise().norm();

  // Spread at rounding level (exact lines, constant speed turns) is not variance.
  const Scalar tol = std::numeric_limits<Scalar>::epsilon() * Scalar(64) * (Scalar(1) + p.cwiseAbs().maxCoeff());
  const Scalar mean = length.mean();
  if (!(std::sqrt((length.array() - mean).square().mean()) > tol)) {
    return {traj, {}};
  }

  std::vector<bool> step_flagged(static_cast<std::size_t>(steps), false);
  for (Eigen::Index k = 0; k < steps; ++k) {
    Scalar others_mean = Scalar(0);
    for (Eigen::Index j = 0; j < steps; ++j) {
      if (j != k) others_mean += length(j);
    }
    others_mean /= Scalar(steps - 1);
    Scalar others_var = Scalar(0);
    for (Eigen::Index j = 0; j < steps; ++j) {
      if (j != k) others_var += (length(j) - others_mean) * (length(j) - others_mean);
    }
    const Scalar others_sd = std::sqrt(others_var / Scalar(steps - 1));
    if (others_sd > tol) {
      step_flagged[static_cast<std::size_t>(k)] = std::abs(length(k) - others_mean) / others_sd > threshold;
    }
  }

  std::vector<bool> flagged(static_cast<std::size_t>(n), false);
  std::vector<Eigen::Index> outliers;
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    if (step_flagged[static_cast<std::size_t>(i - 1)] && step_flagged[static_cast<std::size_t>(i)]) {
      flagged[static_cast<std::size_t>(i)] = true;
      outliers.push_back(i);
    }
  }

  typename Trajectory<Scalar>::Points repaired = p;
  for (const Eigen::Index i : outliers) {
    Eigen::Index lo = i - 1;
    while (flagged[static_cast<std::size_t>(lo)]) {
      --lo;
    }
    Eigen::Index hi = i + 1;
    while (flagged[static_cast<std::size_t>(hi)]) {
      ++hi;
    }
    const Scalar t = Scalar(i - lo) / Scalar(hi - lo);
    repaired.row(i) = (Scalar(1) - t) * p.row(lo) + t * p.row(hi);
  }
  return {Trajectory<Scalar>(std::move(repaired), traj.dt()), std::move(outliers)};
}

/// Heading change at each interior vertex; empty entries where a segment is degenerate.
template <typename Scalar>
std::vector<std::optional<Scalar>> vertex_heading_changes(const Trajectory<Scalar>& traj)
{
  std::vector<std::optional<Scalar>> out(static_cast<std::size_t>(std::max<Eigen::Index>(traj.size(), 0)));
  for (Eigen::Index i = 1; i + 1 < traj.size(); ++i) {
    out[static_cast<std::size_t>(i)] = heading_change<Scalar>(traj.point(i - 1), traj.point(i), traj.point(i + 1));
  }
  return out;
}

/// Interior indices whose heading change exceeds `angle_threshold` degrees.
template <typename Scalar>
std::vector<Eigen::Index> detect_keypoints(const Trajectory<Scalar>& traj, Scalar angle_threshold)
{
  std::vector<Eigen::Index> out;
  const auto headings = vertex_heading_changes(traj);
  for (Eigen::Index i = 1; i + 1 < traj.size(); ++i) {
    const auto& h = headings[static_cast<std::size_t>(i)];
    if (h && *h > angle_threshold) {
      out.push_back(i);
    }
  }
  return out;
}

/// Per-point odd window length. Straight stretches (heading change below half the key-point
/// angle) get max_window; the window shrinks linearly to min_window as the heading change
/// reaches the key-point angle, then is clipped to fit inside the trajectory. Endpoints get 1.
template <typename Scalar>
std::vector<int> adaptive_window(const Trajectory<Scalar>& traj, const RefinementConfig& cfg)
{
  cfg.validate();
  const Eigen::Index n = traj.size();
  std::vector<int> windows(static_cast<std::size_t>(std::max<Eigen::Index>(n, 0)), 1);
  const auto headings = vertex_heading_changes(traj);
  const double full = cfg.keypoint_angle_deg;
  const double half = full / 2.0;
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    const double h = static_cast<double>(headings[static_cast<std::size_t>(i)].value_or(Scalar(0)));
    int w = cfg.max_window;
    if (h >= full) {
      w = cfg.min_window;
    } else if (h >= half) {
      const double shrink = (h - half) / half;
      w = static_cast<int>(std::floor(cfg.max_window - shrink * (cfg.max_window - cfg.min_window)));
      if (w % 2 == 0) {
        --w;
      }
      w = std::max(w, cfg.min_window);
    }
    const auto fit = static_cast<int>(2 * std::min(i, n - 1 - i) + 1);
    windows[static_cast<std::size_t>(i)] = std::min(w, fit);
  }
  return windows;
}

struct RefinementReport
{
  std::vector<Eigen::Index> outlier_indices;
  std::vector<Eigen::Index> keypoint_indices;
  std::vector<int> window_used;
  double smoothness_pre = 0.0;
  double smoothness_post = 0.0;
};

template <typename Scalar>
struct RefinementResult
{
  Trajectory<Scalar> trajectory;
  RefinementReport report;
};

/// Outlier repair, adaptive Savitzky-Golay smoothing of x and y over the index, key-point
/// blending and endpoint pinning. The endpoints of the result are bitwise equal to those
/// of the outlier-filtered input.
template <typename Scalar>
RefinementResult<Scalar> refine(const Trajectory<Scalar>& traj, const RefinementConfig& cfg,
                                Eigen::Index expected_len = kCompleteLength)
{
  cfg.validate();
  if (expected_len < 1 || !is_complete(traj, expected_len)) {
    throw std::invalid_argument("refine: trajectory must be complete and finite; normalize it first");
  }

  RefinementReport report;
  report.smoothness_pre = static_cast<double>(smoothness(traj));

  auto [filtered, outliers] = zscore_filter(traj, Scalar(cfg.z_threshold));
  report.outlier_indices = std::move(outliers);
  report.keypoint_indices = detect_keypoints(filtered, Scalar(cfg.keypoint_angle_deg));
  report.window_used = adaptive_window(filtered, cfg);

  const auto& f = filtered.points();
  const Eigen::Index n = filtered.size();
  typename Trajectory<Scalar>::Points out = f;
  std::map<std::pair<int, int>, Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> weights;
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    const int w = report.window_used[static_cast<std::size_t>(i)];
    const int order = std::min(cfg.poly_order, w - 1);
    auto it = weights.find({w, order});
    if (it == weights.end()) {
      it = weights.emplace(std::pair{w, order}, savgol_weights<Scalar>(w, order)).first;
    }
    out.row(i) = it->second.transpose() * f.middleRows(i - w / 2, w);
  }

  const Scalar keep = Scalar(cfg.keypoint_weight);
  for (const Eigen::Index i : report.keypoint_indices) {
    out.row(i) = keep * f.row(i) + (Scalar(1) - keep) * out.row(i);
  }

  out.row(0) = f.row(0);
  out.row(n - 1) = f.row(n - 1);

  Trajectory<Scalar> refined(std::move(out), traj.dt());
  report.smoothness_post = static_cast<double>(smoothness(refined));
  return {std::move(refined), std::move(report)};
}

} // namespace hmvlm
