#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hmvlm {

/// Seconds between consecutive waypoints (20 points over a 5 s horizon).
inline constexpr double kDefaultDt = 0.25;
/// Number of waypoints in a complete trajectory.
inline constexpr Eigen::Index kCompleteLength = 20;

/// BEV position in meters; x forward, y left, origin at the ego pose at t = 0.
template <typename Scalar>
using Waypoint = Eigen::Matrix<Scalar, 2, 1>;

template <typename Scalar>
bool is_finite(const Waypoint<Scalar>& p)
{
  return std::isfinite(p.x()) && std::isfinite(p.y());
}

/// Uniformly sampled sequence of BEV waypoints. Row i is the position at t = (i + 1) * dt.
///
/// Finiteness is not enforced here so that raw model output can be represented and
/// rejected later (see is_complete); dt must be positive.
template <typename Scalar>
class Trajectory
{
public:
  using Points = Eigen::Matrix<Scalar, Eigen::Dynamic, 2>;

  Trajectory() = default;

  explicit Trajectory(Points points, Scalar dt = Scalar(kDefaultDt))
    : points_(std::move(points)), dt_(dt)
  {
    if (!(dt_ > Scalar(0)) || !std::isfinite(dt_)) {
      throw std::invalid_argument("trajectory dt must be positive and finite");
    }
  }

  static Trajectory from_points(const std::vector<Waypoint<Scalar>>& pts, Scalar dt = Scalar(kDefaultDt))
  {
    Points m(static_cast<Eigen::Index>(pts.size()), 2);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      m.row(i) = pts[static_cast<std::size_t>(i)].transpose();
    }
    return Trajectory(std::move(m), dt);
  }

  Eigen::Index size() const { return points_.rows(); }
  bool empty() const { return points_.rows() == 0; }
  Scalar dt() const { return dt_; }

  const Points& points() const { return points_; }
  Points& points() { return points_; }

  Waypoint<Scalar> point(Eigen::Index i) const { return points_.row(i).transpose(); }
  Waypoint<Scalar> front() const { return point(0); }
  Waypoint<Scalar> back() const { return point(size() - 1); }

  bool all_finite() const { return points_.allFinite(); }

  friend bool operator==(const Trajectory& a, const Trajectory& b)
  {
    return a.dt_ == b.dt_ && a.points_.rows() == b.points_.rows() && a.points_ == b.points_;
  }

private:
  Points points_ = Points(0, 2);
  Scalar dt_ = Scalar(kDefaultDt);
};

using Trajectoryd = Trajectory<double>;
using Waypointd = Waypoint<double>;

/// Unsigned angle in degrees in [0, 180] between the directions a->b and b->c.
/// Empty when either segment has zero length (heading undefined).
template <typename Scalar>
std::optional<Scalar> heading_change(const Waypoint<Scalar>& a, const Waypoint<Scalar>& b, const Waypoint<Scalar>& c)
{
  const Waypoint<Scalar> u = b - a;
  const Waypoint<Scalar> v = c - b;
  if (u.squaredNorm() == Scalar(0) || v.squaredNorm() == Scalar(0)) {
    return std::nullopt;
  }
  const Scalar cross = u.x() * v.y() - u.y() * v.x();
  const Scalar dot = u.dot(v);
  return std::atan2(std::abs(cross), dot) * Scalar(180) / std::numbers::pi_v<Scalar>;
}

struct KinematicSample
{
  double t = 0.0;            // seconds, <= 0
  double velocity = 0.0;     // m/s
  double acceleration = 0.0; // m/s^2

  friend bool operator==(const KinematicSample&, const KinematicSample&) = default;
};

/// Past ego velocity/acceleration samples, oldest first, ending at t = 0.
/// The covered time range (last - first) may not exceed the declared span.
class EgoHistory
{
public:
  EgoHistory() = default;
  explicit EgoHistory(std::vector<KinematicSample> samples, double span = 4.0);

  const std::vector<KinematicSample>& samples() const { return samples_; }
  double span() const { return span_; }
  /// Time covered by the samples; zero for fewer than two samples.
  double extent() const;
  bool empty() const { return samples_.empty(); }

  friend bool operator==(const EgoHistory&, const EgoHistory&) = default;

private:
  std::vector<KinematicSample> samples_;
  double span_ = 4.0;
};

struct StructuredResponse
{
  std::string description;
  std::string decision;
  Trajectoryd trajectory;

  friend bool operator==(const StructuredResponse&, const StructuredResponse&) = default;
};

struct RefinementConfig
{
  double z_threshold = 3.0;
  int min_window = 5;
  int max_window = 9;
  int poly_order = 2;
  double keypoint_angle_deg = 25.0;
  /// Weight on the filtered (pre-smoothing) point when blending key-points.
  double keypoint_weight = 0.7;

  /// Throws std::invalid_argument naming the first violated constraint.
  void validate() const;
};

struct EvalRecord
{
  std::string id;
  std::optional<std::string> raw_text;
  std::optional<Trajectoryd> pred;
  Trajectoryd gt;
  std::optional<EgoHistory> ego_history;
  std::optional<std::string> nav_instruction;
};

/// Raised when a prediction has no waypoints at all; scored as a failure upstream.
class EmptyPrediction : public std::runtime_error
{
public:
  EmptyPrediction() : std::runtime_error("empty prediction") {}
};

} // namespace hmvlm
