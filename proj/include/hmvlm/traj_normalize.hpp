#pragma once

#include "hmvlm/core_types.hpp"

namespace hmvlm {

/// Forces a trajectory to exactly `target_len` points. Longer inputs are trimmed to their
/// prefix; shorter ones are extended by repeating the last step vector (constant velocity),
/// or by repeating the point when only one is available.
template <typename Scalar>
Trajectory<Scalar> normalize_length(const Trajectory<Scalar>& traj, Eigen::Index target_len = kCompleteLength)
{
  if (target_len < 1) {
    throw std::invalid_argument("target_len must be >= 1");
  }
  if (traj.empty()) {
    throw EmptyPrediction();
  }
  const Eigen::Index n = traj.size();
  if (n >= target_len) {
    return Trajectory<Scalar>(traj.points().topRows(target_len), traj.dt());
  }

  typename Trajectory<Scalar>::Points out(target_len, 2);
  out.topRows(n) = traj.points();
  const Eigen::Matrix<Scalar, 1, 2> last = traj.points().row(n - 1);
  const Eigen::Matrix<Scalar, 1, 2> step =
    n >= 2 ? Eigen::Matrix<Scalar, 1, 2>(last - traj.points().row(n - 2)) : Eigen::Matrix<Scalar, 1, 2>::Zero();
  for (Eigen::Index i = n; i < target_len; ++i) {
    out.row(i) = last + Scalar(i - n + 1) * step;
  }
  return Trajectory<Scalar>(std::move(out), traj.dt());
}

template <typename Scalar>
bool is_complete(const Trajectory<Scalar>& traj, Eigen::Index target_len = kCompleteLength)
{
  return traj.size() == target_len && traj.all_finite();
}

} // namespace hmvlm
