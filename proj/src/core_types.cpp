#include "hmvlm/core_types.hpp"

namespace hmvlm {

EgoHistory::EgoHistory(std::vector<KinematicSample> samples, double span)
  : samples_(std::move(samples)), span_(span)
{
  if (!(span_ >= 0.0) || !std::isfinite(span_)) {
    throw std::invalid_argument("ego history span must be finite and non-negative");
  }
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const auto& s = samples_[i];
    if (!std::isfinite(s.t) || !std::isfinite(s.velocity) || !std::isfinite(s.acceleration)) {
      throw std::invalid_argument("ego history sample " + std::to_string(i) + " is not finite");
    }
    if (i > 0 && !(s.t > samples_[i - 1].t)) {
      throw std::invalid_argument("ego history timestamps must be strictly increasing");
    }
  }
  if (!samples_.empty() && samples_.back().t != 0.0) {
    throw std::invalid_argument("ego history must end at t = 0");
  }
  if (extent() > span_ + 1e-9) {
    throw std::invalid_argument("ego history covers more than its declared span");
  }
}

double EgoHistory::extent() const
{
  if (samples_.size() < 2) {
    return 0.0;
  }
  return samples_.back().t - samples_.front().t;
}

void RefinementConfig::validate() const
{
  if (!(z_threshold > 0.0)) {
    throw std::invalid_argument("z_threshold must be positive");
  }
  if (min_window < 3 || min_window % 2 == 0) {
    throw std::invalid_argument("min_window must be odd and >= 3");
  }
  if (max_window % 2 == 0 || max_window < min_window) {
    throw std::invalid_argument("max_window must be odd and >= min_window");
  }
  if (poly_order < 1 || poly_order >= min_window) {
    throw std::invalid_argument("poly_order must satisfy 1 <= poly_order < min_window");
  }
  if (!(keypoint_angle_deg > 0.0 && keypoint_angle_deg < 180.0)) {
    throw std::invalid_argument("keypoint_angle_deg must lie in (0, 180)");
  }
  if (!(keypoint_weight >= 0.0 && keypoint_weight <= 1.0)) {
    throw std::invalid_argument("keypoint_weight must lie in [0, 1]");
  }
}

} // namespace hmvlm
