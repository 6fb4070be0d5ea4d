#include "hmvlm/pipeline.hpp"
#include "hmvlm/structured_io.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

namespace hmvlm {

namespace {

enum class Shape
{
  Line,
  Arc,
  LaneChange,
};

double round4(double v)
{
  const double r = std::round(v * 1e4) / 1e4;
  return r == 0.0 ? 0.0 : r;
}

class StubRng
{
public:
  explicit StubRng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  double normal(double sigma)
  {
    // Always draw so the stream layout does not depend on sigma.
    const double z = std::normal_distribution<double>(0.0, 1.0)(engine_);
    return sigma * z;
  }
  bool bernoulli(double p) { return uniform(0.0, 1.0) < p; }
  double sign() { return bernoulli(0.5) ? 1.0 : -1.0; }

private:
  std::mt19937_64 engine_;
};

// Position at time t for the chosen shape, before rounding.
Waypointd shape_point(Shape shape, double t, double speed, double param, double side)
{
  const double s = speed * t;
  switch (shape) {
  case Shape::Line:
    return {s * std::cos(param), s * std::sin(param)};
  case Shape::Arc:
    return {param * std::sin(s / param), side * param * (1.0 - std::cos(s / param))};
  case Shape::LaneChange:
    return {s, side * param * 0.5 * (1.0 - std::cos(std::numbers::pi * t / 5.0))};
  }
  return {0.0, 0.0};
}

std::string corrupt_structure(const std::string& text, StubRng& rng)
{
  const SpecialTokens tokens;
  const auto literals = tokens.all();
  const int mode = rng.integer(0, 2);
  if (mode == 0) {
    // Drop one token.
    const auto victim = literals[static_cast<std::size_t>(rng.integer(0, 5))];
    std::string out = text;
    out.erase(out.find(victim), victim.size());
    return out;
  }
  if (mode == 1) {
    // Trajectory block emitted before the description.
    const std::size_t traj = text.find(tokens.traj_start);
    return text.substr(traj) + text.substr(0, traj);
  }
  // Generation cut off inside the trajectory.
  return text.substr(0, text.find(tokens.traj_end) - rng.integer(1, 8));
}

} // namespace

std::vector<EvalRecord> stub_generate(std::size_t n, std::uint64_t seed, const StubOptions& options)
{
  static constexpr std::array kDescriptions{
    "clear road ahead, light traffic", "wet asphalt, vehicles parked on the right",
    "construction cones narrowing the lane", "pedestrian waiting at the crosswalk", "multi-lane highway, moderate traffic"};

  StubRng rng(seed);
  std::vector<EvalRecord> records;
  records.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto shape = static_cast<Shape>(rng.integer(0, 2));
    const double speed = rng.uniform(4.0, 15.0);
    const double side = rng.sign();
    const double accel = rng.uniform(-0.5, 0.5);
    double param = 0.0;
    std::string decision;
    std::string nav;
    switch (shape) {
    case Shape::Line:
      param = rng.uniform(-0.1, 0.1);
      decision = "keep lane and maintain speed";
      nav = "continue straight";
      break;
    case Shape::Arc:
      param = rng.uniform(20.0, 80.0);
      decision = side > 0 ? "follow the curve to the left" : "follow the curve to the right";
      nav = side > 0 ? "road bends left" : "road bends right";
      break;
    case Shape::LaneChange:
      param = 3.5;
      decision = side > 0 ? "change to the left lane" : "change to the right lane";
      nav = side > 0 ? "prepare to exit left" : "prepare to exit right";
      break;
    }

    Trajectoryd::Points gt(kCompleteLength, 2);
    for (Eigen::Index i = 0; i < kCompleteLength; ++i) {
      const Waypointd p = shape_point(shape, static_cast<double>(i + 1) * kDefaultDt, speed, param, side);
      gt(i, 0) = round4(p.x());
      gt(i, 1) = round4(p.y());
    }

    std::vector<KinematicSample> history;
    for (int i = -16; i <= 0; ++i) {
      const double t = i * kDefaultDt;
      history.push_back({t, speed + accel * t, accel});
    }

    // Model output: noise everywhere, jitter burst at the tail, then a length error.
    std::vector<Waypointd> pred;
    for (Eigen::Index i = 0; i < kCompleteLength; ++i) {
      const double sigma = i >= kCompleteLength - 5 ? std::hypot(options.noise_sigma, options.jitter_sigma)
                                                    : options.noise_sigma;
      const double dx = rng.normal(sigma);
      const double dy = rng.normal(sigma);
      pred.emplace_back(gt(i, 0) + dx, gt(i, 1) + dy);
    }
    const bool change_length = rng.bernoulli(options.length_change_prob);
    const bool truncate = rng.bernoulli(0.5);
    const int new_len = truncate ? rng.integer(14, 19) : rng.integer(21, 24);
    if (change_length) {
      if (truncate) {
        pred.resize(static_cast<std::size_t>(new_len));
      } else {
        const Waypointd step = (gt.row(kCompleteLength - 1) - gt.row(kCompleteLength - 2)).transpose();
        for (int extra = 1; pred.size() < static_cast<std::size_t>(new_len); ++extra) {
          pred.emplace_back(gt.row(kCompleteLength - 1).transpose() + extra * step);
        }
      }
    }

    StructuredResponse resp;
    resp.description = kDescriptions[static_cast<std::size_t>(rng.integer(0, static_cast<int>(kDescriptions.size()) - 1))];
    resp.decision = decision;
    resp.trajectory = Trajectoryd::from_points(pred);
    std::string text = serialize_response(resp);
    if (rng.bernoulli(options.malformed_prob)) {
      text = corrupt_structure(text, rng);
    }

    EvalRecord r;
    char id[32];
    std::snprintf(id, sizeof(id), "stub-%06zu", k);
    r.id = id;
    r.raw_text = std::move(text);
    r.gt = Trajectoryd(std::move(gt));
    r.ego_history = EgoHistory(std::move(history));
    r.nav_instruction = nav;
    records.push_back(std::move(r));
  }
  return records;
}

} // namespace hmvlm
