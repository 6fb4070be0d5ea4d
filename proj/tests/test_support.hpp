#pragma once

#include "hmvlm/core_types.hpp"
#include "oracles.hpp"

#include <random>

namespace test {

inline hmvlm::Trajectoryd make(const oracle::Points& pts)
{
  hmvlm::Trajectoryd::Points m(static_cast<Eigen::Index>(pts.size()), 2);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    m(static_cast<Eigen::Index>(i), 0) = pts[i].first;
    m(static_cast<Eigen::Index>(i), 1) = pts[i].second;
  }
  return hmvlm::Trajectoryd(std::move(m));
}

inline oracle::Points points(const hmvlm::Trajectoryd& t)
{
  oracle::Points out;
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    out.emplace_back(t.points()(i, 0), t.points()(i, 1));
  }
  return out;
}

/// Evenly spaced points along +x.
inline hmvlm::Trajectoryd line(Eigen::Index n, double step = 1.0)
{
  oracle::Points pts;
  for (Eigen::Index i = 0; i < n; ++i) {
    pts.emplace_back(step * static_cast<double>(i), 0.0);
  }
  return make(pts);
}

/// Straight along +x to index `corner`, then straight along +y.
inline hmvlm::Trajectoryd right_angle(Eigen::Index n, Eigen::Index corner, double step = 1.0)
{
  oracle::Points pts;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i <= corner) {
      pts.emplace_back(step * static_cast<double>(i), 0.0);
    } else {
      pts.emplace_back(step * static_cast<double>(corner), step * static_cast<double>(i - corner));
    }
  }
  return make(pts);
}

/// Coordinates are independent random polynomials in the index of degree <= `degree`.
inline hmvlm::Trajectoryd random_polynomial(std::mt19937_64& rng, int degree, Eigen::Index n = 20)
{
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  std::vector<double> cx, cy;
  for (int d = 0; d <= degree; ++d) {
    const double scale = std::pow(0.3, d);
    cx.push_back(coeff(rng) * 5.0 * scale);
    cy.push_back(coeff(rng) * 5.0 * scale);
  }
  cx[1] += 2.0; // keep the path moving forward on average
  oracle::Points pts;
  for (Eigen::Index i = 0; i < n; ++i) {
    double x = 0.0, y = 0.0, p = 1.0;
    for (int d = 0; d <= degree; ++d) {
      x += cx[static_cast<std::size_t>(d)] * p;
      y += cy[static_cast<std::size_t>(d)] * p;
      p *= static_cast<double>(i);
    }
    pts.emplace_back(x, y);
  }
  return make(pts);
}

inline hmvlm::Trajectoryd rigid(const hmvlm::Trajectoryd& t, double angle, double tx, double ty)
{
  Eigen::Matrix2d r;
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  hmvlm::Trajectoryd::Points m = (t.points() * r.transpose()).rowwise() + Eigen::RowVector2d(tx, ty);
  return hmvlm::Trajectoryd(std::move(m), t.dt());
}

} // namespace test
