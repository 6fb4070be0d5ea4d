#include "hmvlm/traj_normalize.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <limits>

TEST_CASE("long inputs are trimmed to their prefix")
{
  const auto t = test::line(22);
  const auto out = hmvlm::normalize_length(t);
  REQUIRE(out.size() == 20);
  CHECK(out.points() == t.points().topRows(20));
}

TEST_CASE("short inputs continue at constant velocity")
{
  const auto out = hmvlm::normalize_length(test::make({{0, 0}, {1, 0}}), 4);
  CHECK(out == test::make({{0, 0}, {1, 0}, {2, 0}, {3, 0}}));

  // One-step extrapolation oracle: p[2] = p[1] + (p[1] - p[0]).
  const oracle::Points diag{{0, 0}, {1, 1}};
  const std::pair<double, double> next{2 * diag[1].first - diag[0].first, 2 * diag[1].second - diag[0].second};
  const auto d = hmvlm::normalize_length(test::make(diag), 3);
  CHECK(d.point(2) == hmvlm::Waypointd(next.first, next.second));
  CHECK(d.point(2) == hmvlm::Waypointd(2, 2));
}

TEST_CASE("single points are held in place")
{
  const auto out = hmvlm::normalize_length(test::make({{3, -1}}), 5);
  REQUIRE(out.size() == 5);
  for (Eigen::Index i = 0; i < 5; ++i) CHECK(out.point(i) == hmvlm::Waypointd(3, -1));
}

TEST_CASE("empty predictions and bad targets are errors")
{
  CHECK_THROWS_AS(hmvlm::normalize_length(hmvlm::Trajectoryd()), hmvlm::EmptyPrediction);
  CHECK_THROWS_AS(hmvlm::normalize_length(test::line(3), 0), std::invalid_argument);
}

TEST_CASE("dt is preserved")
{
  const hmvlm::Trajectoryd t(test::line(3).points(), 0.1);
  CHECK(hmvlm::normalize_length(t, 10).dt() == 0.1);
}

TEST_CASE("is_complete")
{
  CHECK(hmvlm::is_complete(test::line(20)));
  CHECK_FALSE(hmvlm::is_complete(test::line(19)));
  auto bad = test::line(20);
  bad.points()(7, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_FALSE(hmvlm::is_complete(bad));
  CHECK(hmvlm::is_complete(test::line(12), 12));
}
