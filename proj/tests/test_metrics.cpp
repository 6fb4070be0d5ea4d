#include "hmvlm/metrics.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <random>

TEST_CASE("ade basics")
{
  const auto gt = test::line(20, 2.0);
  CHECK(hmvlm::ade(gt, gt, 3.0) == 0.0);
  CHECK(hmvlm::ade(gt, gt, 5.0) == 0.0);

  const hmvlm::Trajectoryd shifted(gt.points().rowwise() + Eigen::RowVector2d(1.0, 0.0));
  CHECK(hmvlm::ade(shifted, gt, 3.0) == 1.0);
  CHECK(hmvlm::ade(shifted, gt, 5.0) == 1.0);

  auto one = gt;
  one.points()(15, 1) += 2.0;
  CHECK(hmvlm::ade(one, gt, 3.0) == 0.0);
  // Direct averaging oracle: 2 m at one of 20 points.
  CHECK(hmvlm::ade(one, gt, 5.0) == doctest::Approx(oracle::mean_distance(test::points(one), test::points(gt), 20)));
  CHECK(hmvlm::ade(one, gt, 5.0) == doctest::Approx(0.1).epsilon(1e-14));
}

TEST_CASE("ade horizons and preconditions")
{
  CHECK(hmvlm::horizon_steps(3.0, 0.25) == 12);
  CHECK(hmvlm::horizon_steps(5.0, 0.25) == 20);
  const auto gt = test::line(20);
  CHECK_THROWS_AS(hmvlm::ade(gt, gt, 6.0), std::invalid_argument);
  CHECK_THROWS_AS(hmvlm::ade(gt, gt, 0.0), std::invalid_argument);
  const hmvlm::Trajectoryd other_dt(gt.points(), 0.1);
  CHECK_THROWS_AS(hmvlm::ade(gt, other_dt, 1.0), std::invalid_argument);
}

TEST_CASE("ade is symmetric and isometry invariant")
{
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-30.0, 30.0);
  for (int trial = 0; trial < 200; ++trial) {
    oracle::Points a, b;
    for (int i = 0; i < 20; ++i) {
      a.emplace_back(u(rng), u(rng));
      b.emplace_back(u(rng), u(rng));
    }
    const auto pa = test::make(a), pb = test::make(b);
    for (const double h : {3.0, 5.0}) {
      const double v = hmvlm::ade(pa, pb, h);
      CHECK(v == doctest::Approx(hmvlm::ade(pb, pa, h)).epsilon(1e-14));
      const double angle = u(rng), tx = u(rng), ty = u(rng);
      CHECK(hmvlm::ade(test::rigid(pa, angle, tx, ty), test::rigid(pb, angle, tx, ty), h) ==
            doctest::Approx(v).epsilon(1e-12));
    }
  }
}

TEST_CASE("smoothness")
{
  CHECK(hmvlm::smoothness(test::line(20, 3.0)) == 0.0);
  oracle::Points parabola;
  for (int i = 0; i < 20; ++i) parabola.emplace_back(i, static_cast<double>(i * i));
  // Second difference is (0, 2) everywhere.
  CHECK(hmvlm::smoothness(test::make(parabola)) == doctest::Approx(4.0).epsilon(1e-14));
  const auto t = test::make(parabola);
  CHECK(hmvlm::smoothness(test::rigid(t, 0.7, -3.0, 12.0)) == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(hmvlm::smoothness(test::line(2)) == 0.0);
}

namespace {

hmvlm::EvalRecord record(std::string id, hmvlm::Trajectoryd pred, hmvlm::Trajectoryd gt)
{
  hmvlm::EvalRecord r;
  r.id = std::move(id);
  r.pred = std::move(pred);
  r.gt = std::move(gt);
  return r;
}

} // namespace

TEST_CASE("summarize")
{
  const hmvlm::RefinementConfig cfg;
  const auto empty = hmvlm::summarize({}, cfg);
  CHECK(empty.n_records == 0);
  CHECK_FALSE(empty.ade_3s.has_value());
  CHECK_FALSE(empty.ade_5s.has_value());

  const auto gt = test::line(20, 2.0);
  const auto exact = hmvlm::summarize({record("a", gt, gt)}, cfg);
  // Smoothing a line reproduces it up to rounding.
  CHECK(*exact.ade_3s <= 1e-12);
  CHECK(*exact.ade_5s <= 1e-12);

  const auto off1 = hmvlm::Trajectoryd(gt.points().rowwise() + Eigen::RowVector2d(0.0, 1.0));
  const auto off3 = hmvlm::Trajectoryd(gt.points().rowwise() + Eigen::RowVector2d(0.0, 3.0));
  const auto two = hmvlm::summarize({record("a", off1, gt), record("b", off3, gt)}, cfg);
  CHECK(*two.ade_5s == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("summarize counts failure kinds and excludes them from means")
{
  const auto gt = test::line(20, 2.0);
  std::vector<hmvlm::EvalRecord> records;
  records.push_back(record("ok", gt, gt));
  hmvlm::EvalRecord parse_fail;
  parse_fail.id = "p";
  parse_fail.raw_text = "<DESC_START>x";
  parse_fail.gt = gt;
  records.push_back(parse_fail);
  records.push_back(record("empty", hmvlm::Trajectoryd(), gt));
  records.push_back(record("short-gt", gt, test::line(10)));
  hmvlm::EvalRecord text_ok;
  text_ok.id = "t";
  text_ok.raw_text = hmvlm::serialize_response({"d", "k", test::line(15, 2.0)});
  text_ok.gt = gt;
  records.push_back(text_ok);

  const auto s = hmvlm::summarize(records, hmvlm::RefinementConfig{});
  CHECK(s.n_records == 5);
  CHECK(s.n_parse_failures == 1);
  CHECK(s.n_length_failures == 2);
  CHECK(*s.ade_5s == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("summarize is independent of order and worker count")
{
  std::mt19937_64 rng(4);
  std::normal_distribution<double> noise(0.0, 0.5);
  std::vector<hmvlm::EvalRecord> records;
  for (int k = 0; k < 64; ++k) {
    const auto gt = test::line(20, 1.0 + 0.1 * k);
    auto pts = test::points(gt);
    for (auto& p : pts) p.second += noise(rng);
    records.push_back(record(std::to_string(k), test::make(pts), gt));
  }
  const hmvlm::RefinementConfig cfg;
  const auto base = hmvlm::summarize(records, cfg, 1);
  CHECK(hmvlm::summarize(records, cfg, 8) == base);
  std::shuffle(records.begin(), records.end(), rng);
  CHECK(hmvlm::summarize(records, cfg, 3) == base);
  CHECK(*base.mean_smoothness_post < *base.mean_smoothness_pre);
}

TEST_CASE("summary text report")
{
  hmvlm::EvalSummary s;
  s.ade_3s = 1.5;
  s.n_records = 2;
  const auto text = hmvlm::format_summary_text(s);
  CHECK(text.find("ade_3s=1.500000\n") != std::string::npos);
  CHECK(text.find("ade_5s=nan\n") != std::string::npos);
  CHECK(text.find("n_records=2\n") != std::string::npos);
}
