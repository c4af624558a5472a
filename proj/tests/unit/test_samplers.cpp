#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "gswcast/error.hpp"
#include "gswcast/numeric.hpp"
#include "gswcast/samplers.hpp"

using namespace gswcast;
using gswcast::testing::pareto;
using gswcast::testing::single_ts_table;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no exception";
  return ErrorCode::IoError;
}

std::vector<std::uint64_t> sorted_ids(const GswSample& s) {
  auto ids = s.row_id;
  std::sort(ids.begin(), ids.end());
  return ids;
}

/// Reference inclusion set straight from the keyed uniforms.
std::vector<std::uint64_t> reference_ids(std::span<const double> w, double delta, std::uint64_t seed) {
  std::vector<std::uint64_t> ids;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double u = keyed_uniform(seed, Stream::Gsw, i);
    if ((1.0 / u - 1.0) * w[i] >= delta) ids.push_back(i);
  }
  return ids;
}

}  // namespace

TEST(GswDraw, ZeroDeltaKeepsEverything) {
  const auto m = pareto(500, 1.5, 1);
  const auto t = single_ts_table(m);
  const auto s = gsw_draw(t, m, 0.0, 9);
  EXPECT_EQ(s.size(), 500u);
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_TRUE(std::isfinite(s.key[i]));
    EXPECT_EQ(s.calibration(i), 1.0);
  }
}

TEST(GswDraw, RowsSortedByKeyAndAboveDelta) {
  const auto m = pareto(2000, 1.5, 2);
  const auto s = gsw_draw(single_ts_table(m), m, 3.0, 4);
  ASSERT_GT(s.size(), 0u);
  EXPECT_TRUE(std::is_sorted(s.key.begin(), s.key.end()));
  for (double k : s.key) EXPECT_GE(k, 3.0);
  EXPECT_EQ(sorted_ids(s), reference_ids(m, 3.0, 4));
}

TEST(GswDraw, WeightEqualToDeltaIsHalf) {
  const std::vector<double> w{2.0};
  const auto t = single_ts_table(w);
  int kept = 0;
  const int R = 100000;
  for (int r = 0; r < R; ++r) kept += static_cast<int>(gsw_draw(t, w, 2.0, trial_seed(17, r)).size());
  EXPECT_NEAR(kept / static_cast<double>(R), 0.5, 3 * std::sqrt(0.25 / R));
}

TEST(GswDraw, MeanSampleSizeSevenSixths) {
  const std::vector<double> w{1, 1, 2};
  const auto t = single_ts_table(w);
  const int R = 100000;
  double sum = 0, sum2 = 0;
  for (int r = 0; r < R; ++r) {
    const double k = static_cast<double>(gsw_draw(t, w, 2.0, trial_seed(1, r)).size());
    sum += k;
    sum2 += k * k;
  }
  const double mean = sum / R;
  // Var|S| = Σ p(1−p) with p = 1/3, 1/3, 1/2.
  const double var = 2 * (1.0 / 3) * (2.0 / 3) + 0.25;
  EXPECT_NEAR(mean, 7.0 / 6.0, 3 * std::sqrt(var / R));
  EXPECT_NEAR(sum2 / R - mean * mean, var, 0.02);
}

TEST(GswDraw, InclusionFrequencyPerRow) {
  const std::vector<double> w{0.5, 1, 3, 10};
  const auto t = single_ts_table(w);
  const double delta = 2.0;
  const int R = 40000;
  std::vector<int> hits(w.size(), 0);
  for (int r = 0; r < R; ++r) {
    for (auto id : gsw_draw(t, w, delta, trial_seed(5, r)).row_id) ++hits[id];
  }
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double p = w[i] / (delta + w[i]);
    EXPECT_NEAR(hits[i] / static_cast<double>(R), p, 3 * std::sqrt(p * (1 - p) / R));
  }
}

TEST(GswDraw, ErrorPaths) {
  const std::vector<double> w{1, 2};
  const auto t = single_ts_table(w);
  EXPECT_EQ(code_of([&] { gsw_draw(t, w, -1.0, 1); }), ErrorCode::NonPositiveDelta);
  const std::vector<double> bad{1, 0};
  EXPECT_EQ(code_of([&] { gsw_draw(t, bad, 1.0, 1); }), ErrorCode::NonPositiveWeight);
  const std::vector<double> short_w{1};
  EXPECT_EQ(code_of([&] { gsw_draw(t, short_w, 1.0, 1); }), ErrorCode::LengthMismatch);
}

TEST(GswDraw, DeterministicAndPartitionMerge) {
  const auto m = pareto(1000, 1.5, 3);
  const auto t = single_ts_table(m);
  const auto whole = gsw_draw(t, m, 5.0, 42);
  const auto again = gsw_draw(t, m, 5.0, 42);
  EXPECT_EQ(whole.row_id, again.row_id);
  EXPECT_EQ(whole.u, again.u);

  std::vector<std::size_t> lo(400), hi(600);
  std::iota(lo.begin(), lo.end(), 0);
  std::iota(hi.begin(), hi.end(), 400);
  const std::span<const double> ms(m);
  const auto a = gsw_draw(t.take(lo), ms.subspan(0, 400), 5.0, 42);
  const auto b = gsw_draw(t.take(hi), ms.subspan(400), 5.0, 42, {}, 400);
  const auto merged = merge_samples(a, b);
  EXPECT_EQ(merged.row_id, whole.row_id);
  EXPECT_EQ(merged.u, whole.u);
  EXPECT_EQ(merged.key, whole.key);
}

TEST(GswUpdate, SameDeltaNoRowsIsIdentity) {
  const auto m = pareto(300, 1.5, 4);
  const auto t = single_ts_table(m);
  const auto s = gsw_draw(t, m, 2.0, 8);
  const auto u = gsw_update(s, 2.0, t.take(std::vector<std::size_t>{}), std::vector<double>{});
  EXPECT_EQ(u.row_id, s.row_id);
  EXPECT_EQ(u.u, s.u);
  EXPECT_EQ(u.delta, s.delta);
}

TEST(GswUpdate, MatchesFreshDrawOverAllRows) {
  const auto m = pareto(150, 1.5, 5);
  const auto t = single_ts_table(m);
  std::vector<std::size_t> old_rows(100), new_rows(50);
  std::iota(old_rows.begin(), old_rows.end(), 0);
  std::iota(new_rows.begin(), new_rows.end(), 100);
  const std::span<const double> ms(m);
  const auto s = gsw_draw(t.take(old_rows), ms.subspan(0, 100), 1.0, 77);
  const auto updated = gsw_update(s, 4.0, t.take(new_rows), ms.subspan(100));
  const auto fresh = gsw_draw(t, m, 4.0, 77);
  EXPECT_EQ(updated.row_id, fresh.row_id);
  EXPECT_EQ(updated.u, fresh.u);
  EXPECT_EQ(updated.next_row_id, 150u);
}

TEST(GswUpdate, NewRowsBelowDeltaOnlyDelete) {
  const auto m = pareto(100, 1.5, 6);
  const auto t = single_ts_table(m);
  const auto s = gsw_draw(t, m, 1.0, 3);
  // Tiny weights: keys far below Δ′ for any realistic u.
  const std::vector<double> tiny(20, 1e-12);
  const auto extra = single_ts_table(tiny);
  const auto updated = gsw_update(s, 3.0, extra, tiny);
  EXPECT_LE(updated.size(), s.size());
  for (auto id : updated.row_id) EXPECT_LT(id, 100u);
  const std::set<std::uint64_t> before(s.row_id.begin(), s.row_id.end());
  for (auto id : updated.row_id) EXPECT_TRUE(before.count(id));
}

TEST(GswUpdate, ErrorPaths) {
  const auto m = pareto(50, 1.5, 7);
  const auto t = single_ts_table(m);
  const auto s = gsw_draw(t, m, 2.0, 1);
  EXPECT_EQ(code_of([&] { gsw_update(s, 1.0, t, m); }), ErrorCode::DeltaDecrease);
  EXPECT_EQ(code_of([&] { gsw_update(s, 2.0, t, m, 10); }), ErrorCode::DuplicateRowId);
}

TEST(PriorityDraw, LargeMeasuresAreDeterministic) {
  const std::vector<double> m{5, 6, 7};
  const auto s = priority_draw(single_ts_table(m), "m", 4.0, 1);
  ASSERT_EQ(s.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(s.x[i], m[s.row_id[i]]);
}

TEST(PriorityDraw, SmallMeasureVarianceMatchesFormula) {
  const std::vector<double> m{1.0};
  const auto t = single_ts_table(m);
  const int R = 1000000;
  double sum = 0, sum2 = 0;
  int hits = 0;
  for (int r = 0; r < R; ++r) {
    const auto s = priority_draw(t, "m", 4.0, trial_seed(2, r));
    if (s.size() == 0) continue;
    EXPECT_EQ(s.x[0], 4.0);
    ++hits;
    sum += s.x[0];
    sum2 += s.x[0] * s.x[0];
  }
  const double p = hits / static_cast<double>(R);
  EXPECT_NEAR(p, 0.25, 3 * std::sqrt(0.25 * 0.75 / R));
  const double mean = sum / R;
  const double var = sum2 / R - mean * mean;
  EXPECT_NEAR(var, 3.0, 0.02 * 3.0);
}

TEST(PriorityDraw, EstimatorUnbiased) {
  const auto m = pareto(200, 1.5, 8);
  const auto t = single_ts_table(m);
  double total = 0, var = 0;
  const double tau = 5.0;
  for (double x : m) {
    total += x;
    if (x < tau) var += (tau - x) * x;
  }
  const int R = 20000;
  double sum = 0;
  for (int r = 0; r < R; ++r) {
    const auto s = priority_draw(t, "m", tau, trial_seed(3, r));
    for (double x : s.x) sum += x;
  }
  EXPECT_NEAR(sum / R, total, 3 * std::sqrt(var / R));
}

TEST(PriorityDraw, TopKKeepsKRows) {
  const auto m = pareto(1000, 1.5, 9);
  const auto t = single_ts_table(m);
  const auto s = priority_draw_topk(t, "m", 50, 4);
  EXPECT_EQ(s.size(), 50u);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double mi = m[s.row_id[i]];
    EXPECT_EQ(s.x[i], std::max(mi, s.tau));
    EXPECT_GE(mi / s.alpha[i], s.tau);
  }
  const auto all = priority_draw_topk(t, "m", 5000, 4);
  EXPECT_EQ(all.size(), 1000u);
  EXPECT_EQ(all.tau, *std::min_element(m.begin(), m.end()));
}

TEST(PriorityDraw, NonPositiveTau) {
  const std::vector<double> m{1.0};
  EXPECT_EQ(code_of([&] { priority_draw(single_ts_table(m), "m", 0.0, 1); }), ErrorCode::NonPositiveTau);
}

TEST(MeasureBiased, CopyRule) {
  EXPECT_EQ(measure_biased_copies(4.0, 1.0, 4.0), 1u);
  EXPECT_EQ(measure_biased_copies(12.0, 12.0, 4.0), 3u);
  EXPECT_EQ(measure_biased_copies(12.5, 12.5, 4.0), 4u);

  std::vector<double> m{0.5, 1, 2, 3, 8, 9, 12, 20, 0.2, 40};
  const auto t = single_ts_table(m);
  const auto s = priority_draw(t, "m", 4.0, 12);
  std::vector<std::uint64_t> expected;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double mi = m[s.row_id[i]];
    const std::size_t copies = s.x[i] == s.tau && mi < s.tau ? 1 : static_cast<std::size_t>(std::ceil(mi / 4.0));
    for (std::size_t c = 0; c < copies; ++c) expected.push_back(s.row_id[i]);
  }
  auto got = measure_biased_from_priority(s);
  std::sort(got.begin(), got.end());
  std::sort(expected.begin(), expected.end());
  EXPECT_EQ(got, expected);
}

TEST(UniformDraw, FullAndHalf) {
  const auto m = pareto(10000, 1.5, 10);
  const auto t = single_ts_table(m);
  EXPECT_EQ(uniform_draw(t, 1.0, 1).size(), 10000u);
  const auto half = uniform_draw(t, 0.5, 2);
  EXPECT_NEAR(static_cast<double>(half.size()), 5000.0, 150.0);
  EXPECT_EQ(code_of([&] { uniform_draw(t, 0.0, 1); }), ErrorCode::InvalidProbability);
  EXPECT_EQ(code_of([&] { uniform_draw(t, 1.5, 1); }), ErrorCode::InvalidProbability);
}

TEST(UniformDraw, PartitionsMerge) {
  const auto m = pareto(1000, 1.5, 11);
  const auto t = single_ts_table(m);
  const auto whole = uniform_draw(t, 0.3, 5);
  std::vector<std::size_t> lo(500), hi(500);
  std::iota(lo.begin(), lo.end(), 0);
  std::iota(hi.begin(), hi.end(), 500);
  auto ids = uniform_draw(t.take(lo), 0.3, 5).row_id;
  const auto rest = uniform_draw(t.take(hi), 0.3, 5, 500).row_id;
  ids.insert(ids.end(), rest.begin(), rest.end());
  EXPECT_EQ(ids, whole.row_id);
}

TEST(Multilayer, NestedAndEqualToFreshDraws) {
  const auto m = pareto(10000, 1.5, 12);
  const auto t = single_ts_table(m);
  const std::vector<double> ladder{1, 10, 100};
  const auto ml = build_multilayer(t, m, ladder, 99, WeightSource::single("m"));
  ASSERT_EQ(ml.layers.size(), 3u);
  for (std::size_t j = 0; j < 3; ++j) {
    const auto fresh = gsw_draw(t, m, ladder[j], 99);
    EXPECT_EQ(ml.layers[j].row_id, fresh.row_id);
    EXPECT_EQ(ml.layers[j].u, fresh.u);
  }
  for (std::size_t j = 0; j + 1 < 3; ++j) {
    const auto big = sorted_ids(ml.layers[j]);
    const auto small = sorted_ids(ml.layers[j + 1]);
    EXPECT_TRUE(std::includes(big.begin(), big.end(), small.begin(), small.end()));
    EXPECT_LT(small.size(), big.size());
  }
  const std::vector<double> one{5};
  EXPECT_EQ(build_multilayer(t, m, one, 1).layers.size(), 1u);
}

TEST(Multilayer, UnsortedLadder) {
  const auto m = pareto(10, 1.5, 13);
  const auto t = single_ts_table(m);
  const std::vector<double> bad{10, 1};
  EXPECT_EQ(code_of([&] { build_multilayer(t, m, bad, 1); }), ErrorCode::UnsortedDeltas);
  const std::vector<double> dup{1, 1};
  EXPECT_EQ(code_of([&] { build_multilayer(t, m, dup, 1); }), ErrorCode::UnsortedDeltas);
}

TEST(WeightSource, Covers) {
  const auto g = WeightSource::group("g0", WeightSource::Kind::GeoMean, {"a", "b"});
  EXPECT_TRUE(g.covers("b"));
  EXPECT_FALSE(g.covers("c"));
  EXPECT_TRUE(WeightSource::single("a").covers("a"));
}
