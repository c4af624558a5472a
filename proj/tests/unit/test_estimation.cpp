#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "gswcast/error.hpp"
#include "gswcast/estimation.hpp"
#include "gswcast/exact.hpp"
#include "gswcast/numeric.hpp"

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

/// A sample holding exactly the rows in `mask`, as if drawn at Δ.
GswSample forced_sample(const TimeSeriesTable& t, std::span<const double> w, double delta, unsigned mask) {
  GswSample s;
  s.delta = delta;
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!(mask >> i & 1u)) continue;
    rows.push_back(i);
    s.row_id.push_back(i);
    s.u.push_back(0.5);
    s.weight.push_back(w[i]);
    s.key.push_back(w[i]);
  }
  s.rows = t.take(rows);
  s.next_row_id = w.size();
  return s;
}

struct Moments {
  double mean = 0;
  double var = 0;
};

/// E[M̂] and Var(M̂) by enumerating all 2ⁿ inclusion outcomes.
Moments enumerate(std::span<const double> m, std::span<const double> w, double delta) {
  const std::size_t n = m.size();
  double e1 = 0, e2 = 0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    double prob = 1, est = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double p = w[i] / (delta + w[i]);
      if (mask >> i & 1u) {
        prob *= p;
        est += m[i] / p;
      } else {
        prob *= 1 - p;
      }
    }
    e1 += prob * est;
    e2 += prob * est * est;
  }
  return {e1, e2 - e1 * e1};
}

}  // namespace

TEST(EstimateSum, ZeroDeltaIsExact) {
  const auto t = gswcast::testing::ad_table();
  const auto w = t.measure("ViewTime");
  const auto s = gsw_draw(t, w, 0.0, 3);
  const auto c = parse_constraint("Gender = 'F'");
  const auto e = estimate_sum(s, c, "Impression", 20200301);
  EXPECT_EQ(e.value, exact_subset_sum(t, c, "Impression", 20200301));
  EXPECT_EQ(e.rows_used, 2u);
  EXPECT_EQ(e.variance, 0.0);
  ASSERT_TRUE(e.bound.has_value());
  EXPECT_EQ(*e.bound, 0.0);
}

TEST(EstimateSum, SingleRowBothOutcomes) {
  const std::vector<double> m{5.0};
  const auto t = single_ts_table(m);
  const auto in = estimate_sum(forced_sample(t, m, 5.0, 1), Constraint::always(), "m", 1);
  const auto out = estimate_sum(forced_sample(t, m, 5.0, 0), Constraint::always(), "m", 1);
  EXPECT_EQ(in.value, 10.0);
  EXPECT_EQ(out.value, 0.0);
  EXPECT_TRUE(out.empty_match());
  EXPECT_EQ(0.5 * in.value + 0.5 * out.value, 5.0);
}

TEST(EstimateSum, ThreeRowEnumeration) {
  const std::vector<double> m{1, 2, 3};
  const auto t = single_ts_table(m);
  double mean = 0;
  for (unsigned mask = 0; mask < 8; ++mask) {
    double prob = 1;
    for (int i = 0; i < 3; ++i) {
      const double p = m[i] / (3.0 + m[i]);
      prob *= (mask >> i & 1u) ? p : 1 - p;
    }
    mean += prob * estimate_sum(forced_sample(t, m, 3.0, mask), Constraint::always(), "m", 1).value;
  }
  EXPECT_NEAR(mean, 6.0, 1e-12);
}

TEST(EstimateSum, ExhaustiveMomentsMatchClosedForm) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  for (std::size_t n = 1; n <= 12; ++n) {
    std::vector<double> m(n), w(n);
    for (auto& x : m) x = u(rng);
    for (auto& x : w) x = u(rng);
    const double delta = u(rng);
    double total = 0;
    for (double x : m) total += x;
    const auto mo = enumerate(m, w, delta);
    EXPECT_NEAR(mo.mean, total, 1e-12 * total);
    const double v = gsw_variance(m, w, delta);
    EXPECT_NEAR(mo.var, v, 1e-10 * v) << n;
  }
}

TEST(EstimateSum, UnknownMeasure) {
  const auto t = gswcast::testing::ad_table();
  const auto s = gsw_draw(t, t.measure("Impression"), 1.0, 1);
  EXPECT_EQ(code_of([&] { estimate_sum(s, Constraint::always(), "Clicks", 20200301); }), ErrorCode::UnknownMeasure);
}

TEST(EstimateSeries, AgreesWithPointEstimates) {
  const auto t = gswcast::testing::ad_table();
  const auto w = t.measure("Impression");
  const auto s = gsw_draw(t, w, 2.0, 4);
  const std::vector<std::int64_t> days{20200301, 20200302};
  const auto series = estimate_series(s, Constraint::always(), "ViewTime", days);
  for (std::size_t j = 0; j < days.size(); ++j) {
    const auto e = estimate_sum(s, Constraint::always(), "ViewTime", days[j]);
    EXPECT_EQ(series[j].value, e.value);
    EXPECT_EQ(series[j].rows_used, e.rows_used);
  }
  const auto count = estimate_count_series(gsw_draw(t, w, 0.0, 4), Constraint::always(), days);
  EXPECT_EQ(count[0].value, 3.0);
  EXPECT_EQ(count[1].value, 1.0);
}

TEST(EstimateSum, PriorityAndUniformOnFullSamples) {
  const auto t = gswcast::testing::ad_table();
  const auto c = parse_constraint("Gender = 'F'");
  EXPECT_EQ(estimate_sum(priority_draw(t, "Impression", 0.5, 1), c, "Impression", 20200301).value, 15.0);
  EXPECT_EQ(estimate_sum(uniform_draw(t, 1.0, 1), c, "Impression", 20200301).value, 15.0);
}

TEST(Consistency, Examples) {
  const auto c = consistency(std::vector<double>{100, 100, 200, 400}, std::vector<double>{10, 10, 20, 50});
  EXPECT_EQ(c.theta_lo, 8.0);
  EXPECT_EQ(c.theta_hi, 10.0);
  EXPECT_EQ(c.theta, 1.25);

  const std::vector<double> m{3, 7, 11};
  const auto same = consistency(m, m);
  EXPECT_EQ(same.theta_lo, 1.0);
  EXPECT_EQ(same.theta_hi, 1.0);
  EXPECT_EQ(same.theta, 1.0);

  const auto two = consistency(std::vector<double>{2, 4}, std::vector<double>{1, 1});
  EXPECT_EQ(two.theta_lo, 2.0);
  EXPECT_EQ(two.theta_hi, 4.0);
  EXPECT_EQ(two.theta, 2.0);

  EXPECT_EQ(code_of([] { consistency(std::vector<double>{1, 2}, std::vector<double>{1}); }),
            ErrorCode::LengthMismatch);
}

TEST(ExpectedSampleSize, Examples) {
  EXPECT_NEAR(expected_sample_size(std::vector<double>{1, 1, 2}, 2.0), 7.0 / 6.0, 1e-15);
  EXPECT_EQ(expected_sample_size(std::vector<double>(10, 3.0), 3.0), 5.0);
  const auto w = pareto(1000, 1.5, 2);
  double total = 0;
  for (double x : w) total += x;
  for (double delta : {1.0, 1e3, 1e6}) EXPECT_LE(expected_sample_size(w, delta), total / delta);
  EXPECT_NEAR(expected_sample_size(w, 1e9), total / 1e9, 1e-6 * total / 1e9);
  EXPECT_EQ(code_of([] { expected_sample_size(std::vector<double>{1}, 0.0); }), ErrorCode::NonPositiveDelta);
}

TEST(RstdBound, Examples) {
  EXPECT_DOUBLE_EQ(rstd_bound(1.0, 100.0), 0.1);
  EXPECT_NEAR(rstd_bound(1.25, 100.0), 0.111803, 1e-6);
  EXPECT_EQ(rstd_bound(4.0, 1.0), 2.0);
  EXPECT_EQ(code_of([] { rstd_bound(0.5, 10.0); }), ErrorCode::InvalidTheta);
  EXPECT_EQ(code_of([] { rstd_bound(1.0, 0.0); }), ErrorCode::InvalidArgument);
}

TEST(CompressedBounds, SingleAndIdenticalMeasuresAreOptimal) {
  const std::vector<double> a{100, 100, 200, 400};
  const std::vector<MeasureSpan> one{a};
  const std::vector<MeasureSpan> twins{a, a};
  for (auto kind : {MeanKind::Geometric, MeanKind::Arithmetic}) {
    for (const auto& group : {one, twins}) {
      const auto b = compressed_bounds(group, kind, 400.0);
      EXPECT_DOUBLE_EQ(b.uniform, 0.05);
      for (double x : b.per_measure) EXPECT_DOUBLE_EQ(x, 0.05);
    }
  }
  EXPECT_EQ(code_of([] { compressed_bounds({}, MeanKind::Geometric, 1.0); }), ErrorCode::EmptyGroup);
}

TEST(CompressedBounds, WorkedPair) {
  const std::vector<double> a{100, 100, 200, 400}, b{1, 1, 2, 1};
  const std::vector<MeasureSpan> g{a, b};
  const auto geo = compressed_bounds(g, MeanKind::Geometric, 100.0);
  EXPECT_DOUBLE_EQ(geo.uniform, std::sqrt(std::pow(4.0, 0.5) / 100.0));
  for (double x : geo.per_measure) EXPECT_DOUBLE_EQ(x, std::sqrt(std::pow(4.0, 0.5) / 100.0));
  const auto arith = compressed_bounds(g, MeanKind::Arithmetic, 100.0);
  EXPECT_DOUBLE_EQ(arith.uniform, std::sqrt(400.0 * 400.0 / 100.0));
}

TEST(OptimalWeights, IdentityWithUnitTheta) {
  const std::vector<double> m{1, 2, 3};
  EXPECT_EQ(optimal_weights(m), m);
  const auto p = pareto(500, 1.5, 3);
  EXPECT_EQ(consistency(p, optimal_weights(p)).theta, 1.0);
}

TEST(SubsetBound, UsesConstrainedRows) {
  const auto m = pareto(400, 1.5, 4);
  const auto t = single_ts_table(m, 4);
  std::vector<double> w(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) w[i] = m[i] * (1.0 + 0.5 * static_cast<double>(i % 3));
  const auto c = parse_constraint("g = 1");
  const auto qb = subset_bound(t, w, 10.0, c, "m", 1);
  std::vector<double> ms, ws;
  for (std::size_t i = 1; i < m.size(); i += 4) {
    ms.push_back(m[i]);
    ws.push_back(w[i]);
  }
  EXPECT_EQ(qb.subset_rows, ms.size());
  EXPECT_DOUBLE_EQ(qb.stats.theta, consistency(ms, ws).theta);
  EXPECT_NEAR(qb.expected_size, expected_sample_size(ws, 10.0), 1e-9);
  EXPECT_NEAR(qb.bound, rstd_bound(qb.stats.theta, qb.expected_size), 1e-12);
  const auto whole = table_bound(t, w, 10.0, "m");
  EXPECT_EQ(whole.subset_rows, m.size());
  EXPECT_EQ(code_of([&] { subset_bound(t, w, 10.0, parse_constraint("g = 9"), "m", 1); }), ErrorCode::ZeroTrueSum);
}

TEST(MonteCarlo, ZeroDeltaIsExact) {
  const auto m = pareto(300, 1.5, 5);
  const auto t = single_ts_table(m);
  const auto rep = rstd_monte_carlo(t, SamplerConfig::gsw(m, 0.0), Constraint::always(), "m", 1, 10, 1);
  EXPECT_EQ(rep.rstd, 0.0);
  EXPECT_EQ(rep.re, 0.0);
  EXPECT_TRUE(rep.re_le_rstd);
}

TEST(MonteCarlo, OptimalWeightsMeetBound) {
  const auto m = pareto(20000, 1.5, 6);
  const auto t = single_ts_table(m);
  const auto w = optimal_weights(m);
  double lo = 1e-6, hi = 1e9;
  for (int it = 0; it < 200; ++it) {
    const double mid = std::sqrt(lo * hi);
    (expected_sample_size(w, mid) > 100.0 ? lo : hi) = mid;
  }
  const double delta = std::sqrt(lo * hi);
  const auto rep = rstd_monte_carlo(t, SamplerConfig::gsw(w, delta), Constraint::always(), "m", 1, 10000, 7);
  EXPECT_LE(rep.rstd, 0.1 * 1.15);
  EXPECT_LE(rep.re, rep.rstd);
  EXPECT_TRUE(rep.re_le_rstd);
  EXPECT_NEAR(rep.mean, rep.exact, 3 * rep.std_error);
  EXPECT_NEAR(rep.mean_sample_size, 100.0, 1.0);
}

TEST(MonteCarlo, TrialEstimateMatchesFullDraw) {
  const auto m = pareto(500, 1.5, 8);
  const auto t = single_ts_table(m, 3);
  std::vector<double> w(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) w[i] = std::sqrt(m[i]);
  const auto c = parse_constraint("g != 2");
  for (std::uint64_t k = 0; k < 20; ++k) {
    const auto seed = trial_seed(9, k);
    EXPECT_DOUBLE_EQ(trial_estimate(t, SamplerConfig::gsw(w, 4.0), c, "m", 1, seed),
                     estimate_sum(gsw_draw(t, w, 4.0, seed), c, "m", 1).value);
    EXPECT_DOUBLE_EQ(trial_estimate(t, SamplerConfig::priority(3.0), c, "m", 1, seed),
                     estimate_sum(priority_draw(t, "m", 3.0, seed), c, "m", 1).value);
    EXPECT_DOUBLE_EQ(trial_estimate(t, SamplerConfig::uniform(0.2), c, "m", 1, seed),
                     estimate_sum(uniform_draw(t, 0.2, seed), c, "m", 1).value);
  }
}

TEST(MonteCarlo, VarianceFormulaWithinFivePercent) {
  const auto m = pareto(80, 1.5, 10);
  const auto t = single_ts_table(m);
  std::vector<double> w(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) w[i] = 1.0 + static_cast<double>(i % 7);
  const auto rep = rstd_monte_carlo(t, SamplerConfig::gsw(w, 5.0), Constraint::always(), "m", 1, 100000, 11);
  const double v = gsw_variance(m, w, 5.0);
  EXPECT_NEAR(rep.sample_sd * rep.sample_sd, v, 0.05 * v);
}

TEST(MonteCarlo, ErrorPaths) {
  const auto m = pareto(10, 1.5, 12);
  const auto t = single_ts_table(m, 2);
  const auto cfg = SamplerConfig::gsw(m, 1.0);
  EXPECT_EQ(code_of([&] { rstd_monte_carlo(t, cfg, Constraint::always(), "m", 1, 1, 1); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { rstd_monte_carlo(t, cfg, parse_constraint("g = 5"), "m", 1, 10, 1); }),
            ErrorCode::ZeroTrueSum);
  EXPECT_EQ(code_of([] { SamplerConfig::priority(0.0); }), ErrorCode::NonPositiveTau);
  EXPECT_EQ(code_of([] { SamplerConfig::uniform(0.0); }), ErrorCode::InvalidProbability);
}

TEST(MonteCarlo, Deterministic) {
  const auto m = pareto(1000, 1.5, 13);
  const auto t = single_ts_table(m);
  const auto a = rstd_monte_carlo(t, SamplerConfig::gsw(m, 50.0), Constraint::always(), "m", 1, 500, 3);
  const auto b = rstd_monte_carlo(t, SamplerConfig::gsw(m, 50.0), Constraint::always(), "m", 1, 500, 3);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.rstd, b.rstd);
}

TEST(FormatEstimate, KeyValueBlock) {
  Estimate e;
  e.value = 15;
  e.rows_used = 2;
  e.theta = 1.5;
  e.bound = 0.25;
  const auto text = format_estimate(e, 2.0);
  EXPECT_NE(text.find("value=15\n"), std::string::npos);
  EXPECT_NE(text.find("rows_used=2\n"), std::string::npos);
  EXPECT_NE(text.find("theta=1.5\n"), std::string::npos);
  EXPECT_NE(text.find("bound=0.25\n"), std::string::npos);
  EXPECT_NE(text.find("delta=2\n"), std::string::npos);
  EXPECT_NE(format_estimate(Estimate{}, 1.0).find("warning"), std::string::npos);
}
