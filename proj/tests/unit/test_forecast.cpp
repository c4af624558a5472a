#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "gswcast/error.hpp"
#include "gswcast/forecast.hpp"

using namespace gswcast;

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

/// x_t = a·x_{t−1} + u_t + b·u_{t−1}, after a burn-in.
std::vector<double> arma11(std::size_t n, double a, double b, double sd, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, sd);
  double x = 0, prev_u = 0;
  std::vector<double> out;
  for (std::size_t t = 0; t < n + 500; ++t) {
    const double u = z(rng);
    x = a * x + u + b * prev_u;
    prev_u = u;
    if (t >= 500) out.push_back(x);
  }
  return out;
}

double variance(const std::vector<double>& v) {
  double mean = 0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double s = 0;
  for (double x : v) s += (x - mean) * (x - mean);
  return s / static_cast<double>(v.size());
}

}  // namespace

TEST(Difference, Examples) {
  const std::vector<double> s{1, 3, 6};
  EXPECT_EQ(difference(s, 1), (std::vector<double>{2, 3}));
  EXPECT_EQ(difference(s, 2), (std::vector<double>{1}));
  EXPECT_EQ(difference(s, 0), s);
  EXPECT_EQ(difference(std::vector<double>(5, 4.0), 1), std::vector<double>(4, 0.0));
  EXPECT_EQ(code_of([&] { difference(s, 3); }), ErrorCode::SeriesTooShort);
}

TEST(Difference, IntegrateInvertsExactly) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> z(0.0, 10.0);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> s(3 + rng() % 40);
    for (auto& x : s) x = z(rng);
    for (int d = 0; d <= 2; ++d) {
      const auto back = integrate(difference(s, d), d, difference_anchors(s, d));
      ASSERT_EQ(back.size(), s.size());
      for (std::size_t i = 0; i < s.size(); ++i) EXPECT_NEAR(back[i], s[i], 1e-12 * (1 + std::abs(s[i])));
    }
  }
}

TEST(FitArma, WhiteNoise) {
  const auto s = arma11(5000, 0.0, 0.0, 2.0, 2);
  const auto m = fit_arma(AggregateSeries::exact(s), 0, 0);
  EXPECT_TRUE(m.alpha.empty());
  EXPECT_TRUE(m.beta.empty());
  EXPECT_NEAR(m.sigma_u2, variance(s), 1e-9 * variance(s));
}

TEST(FitArma, RecoversAr1) {
  const auto m = fit_arma(AggregateSeries::exact(arma11(10000, 0.8, 0.0, 1.0, 3)), 1, 0);
  ASSERT_EQ(m.alpha.size(), 1u);
  EXPECT_GE(m.alpha[0], 0.75);
  EXPECT_LE(m.alpha[0], 0.85);
  EXPECT_NEAR(m.sigma_u2, 1.0, 0.05);
}

TEST(FitArma, RecoversArma11) {
  const auto m = fit_arma(AggregateSeries::exact(arma11(10000, 0.5, 0.2, 1.0, 4)), 1, 1);
  EXPECT_NEAR(m.alpha[0], 0.5, 0.07);
  EXPECT_NEAR(m.beta[0], 0.2, 0.07);
}

TEST(FitArma, ErrorPaths) {
  const auto short_series = AggregateSeries::exact(arma11(15, 0.5, 0.0, 1.0, 5));
  EXPECT_EQ(code_of([&] { fit_arma(short_series, 2, 0); }), ErrorCode::SeriesTooShort);
  // Long enough that the least-squares unit-root bias stays below 0.01.
  std::vector<double> walk(5000);
  std::mt19937_64 rng(6);
  std::normal_distribution<double> z(0.0, 1.0);
  for (std::size_t i = 1; i < walk.size(); ++i) walk[i] = walk[i - 1] + z(rng);
  EXPECT_EQ(code_of([&] { fit_arma(AggregateSeries::exact(walk), 1, 0); }), ErrorCode::NonStationary);
  EXPECT_NO_THROW(fit_arima(AggregateSeries::exact(walk), 1, 1, 0));
}

TEST(FitArma, NoiseShareRemovedFromInnovation) {
  const auto clean = arma11(20000, 0.5, 0.2, 1.0, 7);
  std::mt19937_64 rng(8);
  std::normal_distribution<double> eps(0.0, 0.5);
  AggregateSeries noisy;
  for (double x : clean) {
    noisy.values.push_back(x + eps(rng));
    noisy.noise_var.push_back(0.25);
  }
  const auto m = fit_arma(noisy, 1, 1);
  EXPECT_EQ(m.sigma_eps2, 0.25);
  EXPECT_LT(m.sigma_u2, m.residual_var);
  // The split reproduces the observed variance: a·σ_u² + σ_ε² = Var(M̂).
  double mean = 0, var = 0;
  for (double v : noisy.values) mean += v;
  mean /= static_cast<double>(noisy.size());
  for (double v : noisy.values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(noisy.size());
  EXPECT_NEAR(noisy_variance_arma11(m.alpha[0], m.beta[0], m.sigma_u2, m.sigma_eps2), var, 1e-9 * var);

  // Additive split for other orders.
  const auto ar = fit_arma(noisy, 2, 0);
  EXPECT_NEAR(ar.sigma_u2, ar.residual_var - 0.25, 1e-12);
  const auto integrated = fit_arima(noisy, 1, 1, 0);
  EXPECT_NEAR(integrated.sigma_u2, std::max(0.0, integrated.residual_var - 2 * 0.25), 1e-12);
}

TEST(SelectOrder, WhiteNoisePicksZeroOrder) {
  const auto s = AggregateSeries::exact(arma11(2000, 0.0, 0.0, 1.0, 9));
  EXPECT_EQ(select_order(s, 2, 1, 2), (ModelOrder{0, 0, 0}));
}

TEST(SelectOrder, Ar1PickedInMostSeeds) {
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto o = select_order(AggregateSeries::exact(arma11(2000, 0.8, 0.0, 1.0, 100 + seed)), 2, 1, 2);
    hits += o == ModelOrder{1, 0, 0};
  }
  EXPECT_GE(hits, 90);
}

TEST(SelectOrder, TrendNeedsDifferencing) {
  auto s = arma11(400, 0.5, 0.0, 1.0, 10);
  for (std::size_t t = 0; t < s.size(); ++t) s[t] += 0.5 * static_cast<double>(t);
  EXPECT_EQ(select_order(AggregateSeries::exact(s), 2, 1, 2).d, 1);
}

TEST(SelectOrder, TooShort) {
  EXPECT_EQ(code_of([] { select_order(AggregateSeries::exact({1.0}), 1, 0, 1); }), ErrorCode::SeriesTooShort);
}

TEST(Forecast, WhiteNoiseIsFlat) {
  ArmaModel m;
  m.mean = 7.0;
  m.sigma_u2 = 4.0;
  AggregateSeries h;
  h.values = {6, 8, 7, 7};
  h.noise_var = {1, 1, 1, 1};
  const auto r = forecast(m, h, 5, 0.9);
  const double width = 2 * normal_quantile(0.9) * std::sqrt(5.0);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(r.point[i], 7.0);
    EXPECT_NEAR(r.hi[i] - r.lo[i], width, 1e-12);
  }
}

TEST(Forecast, Ar1HalvesEachStep) {
  ArmaModel m;
  m.p = 1;
  m.alpha = {0.5};
  m.sigma_u2 = 1.0;
  const auto r = forecast(m, AggregateSeries::exact({3, -1, 4, 10}), 4, 0.9);
  EXPECT_DOUBLE_EQ(r.point[0], 5.0);
  EXPECT_DOUBLE_EQ(r.point[1], 2.5);
  EXPECT_DOUBLE_EQ(r.point[2], 1.25);
  EXPECT_DOUBLE_EQ(r.point[3], 0.625);
  EXPECT_DOUBLE_EQ(r.variance[1], 1.25);
}

TEST(Forecast, NoiseWidensIntervalsAndVarianceGrows) {
  const auto s = arma11(300, 0.6, 0.3, 1.0, 11);
  const auto m = fit_arima(AggregateSeries::exact(s), 1, 0, 1);
  AggregateSeries noisy = AggregateSeries::exact(s);
  noisy.noise_var.assign(s.size(), 0.3);
  const auto a = forecast(m, AggregateSeries::exact(s), 10, 0.9);
  const auto b = forecast(m, noisy, 10, 0.9);
  for (std::size_t i = 0; i < 10; ++i) {
    EXPECT_EQ(a.point[i], b.point[i]);
    EXPECT_GT(b.hi[i] - b.lo[i], a.hi[i] - a.lo[i]);
    EXPECT_LE(a.lo[i], a.point[i]);
    EXPECT_LE(a.point[i], a.hi[i]);
    if (i > 0) EXPECT_GE(a.variance[i], a.variance[i - 1]);
  }
}

TEST(Forecast, IntegratedModelFollowsDrift) {
  std::mt19937_64 rng(14);
  std::normal_distribution<double> z(3.0, 1.0);
  std::vector<double> s{100.0};
  for (int t = 1; t < 200; ++t) s.push_back(s.back() + z(rng));
  const auto m = fit_arima(AggregateSeries::exact(s), 0, 1, 0);
  const double drift = (s.back() - s.front()) / static_cast<double>(s.size() - 1);
  EXPECT_NEAR(m.mean, drift, 1e-12);
  const auto r = forecast(m, AggregateSeries::exact(s), 3, 0.9);
  for (int h = 0; h < 3; ++h) EXPECT_NEAR(r.point[h], s.back() + (h + 1) * drift, 1e-9 * s.back());
  EXPECT_EQ(psi_weights(m, 3), (std::vector<double>{1, 1, 1}));
  EXPECT_NEAR(r.variance[2], 3 * m.sigma_u2, 1e-12);
}

TEST(Forecast, ErrorPaths) {
  ArmaModel m;
  const auto h = AggregateSeries::exact({1, 2, 3});
  EXPECT_EQ(code_of([&] { forecast(m, h, 0, 0.9); }), ErrorCode::InvalidHorizon);
  EXPECT_EQ(code_of([&] { forecast(m, h, 1, 1.0); }), ErrorCode::InvalidConfidence);
  EXPECT_EQ(code_of([] { normal_quantile(0.0); }), ErrorCode::InvalidConfidence);
}

TEST(Forecast, OneStepUnbiasedUnderNoise) {
  double sum = 0, sum2 = 0;
  const int R = 200;
  for (int k = 0; k < R; ++k) {
    const auto clean = arma11(401, 0.5, 0.0, 1.0, 1000 + k);
    std::mt19937_64 rng(5000 + k);
    std::normal_distribution<double> eps(0.0, 0.5);
    AggregateSeries noisy;
    for (std::size_t t = 0; t < 400; ++t) {
      noisy.values.push_back(clean[t] + eps(rng));
      noisy.noise_var.push_back(0.25);
    }
    const auto m = fit_arima(noisy, 1, 0, 1);
    const double err = forecast(m, noisy, 1, 0.9).point[0] - clean[400];
    sum += err;
    sum2 += err * err;
  }
  const double mean = sum / R;
  const double sd = std::sqrt(sum2 / R - mean * mean);
  EXPECT_LT(std::abs(mean), 3 * sd / std::sqrt(R));
}

TEST(NormalQuantile, KnownValues) {
  EXPECT_NEAR(normal_quantile(0.9), 1.644854, 4.5e-4);
  EXPECT_NEAR(normal_quantile(0.95), 1.959964, 4.5e-4);
  EXPECT_NEAR(normal_quantile(0.5), 0.674490, 4.5e-4);
}

TEST(NoisyVariance, Examples) {
  EXPECT_DOUBLE_EQ(noisy_variance_arma11(0, 0, 1, 1), 2.0);
  EXPECT_NEAR(noisy_variance_arma11(0.5, 0.2, 1, 0), 1.24 / 0.75, 1e-12);
  EXPECT_NEAR(1.24 / 0.75, 1.65333, 1e-5);
  EXPECT_EQ(noisy_variance_arma11(0.7, -0.4, 0, 0.3), 0.3);
  EXPECT_EQ(code_of([] { noisy_variance_arma11(1.0, 0, 1, 0); }), ErrorCode::NonStationaryAlpha);
}

TEST(NoisyVariance, MatchesSimulation) {
  const auto s = arma11(1000000, 0.5, 0.2, 1.0, 12);
  EXPECT_NEAR(variance(s), 1.65333, 0.02 * 1.65333);
}

TEST(Models, Factory) {
  EXPECT_NO_THROW(make_model("mean"));
  EXPECT_NO_THROW(make_model("arima"));
  EXPECT_NO_THROW(make_model("auto"));
  EXPECT_NO_THROW(make_model("arima(1,1,1)"));
  EXPECT_NO_THROW(make_model("arma(2,0)"));
  EXPECT_EQ(code_of([] { make_model("lstm"); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { make_model("arima(1,x,1)"); }), ErrorCode::InvalidArgument);

  const auto s = AggregateSeries::exact(arma11(300, 0.7, 0.0, 1.0, 13));
  auto pinned = make_model("arima(1,0,0)");
  pinned->fit(s);
  const auto direct = forecast(fit_arima(s, 1, 0, 0), s, 3, 0.8);
  const auto via = pinned->predict(s, 3, 0.8);
  EXPECT_EQ(via.point, direct.point);
  EXPECT_EQ(via.hi, direct.hi);
  EXPECT_NE(pinned->summary().find("model=arima(1,0,0)"), std::string::npos);
}

TEST(ForecastCsv, Layouts) {
  ForecastResult r;
  r.point = {1, 2};
  r.lo = {0, 1};
  r.hi = {2, 3};
  std::ostringstream out;
  write_forecast_csv(out, r);
  EXPECT_EQ(out.str(), "step,point,lo,hi\n1,1,0,2\n2,2,1,3\n");

  AggregateSeries h = AggregateSeries::exact({5, 6});
  h.timestamps = {10, 11};
  std::ostringstream plot;
  write_plot_csv(plot, h, r);
  EXPECT_EQ(plot.str(), "t,actual,estimate,forecast,lo,hi\n10,,5,,,\n11,,6,,,\n12,,,1,0,2\n13,,,2,1,3\n");
}
