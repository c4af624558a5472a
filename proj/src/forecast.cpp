#include "gswcast/forecast.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include <Eigen/Dense>

#include "gswcast/error.hpp"
#include "gswcast/numeric.hpp"

namespace gswcast {

double AggregateSeries::mean_noise_var() const noexcept {
  if (noise_var.empty()) return 0.0;
  CompensatedSum s;
  for (double v : noise_var) s += v;
  return s.value() / static_cast<double>(noise_var.size());
}

AggregateSeries AggregateSeries::exact(std::vector<double> values) {
  AggregateSeries s;
  s.values = std::move(values);
  return s;
}

std::vector<double> difference(std::span<const double> series, int d) {
  if (d < 0) throw Error(ErrorCode::InvalidArgument, "differencing order must be non-negative");
  if (series.size() <= static_cast<std::size_t>(d)) {
    throw Error(ErrorCode::SeriesTooShort,
                "series of length " + std::to_string(series.size()) + " cannot be differenced " + std::to_string(d) +
                    " times");
  }
  std::vector<double> out(series.begin(), series.end());
  for (int k = 0; k < d; ++k) {
    for (std::size_t i = 0; i + 1 < out.size(); ++i) out[i] = out[i + 1] - out[i];
    out.pop_back();
  }
  return out;
}

std::vector<double> difference_anchors(std::span<const double> series, int d) {
  std::vector<double> anchors;
  for (int k = 0; k < d; ++k) anchors.push_back(difference(series, k).front());
  return anchors;
}

std::vector<double> integrate(std::span<const double> diffed, int d, std::span<const double> anchors) {
  if (anchors.size() != static_cast<std::size_t>(d)) throw Error(ErrorCode::LengthMismatch, "need one anchor per order");
  std::vector<double> out(diffed.begin(), diffed.end());
  for (int k = d - 1; k >= 0; --k) {
    std::vector<double> up;
    up.reserve(out.size() + 1);
    up.push_back(anchors[static_cast<std::size_t>(k)]);
    for (double v : out) up.push_back(up.back() + v);
    out = std::move(up);
  }
  return out;
}

namespace {

double mean_of(std::span<const double> v) {
  CompensatedSum s;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s.value() / static_cast<double>(v.size());
}

/// Largest root modulus of 1 − Σ a_i B^i, via the companion matrix.
double max_root_modulus(std::span<const double> a) {
  const auto k = static_cast<Eigen::Index>(a.size());
  if (k == 0) return 0.0;
  if (k == 1) return std::abs(a[0]);
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index i = 0; i < k; ++i) c(0, i) = a[static_cast<std::size_t>(i)];
  for (Eigen::Index i = 1; i < k; ++i) c(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(c, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

constexpr double kUnitRootMargin = 0.01;

void check_stationary(std::span<const double> a, const char* stage) {
  const double r = max_root_modulus(a);
  if (!(r < 1.0 - kUnitRootMargin)) {
    throw Error(ErrorCode::NonStationary,
                std::string(stage) + " has a root of modulus " + format_double(r) + "; difference the series");
  }
}

/// Conditional residuals: e_t = y_t − Σ α_i y_{t−i} − Σ β_j e_{t−j} for
/// t ≥ start, zero before.
std::vector<double> residuals(std::span<const double> y, std::span<const double> alpha, std::span<const double> beta,
                              std::size_t start) {
  std::vector<double> e(y.size(), 0.0);
  for (std::size_t t = start; t < y.size(); ++t) {
    double v = y[t];
    for (std::size_t i = 1; i <= alpha.size() && i <= t; ++i) v -= alpha[i - 1] * y[t - i];
    for (std::size_t j = 1; j <= beta.size() && j <= t; ++j) v -= beta[j - 1] * e[t - j];
    e[t] = v;
  }
  return e;
}

Eigen::VectorXd least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  return x.colPivHouseholderQr().solve(y);
}

double central_binomial(int d) {
  double c = 1.0;
  for (int i = 1; i <= d; ++i) c = c * (d + i) / i;
  return c;
}

}  // namespace

ArmaModel fit_arma(const AggregateSeries& series, int p, int q) {
  if (p < 0 || q < 0) throw Error(ErrorCode::InvalidArgument, "orders must be non-negative");
  const std::size_t n = series.size();
  const std::size_t k = static_cast<std::size_t>(std::max(p, q));
  if (n < std::max<std::size_t>(10 * k, 2)) {
    throw Error(ErrorCode::SeriesTooShort, "ARMA(" + std::to_string(p) + "," + std::to_string(q) + ") needs at least " +
                                               std::to_string(std::max<std::size_t>(10 * k, 2)) + " points, got " +
                                               std::to_string(n));
  }

  ArmaModel model;
  model.p = p;
  model.q = q;
  model.fitted_on = n;
  model.sigma_eps2 = series.mean_noise_var();
  model.mean = mean_of(series.values);
  std::vector<double> y(n);
  for (std::size_t t = 0; t < n; ++t) y[t] = series.values[t] - model.mean;

  // Stage 1: long autoregression, used as the stationarity probe and as the
  // innovation proxy for the moving-average terms.
  const std::size_t m = std::min<std::size_t>(20, n / 10);
  std::vector<double> proxy(n, 0.0);
  if (m >= 1) {
    const auto rows = static_cast<Eigen::Index>(n - m);
    Eigen::MatrixXd x(rows, static_cast<Eigen::Index>(m));
    Eigen::VectorXd target(rows);
    for (std::size_t t = m; t < n; ++t) {
      const auto r = static_cast<Eigen::Index>(t - m);
      target(r) = y[t];
      for (std::size_t i = 1; i <= m; ++i) x(r, static_cast<Eigen::Index>(i - 1)) = y[t - i];
    }
    const Eigen::VectorXd phi = least_squares(x, target);
    std::vector<double> long_ar(phi.data(), phi.data() + phi.size());
    check_stationary(long_ar, "long autoregression");
    for (std::size_t t = m; t < n; ++t) {
      double v = y[t];
      for (std::size_t i = 1; i <= m; ++i) v -= long_ar[i - 1] * y[t - i];
      proxy[t] = v;
    }
  }

  // Stage 2: regress y_t on its own lags and lagged innovation proxies.
  if (p + q > 0) {
    const std::size_t start = q > 0 ? m + static_cast<std::size_t>(q) : static_cast<std::size_t>(p);
    const std::size_t cols = static_cast<std::size_t>(p + q);
    if (n <= start + cols) throw Error(ErrorCode::SeriesTooShort, "too few points for the regression stage");
    const auto rows = static_cast<Eigen::Index>(n - start);
    Eigen::MatrixXd x(rows, static_cast<Eigen::Index>(cols));
    Eigen::VectorXd target(rows);
    for (std::size_t t = start; t < n; ++t) {
      const auto r = static_cast<Eigen::Index>(t - start);
      target(r) = y[t];
      for (int i = 1; i <= p; ++i) x(r, i - 1) = y[t - static_cast<std::size_t>(i)];
      for (int j = 1; j <= q; ++j) x(r, p + j - 1) = proxy[t - static_cast<std::size_t>(j)];
    }
    const Eigen::VectorXd coef = least_squares(x, target);
    model.alpha.assign(coef.data(), coef.data() + p);
    model.beta.assign(coef.data() + p, coef.data() + p + q);
    check_stationary(model.alpha, "fitted autoregression");
  }

  const auto e = residuals(y, model.alpha, model.beta, k);
  CompensatedSum ss;
  for (std::size_t t = k; t < n; ++t) ss += e[t] * e[t];
  model.residual_var = ss.value() / static_cast<double>(n - k);

  // Split the fitted variance into innovation and estimation-noise shares.
  if (p == 1 && q == 1) {
    CompensatedSum sv;
    for (double v : y) sv += v * v;
    const double total = sv.value() / static_cast<double>(n);
    const double a = (1.0 + 2.0 * model.alpha[0] * model.beta[0] + model.beta[0] * model.beta[0]) /
                     (1.0 - model.alpha[0] * model.alpha[0]);
    model.sigma_u2 = model.sigma_eps2 > 0.0 ? std::max(0.0, (total - model.sigma_eps2) / a) : model.residual_var;
  } else {
    model.sigma_u2 = std::max(0.0, model.residual_var - model.sigma_eps2);
  }

  const double s2 = std::max(model.residual_var, std::numeric_limits<double>::min());
  model.aic = static_cast<double>(n) * std::log(s2) + 2.0 * (p + q + 1);
  return model;
}

ArmaModel fit_arima(const AggregateSeries& series, int p, int d, int q) {
  if (d == 0) return fit_arma(series, p, q);
  AggregateSeries diffed;
  diffed.values = difference(series.values, d);
  ArmaModel model = fit_arma(diffed, p, q);
  model.d = d;
  model.sigma_eps2 = series.mean_noise_var();
  // Differencing white noise of variance σ² yields variance C(2d,d)·σ².
  model.sigma_u2 = std::max(0.0, model.residual_var - central_binomial(d) * model.sigma_eps2);
  return model;
}

ModelOrder select_order(const AggregateSeries& series, int p_max, int d_max, int q_max) {
  if (p_max < 0 || d_max < 0 || q_max < 0) throw Error(ErrorCode::InvalidArgument, "grid bounds must be non-negative");
  std::optional<ModelOrder> best;
  double best_aic = std::numeric_limits<double>::infinity();
  std::string last_error = "no candidate fitted";
  for (int d = 0; d <= d_max; ++d) {
    for (int p = 0; p <= p_max; ++p) {
      for (int q = 0; q <= q_max; ++q) {
        ArmaModel m;
        try {
          m = fit_arima(series, p, d, q);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::SeriesTooShort && e.code() != ErrorCode::NonStationary) throw;
          last_error = e.what();
          continue;
        }
        const ModelOrder cand{p, d, q};
        bool better = m.aic < best_aic;
        if (best && m.aic == best_aic) {
          const int cs = p + q;
          const int bs = best->p + best->q;
          better = cs < bs || (cs == bs && d < best->d);
        }
        if (!best || better) {
          best = cand;
          best_aic = m.aic;
        }
      }
    }
  }
  if (!best) throw Error(ErrorCode::SeriesTooShort, "no ARIMA candidate could be fitted: " + last_error);
  return *best;
}

double normal_quantile(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw Error(ErrorCode::InvalidConfidence, "confidence must lie in (0, 1), got " + format_double(gamma));
  }
  const double tail = (1.0 - gamma) / 2.0;
  const double t = std::sqrt(-2.0 * std::log(tail));
  return t - (2.515517 + 0.802853 * t + 0.010328 * t * t) / (1.0 + 1.432788 * t + 0.189269 * t * t + 0.001308 * t * t * t);
}

std::vector<double> psi_weights(const ArmaModel& model, int h) {
  // AR polynomial of the integrated model: (1 − Σα_i B^i)(1 − B)^d.
  std::vector<double> poly(1, 1.0);
  for (double a : model.alpha) poly.push_back(-a);
  for (int k = 0; k < model.d; ++k) {
    std::vector<double> next(poly.size() + 1, 0.0);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      next[i] += poly[i];
      next[i + 1] -= poly[i];
    }
    poly = std::move(next);
  }
  std::vector<double> psi(static_cast<std::size_t>(std::max(h, 0)), 0.0);
  for (std::size_t j = 0; j < psi.size(); ++j) {
    double v = j == 0 ? 1.0 : (j <= model.beta.size() ? model.beta[j - 1] : 0.0);
    for (std::size_t i = 1; i < poly.size() && i <= j; ++i) v -= poly[i] * psi[j - i];
    psi[j] = v;
  }
  return psi;
}

ForecastResult forecast(const ArmaModel& model, const AggregateSeries& history, int h, double gamma) {
  if (h < 1) throw Error(ErrorCode::InvalidHorizon, "horizon must be at least 1, got " + std::to_string(h));
  const double z = normal_quantile(gamma);
  if (history.size() == 0) throw Error(ErrorCode::SeriesTooShort, "empty history");

  const auto diffed = difference(history.values, model.d);
  std::vector<double> y(diffed.size());
  for (std::size_t t = 0; t < y.size(); ++t) y[t] = diffed[t] - model.mean;
  const std::size_t start = std::min(y.size(), static_cast<std::size_t>(std::max(model.p, model.q)));
  auto e = residuals(y, model.alpha, model.beta, start);

  const std::size_t n = y.size();
  std::vector<double> steps;
  for (int s = 0; s < h; ++s) {
    const std::size_t t = n + static_cast<std::size_t>(s);
    double v = 0.0;
    for (std::size_t i = 1; i <= model.alpha.size() && i <= t; ++i) v += model.alpha[i - 1] * y[t - i];
    for (std::size_t j = 1; j <= model.beta.size() && j <= t; ++j) v += model.beta[j - 1] * e[t - j];
    y.push_back(v);
    e.push_back(0.0);
    steps.push_back(v + model.mean);
  }
  // Undo differencing forward from the last value of each level.
  for (int k = model.d - 1; k >= 0; --k) {
    double level = difference(history.values, k).back();
    for (double& v : steps) {
      level += v;
      v = level;
    }
  }

  const auto psi = psi_weights(model, h);
  const double eps = history.mean_noise_var();
  ForecastResult r;
  r.gamma = gamma;
  CompensatedSum acc;
  for (int s = 0; s < h; ++s) {
    acc += psi[static_cast<std::size_t>(s)] * psi[static_cast<std::size_t>(s)];
    const double var = model.sigma_u2 * acc.value() + eps;
    const double half = z * std::sqrt(var);
    r.point.push_back(steps[static_cast<std::size_t>(s)]);
    r.variance.push_back(var);
    r.lo.push_back(steps[static_cast<std::size_t>(s)] - half);
    r.hi.push_back(steps[static_cast<std::size_t>(s)] + half);
  }
  return r;
}

double noisy_variance_arma11(double alpha1, double beta1, double sigma_u2, double sigma_eps2) {
  if (!(std::abs(alpha1) < 1.0)) {
    throw Error(ErrorCode::NonStationaryAlpha, "|alpha1| must be below 1, got " + format_double(alpha1));
  }
  const double a = (1.0 + 2.0 * alpha1 * beta1 + beta1 * beta1) / (1.0 - alpha1 * alpha1);
  return a * sigma_u2 + sigma_eps2;
}

namespace {

std::string join(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += format_double(v[i]);
  }
  return s + "]";
}

std::string order_text(int p, int d, int q) {
  return "arima(" + std::to_string(p) + "," + std::to_string(d) + "," + std::to_string(q) + ")";
}

}  // namespace

std::string ArmaModel::summary() const {
  std::ostringstream out;
  out << "model=" << order_text(p, d, q) << '\n';
  out << "alpha=" << join(alpha) << '\n';
  out << "beta=" << join(beta) << '\n';
  out << "mean=" << format_double(mean) << '\n';
  out << "sigma_u2=" << format_double(sigma_u2) << '\n';
  out << "sigma_eps2=" << format_double(sigma_eps2) << '\n';
  out << "residual_var=" << format_double(residual_var) << '\n';
  out << "aic=" << format_double(aic) << '\n';
  out << "fitted_on=" << fitted_on << '\n';
  return out.str();
}

std::string ArimaForecaster::name() const {
  if (pinned_) return order_text(pinned_->p, pinned_->d, pinned_->q);
  return "arima";
}

void ArimaForecaster::fit(const AggregateSeries& series) {
  const ModelOrder order = pinned_ ? *pinned_ : select_order(series, grid_.p_max, grid_.d_max, grid_.q_max);
  model_ = fit_arima(series, order.p, order.d, order.q);
  fitted_ = true;
}

ForecastResult ArimaForecaster::predict(const AggregateSeries& history, int h, double gamma) const {
  if (!fitted_) throw Error(ErrorCode::InvalidArgument, "model is not fitted");
  return forecast(model_, history, h, gamma);
}

std::string ArimaForecaster::summary() const { return fitted_ ? model_.summary() : "model=" + name() + "\n"; }

std::unique_ptr<ForecastModel> make_model(std::string_view id) {
  std::string s;
  for (char c : id) {
    if (!std::isspace(static_cast<unsigned char>(c))) s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  if (s == "arima" || s == "auto") return std::make_unique<ArimaForecaster>(ArimaForecaster::Grid{});
  if (s == "mean") return std::make_unique<ArimaForecaster>(ModelOrder{0, 0, 0});
  int a = -1, b = -1, c = -1;
  char tail = 0;
  if (std::sscanf(s.c_str(), "arima(%d,%d,%d%c", &a, &b, &c, &tail) == 4 && tail == ')' && a >= 0 && b >= 0 && c >= 0 &&
      s.back() == ')') {
    return std::make_unique<ArimaForecaster>(ModelOrder{a, b, c});
  }
  if (std::sscanf(s.c_str(), "arma(%d,%d%c", &a, &c, &tail) == 3 && tail == ')' && a >= 0 && c >= 0 && s.back() == ')') {
    return std::make_unique<ArimaForecaster>(ModelOrder{a, 0, c});
  }
  throw Error(ErrorCode::InvalidArgument, "unknown model '" + std::string(id) + "'");
}

void write_forecast_csv(std::ostream& out, const ForecastResult& r) {
  out << "step,point,lo,hi\n";
  for (std::size_t s = 0; s < r.horizon(); ++s) {
    out << s + 1 << ',' << format_double(r.point[s]) << ',' << format_double(r.lo[s]) << ',' << format_double(r.hi[s])
        << '\n';
  }
}

void write_plot_csv(std::ostream& out, const AggregateSeries& history, const ForecastResult& r,
                    std::span<const double> actual) {
  out << "t,actual,estimate,forecast,lo,hi\n";
  const bool labeled = history.timestamps.size() == history.size();
  auto label = [&](std::size_t i) { return labeled ? history.timestamps[i] : static_cast<std::int64_t>(i); };
  for (std::size_t i = 0; i < history.size(); ++i) {
    out << label(i) << ',';
    if (i < actual.size()) out << format_double(actual[i]);
    out << ',' << format_double(history.values[i]) << ",,,\n";
  }
  const std::int64_t last = history.size() ? label(history.size() - 1) : 0;
  for (std::size_t s = 0; s < r.horizon(); ++s) {
    const std::size_t i = history.size() + s;
    out << last + static_cast<std::int64_t>(s + 1) << ',';
    if (i < actual.size()) out << format_double(actual[i]);
    out << ",," << format_double(r.point[s]) << ',' << format_double(r.lo[s]) << ',' << format_double(r.hi[s]) << '\n';
  }
}

}  // namespace gswcast
