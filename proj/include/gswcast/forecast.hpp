#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gswcast {

/// Training aggregates in timestamp order with per-point estimation noise.
struct AggregateSeries {
  std::vector<double> values;
  /// σ_ε² per point; empty or all zero for an exact series.
  std::vector<double> noise_var;
  /// Optional labels, aligned with values.
  std::vector<std::int64_t> timestamps;

  std::size_t size() const noexcept { return values.size(); }
  /// Homoscedastic σ_ε²: mean of noise_var (0 when absent).
  double mean_noise_var() const noexcept;

  static AggregateSeries exact(std::vector<double> values);
};

/// d-th order differences. Throws SeriesTooShort unless size > d.
std::vector<double> difference(std::span<const double> series, int d);
/// First value of each differencing level 0..d−1 (the anchors integrate needs).
std::vector<double> difference_anchors(std::span<const double> series, int d);
/// Left inverse of difference given difference_anchors of the original series.
std::vector<double> integrate(std::span<const double> diffed, int d, std::span<const double> anchors);

struct ArmaModel {
  int p = 0;
  int d = 0;
  int q = 0;
  std::vector<double> alpha;
  std::vector<double> beta;
  /// Innovation variance σ_u² after removing the estimation-noise share.
  double sigma_u2 = 0.0;
  /// Residual mean square of the fit on the (possibly noisy) series.
  double residual_var = 0.0;
  /// σ_ε² of the training series.
  double sigma_eps2 = 0.0;
  /// Mean of the d-differenced series; forecasts are made around it.
  double mean = 0.0;
  std::size_t fitted_on = 0;
  double aic = 0.0;

  std::string summary() const;
};

/// Hannan–Rissanen fit of ARMA(p,q) on the series (no differencing).
/// Throws SeriesTooShort (size < 10·max(p,q) or too short for the long-AR
/// stage) and NonStationary (an AR root lies within 0.01 of the unit circle).
ArmaModel fit_arma(const AggregateSeries& series, int p, int q);

/// fit_arma on the d-differenced series.
ArmaModel fit_arima(const AggregateSeries& series, int p, int d, int q);

struct ModelOrder {
  int p = 0;
  int d = 0;
  int q = 0;
  friend bool operator==(const ModelOrder&, const ModelOrder&) = default;
};

/// AIC grid search; candidates that are too short or non-stationary are
/// skipped. Ties: smaller p+q, then smaller d. Throws SeriesTooShort when no
/// candidate can be fitted.
ModelOrder select_order(const AggregateSeries& series, int p_max, int d_max, int q_max);

struct ForecastResult {
  std::vector<double> point;
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<double> variance;
  double gamma = 0.9;

  std::size_t horizon() const noexcept { return point.size(); }
};

/// Two-sided standard normal critical value z with P(|Z| ≤ z) = gamma.
/// Rational approximation, |error| < 4.5e-4. Throws InvalidConfidence.
double normal_quantile(double gamma);

/// h-step forecasts from the end of `history` (original scale). Step-h
/// variance is σ_u²·Σ_{j<h} ψ_j² + σ_ε², with σ_ε² from `history`.
/// Throws InvalidHorizon, InvalidConfidence, SeriesTooShort.
ForecastResult forecast(const ArmaModel& model, const AggregateSeries& history, int h, double gamma);

/// ψ-weights ψ_0..ψ_{h−1} of the model including its differencing.
std::vector<double> psi_weights(const ArmaModel& model, int h);

/// Long-run variance of a noisy ARMA(1,1): a·σ_u² + σ_ε² with
/// a = (1 + 2α₁β₁ + β₁²)/(1 − α₁²). Throws NonStationaryAlpha unless |α₁| < 1.
double noisy_variance_arma11(double alpha1, double beta1, double sigma_u2, double sigma_eps2);

/// Forecasting model plug-in.
class ForecastModel {
 public:
  virtual ~ForecastModel() = default;
  virtual std::string name() const = 0;
  virtual void fit(const AggregateSeries& series) = 0;
  virtual ForecastResult predict(const AggregateSeries& history, int h, double gamma) const = 0;
  virtual std::string summary() const = 0;
};

/// ARIMA with AIC-selected orders (auto) or pinned orders.
class ArimaForecaster final : public ForecastModel {
 public:
  struct Grid {
    int p_max = 2;
    int d_max = 1;
    int q_max = 2;
  };

  explicit ArimaForecaster(Grid grid) : grid_(grid) {}
  explicit ArimaForecaster(ModelOrder pinned) : pinned_(pinned) {}

  std::string name() const override;
  void fit(const AggregateSeries& series) override;
  ForecastResult predict(const AggregateSeries& history, int h, double gamma) const override;
  std::string summary() const override;
  const ArmaModel& model() const noexcept { return model_; }

 private:
  Grid grid_{};
  std::optional<ModelOrder> pinned_;
  ArmaModel model_;
  bool fitted_ = false;
};

/// Model ids: "arima" (auto grid), "arima(p,d,q)", "arma(p,q)", "mean".
/// Throws InvalidArgument for anything else.
std::unique_ptr<ForecastModel> make_model(std::string_view id);

/// CSV with header step,point,lo,hi.
void write_forecast_csv(std::ostream& out, const ForecastResult& r);

/// CSV with header t,actual,estimate,forecast,lo,hi: one row per training
/// point, then one per forecast step at t = last timestamp + step. `actual`
/// is left blank when not given.
void write_plot_csv(std::ostream& out, const AggregateSeries& history, const ForecastResult& r,
                    std::span<const double> actual = {});

}  // namespace gswcast
