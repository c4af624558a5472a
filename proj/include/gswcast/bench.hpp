#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gswcast/constraint.hpp"
#include "gswcast/estimation.hpp"
#include "gswcast/table.hpp"

namespace gswcast {

struct BenchSampler {
  enum class Kind { Uniform, Priority, Gsw };

  Kind kind = Kind::Gsw;
  std::string name;
  /// GSW weights aligned with table rows.
  std::vector<double> weights;
};

struct BenchWorkload {
  std::string label;
  Constraint constraint;
};

struct BenchOptions {
  std::string measure;
  /// Expected sample size as a fraction of the table's rows.
  std::vector<double> rates{0.01, 0.05, 0.1};
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  /// Timestamps at which aggregation error is measured (empty: all).
  std::vector<std::int64_t> eval_timestamps;
  /// Training points for the forecast columns; 0 skips forecasting.
  std::size_t train_points = 0;
  int horizon = 7;
  double gamma = 0.9;
  std::string model = "arima(1,0,1)";
  std::size_t forecast_trials = 20;
};

struct BenchRow {
  std::string sampler;
  double rate = 0.0;
  double selectivity = 0.0;
  double rstd = 0.0;
  double rstd_sd = 0.0;
  double re = 0.0;
  double forecast_err = 0.0;
  double interval_width = 0.0;
};

/// Δ with Σ w_i/(Δ+w_i) = target (0 when target ≥ n).
double delta_for_size(std::span<const double> w, double target);
/// τ with Σ min(1, m_i/τ) = target (min m when target ≥ n).
double tau_for_size(std::span<const double> m, double target);

/// Per (sampler, rate, workload): Monte-Carlo aggregation RSTD averaged over
/// the evaluation timestamps with its spread, RE, and, when enabled, mean
/// relative h-step forecast error and relative interval width.
std::vector<BenchRow> bench_samplers(const TimeSeriesTable& t, std::span<const BenchWorkload> workloads,
                                     std::span<const BenchSampler> samplers, const BenchOptions& options);

/// Header: sampler,rate,selectivity,rstd,rstd_sd,re,forecast_err,interval_width
void write_bench_csv(std::ostream& out, std::span<const BenchRow> rows);

}  // namespace gswcast
