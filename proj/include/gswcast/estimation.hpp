#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gswcast/constraint.hpp"
#include "gswcast/grouping.hpp"
#include "gswcast/samplers.hpp"

namespace gswcast {

struct Estimate {
  double value = 0.0;
  /// Sampled rows that satisfied the constraint at the timestamp.
  std::size_t rows_used = 0;
  /// Horvitz–Thompson plug-in estimate of Var(M̂) from the sampled rows.
  double variance = 0.0;
  /// θ of the matching sampled rows (1 when none matched).
  double theta = 1.0;
  /// RSTD bound attached by a bound calculator, if any. Zero when Δ = 0.
  std::optional<double> bound;

  /// M̂ = 0 because nothing matched, not because the subset sums to 0.
  bool empty_match() const noexcept { return rows_used == 0; }
};

/// M̂ = Σ m_i·(Δ+w_i)/w_i over sampled rows matching (c, ts). Attaches the
/// sample-side bound √(θ/n_used) with θ over the matching sampled rows.
/// Throws UnknownMeasure.
Estimate estimate_sum(const GswSample& s, const Constraint& c, std::string_view measure, std::int64_t ts);

/// One pass over the sample for many timestamps (output aligned with `timestamps`).
std::vector<Estimate> estimate_series(const GswSample& s, const Constraint& c, std::string_view measure,
                                      std::span<const std::int64_t> timestamps);

/// COUNT(*) estimate: every row contributes (Δ+w_i)/w_i.
std::vector<Estimate> estimate_count_series(const GswSample& s, const Constraint& c,
                                            std::span<const std::int64_t> timestamps);

/// Σ x_i over matching rows.
Estimate estimate_sum(const PrioritySample& s, const Constraint& c, std::string_view measure, std::int64_t ts);
/// Σ m_i/p over matching rows.
Estimate estimate_sum(const UniformSample& s, const Constraint& c, std::string_view measure, std::int64_t ts);

struct ConsistencyStats {
  double theta_lo = 1.0;
  double theta_hi = 1.0;
  double theta = 1.0;
};

/// θ̲ = min m_i/w_i, θ̄ = max m_i/w_i, θ = θ̄/θ̲. Throws LengthMismatch, EmptyGroup.
ConsistencyStats consistency(std::span<const double> m, std::span<const double> w);

/// E|S_Δ| = Σ w_i/(Δ+w_i). Throws NonPositiveDelta.
double expected_sample_size(std::span<const double> w, double delta);

/// Var(M̂) = Σ Δ m_i²/w_i.
double gsw_variance(std::span<const double> m, std::span<const double> w, double delta);

/// √(θ / E|S|). Throws InvalidTheta (θ < 1) or InvalidArgument (E|S| ≤ 0).
double rstd_bound(double theta, double expected_size);

struct CompressedBounds {
  /// One bound per measure, in input order.
  std::vector<double> per_measure;
  /// Geometric: √(ρ^{(k−1)/k}/E|S|). Arithmetic: √(δ²/E|S|) (equal to per_measure).
  double uniform = 0.0;
};

/// Throws EmptyGroup, LengthMismatch.
CompressedBounds compressed_bounds(std::span<const MeasureSpan> measures, MeanKind kind, double expected_size);

/// w = m: θ = 1, the optimal GSW weights up to the free scale absorbed by Δ.
std::vector<double> optimal_weights(std::span<const double> m);

/// Exact (full-data) bound for a query: θ and E|S| computed over the rows
/// satisfying (c, ts), or over the whole table when `c` is TRUE and ts unset.
struct QueryBound {
  ConsistencyStats stats;
  double expected_size = 0.0;
  double variance = 0.0;
  double exact_sum = 0.0;
  std::size_t subset_rows = 0;
  double bound = 0.0;
};

QueryBound subset_bound(const TimeSeriesTable& t, std::span<const double> w, double delta, const Constraint& c,
                        std::string_view measure, std::optional<std::int64_t> ts);
QueryBound table_bound(const TimeSeriesTable& t, std::span<const double> w, double delta, std::string_view measure);

/// Which sampler a Monte-Carlo run repeats.
struct SamplerConfig {
  enum class Kind { Gsw, Priority, Uniform };

  Kind kind = Kind::Gsw;
  std::vector<double> weights;  // Gsw: aligned with table rows
  double delta = 0.0;           // Gsw
  double tau = 1.0;             // Priority (fixed threshold)
  double p = 1.0;               // Uniform
  std::string label;

  static SamplerConfig gsw(std::vector<double> weights, double delta, std::string label = "gsw");
  static SamplerConfig priority(double tau, std::string label = "priority");
  static SamplerConfig uniform(double p, std::string label = "uniform");
};

struct MonteCarloReport {
  double exact = 0.0;
  double mean = 0.0;
  double rstd = 0.0;        // √(mean((M̂−M)²))/M
  double re = 0.0;          // mean(|M̂−M|)/M
  double sample_sd = 0.0;   // standard deviation of M̂ across trials
  double std_error = 0.0;   // sample_sd/√trials
  double mean_sample_size = 0.0;  // sampled rows inside the query subset
  std::size_t trials = 0;
  bool re_le_rstd = true;
};

/// The rows of one (constraint, timestamp) subset, gathered once so that
/// repeated sampler trials touch only those rows. Row ids are table row
/// indices, matching the draw functions' default.
class PreparedQuery {
 public:
  PreparedQuery() = default;
  PreparedQuery(const TimeSeriesTable& t, const SamplerConfig& config, const Constraint& c, std::string_view measure,
                std::int64_t ts);

  double exact() const noexcept { return exact_; }
  std::size_t subset_rows() const noexcept { return rows_.size(); }
  /// M̂ for the draw with `seed`; `sampled` receives the sampled subset size.
  double estimate(std::uint64_t seed, std::size_t* sampled = nullptr) const;

  /// One scan preparing a query per timestamp.
  static std::vector<PreparedQuery> for_timestamps(const TimeSeriesTable& t, const SamplerConfig& config,
                                                   const Constraint& c, std::string_view measure,
                                                   std::span<const std::int64_t> timestamps);

 private:
  SamplerConfig config_;
  std::vector<std::size_t> rows_;
  std::vector<double> m_;
  std::vector<double> w_;
  double exact_ = 0.0;
};

/// Repeats the sampler with per-trial seeds derived from `master_seed` and
/// estimates SUM(measure) over (c, ts) each time. Only rows in the query
/// subset are visited; each trial's estimate equals estimate_sum() on the
/// corresponding full draw.
/// Throws ZeroTrueSum, InvalidArgument (trials < 2), UnknownMeasure.
MonteCarloReport rstd_monte_carlo(const TimeSeriesTable& t, const SamplerConfig& config, const Constraint& c,
                                  std::string_view measure, std::int64_t ts, std::size_t trials,
                                  std::uint64_t master_seed);
MonteCarloReport rstd_monte_carlo(const PreparedQuery& query, std::size_t trials, std::uint64_t master_seed);

/// The per-trial estimate used by rstd_monte_carlo, for a given trial seed.
double trial_estimate(const TimeSeriesTable& t, const SamplerConfig& config, const Constraint& c,
                      std::string_view measure, std::int64_t ts, std::uint64_t seed);

/// Key=value block: value, rows_used, theta, bound, delta.
std::string format_estimate(const Estimate& e, double delta);

}  // namespace gswcast
