#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gswcast/table.hpp"

namespace gswcast {

/// How a sample's weight vector was derived from the table's measures.
struct WeightSource {
  enum class Kind { Measure, GeoMean, ArithMean, External };

  Kind kind = Kind::External;
  std::vector<std::string> measures;
  std::string name;  // group name; defaults to the single measure name

  static WeightSource single(std::string measure);
  static WeightSource group(std::string name, Kind kind, std::vector<std::string> measures);

  bool covers(std::string_view measure) const;
  friend bool operator==(const WeightSource&, const WeightSource&) = default;
};

std::string_view to_string(WeightSource::Kind kind);
WeightSource::Kind weight_kind_from_string(std::string_view text);

/// GSW sample S_Δ: row i is kept iff key_i = (1/u_i − 1)·w_i ≥ Δ, which is the
/// event u_i ≤ w_i/(Δ+w_i). Rows are stored ascending by (key, row_id) and
/// carry full dimension, measure and timestamp values.
struct GswSample {
  double delta = 0.0;
  std::uint64_t seed = 0;
  WeightSource source;
  /// One past the largest row id the sample was drawn over.
  std::uint64_t next_row_id = 0;

  TimeSeriesTable rows;
  std::vector<std::uint64_t> row_id;
  std::vector<double> u;
  std::vector<double> weight;
  std::vector<double> key;

  std::size_t size() const noexcept { return row_id.size(); }
  /// (Δ + w_i)/w_i; exactly 1 when Δ = 0.
  double calibration(std::size_t i) const noexcept { return (delta + weight[i]) / weight[i]; }
};

/// Smallest u admitted when forming keys, so Δ = 0 never divides by zero.
inline constexpr double kMinUniform = 0x1p-53;

double gsw_key(double u, double w) noexcept;

/// Draws a GSW sample. Row i of `t` gets row id `first_row_id + i`, and u is a
/// pure function of (seed, row id), so disjoint partitions drawn separately
/// merge into the whole-table sample. Δ = 0 keeps every row.
/// Throws NonPositiveDelta, NonPositiveWeight, LengthMismatch.
GswSample gsw_draw(const TimeSeriesTable& t, std::span<const double> weights, double delta, std::uint64_t seed,
                   WeightSource source = {}, std::uint64_t first_row_id = 0);

/// Raises Δ to `delta_new` and folds in `new_rows` (ids from `s.next_row_id`
/// upward unless `first_row_id` is given). Rows of the original population
/// that were not sampled are never consulted. The result equals a fresh draw
/// at `delta_new` over the combined rows with the same seed.
/// Throws DeltaDecrease, DuplicateRowId, NonPositiveWeight, LengthMismatch.
GswSample gsw_update(const GswSample& s, double delta_new, const TimeSeriesTable& new_rows,
                     std::span<const double> new_weights);
GswSample gsw_update(const GswSample& s, double delta_new, const TimeSeriesTable& new_rows,
                     std::span<const double> new_weights, std::uint64_t first_row_id);

/// Union of samples drawn with the same (Δ, seed, source) over disjoint row ids.
GswSample merge_samples(const GswSample& a, const GswSample& b);

/// Priority / threshold sample. x_i follows the threshold variable:
/// 0 if m_i/α_i < τ, τ if m_i < τ ≤ m_i/α_i, m_i if τ ≤ m_i. Only x_i > 0 rows
/// are stored.
struct PrioritySample {
  double tau = 0.0;
  std::uint64_t seed = 0;
  std::string measure;
  TimeSeriesTable rows;
  std::vector<std::uint64_t> row_id;
  std::vector<double> alpha;
  std::vector<double> x;

  std::size_t size() const noexcept { return row_id.size(); }
};

/// Fixed-threshold mode. Throws NonPositiveTau.
PrioritySample priority_draw(const TimeSeriesTable& t, std::string_view measure, double tau, std::uint64_t seed,
                             std::uint64_t first_row_id = 0);

/// Top-k mode: keeps the k rows of highest priority m_i/α_i and sets τ to the
/// (k+1)-th highest priority. With k ≥ n every row is kept and τ = min m_i.
PrioritySample priority_draw_topk(const TimeSeriesTable& t, std::string_view measure, std::size_t k,
                                  std::uint64_t seed, std::uint64_t first_row_id = 0);

/// Measure-biased multiset: x_i = τ gives one copy, x_i = m_i gives ⌈m_i/τ⌉.
std::vector<std::uint64_t> measure_biased_from_priority(const PrioritySample& s);

/// Copies contributed by a kept row under the measure-biased construction.
std::size_t measure_biased_copies(double x, double measure, double tau);

struct UniformSample {
  double p = 1.0;
  std::uint64_t seed = 0;
  TimeSeriesTable rows;
  std::vector<std::uint64_t> row_id;

  std::size_t size() const noexcept { return row_id.size(); }
};

/// Bernoulli(p) inclusion per row. Throws InvalidProbability unless 0 < p ≤ 1.
UniformSample uniform_draw(const TimeSeriesTable& t, double p, std::uint64_t seed, std::uint64_t first_row_id = 0);

/// Nested GSW samples at strictly increasing Δ sharing one seed and weight
/// source; layer j+1 ⊆ layer j.
struct MultiLayerSamples {
  std::vector<GswSample> layers;
};

/// Throws UnsortedDeltas (not strictly increasing), NonPositiveDelta.
MultiLayerSamples build_multilayer(const TimeSeriesTable& t, std::span<const double> weights,
                                   std::span<const double> deltas, std::uint64_t seed, WeightSource source = {});

}  // namespace gswcast
