#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gswcast/samplers.hpp"
#include "gswcast/table.hpp"

namespace gswcast {

enum class MeanKind { Geometric, Arithmetic };

std::string_view to_string(MeanKind kind);
MeanKind mean_kind_from_string(std::string_view text);  // "geo" | "arith"
WeightSource::Kind weight_kind(MeanKind kind) noexcept;

using MeasureSpan = std::span<const double>;

/// Element-wise geometric ((∏ m^j)^{1/k}) or arithmetic ((1/k) Σ m^j) mean.
/// Throws EmptyGroup, LengthMismatch.
std::vector<double> mean_weights(std::span<const MeasureSpan> measures, MeanKind kind);

struct DeviationStats {
  /// rho[p][q] = max_i(m^p_i/m^q_i) / min_i(m^p_i/m^q_i); symmetric, unit diagonal.
  std::vector<std::vector<double>> rho;
  double rho_max = 1.0;
  /// max over rows of (max_j m^j_i)/(min_j m^j_i).
  double delta_range = 1.0;
};

/// Throws EmptyGroup, LengthMismatch.
DeviationStats deviation_stats(std::span<const MeasureSpan> measures);

/// ‖m/Σm − w/Σw‖₁. Throws LengthMismatch.
double l1_distance(MeasureSpan m, MeasureSpan w);

struct MeasureGrouping {
  std::vector<std::vector<std::string>> groups;
  std::vector<std::string> centers;
  /// Largest distance from a measure to its group's center.
  double radius = 0.0;
};

struct KCenterOptions {
  /// Rows used to estimate distances; nullopt means every row.
  std::optional<std::vector<std::size_t>> probe_rows;
};

/// Greedy farthest-point k-center over measures under l1_distance. The first
/// center is the lexicographically smallest name; ties go to the smaller name.
/// Throws InvalidGroupCount unless 1 ≤ g ≤ number of measures.
MeasureGrouping kcenter_group(const TimeSeriesTable& t, std::span<const std::string> measures, std::size_t g,
                              const KCenterOptions& options = {});

/// Same, over explicit vectors (names index the vectors).
MeasureGrouping kcenter_group(std::span<const std::string> names, std::span<const MeasureSpan> vectors,
                              std::size_t g);

/// Default probe set: all rows when N ≤ limit, otherwise a seeded Bernoulli
/// subsample with expected size `limit`.
std::vector<std::size_t> default_probe_rows(std::size_t num_rows, std::uint64_t seed, std::size_t limit = 10000);

/// Weights for a weight source evaluated on table rows.
std::vector<double> weights_for(const TimeSeriesTable& t, const WeightSource& source);

/// Group-name assignment used in manifests: "g<index>".
std::vector<WeightSource> grouping_sources(const MeasureGrouping& grouping, MeanKind kind);

/// One line per group: `group <name> kind=<geo|arith> center=<m> members=<a,b,...>`.
void write_grouping_manifest(std::ostream& out, const MeasureGrouping& grouping, MeanKind kind);
std::vector<WeightSource> read_grouping_manifest(std::istream& in);

}  // namespace gswcast
