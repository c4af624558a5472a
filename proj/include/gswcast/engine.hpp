#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gswcast/estimation.hpp"
#include "gswcast/forecast.hpp"
#include "gswcast/samplers.hpp"
#include "gswcast/task.hpp"

namespace gswcast {

struct LayerChoice {
  std::size_t index = 0;
  double delta = 0.0;
  /// Predicted per-timestamp RSTD bound of the chosen layer.
  double predicted_bound = 0.0;
  /// The target could not be met; the most accurate layer was returned.
  bool target_missed = false;
};

/// Predicted bound √(θ/n̄) for one layer: θ over the layer's sampled rows
/// matching the task in its window, n̄ = matching rows per window timestamp.
/// Zero for Δ = 0, infinity when nothing matches.
double layer_bound(const GswSample& layer, const ForecastTask& task, std::span<const std::int64_t> timeline = {});

/// Largest-Δ layer whose predicted bound meets task.error_target; without a
/// target, or when none qualifies, the smallest-Δ layer.
LayerChoice select_layer(const MultiLayerSamples& ml, const ForecastTask& task,
                         std::span<const std::int64_t> timeline = {});

struct TaskTimings {
  double aggregation_ms = 0.0;
  double fit_ms = 0.0;
  double total_ms = 0.0;
};

struct TaskResult {
  ForecastTask task;
  std::vector<std::int64_t> timestamps;
  std::vector<Estimate> estimates;
  AggregateSeries series;
  /// Empty in exact mode.
  std::optional<LayerChoice> layer;
  std::string sample_group;
  std::string model_summary;
  ForecastResult forecast;
  TaskTimings timings;

  /// key=value report. Timings are wall-clock and vary between runs, so they
  /// are only included on request.
  std::string to_text(bool with_timings = true) const;
};

/// Runs the task on a multi-layer sample. `timeline` lists the base table's
/// timestamps (empty: consecutive integers).
/// Throws NoCoveringSample when the sample's weight source lacks the measure.
TaskResult run_task(const ForecastTask& task, const MultiLayerSamples& ml, std::span<const std::int64_t> timeline = {});

/// Exact sums from the base table (Δ = 0 semantics, no sampling noise).
TaskResult run_task_exact(const ForecastTask& task, const TimeSeriesTable& table);

/// Persisted samples: `<root>/<group>/<delta>.sample`, one manifest line per
/// group in `<root>/manifest.txt`, and the base timeline in
/// `<root>/<group>/timeline.txt`.
class SampleStore {
 public:
  struct Entry {
    WeightSource source;
    std::vector<double> deltas;
    std::uint64_t seed = 0;
  };

  explicit SampleStore(std::filesystem::path root);

  const std::filesystem::path& root() const noexcept { return root_; }

  /// Writes every layer and records the group. Replaces an existing group of
  /// the same name.
  void save(const MultiLayerSamples& ml, std::span<const std::int64_t> timeline);

  std::vector<Entry> entries() const;
  std::vector<std::string> group_names() const;
  /// First group whose weight source contains `measure` (any group for COUNT).
  std::optional<Entry> covering(const ForecastTask& task) const;

  MultiLayerSamples load(const std::string& group) const;
  std::vector<std::int64_t> load_timeline(const std::string& group) const;

  /// Base-table location used by `ingest`.
  std::filesystem::path table_csv() const { return root_ / "table.csv"; }
  std::filesystem::path table_schema() const { return root_ / "table.schema"; }

 private:
  std::filesystem::path root_;
};

/// Loads the covering group and runs the task. With `base` given and no
/// covering group, falls back to exact mode.
/// Throws NoCoveringSample naming the available groups.
TaskResult run_task(const ForecastTask& task, const SampleStore& store, const TimeSeriesTable* base = nullptr);

/// Directory-safe name for a Δ value.
std::string delta_file_name(double delta);

}  // namespace gswcast
