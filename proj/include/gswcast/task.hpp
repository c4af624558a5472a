#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gswcast/constraint.hpp"
#include "gswcast/table.hpp"

namespace gswcast {

enum class Aggregate { Sum, Count, Avg };

std::string_view to_string(Aggregate a);

/// FORECAST <agg>(<measure>) FROM <table> WHERE <constraint>
///   USING (<t_s>, <t_e>) OPTION (MODEL='<id>', FORE_PERIOD=<h> [, GAMMA=<g>] [, ERROR_TARGET=<r>])
struct ForecastTask {
  Aggregate aggregate = Aggregate::Sum;
  /// Empty for COUNT(*).
  std::string measure;
  std::string table;
  Constraint constraint;
  std::int64_t t_start = 0;
  std::int64_t t_end = 0;
  std::string model = "arima";
  int fore_period = 1;
  double gamma = 0.9;
  std::optional<double> error_target;

  /// Canonical statement text; parse_task(task.to_string()) == task.
  std::string to_string() const;

  friend bool operator==(const ForecastTask&, const ForecastTask&) = default;
};

/// Keywords are case-insensitive. OPTION entries may appear in any order;
/// FORE_PERIOD is required, MODEL defaults to "arima".
/// Throws SyntaxError, EmptyWindow (t_s > t_e), InvalidHorizon, InvalidConfidence.
ForecastTask parse_task(std::string_view text);

/// Same, then checks the measure and constraint against `schema`.
/// Throws UnknownMeasure, UnknownDimension, TypeMismatch as well.
ForecastTask parse_task(std::string_view text, const TimeSeriesTable& schema);

void validate_task(const ForecastTask& task, const TimeSeriesTable& schema);

/// One per-timestamp aggregation: SELECT <agg>(measure) FROM table WHERE constraint AND ts = timestamp.
struct AggregationQuery {
  Aggregate aggregate = Aggregate::Sum;
  std::string measure;
  std::string table;
  Constraint constraint;
  std::int64_t timestamp = 0;

  std::string to_sql(std::string_view ts_column = "ts") const;
};

/// One query per timestamp of the window, in order. With an empty
/// `timeline` the window is the integers t_s..t_e; otherwise it is the
/// timeline's members inside [t_s, t_e].
std::vector<AggregationQuery> rewrite_to_aggregations(const ForecastTask& task,
                                                      std::span<const std::int64_t> timeline = {});

/// Timestamps the rewrite visits.
std::vector<std::int64_t> window_timestamps(const ForecastTask& task, std::span<const std::int64_t> timeline = {});

}  // namespace gswcast
