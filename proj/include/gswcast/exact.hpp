#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "gswcast/constraint.hpp"
#include "gswcast/table.hpp"

namespace gswcast {

/// SELECT SUM(measure) FROM t WHERE c AND ts = timestamp, by full scan.
/// Throws UnknownMeasure, or UnknownTimestamp when no row carries `timestamp`.
double exact_subset_sum(const TimeSeriesTable& t, const Constraint& c, std::string_view measure,
                        std::int64_t timestamp);

/// One scan answering the query for every timestamp in `timestamps`.
/// Timestamps absent from the table yield 0.
std::vector<double> exact_subset_sums(const TimeSeriesTable& t, const Constraint& c, std::string_view measure,
                                      std::span<const std::int64_t> timestamps);

/// Row indices satisfying `c` (any timestamp).
std::vector<std::size_t> matching_rows(const TimeSeriesTable& t, const Constraint& c);

}  // namespace gswcast
