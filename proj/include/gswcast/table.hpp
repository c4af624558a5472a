#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace gswcast {

enum class Role { Dim, Measure, Timestamp };
enum class DimType { Int, String };

using DimValue = std::variant<std::int64_t, std::string>;

std::string dim_value_text(const DimValue& v);

/// One dimension column. Exactly one of `ints`/`strings` is populated,
/// according to `type`.
struct DimColumn {
  std::string name;
  DimType type = DimType::Int;
  std::vector<std::int64_t> ints;
  std::vector<std::string> strings;

  std::size_t size() const noexcept { return type == DimType::Int ? ints.size() : strings.size(); }
  DimValue value(std::size_t row) const;
  void push(const DimValue& v);
  void reserve(std::size_t n);
};

struct MeasureColumn {
  std::string name;
  std::vector<double> values;
};

struct ColumnRef {
  Role role;
  std::size_t index;  // into dims()/measures(); ignored for Timestamp
};

/// Columnar time-series relation (dims; measures; ts). Every measure value is
/// strictly positive and every column has the same length.
class TimeSeriesTable {
 public:
  TimeSeriesTable() = default;
  TimeSeriesTable(std::vector<DimColumn> dims, std::vector<MeasureColumn> measures,
                  std::string ts_name, std::vector<std::int64_t> ts);

  std::size_t num_rows() const noexcept { return ts_.size(); }
  const std::vector<DimColumn>& dims() const noexcept { return dims_; }
  const std::vector<MeasureColumn>& measures() const noexcept { return measures_; }
  const std::string& ts_name() const noexcept { return ts_name_; }
  std::span<const std::int64_t> ts() const noexcept { return ts_; }

  /// Column order used when serializing; defaults to dims, measures, ts.
  const std::vector<ColumnRef>& layout() const noexcept { return layout_; }
  void set_layout(std::vector<ColumnRef> layout);

  std::optional<std::size_t> find_dim(std::string_view name) const noexcept;
  std::optional<std::size_t> find_measure(std::string_view name) const noexcept;
  std::size_t dim_index(std::string_view name) const;      // throws UnknownDimension
  std::size_t measure_index(std::string_view name) const;  // throws UnknownMeasure
  std::span<const double> measure(std::string_view name) const;
  std::vector<std::string> measure_names() const;

  /// Sorted distinct timestamps.
  std::vector<std::int64_t> distinct_timestamps() const;

  /// Rows `rows` (in the given order) as a new table with the same schema.
  TimeSeriesTable take(std::span<const std::size_t> rows) const;
  bool same_schema(const TimeSeriesTable& other) const noexcept;
  /// Rows of `a` followed by rows of `b`; schemas must agree.
  static TimeSeriesTable concat(const TimeSeriesTable& a, const TimeSeriesTable& b);

 private:
  std::vector<DimColumn> dims_;
  std::vector<MeasureColumn> measures_;
  std::string ts_name_ = "ts";
  std::vector<std::int64_t> ts_;
  std::vector<ColumnRef> layout_;
};

using ColumnRoles = std::vector<std::pair<std::string, Role>>;

struct LoadOptions {
  /// Replace zero measures with `epsilon` instead of rejecting them.
  bool replace_zero = false;
  double epsilon = 1e-9;
};

/// Parses `column=dim|measure|ts` lines; blank lines and `#` comments ignored.
ColumnRoles parse_schema(std::istream& in);

/// Inverse of parse_schema, one line per column in layout order.
void write_schema(std::ostream& out, const TimeSeriesTable& table);

TimeSeriesTable load_csv(std::istream& in, const ColumnRoles& roles, const LoadOptions& options = {});
void write_csv(std::ostream& out, const TimeSeriesTable& table);

/// Splits one CSV record (RFC 4180 quoting). Returns nullopt on an unterminated quote.
std::optional<std::vector<std::string>> split_csv_record(std::string_view line);
std::string quote_csv_field(std::string_view field);

}  // namespace gswcast
