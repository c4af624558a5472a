#include "gswcast/table.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "gswcast/error.hpp"
#include "gswcast/numeric.hpp"

namespace gswcast {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<std::int64_t> parse_int(std::string_view s) {
  std::int64_t v = 0;
  if (s.empty()) return std::nullopt;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<double> parse_real(std::string_view s) {
  double v = 0;
  if (s.empty()) return std::nullopt;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

std::string dim_value_text(const DimValue& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  return std::get<std::string>(v);
}

DimValue DimColumn::value(std::size_t row) const {
  if (type == DimType::Int) return ints[row];
  return strings[row];
}

void DimColumn::push(const DimValue& v) {
  if (type == DimType::Int) {
    const auto* i = std::get_if<std::int64_t>(&v);
    if (!i) throw Error(ErrorCode::TypeMismatch, "string value for integer dimension " + name);
    ints.push_back(*i);
  } else {
    const auto* s = std::get_if<std::string>(&v);
    if (!s) throw Error(ErrorCode::TypeMismatch, "integer value for string dimension " + name);
    strings.push_back(*s);
  }
}

void DimColumn::reserve(std::size_t n) {
  if (type == DimType::Int) {
    ints.reserve(n);
  } else {
    strings.reserve(n);
  }
}

TimeSeriesTable::TimeSeriesTable(std::vector<DimColumn> dims, std::vector<MeasureColumn> measures,
                                 std::string ts_name, std::vector<std::int64_t> ts)
    : dims_(std::move(dims)), measures_(std::move(measures)), ts_name_(std::move(ts_name)), ts_(std::move(ts)) {
  std::unordered_set<std::string> names{ts_name_};
  auto claim = [&](const std::string& n) {
    if (!names.insert(n).second) throw Error(ErrorCode::InvalidArgument, "duplicate column name " + n);
  };
  for (const auto& d : dims_) {
    claim(d.name);
    if (d.size() != ts_.size()) throw Error(ErrorCode::LengthMismatch, "dimension " + d.name);
  }
  for (const auto& m : measures_) {
    claim(m.name);
    if (m.values.size() != ts_.size()) throw Error(ErrorCode::LengthMismatch, "measure " + m.name);
    for (std::size_t i = 0; i < m.values.size(); ++i) {
      if (!(m.values[i] > 0.0) || !std::isfinite(m.values[i])) {
        throw Error(ErrorCode::NonPositiveMeasure,
                    "row " + std::to_string(i) + ", column " + m.name);
      }
    }
  }
  for (std::size_t i = 0; i < dims_.size(); ++i) layout_.push_back({Role::Dim, i});
  for (std::size_t i = 0; i < measures_.size(); ++i) layout_.push_back({Role::Measure, i});
  layout_.push_back({Role::Timestamp, 0});
}

void TimeSeriesTable::set_layout(std::vector<ColumnRef> layout) {
  if (layout.size() != dims_.size() + measures_.size() + 1) {
    throw Error(ErrorCode::InvalidArgument, "layout does not cover every column");
  }
  layout_ = std::move(layout);
}

std::optional<std::size_t> TimeSeriesTable::find_dim(std::string_view name) const noexcept {
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (dims_[i].name == name) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> TimeSeriesTable::find_measure(std::string_view name) const noexcept {
  for (std::size_t i = 0; i < measures_.size(); ++i) {
    if (measures_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t TimeSeriesTable::dim_index(std::string_view name) const {
  if (auto i = find_dim(name)) return *i;
  throw Error(ErrorCode::UnknownDimension, std::string(name));
}

std::size_t TimeSeriesTable::measure_index(std::string_view name) const {
  if (auto i = find_measure(name)) return *i;
  throw Error(ErrorCode::UnknownMeasure, std::string(name));
}

std::span<const double> TimeSeriesTable::measure(std::string_view name) const {
  return measures_[measure_index(name)].values;
}

std::vector<std::string> TimeSeriesTable::measure_names() const {
  std::vector<std::string> out;
  out.reserve(measures_.size());
  for (const auto& m : measures_) out.push_back(m.name);
  return out;
}

std::vector<std::int64_t> TimeSeriesTable::distinct_timestamps() const {
  std::vector<std::int64_t> out(ts_.begin(), ts_.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

TimeSeriesTable TimeSeriesTable::take(std::span<const std::size_t> rows) const {
  TimeSeriesTable out;
  out.ts_name_ = ts_name_;
  out.layout_ = layout_;
  out.dims_.reserve(dims_.size());
  for (const auto& d : dims_) {
    DimColumn c{d.name, d.type, {}, {}};
    if (d.type == DimType::Int) {
      c.ints.reserve(rows.size());
      for (auto r : rows) c.ints.push_back(d.ints[r]);
    } else {
      c.strings.reserve(rows.size());
      for (auto r : rows) c.strings.push_back(d.strings[r]);
    }
    out.dims_.push_back(std::move(c));
  }
  for (const auto& m : measures_) {
    MeasureColumn c{m.name, {}};
    c.values.reserve(rows.size());
    for (auto r : rows) c.values.push_back(m.values[r]);
    out.measures_.push_back(std::move(c));
  }
  out.ts_.reserve(rows.size());
  for (auto r : rows) out.ts_.push_back(ts_[r]);
  return out;
}

bool TimeSeriesTable::same_schema(const TimeSeriesTable& other) const noexcept {
  if (ts_name_ != other.ts_name_ || dims_.size() != other.dims_.size() ||
      measures_.size() != other.measures_.size()) {
    return false;
  }
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (dims_[i].name != other.dims_[i].name || dims_[i].type != other.dims_[i].type) return false;
  }
  for (std::size_t i = 0; i < measures_.size(); ++i) {
    if (measures_[i].name != other.measures_[i].name) return false;
  }
  return true;
}

TimeSeriesTable TimeSeriesTable::concat(const TimeSeriesTable& a, const TimeSeriesTable& b) {
  if (!a.same_schema(b)) throw Error(ErrorCode::InvalidArgument, "concat of tables with different schemas");
  TimeSeriesTable out = a;
  for (std::size_t i = 0; i < out.dims_.size(); ++i) {
    auto& d = out.dims_[i];
    const auto& src = b.dims_[i];
    d.ints.insert(d.ints.end(), src.ints.begin(), src.ints.end());
    d.strings.insert(d.strings.end(), src.strings.begin(), src.strings.end());
  }
  for (std::size_t i = 0; i < out.measures_.size(); ++i) {
    auto& v = out.measures_[i].values;
    v.insert(v.end(), b.measures_[i].values.begin(), b.measures_[i].values.end());
  }
  out.ts_.insert(out.ts_.end(), b.ts_.begin(), b.ts_.end());
  return out;
}

ColumnRoles parse_schema(std::istream& in) {
  ColumnRoles roles;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    auto eq = s.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::MalformedRow, "schema line " + std::to_string(lineno) + ": missing '='");
    }
    auto col = trim(s.substr(0, eq));
    auto role = trim(s.substr(eq + 1));
    Role r;
    if (role == "dim") {
      r = Role::Dim;
    } else if (role == "measure") {
      r = Role::Measure;
    } else if (role == "ts") {
      r = Role::Timestamp;
    } else {
      throw Error(ErrorCode::MalformedRow,
                  "schema line " + std::to_string(lineno) + ": unknown role '" + std::string(role) + "'");
    }
    roles.emplace_back(std::string(col), r);
  }
  return roles;
}

std::optional<std::vector<std::string>> split_csv_record(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  bool field_was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"' && cur.empty() && !field_was_quoted) {
      quoted = true;
      field_was_quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
      field_was_quoted = false;
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) return std::nullopt;
  fields.push_back(std::move(cur));
  return fields;
}

std::string quote_csv_field(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos &&
      (field.empty() || (field.front() != ' ' && field.back() != ' '))) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

TimeSeriesTable load_csv(std::istream& in, const ColumnRoles& roles, const LoadOptions& options) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::MalformedRow, "line 1: missing header row");
  auto header = split_csv_record(line);
  if (!header) throw Error(ErrorCode::MalformedRow, "line 1: unterminated quote");
  for (auto& h : *header) h = std::string(trim(h));

  auto role_of = [&](const std::string& col) -> std::optional<Role> {
    for (const auto& [name, role] : roles) {
      if (name == col) return role;
    }
    return std::nullopt;
  };
  for (const auto& [name, role] : roles) {
    if (std::find(header->begin(), header->end(), name) == header->end()) {
      throw Error(ErrorCode::MissingColumn, name);
    }
  }

  std::size_t ts_count = 0;
  std::vector<ColumnRef> layout;
  std::vector<std::string> dim_names;
  std::vector<std::string> measure_names;
  std::string ts_name;
  for (const auto& col : *header) {
    auto role = role_of(col);
    if (!role) throw Error(ErrorCode::InvalidArgument, "column " + col + " has no role in the schema");
    switch (*role) {
      case Role::Dim:
        layout.push_back({Role::Dim, dim_names.size()});
        dim_names.push_back(col);
        break;
      case Role::Measure:
        layout.push_back({Role::Measure, measure_names.size()});
        measure_names.push_back(col);
        break;
      case Role::Timestamp:
        layout.push_back({Role::Timestamp, 0});
        ts_name = col;
        ++ts_count;
        break;
    }
  }
  if (ts_count != 1) throw Error(ErrorCode::MissingColumn, "exactly one ts column is required");

  // Dimension text is buffered so the column type (int vs string) can be
  // inferred from the whole column.
  std::vector<std::vector<std::string>> dim_text(dim_names.size());
  std::vector<MeasureColumn> measures;
  for (const auto& n : measure_names) measures.push_back({n, {}});
  std::vector<std::int64_t> ts;

  std::size_t lineno = 1;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto fields = split_csv_record(line);
    if (!fields || fields->size() != header->size()) {
      throw Error(ErrorCode::MalformedRow, "line " + std::to_string(lineno));
    }
    for (std::size_t c = 0; c < layout.size(); ++c) {
      const auto& ref = layout[c];
      const std::string& f = (*fields)[c];
      switch (ref.role) {
        case Role::Dim:
          dim_text[ref.index].push_back(f);
          break;
        case Role::Measure: {
          auto v = parse_real(trim(f));
          if (!v) throw Error(ErrorCode::MalformedRow, "line " + std::to_string(lineno));
          double x = *v;
          if (x == 0.0 && options.replace_zero) x = options.epsilon;
          if (!(x > 0.0) || !std::isfinite(x)) {
            throw Error(ErrorCode::NonPositiveMeasure,
                        "row " + std::to_string(row) + ", column " + measure_names[ref.index]);
          }
          measures[ref.index].values.push_back(x);
          break;
        }
        case Role::Timestamp: {
          auto v = parse_int(trim(f));
          if (!v) throw Error(ErrorCode::MalformedRow, "line " + std::to_string(lineno));
          ts.push_back(*v);
          break;
        }
      }
    }
    ++row;
  }

  std::vector<DimColumn> dims;
  for (std::size_t d = 0; d < dim_names.size(); ++d) {
    const auto& text = dim_text[d];
    bool all_int = !text.empty() && std::all_of(text.begin(), text.end(), [](const std::string& s) {
      auto v = parse_int(s);
      return v && std::to_string(*v) == s;
    });
    DimColumn col{dim_names[d], all_int ? DimType::Int : DimType::String, {}, {}};
    if (all_int) {
      col.ints.reserve(text.size());
      for (const auto& s : text) col.ints.push_back(*parse_int(s));
    } else {
      col.strings = text;
    }
    dims.push_back(std::move(col));
  }

  TimeSeriesTable table(std::move(dims), std::move(measures), ts_name, std::move(ts));
  table.set_layout(std::move(layout));
  return table;
}

void write_schema(std::ostream& out, const TimeSeriesTable& table) {
  for (const auto& ref : table.layout()) {
    switch (ref.role) {
      case Role::Dim: out << table.dims()[ref.index].name << "=dim\n"; break;
      case Role::Measure: out << table.measures()[ref.index].name << "=measure\n"; break;
      case Role::Timestamp: out << table.ts_name() << "=ts\n"; break;
    }
  }
}

void write_csv(std::ostream& out, const TimeSeriesTable& table) {
  const auto& layout = table.layout();
  for (std::size_t c = 0; c < layout.size(); ++c) {
    if (c) out << ',';
    const auto& ref = layout[c];
    switch (ref.role) {
      case Role::Dim: out << quote_csv_field(table.dims()[ref.index].name); break;
      case Role::Measure: out << quote_csv_field(table.measures()[ref.index].name); break;
      case Role::Timestamp: out << quote_csv_field(table.ts_name()); break;
    }
  }
  out << '\n';
  for (std::size_t r = 0; r < table.num_rows(); ++r) {
    for (std::size_t c = 0; c < layout.size(); ++c) {
      if (c) out << ',';
      const auto& ref = layout[c];
      switch (ref.role) {
        case Role::Dim: {
          const auto& d = table.dims()[ref.index];
          if (d.type == DimType::Int) {
            out << d.ints[r];
          } else {
            out << quote_csv_field(d.strings[r]);
          }
          break;
        }
        case Role::Measure: out << format_double(table.measures()[ref.index].values[r]); break;
        case Role::Timestamp: out << table.ts()[r]; break;
      }
    }
    out << '\n';
  }
}

}  // namespace gswcast
