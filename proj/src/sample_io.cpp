#include "gswcast/sample_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "gswcast/error.hpp"
#include "gswcast/numeric.hpp"

namespace gswcast {

namespace {

using nlohmann::json;

template <typename T>
T parse_number(const std::string& s, std::size_t lineno) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::MalformedRow, "sample line " + std::to_string(lineno));
  }
  return v;
}

}  // namespace

void write_sample(std::ostream& out, const GswSample& s) {
  json header;
  header["format"] = "gsw-sample";
  header["version"] = 1;
  // Stored as text so the value survives JSON's double handling unchanged.
  header["delta"] = format_double(s.delta);
  header["seed"] = std::to_string(s.seed);
  header["next_row_id"] = std::to_string(s.next_row_id);
  header["weight_source"] = {{"kind", std::string(to_string(s.source.kind))},
                             {"name", s.source.name},
                             {"measures", s.source.measures}};
  header["ts"] = s.rows.ts_name();
  json dims = json::array();
  for (const auto& d : s.rows.dims()) {
    dims.push_back({{"name", d.name}, {"type", d.type == DimType::Int ? "int" : "string"}});
  }
  header["dims"] = dims;
  header["measures"] = s.rows.measure_names();
  out << "# " << header.dump() << '\n';

  out << "row_id,u,w";
  for (const auto& d : s.rows.dims()) out << ',' << quote_csv_field(d.name);
  for (const auto& m : s.rows.measures()) out << ',' << quote_csv_field(m.name);
  out << ',' << quote_csv_field(s.rows.ts_name()) << '\n';

  const auto& rows = s.rows;
  for (std::size_t i = 0; i < s.size(); ++i) {
    out << s.row_id[i] << ',' << format_double(s.u[i]) << ',' << format_double(s.weight[i]);
    for (const auto& d : rows.dims()) {
      out << ',';
      if (d.type == DimType::Int) {
        out << d.ints[i];
      } else {
        out << quote_csv_field(d.strings[i]);
      }
    }
    for (const auto& m : rows.measures()) out << ',' << format_double(m.values[i]);
    out << ',' << rows.ts()[i] << '\n';
  }
}

GswSample read_sample(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) {
    throw Error(ErrorCode::MalformedRow, "sample line 1: missing JSON header");
  }
  json header;
  try {
    header = json::parse(line.substr(2));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedRow, std::string("sample header: ") + e.what());
  }
  if (header.value("format", "") != "gsw-sample") throw Error(ErrorCode::MalformedRow, "not a gsw-sample file");

  GswSample s;
  try {
    s.delta = parse_number<double>(header.at("delta").get<std::string>(), 1);
    s.seed = parse_number<std::uint64_t>(header.at("seed").get<std::string>(), 1);
    s.next_row_id = parse_number<std::uint64_t>(header.at("next_row_id").get<std::string>(), 1);
    const auto& ws = header.at("weight_source");
    s.source.kind = weight_kind_from_string(ws.at("kind").get<std::string>());
    s.source.name = ws.at("name").get<std::string>();
    s.source.measures = ws.at("measures").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedRow, std::string("sample header: ") + e.what());
  }

  std::vector<DimColumn> dims;
  for (const auto& d : header.at("dims")) {
    DimColumn c;
    c.name = d.at("name").get<std::string>();
    c.type = d.at("type").get<std::string>() == "int" ? DimType::Int : DimType::String;
    dims.push_back(std::move(c));
  }
  std::vector<MeasureColumn> measures;
  for (const auto& m : header.at("measures")) measures.push_back({m.get<std::string>(), {}});
  const std::string ts_name = header.at("ts").get<std::string>();
  std::vector<std::int64_t> ts;

  if (!std::getline(in, line)) throw Error(ErrorCode::MalformedRow, "sample line 2: missing column header");
  const std::size_t width = 3 + dims.size() + measures.size() + 1;
  std::size_t lineno = 2;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto f = split_csv_record(line);
    if (!f || f->size() != width) throw Error(ErrorCode::MalformedRow, "sample line " + std::to_string(lineno));
    const auto& fields = *f;
    s.row_id.push_back(parse_number<std::uint64_t>(fields[0], lineno));
    s.u.push_back(parse_number<double>(fields[1], lineno));
    s.weight.push_back(parse_number<double>(fields[2], lineno));
    std::size_t c = 3;
    for (auto& d : dims) {
      if (d.type == DimType::Int) {
        d.ints.push_back(parse_number<std::int64_t>(fields[c], lineno));
      } else {
        d.strings.push_back(fields[c]);
      }
      ++c;
    }
    for (auto& m : measures) m.values.push_back(parse_number<double>(fields[c++], lineno));
    ts.push_back(parse_number<std::int64_t>(fields[c], lineno));
  }
  s.rows = TimeSeriesTable(std::move(dims), std::move(measures), ts_name, std::move(ts));
  s.key.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) s.key.push_back(gsw_key(s.u[i], s.weight[i]));
  return s;
}

void save_sample(const std::filesystem::path& path, const GswSample& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  write_sample(out, s);
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

GswSample load_sample(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  return read_sample(in);
}

}  // namespace gswcast
