#include "gswcast/grouping.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "gswcast/error.hpp"
#include "gswcast/numeric.hpp"

namespace gswcast {

std::string_view to_string(MeanKind kind) { return kind == MeanKind::Geometric ? "geo" : "arith"; }

MeanKind mean_kind_from_string(std::string_view text) {
  if (text == "geo" || text == "geometric") return MeanKind::Geometric;
  if (text == "arith" || text == "arithmetic") return MeanKind::Arithmetic;
  throw Error(ErrorCode::InvalidArgument, "mean kind must be geo or arith, got '" + std::string(text) + "'");
}

WeightSource::Kind weight_kind(MeanKind kind) noexcept {
  return kind == MeanKind::Geometric ? WeightSource::Kind::GeoMean : WeightSource::Kind::ArithMean;
}

namespace {

std::size_t common_length(std::span<const MeasureSpan> measures) {
  if (measures.empty()) throw Error(ErrorCode::EmptyGroup, "no measures given");
  const std::size_t n = measures[0].size();
  for (const auto& m : measures) {
    if (m.size() != n) throw Error(ErrorCode::LengthMismatch, "measure vectors differ in length");
  }
  return n;
}

}  // namespace

std::vector<double> mean_weights(std::span<const MeasureSpan> measures, MeanKind kind) {
  const std::size_t n = common_length(measures);
  const double k = static_cast<double>(measures.size());
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (measures.size() == 1) {
      w[i] = measures[0][i];
    } else if (kind == MeanKind::Geometric) {
      double prod = 1.0;
      for (const auto& m : measures) prod *= m[i];
      if (std::isfinite(prod) && prod >= std::numeric_limits<double>::min()) {
        w[i] = measures.size() == 2 ? std::sqrt(prod) : std::pow(prod, 1.0 / k);
      } else {
        // Log domain when the raw product over- or underflows.
        double log_sum = 0.0;
        for (const auto& m : measures) log_sum += std::log(m[i]);
        w[i] = std::exp(log_sum / k);
      }
    } else {
      double sum = 0.0;
      for (const auto& m : measures) sum += m[i];
      w[i] = sum / k;
    }
  }
  return w;
}

DeviationStats deviation_stats(std::span<const MeasureSpan> measures) {
  const std::size_t n = common_length(measures);
  const std::size_t k = measures.size();
  DeviationStats s;
  s.rho.assign(k, std::vector<double>(k, 1.0));
  for (std::size_t p = 0; p < k; ++p) {
    for (std::size_t q = p + 1; q < k; ++q) {
      double hi = 0.0;
      double lo = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n; ++i) {
        const double r = measures[p][i] / measures[q][i];
        hi = std::max(hi, r);
        lo = std::min(lo, r);
      }
      const double rho = n ? hi / lo : 1.0;
      s.rho[p][q] = rho;
      s.rho[q][p] = rho;
      s.rho_max = std::max(s.rho_max, rho);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    double hi = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& m : measures) {
      hi = std::max(hi, m[i]);
      lo = std::min(lo, m[i]);
    }
    s.delta_range = std::max(s.delta_range, hi / lo);
  }
  return s;
}

double l1_distance(MeasureSpan m, MeasureSpan w) {
  if (m.size() != w.size()) throw Error(ErrorCode::LengthMismatch, "l1_distance");
  CompensatedSum sm, sw;
  for (double x : m) sm += x;
  for (double x : w) sw += x;
  const double tm = sm.value();
  const double tw = sw.value();
  CompensatedSum d;
  for (std::size_t i = 0; i < m.size(); ++i) d += std::abs(m[i] / tm - w[i] / tw);
  return d.value();
}

MeasureGrouping kcenter_group(std::span<const std::string> names, std::span<const MeasureSpan> vectors,
                              std::size_t g) {
  const std::size_t k = names.size();
  if (vectors.size() != k) throw Error(ErrorCode::LengthMismatch, "names and vectors differ in count");
  if (g < 1 || g > k) {
    throw Error(ErrorCode::InvalidGroupCount, std::to_string(g) + " groups for " + std::to_string(k) + " measures");
  }
  // Visit measures in name order so every tie resolves to the smaller name.
  std::vector<std::size_t> by_name(k);
  std::iota(by_name.begin(), by_name.end(), std::size_t{0});
  std::sort(by_name.begin(), by_name.end(), [&](auto a, auto b) { return names[a] < names[b]; });

  std::vector<std::vector<double>> dist(k, std::vector<double>(k, 0.0));
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      dist[a][b] = dist[b][a] = l1_distance(vectors[a], vectors[b]);
    }
  }

  std::vector<std::size_t> centers{by_name[0]};
  std::vector<double> nearest(k);
  for (std::size_t i = 0; i < k; ++i) nearest[i] = dist[i][centers[0]];
  while (centers.size() < g) {
    std::size_t far = by_name[0];
    double far_d = -1.0;
    for (auto i : by_name) {
      if (nearest[i] > far_d) {
        far_d = nearest[i];
        far = i;
      }
    }
    centers.push_back(far);
    for (std::size_t i = 0; i < k; ++i) nearest[i] = std::min(nearest[i], dist[i][far]);
    nearest[far] = 0.0;
  }

  MeasureGrouping out;
  out.groups.resize(g);
  for (auto c : centers) out.centers.push_back(names[c]);
  for (auto i : by_name) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < g; ++c) {
      if (dist[i][centers[c]] < dist[i][centers[best]]) best = c;
    }
    // A center always belongs to its own group.
    for (std::size_t c = 0; c < g; ++c) {
      if (centers[c] == i) best = c;
    }
    out.groups[best].push_back(names[i]);
    out.radius = std::max(out.radius, dist[i][centers[best]]);
  }
  return out;
}

MeasureGrouping kcenter_group(const TimeSeriesTable& t, std::span<const std::string> measures, std::size_t g,
                              const KCenterOptions& options) {
  std::vector<std::vector<double>> probe;
  std::vector<MeasureSpan> spans;
  for (const auto& name : measures) {
    const auto col = t.measure(name);
    if (options.probe_rows) {
      std::vector<double> v;
      v.reserve(options.probe_rows->size());
      for (auto r : *options.probe_rows) v.push_back(col[r]);
      probe.push_back(std::move(v));
    } else {
      probe.emplace_back(col.begin(), col.end());
    }
  }
  for (const auto& v : probe) spans.emplace_back(v);
  return kcenter_group(measures, spans, g);
}

std::vector<std::size_t> default_probe_rows(std::size_t num_rows, std::uint64_t seed, std::size_t limit) {
  std::vector<std::size_t> rows;
  if (num_rows <= limit) {
    rows.resize(num_rows);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return rows;
  }
  const double p = static_cast<double>(limit) / static_cast<double>(num_rows);
  for (std::size_t i = 0; i < num_rows; ++i) {
    if (keyed_uniform(seed, Stream::Probe, i) <= p) rows.push_back(i);
  }
  return rows;
}

std::vector<double> weights_for(const TimeSeriesTable& t, const WeightSource& source) {
  if (source.measures.empty()) throw Error(ErrorCode::EmptyGroup, "weight source '" + source.name + "' has no measures");
  std::vector<MeasureSpan> spans;
  for (const auto& m : source.measures) spans.push_back(t.measure(m));
  switch (source.kind) {
    case WeightSource::Kind::Measure:
      if (spans.size() != 1) throw Error(ErrorCode::InvalidArgument, "measure weights need exactly one measure");
      return {spans[0].begin(), spans[0].end()};
    case WeightSource::Kind::GeoMean: return mean_weights(spans, MeanKind::Geometric);
    case WeightSource::Kind::ArithMean: return mean_weights(spans, MeanKind::Arithmetic);
    case WeightSource::Kind::External: break;
  }
  throw Error(ErrorCode::InvalidArgument, "external weights cannot be rebuilt from the table");
}

std::vector<WeightSource> grouping_sources(const MeasureGrouping& grouping, MeanKind kind) {
  std::vector<WeightSource> out;
  for (std::size_t i = 0; i < grouping.groups.size(); ++i) {
    out.push_back(WeightSource::group("g" + std::to_string(i), weight_kind(kind), grouping.groups[i]));
  }
  return out;
}

void write_grouping_manifest(std::ostream& out, const MeasureGrouping& grouping, MeanKind kind) {
  for (std::size_t i = 0; i < grouping.groups.size(); ++i) {
    out << "group g" << i << " kind=" << to_string(kind) << " center=" << grouping.centers[i] << " members=";
    for (std::size_t j = 0; j < grouping.groups[i].size(); ++j) {
      if (j) out << ',';
      out << grouping.groups[i][j];
    }
    out << '\n';
  }
}

std::vector<WeightSource> read_grouping_manifest(std::istream& in) {
  std::vector<WeightSource> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tag, name, tok;
    ls >> tag >> name;
    if (tag != "group" || name.empty()) {
      throw Error(ErrorCode::MalformedRow, "manifest line " + std::to_string(lineno));
    }
    WeightSource src;
    src.name = name;
    bool have_kind = false;
    while (ls >> tok) {
      auto eq = tok.find('=');
      if (eq == std::string::npos) throw Error(ErrorCode::MalformedRow, "manifest line " + std::to_string(lineno));
      auto key = tok.substr(0, eq);
      auto val = tok.substr(eq + 1);
      if (key == "kind") {
        src.kind = val == "measure" ? WeightSource::Kind::Measure : weight_kind(mean_kind_from_string(val));
        have_kind = true;
      } else if (key == "members") {
        std::istringstream ms(val);
        std::string m;
        while (std::getline(ms, m, ',')) {
          if (!m.empty()) src.measures.push_back(m);
        }
      }
    }
    if (!have_kind || src.measures.empty()) {
      throw Error(ErrorCode::MalformedRow, "manifest line " + std::to_string(lineno) + ": kind and members required");
    }
    out.push_back(std::move(src));
  }
  return out;
}

}  // namespace gswcast
