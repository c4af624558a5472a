#include "gswcast/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gswcast/error.hpp"
#include "gswcast/numeric.hpp"

namespace gswcast {

WeightSource WeightSource::single(std::string measure) {
  WeightSource s;
  s.kind = Kind::Measure;
  s.name = measure;
  s.measures = {std::move(measure)};
  return s;
}

WeightSource WeightSource::group(std::string name, Kind kind, std::vector<std::string> measures) {
  WeightSource s;
  s.kind = kind;
  s.name = std::move(name);
  s.measures = std::move(measures);
  return s;
}

bool WeightSource::covers(std::string_view measure) const {
  return std::find(measures.begin(), measures.end(), measure) != measures.end();
}

std::string_view to_string(WeightSource::Kind kind) {
  switch (kind) {
    case WeightSource::Kind::Measure: return "measure";
    case WeightSource::Kind::GeoMean: return "geo";
    case WeightSource::Kind::ArithMean: return "arith";
    case WeightSource::Kind::External: return "external";
  }
  return "external";
}

WeightSource::Kind weight_kind_from_string(std::string_view text) {
  if (text == "measure") return WeightSource::Kind::Measure;
  if (text == "geo") return WeightSource::Kind::GeoMean;
  if (text == "arith") return WeightSource::Kind::ArithMean;
  if (text == "external") return WeightSource::Kind::External;
  throw Error(ErrorCode::InvalidArgument, "unknown weight kind '" + std::string(text) + "'");
}

double gsw_key(double u, double w) noexcept { return (1.0 / std::max(u, kMinUniform) - 1.0) * w; }

namespace {

void check_weights(std::span<const double> w, std::size_t n) {
  if (w.size() != n) {
    throw Error(ErrorCode::LengthMismatch,
                std::to_string(w.size()) + " weights for " + std::to_string(n) + " rows");
  }
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!(w[i] > 0.0) || !std::isfinite(w[i])) throw Error(ErrorCode::NonPositiveWeight, "row " + std::to_string(i));
  }
}

void check_delta(double delta) {
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw Error(ErrorCode::NonPositiveDelta, format_double(delta));
}

struct Candidate {
  double key;
  std::uint64_t id;
  double u;
  double w;
  std::size_t src;  // index into the source table
  bool from_new;
};

bool key_less(const Candidate& a, const Candidate& b) noexcept {
  return a.key < b.key || (a.key == b.key && a.id < b.id);
}

// Materializes candidates (already filtered) from up to two tables, sorted.
GswSample assemble(std::vector<Candidate> picked, const TimeSeriesTable& old_rows, const TimeSeriesTable* new_rows) {
  std::sort(picked.begin(), picked.end(), key_less);
  std::vector<std::size_t> old_idx;
  std::vector<std::size_t> new_idx;
  for (const auto& c : picked) (c.from_new ? new_idx : old_idx).push_back(c.src);

  GswSample s;
  TimeSeriesTable a = old_rows.take(old_idx);
  TimeSeriesTable b = new_rows ? new_rows->take(new_idx) : old_rows.take(std::span<const std::size_t>{});
  TimeSeriesTable both = TimeSeriesTable::concat(a, b);
  // `both` lists old picks then new picks; permute back into key order.
  std::vector<std::size_t> order(picked.size());
  std::size_t oi = 0, ni = old_idx.size();
  for (std::size_t k = 0; k < picked.size(); ++k) order[k] = picked[k].from_new ? ni++ : oi++;
  s.rows = both.take(order);
  s.row_id.reserve(picked.size());
  s.u.reserve(picked.size());
  s.weight.reserve(picked.size());
  s.key.reserve(picked.size());
  for (const auto& c : picked) {
    s.row_id.push_back(c.id);
    s.u.push_back(c.u);
    s.weight.push_back(c.w);
    s.key.push_back(c.key);
  }
  return s;
}

}  // namespace

GswSample gsw_draw(const TimeSeriesTable& t, std::span<const double> weights, double delta, std::uint64_t seed,
                   WeightSource source, std::uint64_t first_row_id) {
  check_delta(delta);
  check_weights(weights, t.num_rows());
  std::vector<Candidate> picked;
  for (std::size_t i = 0; i < t.num_rows(); ++i) {
    const std::uint64_t id = first_row_id + i;
    const double u = keyed_uniform(seed, Stream::Gsw, id);
    const double key = gsw_key(u, weights[i]);
    if (key >= delta) picked.push_back({key, id, u, weights[i], i, false});
  }
  GswSample s = assemble(std::move(picked), t, nullptr);
  s.delta = delta;
  s.seed = seed;
  s.source = std::move(source);
  s.next_row_id = first_row_id + t.num_rows();
  return s;
}

GswSample gsw_update(const GswSample& s, double delta_new, const TimeSeriesTable& new_rows,
                     std::span<const double> new_weights) {
  return gsw_update(s, delta_new, new_rows, new_weights, s.next_row_id);
}

GswSample gsw_update(const GswSample& s, double delta_new, const TimeSeriesTable& new_rows,
                     std::span<const double> new_weights, std::uint64_t first_row_id) {
  check_delta(delta_new);
  if (delta_new < s.delta) {
    throw Error(ErrorCode::DeltaDecrease, format_double(s.delta) + " -> " + format_double(delta_new));
  }
  if (new_rows.num_rows() > 0 && !new_rows.same_schema(s.rows)) {
    throw Error(ErrorCode::InvalidArgument, "new rows do not match the sample schema");
  }
  check_weights(new_weights, new_rows.num_rows());
  if (new_rows.num_rows() > 0 && first_row_id < s.next_row_id) {
    throw Error(ErrorCode::DuplicateRowId, "new row ids start at " + std::to_string(first_row_id) +
                                               " but ids below " + std::to_string(s.next_row_id) + " are taken");
  }

  // Stored rows are ascending by key, so the survivors (key ≥ Δ′) are a suffix.
  std::vector<Candidate> picked;
  auto first_kept = std::lower_bound(s.key.begin(), s.key.end(), delta_new) - s.key.begin();
  for (std::size_t i = static_cast<std::size_t>(first_kept); i < s.size(); ++i) {
    picked.push_back({s.key[i], s.row_id[i], s.u[i], s.weight[i], i, false});
  }
  for (std::size_t i = 0; i < new_rows.num_rows(); ++i) {
    const std::uint64_t id = first_row_id + i;
    const double u = keyed_uniform(s.seed, Stream::Gsw, id);
    const double key = gsw_key(u, new_weights[i]);
    if (key >= delta_new) picked.push_back({key, id, u, new_weights[i], i, true});
  }
  GswSample out = assemble(std::move(picked), s.rows, new_rows.num_rows() > 0 ? &new_rows : nullptr);
  out.delta = delta_new;
  out.seed = s.seed;
  out.source = s.source;
  out.next_row_id = new_rows.num_rows() > 0 ? first_row_id + new_rows.num_rows() : s.next_row_id;
  return out;
}

GswSample merge_samples(const GswSample& a, const GswSample& b) {
  if (a.delta != b.delta || a.seed != b.seed || !(a.source == b.source)) {
    throw Error(ErrorCode::InvalidArgument, "merging samples with different delta, seed or weight source");
  }
  std::vector<Candidate> picked;
  picked.reserve(a.size() + b.size());
  for (std::size_t i = 0; i < a.size(); ++i) picked.push_back({a.key[i], a.row_id[i], a.u[i], a.weight[i], i, false});
  for (std::size_t i = 0; i < b.size(); ++i) picked.push_back({b.key[i], b.row_id[i], b.u[i], b.weight[i], i, true});
  std::vector<std::uint64_t> ids;
  for (const auto& c : picked) ids.push_back(c.id);
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw Error(ErrorCode::DuplicateRowId, "samples overlap");
  }
  GswSample out = assemble(std::move(picked), a.rows, &b.rows);
  out.delta = a.delta;
  out.seed = a.seed;
  out.source = a.source;
  out.next_row_id = std::max(a.next_row_id, b.next_row_id);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

PrioritySample finish_priority(const TimeSeriesTable& t, std::span<const double> m, double tau, std::uint64_t seed,
                               std::string_view measure, std::uint64_t first_row_id,
                               const std::vector<double>& alpha, const std::vector<std::size_t>& keep) {
  PrioritySample s;
  s.tau = tau;
  s.seed = seed;
  s.measure = std::string(measure);
  s.rows = t.take(keep);
  for (auto i : keep) {
    s.row_id.push_back(first_row_id + i);
    s.alpha.push_back(alpha[i]);
    s.x.push_back(m[i] >= tau ? m[i] : tau);
  }
  return s;
}

}  // namespace

PrioritySample priority_draw(const TimeSeriesTable& t, std::string_view measure, double tau, std::uint64_t seed,
                             std::uint64_t first_row_id) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw Error(ErrorCode::NonPositiveTau, format_double(tau));
  const auto m = t.measure(measure);
  std::vector<double> alpha(t.num_rows());
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < t.num_rows(); ++i) {
    alpha[i] = keyed_uniform(seed, Stream::Priority, first_row_id + i);
    if (m[i] >= tau || m[i] / alpha[i] >= tau) keep.push_back(i);
  }
  return finish_priority(t, m, tau, seed, measure, first_row_id, alpha, keep);
}

PrioritySample priority_draw_topk(const TimeSeriesTable& t, std::string_view measure, std::size_t k,
                                  std::uint64_t seed, std::uint64_t first_row_id) {
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
  const auto m = t.measure(measure);
  const std::size_t n = t.num_rows();
  std::vector<double> alpha(n);
  std::vector<double> priority(n);
  for (std::size_t i = 0; i < n; ++i) {
    alpha[i] = keyed_uniform(seed, Stream::Priority, first_row_id + i);
    priority[i] = m[i] / alpha[i];
  }
  std::vector<std::size_t> keep;
  double tau;
  if (k >= n) {
    keep.resize(n);
    std::iota(keep.begin(), keep.end(), std::size_t{0});
    tau = n ? *std::min_element(m.begin(), m.end()) : 1.0;
  } else {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto by_priority = [&](std::size_t a, std::size_t b) {
      return priority[a] > priority[b] || (priority[a] == priority[b] && a < b);
    };
    std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), by_priority);
    tau = priority[order[k]];
    keep.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(keep.begin(), keep.end());
  }
  return finish_priority(t, m, tau, seed, measure, first_row_id, alpha, keep);
}

std::size_t measure_biased_copies(double x, double measure, double tau) {
  if (x == measure && measure >= tau) {
    // Guard against m/τ landing a rounding error above an integer.
    const double r = measure / tau;
    return static_cast<std::size_t>(std::ceil(r * (1.0 - 1e-12)));
  }
  return 1;
}

std::vector<std::uint64_t> measure_biased_from_priority(const PrioritySample& s) {
  std::vector<std::uint64_t> out;
  const auto m = s.rows.measure(s.measure);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const std::size_t copies = measure_biased_copies(s.x[i], m[i], s.tau);
    out.insert(out.end(), copies, s.row_id[i]);
  }
  return out;
}

UniformSample uniform_draw(const TimeSeriesTable& t, double p, std::uint64_t seed, std::uint64_t first_row_id) {
  if (!(p > 0.0 && p <= 1.0)) throw Error(ErrorCode::InvalidProbability, format_double(p));
  std::vector<std::size_t> keep;
  UniformSample s;
  s.p = p;
  s.seed = seed;
  for (std::size_t i = 0; i < t.num_rows(); ++i) {
    const std::uint64_t id = first_row_id + i;
    if (keyed_uniform(seed, Stream::Uniform, id) <= p) {
      keep.push_back(i);
      s.row_id.push_back(id);
    }
  }
  s.rows = t.take(keep);
  return s;
}

MultiLayerSamples build_multilayer(const TimeSeriesTable& t, std::span<const double> weights,
                                   std::span<const double> deltas, std::uint64_t seed, WeightSource source) {
  if (deltas.empty()) throw Error(ErrorCode::InvalidArgument, "empty delta ladder");
  for (std::size_t j = 0; j < deltas.size(); ++j) {
    check_delta(deltas[j]);
    if (j > 0 && !(deltas[j] > deltas[j - 1])) {
      throw Error(ErrorCode::UnsortedDeltas, "deltas must be strictly increasing");
    }
  }
  MultiLayerSamples ml;
  ml.layers.reserve(deltas.size());
  // Each layer is drawn from the previous one: same u per row, and
  // S_{Δ'} ⊆ S_Δ makes the narrower pass over the sample equivalent.
  ml.layers.push_back(gsw_draw(t, weights, deltas[0], seed, source));
  for (std::size_t j = 1; j < deltas.size(); ++j) {
    ml.layers.push_back(gsw_update(ml.layers.back(), deltas[j], t.take(std::span<const std::size_t>{}), {}));
  }
  return ml;
}

}  // namespace gswcast
