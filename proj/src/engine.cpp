#include "gswcast/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include "gswcast/error.hpp"
#include "gswcast/exact.hpp"
#include "gswcast/numeric.hpp"
#include "gswcast/sample_io.hpp"

namespace gswcast {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

bool in_window(const ForecastTask& task, std::int64_t ts) { return ts >= task.t_start && ts <= task.t_end; }

/// Runs fn(begin, end) over contiguous slices of [0, n); slice results are
/// written by index, so the outcome does not depend on the thread count.
template <typename Fn>
void parallel_slices(std::size_t n, Fn fn) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), n));
  if (workers <= 1) {
    fn(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t b = 0; b < n; b += chunk) pool.emplace_back(fn, b, std::min(n, b + chunk));
  for (auto& t : pool) t.join();
}

std::vector<Estimate> estimate_window(const GswSample& s, const ForecastTask& task,
                                      std::span<const std::int64_t> timestamps) {
  std::vector<Estimate> out(timestamps.size());
  parallel_slices(timestamps.size(), [&](std::size_t b, std::size_t e) {
    const auto slice = timestamps.subspan(b, e - b);
    std::vector<Estimate> part;
    switch (task.aggregate) {
      case Aggregate::Sum: part = estimate_series(s, task.constraint, task.measure, slice); break;
      case Aggregate::Count: part = estimate_count_series(s, task.constraint, slice); break;
      case Aggregate::Avg: {
        part = estimate_series(s, task.constraint, task.measure, slice);
        const auto counts = estimate_count_series(s, task.constraint, slice);
        for (std::size_t i = 0; i < part.size(); ++i) {
          // Ratio of two unbiased estimates; its bias is not corrected.
          const double c = counts[i].value;
          part[i].value = c > 0.0 ? part[i].value / c : 0.0;
          part[i].variance = c > 0.0 ? part[i].variance / (c * c) : 0.0;
        }
        break;
      }
    }
    std::copy(part.begin(), part.end(), out.begin() + static_cast<std::ptrdiff_t>(b));
  });
  return out;
}

void finish(TaskResult& r, Clock::time_point start, Clock::time_point agg_done) {
  r.series.values.clear();
  r.series.noise_var.clear();
  for (const auto& e : r.estimates) {
    r.series.values.push_back(e.value);
    r.series.noise_var.push_back(e.variance);
  }
  r.series.timestamps = r.timestamps;
  const auto fit_start = Clock::now();
  auto model = make_model(r.task.model);
  model->fit(r.series);
  r.forecast = model->predict(r.series, r.task.fore_period, r.task.gamma);
  r.model_summary = model->summary();
  r.timings.fit_ms = elapsed_ms(fit_start);
  r.timings.aggregation_ms = std::chrono::duration<double, std::milli>(agg_done - start).count();
  r.timings.total_ms = std::max(elapsed_ms(start), r.timings.aggregation_ms + r.timings.fit_ms);
}

void require_window(const ForecastTask& task, const std::vector<std::int64_t>& ts) {
  if (ts.empty()) {
    throw Error(ErrorCode::EmptyWindow, "no timestamps in (" + std::to_string(task.t_start) + ", " +
                                            std::to_string(task.t_end) + ")");
  }
}

}  // namespace

double layer_bound(const GswSample& layer, const ForecastTask& task, std::span<const std::int64_t> timeline) {
  if (layer.delta == 0.0) return 0.0;
  const auto window = window_timestamps(task, timeline);
  if (window.empty()) return std::numeric_limits<double>::infinity();
  const auto bound = BoundConstraint::bind(task.constraint, layer.rows);
  const bool ones = task.aggregate == Aggregate::Count;
  const auto m = ones ? std::span<const double>{} : layer.rows.measure(task.measure);
  std::size_t matched = 0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (std::size_t i = 0; i < layer.size(); ++i) {
    const auto ts = layer.rows.ts()[i];
    if (!in_window(task, ts) || !std::binary_search(window.begin(), window.end(), ts)) continue;
    if (!bound.eval(layer.rows, i)) continue;
    const double r = (ones ? 1.0 : m[i]) / layer.weight[i];
    lo = std::min(lo, r);
    hi = std::max(hi, r);
    ++matched;
  }
  if (matched == 0) return std::numeric_limits<double>::infinity();
  const double per_ts = static_cast<double>(matched) / static_cast<double>(window.size());
  return std::sqrt((hi / lo) / per_ts);
}

LayerChoice select_layer(const MultiLayerSamples& ml, const ForecastTask& task,
                         std::span<const std::int64_t> timeline) {
  if (ml.layers.empty()) throw Error(ErrorCode::InvalidArgument, "no sample layers");
  LayerChoice best;
  best.index = 0;
  best.delta = ml.layers[0].delta;
  best.predicted_bound = layer_bound(ml.layers[0], task, timeline);
  if (!task.error_target) return best;
  for (std::size_t j = ml.layers.size(); j-- > 0;) {
    const double b = j == 0 ? best.predicted_bound : layer_bound(ml.layers[j], task, timeline);
    if (b <= *task.error_target) return {j, ml.layers[j].delta, b, false};
  }
  best.target_missed = true;
  return best;
}

TaskResult run_task(const ForecastTask& task, const MultiLayerSamples& ml, std::span<const std::int64_t> timeline) {
  const auto start = Clock::now();
  if (ml.layers.empty()) throw Error(ErrorCode::NoCoveringSample, "no sample layers");
  const auto& source = ml.layers[0].source;
  if (task.aggregate != Aggregate::Count && !source.covers(task.measure)) {
    throw Error(ErrorCode::NoCoveringSample,
                "sample group '" + source.name + "' does not cover measure '" + task.measure + "'");
  }
  validate_task(task, ml.layers[0].rows);
  TaskResult r;
  r.task = task;
  r.sample_group = source.name;
  r.timestamps = window_timestamps(task, timeline);
  require_window(task, r.timestamps);
  r.layer = select_layer(ml, task, timeline);
  r.estimates = estimate_window(ml.layers[r.layer->index], task, r.timestamps);
  finish(r, start, Clock::now());
  return r;
}

TaskResult run_task_exact(const ForecastTask& task, const TimeSeriesTable& table) {
  const auto start = Clock::now();
  validate_task(task, table);
  TaskResult r;
  r.task = task;
  const auto timeline = table.distinct_timestamps();
  r.timestamps = window_timestamps(task, timeline);
  require_window(task, r.timestamps);

  std::vector<double> counts(r.timestamps.size(), 0.0);
  for (auto i : matching_rows(table, task.constraint)) {
    auto it = std::lower_bound(r.timestamps.begin(), r.timestamps.end(), table.ts()[i]);
    if (it != r.timestamps.end() && *it == table.ts()[i]) counts[static_cast<std::size_t>(it - r.timestamps.begin())] += 1.0;
  }
  std::vector<double> sums(r.timestamps.size(), 0.0);
  if (task.aggregate != Aggregate::Count) sums = exact_subset_sums(table, task.constraint, task.measure, r.timestamps);
  for (std::size_t j = 0; j < r.timestamps.size(); ++j) {
    Estimate e;
    switch (task.aggregate) {
      case Aggregate::Sum: e.value = sums[j]; break;
      case Aggregate::Count: e.value = counts[j]; break;
      case Aggregate::Avg: e.value = counts[j] > 0.0 ? sums[j] / counts[j] : 0.0; break;
    }
    e.bound = 0.0;
    e.rows_used = static_cast<std::size_t>(counts[j]);
    r.estimates.push_back(e);
  }
  finish(r, start, Clock::now());
  return r;
}

std::string TaskResult::to_text(bool with_timings) const {
  std::ostringstream out;
  out << "[task]\n";
  out << "statement=" << task.to_string() << '\n';
  out << "points=" << timestamps.size() << '\n';
  out << "[layer]\n";
  if (layer) {
    out << "group=" << sample_group << '\n';
    out << "delta=" << format_double(layer->delta) << '\n';
    out << "index=" << layer->index << '\n';
    out << "predicted_bound=" << format_double(layer->predicted_bound) << '\n';
    out << "target_missed=" << (layer->target_missed ? "true" : "false") << '\n';
  } else {
    out << "mode=exact\n";
  }
  out << "[estimates]\n";
  for (std::size_t j = 0; j < estimates.size(); ++j) {
    const auto& e = estimates[j];
    out << "ts=" << timestamps[j] << " value=" << format_double(e.value) << " rows_used=" << e.rows_used
        << " noise_var=" << format_double(e.variance) << '\n';
  }
  out << "[model]\n" << model_summary;
  out << "[forecast]\n";
  out << "gamma=" << format_double(forecast.gamma) << '\n';
  for (std::size_t s = 0; s < forecast.horizon(); ++s) {
    out << "step=" << s + 1 << " point=" << format_double(forecast.point[s]) << " lo=" << format_double(forecast.lo[s])
        << " hi=" << format_double(forecast.hi[s]) << '\n';
  }
  if (with_timings) {
    out << "[timings]\n";
    out << "aggregation_ms=" << format_double(timings.aggregation_ms) << '\n';
    out << "fit_ms=" << format_double(timings.fit_ms) << '\n';
    out << "total_ms=" << format_double(timings.total_ms) << '\n';
  }
  return out.str();
}

std::string delta_file_name(double delta) { return format_double(delta); }

SampleStore::SampleStore(std::filesystem::path root) : root_(std::move(root)) {}

namespace {

std::string join_names(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
  return s;
}

void write_manifest(const std::filesystem::path& path, const std::vector<SampleStore::Entry>& entries) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  for (const auto& e : entries) {
    out << "group " << e.source.name << " kind=" << to_string(e.source.kind)
        << " members=" << join_names(e.source.measures) << " deltas=";
    for (std::size_t i = 0; i < e.deltas.size(); ++i) out << (i ? "," : "") << format_double(e.deltas[i]);
    out << " seed=" << e.seed << '\n';
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

std::vector<SampleStore::Entry> SampleStore::entries() const {
  std::vector<Entry> out;
  std::ifstream in(root_ / "manifest.txt");
  if (!in) return out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tag, tok;
    Entry e;
    ls >> tag >> e.source.name;
    if (tag != "group") throw Error(ErrorCode::MalformedRow, "store manifest line " + std::to_string(lineno));
    while (ls >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) throw Error(ErrorCode::MalformedRow, "store manifest line " + std::to_string(lineno));
      const auto key = tok.substr(0, eq);
      const auto val = tok.substr(eq + 1);
      if (key == "kind") {
        e.source.kind = weight_kind_from_string(val);
      } else if (key == "members") {
        e.source.measures = split(val, ',');
      } else if (key == "deltas") {
        for (const auto& d : split(val, ',')) e.deltas.push_back(std::stod(d));
      } else if (key == "seed") {
        e.seed = std::stoull(val);
      }
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<std::string> SampleStore::group_names() const {
  std::vector<std::string> names;
  for (const auto& e : entries()) names.push_back(e.source.name);
  return names;
}

void SampleStore::save(const MultiLayerSamples& ml, std::span<const std::int64_t> timeline) {
  if (ml.layers.empty()) throw Error(ErrorCode::InvalidArgument, "no layers to save");
  Entry entry;
  entry.source = ml.layers[0].source;
  if (entry.source.name.empty()) entry.source.name = "default";
  entry.seed = ml.layers[0].seed;
  const auto dir = root_ / entry.source.name;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
  for (const auto& layer : ml.layers) {
    save_sample(dir / (delta_file_name(layer.delta) + ".sample"), layer);
    entry.deltas.push_back(layer.delta);
  }
  {
    std::ofstream out(dir / "timeline.txt");
    if (!out) throw Error(ErrorCode::IoError, "cannot write timeline for " + entry.source.name);
    for (auto t : timeline) out << t << '\n';
  }
  auto all = entries();
  auto it = std::find_if(all.begin(), all.end(), [&](const Entry& e) { return e.source.name == entry.source.name; });
  if (it != all.end()) {
    *it = entry;
  } else {
    all.push_back(entry);
  }
  write_manifest(root_ / "manifest.txt", all);
}

std::optional<SampleStore::Entry> SampleStore::covering(const ForecastTask& task) const {
  for (const auto& e : entries()) {
    if (task.aggregate == Aggregate::Count || e.source.covers(task.measure)) return e;
  }
  return std::nullopt;
}

MultiLayerSamples SampleStore::load(const std::string& group) const {
  for (const auto& e : entries()) {
    if (e.source.name != group) continue;
    MultiLayerSamples ml;
    for (double d : e.deltas) ml.layers.push_back(load_sample(root_ / group / (delta_file_name(d) + ".sample")));
    return ml;
  }
  throw Error(ErrorCode::NoCoveringSample, "no sample group '" + group + "' in " + root_.string());
}

std::vector<std::int64_t> SampleStore::load_timeline(const std::string& group) const {
  std::vector<std::int64_t> out;
  std::ifstream in(root_ / group / "timeline.txt");
  std::int64_t t;
  while (in >> t) out.push_back(t);
  return out;
}

TaskResult run_task(const ForecastTask& task, const SampleStore& store, const TimeSeriesTable* base) {
  const auto entry = store.covering(task);
  if (!entry) {
    if (base) return run_task_exact(task, *base);
    const auto names = store.group_names();
    throw Error(ErrorCode::NoCoveringSample, "no sample covers measure '" + task.measure + "'; available groups: " +
                                                 (names.empty() ? std::string("none") : join_names(names)));
  }
  const auto ml = store.load(entry->source.name);
  const auto timeline = store.load_timeline(entry->source.name);
  return run_task(task, ml, timeline);
}

}  // namespace gswcast
