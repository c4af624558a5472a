// Command-line front end: ingest, sample, group, query, forecast, bench, synth.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "gswcast/bench.hpp"
#include "gswcast/engine.hpp"
#include "gswcast/error.hpp"
#include "gswcast/estimation.hpp"
#include "gswcast/exact.hpp"
#include "gswcast/grouping.hpp"
#include "gswcast/numeric.hpp"
#include "gswcast/sample_io.hpp"
#include "gswcast/synth.hpp"

namespace fs = std::filesystem;
using namespace gswcast;

namespace {

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  return in;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  return out;
}

TimeSeriesTable load_table(const fs::path& csv, const fs::path& schema, const LoadOptions& options = {}) {
  auto sin = open_in(schema);
  const auto roles = parse_schema(sin);
  auto in = open_in(csv);
  return load_csv(in, roles, options);
}

TimeSeriesTable load_store_table(const SampleStore& store) {
  return load_table(store.table_csv(), store.table_schema());
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw Error(ErrorCode::InvalidArgument, "not a number: '" + item + "'");
    out.push_back(v);
  }
  return out;
}

std::vector<std::string> split_names(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// ---------------------------------------------------------------------------

struct IngestArgs {
  std::string csv, schema, store;
  bool replace_zero = false;
};

int run_ingest(const IngestArgs& a) {
  LoadOptions options;
  options.replace_zero = a.replace_zero;
  const auto table = load_table(a.csv, a.schema, options);
  SampleStore store(a.store);
  fs::create_directories(store.root());
  {
    auto out = open_out(store.table_csv());
    write_csv(out, table);
  }
  {
    auto out = open_out(store.table_schema());
    write_schema(out, table);
  }
  std::cout << "rows=" << table.num_rows() << '\n'
            << "dims=" << table.dims().size() << '\n'
            << "measures=" << table.measures().size() << '\n'
            << "timestamps=" << table.distinct_timestamps().size() << '\n'
            << "store=" << store.root().string() << '\n';
  return 0;
}

struct SampleArgs {
  std::string store, weights, mean, deltas;
  std::uint64_t seed = 1;
};

int run_sample(const SampleArgs& a) {
  SampleStore store(a.store);
  const auto table = load_store_table(store);
  const auto deltas = parse_list(a.deltas);
  std::vector<WeightSource> sources;
  if (a.weights.rfind("measure:", 0) == 0) {
    const auto name = a.weights.substr(8);
    table.measure_index(name);
    sources.push_back(WeightSource::single(name));
  } else if (a.weights.rfind("group:", 0) == 0) {
    auto in = open_in(a.weights.substr(6));
    sources = read_grouping_manifest(in);
    if (!a.mean.empty()) {
      const auto kind = weight_kind(mean_kind_from_string(a.mean));
      for (auto& s : sources) {
        if (s.measures.size() > 1) s.kind = kind;
      }
    }
  } else {
    throw Error(ErrorCode::InvalidArgument, "--weights must be measure:<name> or group:<manifest>");
  }
  const auto timeline = table.distinct_timestamps();
  for (const auto& source : sources) {
    const auto w = weights_for(table, source);
    const auto ml = build_multilayer(table, w, deltas, a.seed, source);
    store.save(ml, timeline);
    for (const auto& layer : ml.layers) {
      std::cout << "group=" << source.name << " delta=" << format_double(layer.delta) << " rows=" << layer.size()
                << '\n';
    }
  }
  return 0;
}

struct GroupArgs {
  std::string store, measures, mean = "geo", out;
  std::size_t groups = 1;
  std::size_t probe_limit = 10000;
  std::uint64_t seed = 1;
};

int run_group(const GroupArgs& a) {
  SampleStore store(a.store);
  const auto table = load_store_table(store);
  auto names = a.measures.empty() ? table.measure_names() : split_names(a.measures);
  KCenterOptions options;
  options.probe_rows = default_probe_rows(table.num_rows(), a.seed, a.probe_limit);
  const auto grouping = kcenter_group(table, names, a.groups, options);
  const auto kind = mean_kind_from_string(a.mean);
  if (!a.out.empty()) {
    auto out = open_out(a.out);
    write_grouping_manifest(out, grouping, kind);
  }
  write_grouping_manifest(std::cout, grouping, kind);
  std::cout << "radius=" << format_double(grouping.radius) << '\n';
  return 0;
}

struct QueryArgs {
  std::string store, measure, where = "TRUE", group;
  std::int64_t ts = 0;
  double delta = -1.0;
  bool exact = false;
};

int run_query(const QueryArgs& a) {
  SampleStore store(a.store);
  const auto c = parse_constraint(a.where);
  if (a.exact) {
    const auto table = load_store_table(store);
    const double v = exact_subset_sum(table, c, a.measure, a.ts);
    std::cout << "value=" << format_double(v) << "\nmode=exact\n";
    return 0;
  }
  std::string group = a.group;
  if (group.empty()) {
    ForecastTask probe;
    probe.measure = a.measure;
    const auto entry = store.covering(probe);
    if (!entry) {
      const auto names = store.group_names();
      std::string list;
      for (const auto& n : names) list += (list.empty() ? "" : ",") + n;
      throw Error(ErrorCode::NoCoveringSample,
                  "no sample covers measure '" + a.measure + "'; available groups: " + (list.empty() ? "none" : list));
    }
    group = entry->source.name;
  }
  const auto ml = store.load(group);
  const GswSample* layer = &ml.layers.front();
  if (a.delta >= 0.0) {
    layer = nullptr;
    for (const auto& l : ml.layers) {
      if (l.delta == a.delta) layer = &l;
    }
    if (!layer) throw Error(ErrorCode::InvalidArgument, "group '" + group + "' has no layer delta=" + format_double(a.delta));
  }
  const auto e = estimate_sum(*layer, c, a.measure, a.ts);
  std::cout << format_estimate(e, layer->delta) << "group=" << group << '\n';
  return 0;
}

struct ForecastArgs {
  std::string store, task, task_file, plot, csv;
  bool exact = false;
  bool no_timings = false;
};

int run_forecast(const ForecastArgs& a) {
  std::string text = a.task;
  if (!a.task_file.empty()) {
    auto in = open_in(a.task_file);
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  if (text.empty()) throw Error(ErrorCode::InvalidArgument, "--task or --task-file is required");
  const auto task = parse_task(text);
  SampleStore store(a.store);
  TaskResult r;
  if (a.exact) {
    r = run_task_exact(task, load_store_table(store));
  } else {
    r = run_task(task, store);
  }
  std::cout << r.to_text(!a.no_timings);
  if (!a.plot.empty()) {
    auto out = open_out(a.plot);
    write_plot_csv(out, r.series, r.forecast);
  }
  if (!a.csv.empty()) {
    auto out = open_out(a.csv);
    write_forecast_csv(out, r.forecast);
  }
  return 0;
}

struct BenchArgs {
  std::string out, rates = "0.01,0.05,0.1", selectivities = "0.2,0.5,1";
  std::size_t entities = 5000, timestamps = 40, trials = 200, train = 0, forecast_trials = 10;
  int horizon = 7;
  std::uint64_t seed = 1;
};

int run_bench(const BenchArgs& a) {
  SynthConfig cfg;
  cfg.entities = a.entities;
  cfg.timestamps = a.timestamps;
  cfg.seed = a.seed;
  const auto data = synth_table(cfg);
  const auto& t = data.table;
  const std::string target = data.groups[0][0];

  std::vector<MeasureSpan> group;
  for (const auto& name : data.groups[0]) group.push_back(t.measure(name));
  const auto m = t.measure(target);
  std::vector<BenchSampler> samplers{
      {BenchSampler::Kind::Uniform, "uniform", {}},
      {BenchSampler::Kind::Priority, "priority", {}},
      {BenchSampler::Kind::Gsw, "gsw-arith", mean_weights(group, MeanKind::Arithmetic)},
      {BenchSampler::Kind::Gsw, "gsw-geo", mean_weights(group, MeanKind::Geometric)},
      {BenchSampler::Kind::Gsw, "gsw-optimal", {m.begin(), m.end()}},
  };
  std::vector<BenchWorkload> workloads;
  for (double s : parse_list(a.selectivities)) {
    if (!(s > 0.0 && s <= 1.0)) throw Error(ErrorCode::InvalidArgument, "selectivity must be in (0, 1]");
    const auto k = static_cast<std::int64_t>(std::llround(s * 10.0));
    workloads.push_back({"segment<" + std::to_string(k), parse_constraint("segment < " + std::to_string(k))});
  }
  BenchOptions options;
  options.measure = target;
  options.rates = parse_list(a.rates);
  options.trials = a.trials;
  options.seed = a.seed;
  options.train_points = a.train;
  options.horizon = a.horizon;
  options.forecast_trials = a.forecast_trials;
  const auto timeline = t.distinct_timestamps();
  options.eval_timestamps.assign(timeline.begin(), timeline.begin() + std::min<std::ptrdiff_t>(5, timeline.size()));
  const auto rows = bench_samplers(t, workloads, samplers, options);
  if (!a.out.empty()) {
    auto out = open_out(a.out);
    write_bench_csv(out, rows);
  }
  write_bench_csv(std::cout, rows);
  return 0;
}

struct SynthArgs {
  std::string out, schema_out;
  std::size_t entities = 2000, timestamps = 60;
  std::uint64_t seed = 1;
};

int run_synth(const SynthArgs& a) {
  SynthConfig cfg;
  cfg.entities = a.entities;
  cfg.timestamps = a.timestamps;
  cfg.seed = a.seed;
  const auto data = synth_table(cfg);
  {
    auto out = open_out(a.out);
    write_csv(out, data.table);
  }
  if (!a.schema_out.empty()) {
    auto out = open_out(a.schema_out);
    write_schema(out, data.table);
  }
  std::cout << "rows=" << data.table.num_rows() << '\n';
  for (std::size_t g = 0; g < data.groups.size(); ++g) {
    std::cout << "group" << g << '=';
    for (std::size_t j = 0; j < data.groups[g].size(); ++j) std::cout << (j ? "," : "") << data.groups[g][j];
    std::cout << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sampling-based aggregation and forecasting over time-series tables"};
  app.require_subcommand(1);

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Load a CSV into a table store");
  c_ingest->add_option("--csv", ingest.csv, "Input CSV")->required();
  c_ingest->add_option("--schema", ingest.schema, "Column roles, one col=dim|measure|ts per line")->required();
  c_ingest->add_option("--store", ingest.store, "Store directory")->required();
  c_ingest->add_flag("--replace-zero", ingest.replace_zero, "Replace zero measures with a small epsilon");

  SampleArgs sample;
  auto* c_sample = app.add_subcommand("sample", "Build multi-layer GSW samples");
  c_sample->add_option("--store", sample.store, "Store directory")->required();
  c_sample->add_option("--weights", sample.weights, "measure:<name> or group:<manifest>")->required();
  c_sample->add_option("--mean", sample.mean, "geo or arith for multi-measure groups");
  c_sample->add_option("--deltas", sample.deltas, "Comma-separated increasing deltas")->required();
  c_sample->add_option("--seed", sample.seed, "Sampling seed");

  GroupArgs group;
  auto* c_group = app.add_subcommand("group", "Group measures by k-center and write a manifest");
  c_group->add_option("--store", group.store, "Store directory")->required();
  c_group->add_option("--groups", group.groups, "Number of groups")->required();
  c_group->add_option("--measures", group.measures, "Comma-separated measures (default: all)");
  c_group->add_option("--mean", group.mean, "geo or arith");
  c_group->add_option("--out", group.out, "Manifest path");
  c_group->add_option("--probe-limit", group.probe_limit, "Rows used to compare measures");
  c_group->add_option("--seed", group.seed, "Probe seed");

  QueryArgs query;
  auto* c_query = app.add_subcommand("query", "Estimate one SUM aggregation");
  c_query->add_option("--store", query.store, "Store directory")->required();
  c_query->add_option("--measure", query.measure, "Measure")->required();
  c_query->add_option("--where", query.where, "Constraint");
  c_query->add_option("--ts", query.ts, "Timestamp")->required();
  c_query->add_option("--group", query.group, "Sample group (default: first covering)");
  c_query->add_option("--delta", query.delta, "Layer delta (default: smallest)");
  c_query->add_flag("--exact", query.exact, "Scan the base table instead");

  ForecastArgs fc;
  auto* c_fc = app.add_subcommand("forecast", "Run a FORECAST statement");
  c_fc->add_option("--store", fc.store, "Store directory")->required();
  c_fc->add_option("--task", fc.task, "Statement text");
  c_fc->add_option("--task-file", fc.task_file, "File holding the statement");
  c_fc->add_option("--plot", fc.plot, "Write plot-data CSV");
  c_fc->add_option("--csv", fc.csv, "Write forecast CSV");
  c_fc->add_flag("--exact", fc.exact, "Use exact sums from the base table");
  c_fc->add_flag("--no-timings", fc.no_timings, "Omit wall-clock timings");

  BenchArgs bench;
  auto* c_bench = app.add_subcommand("bench", "Compare samplers on synthetic data");
  c_bench->add_option("--out", bench.out, "Write the report CSV");
  c_bench->add_option("--rates", bench.rates, "Comma-separated sampling rates");
  c_bench->add_option("--selectivities", bench.selectivities, "Comma-separated row fractions in (0, 1], rounded to tenths");
  c_bench->add_option("--entities", bench.entities, "Entities per timestamp");
  c_bench->add_option("--timestamps", bench.timestamps, "Timestamps");
  c_bench->add_option("--trials", bench.trials, "Monte-Carlo trials");
  c_bench->add_option("--train", bench.train, "Training points for forecast columns (0: skip)");
  c_bench->add_option("--horizon", bench.horizon, "Forecast horizon");
  c_bench->add_option("--forecast-trials", bench.forecast_trials, "Trials for forecast columns");
  c_bench->add_option("--seed", bench.seed, "Seed");

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "Write a synthetic table");
  c_synth->add_option("--out", synth.out, "CSV path")->required();
  c_synth->add_option("--schema-out", synth.schema_out, "Schema path");
  c_synth->add_option("--entities", synth.entities, "Entities per timestamp");
  c_synth->add_option("--timestamps", synth.timestamps, "Timestamps");
  c_synth->add_option("--seed", synth.seed, "Seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*c_ingest) return run_ingest(ingest);
    if (*c_sample) return run_sample(sample);
    if (*c_group) return run_group(group);
    if (*c_query) return run_query(query);
    if (*c_fc) return run_forecast(fc);
    if (*c_bench) return run_bench(bench);
    if (*c_synth) return run_synth(synth);
  } catch (const SyntaxError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
