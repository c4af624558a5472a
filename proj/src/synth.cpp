#include "gswcast/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "gswcast/numeric.hpp"

namespace gswcast {

std::vector<double> simulate_arma11(std::size_t n, double ar, double ma, double innovation_sd, std::uint64_t seed) {
  std::mt19937_64 rng(mix64(seed ^ static_cast<std::uint64_t>(Stream::Synth)));
  std::normal_distribution<double> normal(0.0, innovation_sd);
  constexpr std::size_t burn_in = 200;
  std::vector<double> out;
  out.reserve(n);
  double x = 0.0;
  double u_prev = 0.0;
  for (std::size_t t = 0; t < burn_in + n; ++t) {
    const double u = normal(rng);
    x = ar * x + u + ma * u_prev;
    u_prev = u;
    if (t >= burn_in) out.push_back(x);
  }
  return out;
}

SynthData synth_table(const SynthConfig& cfg) {
  std::mt19937_64 rng(mix64(cfg.seed));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t n = cfg.entities;

  SynthData out;
  std::vector<int64_t> age(n), segment(n);
  std::vector<std::string> region(n);
  for (std::size_t e = 0; e < n; ++e) {
    region[e] = "r" + std::to_string(static_cast<int>(unit(rng) * 8.0));
    age[e] = 18 + static_cast<std::int64_t>(unit(rng) * 60.0);
    segment[e] = static_cast<std::int64_t>(unit(rng) * 10.0);
  }

  // Per-entity multiplier of each measure.
  std::vector<std::vector<double>> entity_scale;
  std::size_t next = 0;
  for (std::size_t size : cfg.group_sizes) {
    std::vector<double> base(n);
    for (auto& b : base) b = std::pow(1.0 - unit(rng), -1.0 / cfg.pareto_shape);
    std::vector<std::string> names;
    for (std::size_t j = 0; j < size; ++j) {
      std::vector<double> scale(n);
      for (std::size_t e = 0; e < n; ++e) scale[e] = base[e] * std::exp(cfg.member_spread * normal(rng));
      entity_scale.push_back(std::move(scale));
      names.push_back("m" + std::to_string(next++));
    }
    out.groups.push_back(std::move(names));
  }

  const auto path = simulate_arma11(cfg.timestamps, cfg.ar, cfg.ma, cfg.innovation_sd, cfg.seed);
  for (double x : path) out.level.push_back(std::max(0.05, 1.0 + x));

  const std::size_t rows = n * cfg.timestamps;
  DimColumn region_col{"region", DimType::String, {}, {}};
  DimColumn age_col{"age", DimType::Int, {}, {}};
  DimColumn segment_col{"segment", DimType::Int, {}, {}};
  region_col.reserve(rows);
  age_col.reserve(rows);
  segment_col.reserve(rows);
  std::vector<MeasureColumn> measures;
  for (std::size_t k = 0; k < entity_scale.size(); ++k) {
    measures.push_back({"m" + std::to_string(k), {}});
    measures.back().values.reserve(rows);
  }
  std::vector<std::int64_t> ts;
  ts.reserve(rows);
  const double jitter_shift = cfg.row_noise * cfg.row_noise / 2.0;
  for (std::size_t t = 0; t < cfg.timestamps; ++t) {
    for (std::size_t e = 0; e < n; ++e) {
      region_col.strings.push_back(region[e]);
      age_col.ints.push_back(age[e]);
      segment_col.ints.push_back(segment[e]);
      for (std::size_t k = 0; k < entity_scale.size(); ++k) {
        const double jitter = std::exp(cfg.row_noise * normal(rng) - jitter_shift);
        measures[k].values.push_back(entity_scale[k][e] * out.level[t] * jitter);
      }
      ts.push_back(cfg.first_ts + static_cast<std::int64_t>(t));
    }
  }
  out.table = TimeSeriesTable({std::move(region_col), std::move(age_col), std::move(segment_col)}, std::move(measures),
                              "ts", std::move(ts));
  return out;
}

}  // namespace gswcast
