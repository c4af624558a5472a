#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gswcast/table.hpp"

namespace gswcast {

/// Synthetic population: a fixed set of entities observed at every
/// timestamp. Each measure group shares a Pareto-distributed per-entity base;
/// members deviate from it by a per-entity lognormal factor. All measures are
/// scaled by a positive level following an ARMA(1,1) process.
struct SynthConfig {
  std::size_t entities = 2000;
  std::size_t timestamps = 60;
  std::int64_t first_ts = 1;
  std::vector<std::size_t> group_sizes{2, 2};
  double pareto_shape = 1.5;
  /// Lognormal σ of a member's deviation from its group base.
  double member_spread = 0.3;
  /// Lognormal σ of per-(entity, timestamp) jitter.
  double row_noise = 0.05;
  double ar = 0.5;
  double ma = 0.2;
  /// Innovation standard deviation of the level process, relative to 1.
  double innovation_sd = 0.05;
  std::uint64_t seed = 1;
};

struct SynthData {
  /// Dimensions: region (string, 8 values), age (int 18..77), segment
  /// (int 0..9, uniform). Measures m0, m1, ... grouped per config.
  TimeSeriesTable table;
  /// Level multiplier per timestamp.
  std::vector<double> level;
  std::vector<std::vector<std::string>> groups;
};

SynthData synth_table(const SynthConfig& config);

/// ARMA(1,1) path of length n after a burn-in, mean zero.
std::vector<double> simulate_arma11(std::size_t n, double ar, double ma, double innovation_sd, std::uint64_t seed);

}  // namespace gswcast
