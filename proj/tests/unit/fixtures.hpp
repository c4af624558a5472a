#pragma once

#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gswcast/table.hpp"

namespace gswcast::testing {

inline TimeSeriesTable table_from_text(const std::string& csv, const std::string& schema) {
  std::istringstream s(schema), c(csv);
  return load_csv(c, parse_schema(s));
}

/// Four-row advertising table with two timestamps.
inline TimeSeriesTable ad_table() {
  return table_from_text(
      "Age,Gender,Location,Impression,ViewTime,ts\n"
      "30,F,WA,5,1.6,20200301\n"
      "60,M,WA,1,1.8,20200301\n"
      "20,F,NY,10,3.2,20200301\n"
      "40,M,NY,20,6.3,20200302\n",
      "Age=dim\nGender=dim\nLocation=dim\nImpression=measure\nViewTime=measure\nts=ts\n");
}

/// One int dim `g` (0..groups-1), measures built from `m`, all at ts = 1.
inline TimeSeriesTable single_ts_table(const std::vector<double>& m, std::int64_t groups = 4,
                                       std::int64_t ts = 1) {
  DimColumn g{"g", DimType::Int, {}, {}};
  for (std::size_t i = 0; i < m.size(); ++i) g.ints.push_back(static_cast<std::int64_t>(i) % groups);
  return TimeSeriesTable({g}, {MeasureColumn{"m", m}}, "ts", std::vector<std::int64_t>(m.size(), ts));
}

/// Pareto(shape) values with scale 1.
inline std::vector<double> pareto(std::size_t n, double shape, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> out(n);
  for (auto& x : out) x = std::pow(1.0 - u(rng), -1.0 / shape);
  return out;
}

}  // namespace gswcast::testing
