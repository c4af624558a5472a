#include "gswcast/exact.hpp"

#include <algorithm>
#include <unordered_map>

#include "gswcast/error.hpp"
#include "gswcast/numeric.hpp"

namespace gswcast {

double exact_subset_sum(const TimeSeriesTable& t, const Constraint& c, std::string_view measure,
                        std::int64_t timestamp) {
  const auto m = t.measure(measure);
  const auto ts = t.ts();
  if (std::find(ts.begin(), ts.end(), timestamp) == ts.end()) {
    throw Error(ErrorCode::UnknownTimestamp, std::to_string(timestamp));
  }
  const auto bound = BoundConstraint::bind(c, t);
  CompensatedSum sum;
  for (std::size_t i = 0; i < t.num_rows(); ++i) {
    if (ts[i] == timestamp && bound.eval(t, i)) sum += m[i];
  }
  return sum.value();
}

std::vector<double> exact_subset_sums(const TimeSeriesTable& t, const Constraint& c, std::string_view measure,
                                      std::span<const std::int64_t> timestamps) {
  const auto m = t.measure(measure);
  const auto ts = t.ts();
  const auto bound = BoundConstraint::bind(c, t);
  std::unordered_map<std::int64_t, std::size_t> slot;
  for (std::size_t k = 0; k < timestamps.size(); ++k) slot.emplace(timestamps[k], k);
  std::vector<CompensatedSum> sums(timestamps.size());
  for (std::size_t i = 0; i < t.num_rows(); ++i) {
    auto it = slot.find(ts[i]);
    if (it != slot.end() && bound.eval(t, i)) sums[it->second] += m[i];
  }
  std::vector<double> out;
  out.reserve(sums.size());
  for (const auto& s : sums) out.push_back(s.value());
  return out;
}

std::vector<std::size_t> matching_rows(const TimeSeriesTable& t, const Constraint& c) {
  const auto bound = BoundConstraint::bind(c, t);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < t.num_rows(); ++i) {
    if (bound.eval(t, i)) out.push_back(i);
  }
  return out;
}

}  // namespace gswcast
