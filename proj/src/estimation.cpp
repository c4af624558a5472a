#include "gswcast/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include "gswcast/error.hpp"
#include "gswcast/numeric.hpp"

namespace gswcast {

namespace {

struct Accumulator {
  CompensatedSum sum;
  CompensatedSum var;
  std::size_t rows = 0;
  double ratio_lo = std::numeric_limits<double>::infinity();
  double ratio_hi = 0.0;

  Estimate finish(double delta) const {
    Estimate e;
    e.value = sum.value();
    e.variance = var.value();
    e.rows_used = rows;
    if (rows > 0) {
      e.theta = ratio_hi / ratio_lo;
      e.bound = delta == 0.0 ? 0.0 : std::sqrt(e.theta / static_cast<double>(rows));
    }
    return e;
  }
};

std::vector<Estimate> gsw_series(const GswSample& s, const Constraint& c, std::span<const double> m,
                                 std::span<const std::int64_t> timestamps) {
  std::map<std::int64_t, std::size_t> slot;
  for (std::size_t j = 0; j < timestamps.size(); ++j) slot.emplace(timestamps[j], j);
  std::vector<Accumulator> acc(timestamps.size());
  const auto bound = BoundConstraint::bind(c, s.rows);
  const auto ts = s.rows.ts();
  for (std::size_t i = 0; i < s.size(); ++i) {
    auto it = slot.find(ts[i]);
    if (it == slot.end() || !bound.eval(s.rows, i)) continue;
    auto& a = acc[it->second];
    const double w = s.weight[i];
    const double cal = s.calibration(i);
    a.sum += m[i] * cal;
    a.var += s.delta * m[i] * m[i] / w * cal;
    ++a.rows;
    a.ratio_lo = std::min(a.ratio_lo, m[i] / w);
    a.ratio_hi = std::max(a.ratio_hi, m[i] / w);
  }
  std::vector<Estimate> out;
  out.reserve(acc.size());
  for (std::size_t j = 0; j < timestamps.size(); ++j) out.push_back(acc[slot.at(timestamps[j])].finish(s.delta));
  return out;
}

}  // namespace

Estimate estimate_sum(const GswSample& s, const Constraint& c, std::string_view measure, std::int64_t ts) {
  const std::int64_t one[] = {ts};
  return gsw_series(s, c, s.rows.measure(measure), one)[0];
}

std::vector<Estimate> estimate_series(const GswSample& s, const Constraint& c, std::string_view measure,
                                      std::span<const std::int64_t> timestamps) {
  return gsw_series(s, c, s.rows.measure(measure), timestamps);
}

std::vector<Estimate> estimate_count_series(const GswSample& s, const Constraint& c,
                                            std::span<const std::int64_t> timestamps) {
  const std::vector<double> ones(s.size(), 1.0);
  return gsw_series(s, c, ones, timestamps);
}

Estimate estimate_sum(const PrioritySample& s, const Constraint& c, std::string_view measure, std::int64_t ts) {
  const auto m = s.rows.measure(measure);
  if (measure != s.measure) {
    throw Error(ErrorCode::UnknownMeasure, "priority sample was drawn on '" + s.measure + "'");
  }
  const auto bound = BoundConstraint::bind(c, s.rows);
  Estimate e;
  CompensatedSum sum, var;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.rows.ts()[i] != ts || !bound.eval(s.rows, i)) continue;
    sum += s.x[i];
    // Var(x_i) = (τ − m)m for m < τ; the HT plug-in divides by P(x_i > 0) = m/τ.
    if (m[i] < s.tau) var += (s.tau - m[i]) * s.tau;
    ++e.rows_used;
  }
  e.value = sum.value();
  e.variance = var.value();
  if (e.rows_used) e.bound = 1.0 / std::sqrt(static_cast<double>(e.rows_used));
  return e;
}

Estimate estimate_sum(const UniformSample& s, const Constraint& c, std::string_view measure, std::int64_t ts) {
  const auto m = s.rows.measure(measure);
  const auto bound = BoundConstraint::bind(c, s.rows);
  Estimate e;
  CompensatedSum sum, var;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.rows.ts()[i] != ts || !bound.eval(s.rows, i)) continue;
    sum += m[i] / s.p;
    var += (1.0 - s.p) * m[i] * m[i] / (s.p * s.p);
    ++e.rows_used;
  }
  e.value = sum.value();
  e.variance = var.value();
  return e;
}

ConsistencyStats consistency(std::span<const double> m, std::span<const double> w) {
  if (m.size() != w.size()) throw Error(ErrorCode::LengthMismatch, "measure and weight differ in length");
  if (m.empty()) throw Error(ErrorCode::EmptyGroup, "consistency of an empty set");
  ConsistencyStats s;
  s.theta_lo = std::numeric_limits<double>::infinity();
  s.theta_hi = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double r = m[i] / w[i];
    s.theta_lo = std::min(s.theta_lo, r);
    s.theta_hi = std::max(s.theta_hi, r);
  }
  s.theta = s.theta_hi / s.theta_lo;
  return s;
}

double expected_sample_size(std::span<const double> w, double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw Error(ErrorCode::NonPositiveDelta, "delta must be positive, got " + format_double(delta));
  }
  CompensatedSum s;
  for (double x : w) s += x / (delta + x);
  return s.value();
}

double gsw_variance(std::span<const double> m, std::span<const double> w, double delta) {
  if (m.size() != w.size()) throw Error(ErrorCode::LengthMismatch, "measure and weight differ in length");
  CompensatedSum s;
  for (std::size_t i = 0; i < m.size(); ++i) s += delta * m[i] * m[i] / w[i];
  return s.value();
}

double rstd_bound(double theta, double expected_size) {
  if (!(theta >= 1.0)) throw Error(ErrorCode::InvalidTheta, "theta must be at least 1, got " + format_double(theta));
  if (!(expected_size > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "expected sample size must be positive");
  }
  return std::sqrt(theta / expected_size);
}

CompressedBounds compressed_bounds(std::span<const MeasureSpan> measures, MeanKind kind, double expected_size) {
  if (measures.empty()) throw Error(ErrorCode::EmptyGroup, "no measures given");
  if (!(expected_size > 0.0)) throw Error(ErrorCode::InvalidArgument, "expected sample size must be positive");
  const auto dev = deviation_stats(measures);
  const std::size_t k = measures.size();
  const double kd = static_cast<double>(k);
  CompressedBounds out;
  if (kind == MeanKind::Geometric) {
    for (std::size_t p = 0; p < k; ++p) {
      double prod = 1.0;
      for (std::size_t j = 0; j < k; ++j) {
        if (j != p) prod *= std::pow(dev.rho[p][j], 1.0 / kd);
      }
      out.per_measure.push_back(std::sqrt(prod / expected_size));
    }
    out.uniform = std::sqrt(std::pow(dev.rho_max, (kd - 1.0) / kd) / expected_size);
  } else {
    const double b = std::sqrt(dev.delta_range * dev.delta_range / expected_size);
    out.per_measure.assign(k, b);
    out.uniform = b;
  }
  return out;
}

std::vector<double> optimal_weights(std::span<const double> m) { return {m.begin(), m.end()}; }

QueryBound subset_bound(const TimeSeriesTable& t, std::span<const double> w, double delta, const Constraint& c,
                        std::string_view measure, std::optional<std::int64_t> ts) {
  if (w.size() != t.num_rows()) throw Error(ErrorCode::LengthMismatch, "weights do not match table rows");
  const auto m = t.measure(measure);
  const auto bound = BoundConstraint::bind(c, t);
  std::vector<double> sm, sw;
  for (std::size_t i = 0; i < t.num_rows(); ++i) {
    if (ts && t.ts()[i] != *ts) continue;
    if (!bound.eval(t, i)) continue;
    sm.push_back(m[i]);
    sw.push_back(w[i]);
  }
  QueryBound q;
  q.subset_rows = sm.size();
  if (sm.empty()) throw Error(ErrorCode::ZeroTrueSum, "no rows satisfy the query");
  q.stats = consistency(sm, sw);
  q.expected_size = expected_sample_size(sw, delta);
  q.variance = gsw_variance(sm, sw, delta);
  CompensatedSum total;
  for (double x : sm) total += x;
  q.exact_sum = total.value();
  q.bound = rstd_bound(q.stats.theta, q.expected_size);
  return q;
}

QueryBound table_bound(const TimeSeriesTable& t, std::span<const double> w, double delta, std::string_view measure) {
  return subset_bound(t, w, delta, Constraint::always(), measure, std::nullopt);
}

SamplerConfig SamplerConfig::gsw(std::vector<double> weights, double delta, std::string label) {
  SamplerConfig c;
  c.kind = Kind::Gsw;
  c.weights = std::move(weights);
  c.delta = delta;
  c.label = std::move(label);
  return c;
}

SamplerConfig SamplerConfig::priority(double tau, std::string label) {
  if (!(tau > 0.0)) throw Error(ErrorCode::NonPositiveTau, "tau must be positive");
  SamplerConfig c;
  c.kind = Kind::Priority;
  c.tau = tau;
  c.label = std::move(label);
  return c;
}

SamplerConfig SamplerConfig::uniform(double p, std::string label) {
  if (!(p > 0.0 && p <= 1.0)) throw Error(ErrorCode::InvalidProbability, "p must lie in (0, 1]");
  SamplerConfig c;
  c.kind = Kind::Uniform;
  c.p = p;
  c.label = std::move(label);
  return c;
}

namespace {

void check_config(const TimeSeriesTable& t, const SamplerConfig& config) {
  if (config.kind == SamplerConfig::Kind::Gsw && config.weights.size() != t.num_rows()) {
    throw Error(ErrorCode::LengthMismatch, "weights do not match table rows");
  }
}

}  // namespace

PreparedQuery::PreparedQuery(const TimeSeriesTable& t, const SamplerConfig& config, const Constraint& c,
                             std::string_view measure, std::int64_t ts) {
  const std::int64_t one[] = {ts};
  *this = std::move(for_timestamps(t, config, c, measure, one)[0]);
}

std::vector<PreparedQuery> PreparedQuery::for_timestamps(const TimeSeriesTable& t, const SamplerConfig& config,
                                                         const Constraint& c, std::string_view measure,
                                                         std::span<const std::int64_t> timestamps) {
  check_config(t, config);
  const auto m = t.measure(measure);
  const auto bound = BoundConstraint::bind(c, t);
  std::map<std::int64_t, std::size_t> slot;
  for (std::size_t j = 0; j < timestamps.size(); ++j) slot.emplace(timestamps[j], j);
  std::vector<PreparedQuery> out(timestamps.size());
  std::vector<CompensatedSum> totals(timestamps.size());
  for (auto& q : out) q.config_ = SamplerConfig{config.kind, {}, config.delta, config.tau, config.p, config.label};
  for (std::size_t i = 0; i < t.num_rows(); ++i) {
    auto it = slot.find(t.ts()[i]);
    if (it == slot.end() || !bound.eval(t, i)) continue;
    auto& q = out[it->second];
    q.rows_.push_back(i);
    q.m_.push_back(m[i]);
    if (config.kind == SamplerConfig::Kind::Gsw) q.w_.push_back(config.weights[i]);
    totals[it->second] += m[i];
  }
  for (std::size_t j = 0; j < out.size(); ++j) out[j].exact_ = totals[j].value();
  // Duplicate timestamps share one slot; copy it to every position.
  for (std::size_t j = 0; j < timestamps.size(); ++j) {
    const std::size_t k = slot.at(timestamps[j]);
    if (k != j) out[j] = out[k];
  }
  return out;
}

double PreparedQuery::estimate(std::uint64_t seed, std::size_t* sampled) const {
  CompensatedSum sum;
  std::size_t count = 0;
  const double delta = config_.delta;
  const double tau = config_.tau;
  const double p = config_.p;
  for (std::size_t j = 0; j < rows_.size(); ++j) {
    const std::uint64_t id = rows_[j];
    const double m = m_[j];
    switch (config_.kind) {
      case SamplerConfig::Kind::Gsw: {
        const double w = w_[j];
        if (gsw_key(keyed_uniform(seed, Stream::Gsw, id), w) >= delta) {
          sum += m * ((delta + w) / w);
          ++count;
        }
        break;
      }
      case SamplerConfig::Kind::Priority:
        if (m >= tau) {
          sum += m;
          ++count;
        } else if (m / keyed_uniform(seed, Stream::Priority, id) >= tau) {
          sum += tau;
          ++count;
        }
        break;
      case SamplerConfig::Kind::Uniform:
        if (keyed_uniform(seed, Stream::Uniform, id) <= p) {
          sum += m / p;
          ++count;
        }
        break;
    }
  }
  if (sampled) *sampled = count;
  return sum.value();
}

double trial_estimate(const TimeSeriesTable& t, const SamplerConfig& config, const Constraint& c,
                      std::string_view measure, std::int64_t ts, std::uint64_t seed) {
  return PreparedQuery(t, config, c, measure, ts).estimate(seed);
}

MonteCarloReport rstd_monte_carlo(const TimeSeriesTable& t, const SamplerConfig& config, const Constraint& c,
                                  std::string_view measure, std::int64_t ts, std::size_t trials,
                                  std::uint64_t master_seed) {
  if (trials < 2) throw Error(ErrorCode::InvalidArgument, "at least 2 trials required");
  return rstd_monte_carlo(PreparedQuery(t, config, c, measure, ts), trials, master_seed);
}

MonteCarloReport rstd_monte_carlo(const PreparedQuery& q, std::size_t trials, std::uint64_t master_seed) {
  if (trials < 2) throw Error(ErrorCode::InvalidArgument, "at least 2 trials required");
  if (!(q.exact() != 0.0)) throw Error(ErrorCode::ZeroTrueSum, "true subset sum is zero");

  std::vector<double> est(trials);
  std::vector<std::size_t> sizes(trials);
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), trials));
  auto work = [&](std::size_t begin) {
    for (std::size_t k = begin; k < trials; k += workers) est[k] = q.estimate(trial_seed(master_seed, k), &sizes[k]);
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }

  // Reduction in trial order keeps the report independent of thread count.
  const double exact = q.exact();
  CompensatedSum sum, sq_err, abs_err, size;
  for (std::size_t k = 0; k < trials; ++k) {
    sum += est[k];
    sq_err += (est[k] - exact) * (est[k] - exact);
    abs_err += std::abs(est[k] - exact);
    size += static_cast<double>(sizes[k]);
  }
  const double n = static_cast<double>(trials);
  MonteCarloReport rep;
  rep.exact = exact;
  rep.trials = trials;
  rep.mean = sum.value() / n;
  rep.rstd = std::sqrt(sq_err.value() / n) / std::abs(exact);
  rep.re = abs_err.value() / n / std::abs(exact);
  rep.mean_sample_size = size.value() / n;
  CompensatedSum dev;
  for (double e : est) dev += (e - rep.mean) * (e - rep.mean);
  rep.sample_sd = std::sqrt(dev.value() / (n - 1.0));
  rep.std_error = rep.sample_sd / std::sqrt(n);
  rep.re_le_rstd = rep.re <= rep.rstd;
  return rep;
}

std::string format_estimate(const Estimate& e, double delta) {
  std::ostringstream out;
  out << "value=" << format_double(e.value) << '\n';
  out << "rows_used=" << e.rows_used << '\n';
  out << "theta=" << format_double(e.theta) << '\n';
  out << "bound=" << (e.bound ? format_double(*e.bound) : std::string("none")) << '\n';
  out << "delta=" << format_double(delta) << '\n';
  if (e.empty_match()) out << "warning=no sampled row matched\n";
  return out.str();
}

}  // namespace gswcast
