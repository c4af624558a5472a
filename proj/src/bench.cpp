#include "gswcast/bench.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "gswcast/error.hpp"
#include "gswcast/exact.hpp"
#include "gswcast/forecast.hpp"
#include "gswcast/numeric.hpp"

namespace gswcast {

namespace {

/// Bisection on a decreasing function f over [lo, hi] in log space.
template <typename F>
double solve_decreasing(F f, double target, double lo, double hi) {
  for (int it = 0; it < 200; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (f(mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi / lo < 1.0 + 1e-12) break;
  }
  return std::sqrt(lo * hi);
}

double mean(std::span<const double> v) {
  CompensatedSum s;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s.value() / static_cast<double>(v.size());
}

double stdev(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double mu = mean(v);
  CompensatedSum s;
  for (double x : v) s += (x - mu) * (x - mu);
  return std::sqrt(s.value() / static_cast<double>(v.size() - 1));
}

}  // namespace

double delta_for_size(std::span<const double> w, double target) {
  if (w.empty() || target >= static_cast<double>(w.size())) return 0.0;
  if (!(target > 0.0)) throw Error(ErrorCode::InvalidArgument, "target sample size must be positive");
  const auto [mn, mx] = std::minmax_element(w.begin(), w.end());
  const double n = static_cast<double>(w.size());
  auto size = [&](double d) {
    CompensatedSum s;
    for (double x : w) s += x / (d + x);
    return s.value();
  };
  return solve_decreasing(size, target, *mn * 1e-12, *mx * n * n / target);
}

double tau_for_size(std::span<const double> m, double target) {
  if (m.empty()) throw Error(ErrorCode::InvalidArgument, "no measure values");
  const auto [mn, mx] = std::minmax_element(m.begin(), m.end());
  if (target >= static_cast<double>(m.size())) return *mn;
  if (!(target > 0.0)) throw Error(ErrorCode::InvalidArgument, "target sample size must be positive");
  CompensatedSum total;
  for (double x : m) total += x;
  auto size = [&](double tau) {
    CompensatedSum s;
    for (double x : m) s += std::min(1.0, x / tau);
    return s.value();
  };
  return solve_decreasing(size, target, *mn, total.value() / target * 2.0);
}

std::vector<BenchRow> bench_samplers(const TimeSeriesTable& t, std::span<const BenchWorkload> workloads,
                                     std::span<const BenchSampler> samplers, const BenchOptions& options) {
  if (options.trials < 2) throw Error(ErrorCode::InvalidArgument, "at least 2 trials required");
  const auto m = t.measure(options.measure);
  const auto timeline = t.distinct_timestamps();
  const auto eval_ts = options.eval_timestamps.empty() ? timeline : options.eval_timestamps;
  const double n = static_cast<double>(t.num_rows());

  std::vector<std::int64_t> train_ts, future_ts;
  const bool with_forecast = options.train_points > 0;
  if (with_forecast) {
    const std::size_t need = options.train_points + static_cast<std::size_t>(options.horizon);
    if (timeline.size() < need) {
      throw Error(ErrorCode::SeriesTooShort, "table has " + std::to_string(timeline.size()) +
                                                 " timestamps, forecasting needs " + std::to_string(need));
    }
    train_ts.assign(timeline.begin(), timeline.begin() + static_cast<std::ptrdiff_t>(options.train_points));
    future_ts.assign(timeline.begin() + static_cast<std::ptrdiff_t>(options.train_points),
                     timeline.begin() + static_cast<std::ptrdiff_t>(need));
  }

  std::vector<BenchRow> rows;
  for (const auto& workload : workloads) {
    const auto matched = matching_rows(t, workload.constraint);
    const double selectivity = n > 0 ? static_cast<double>(matched.size()) / n : 0.0;
    std::vector<double> future_exact;
    if (with_forecast) future_exact = exact_subset_sums(t, workload.constraint, options.measure, future_ts);

    for (const auto& sampler : samplers) {
      for (double rate : options.rates) {
        SamplerConfig config;
        switch (sampler.kind) {
          case BenchSampler::Kind::Uniform: config = SamplerConfig::uniform(std::min(1.0, rate), sampler.name); break;
          case BenchSampler::Kind::Priority: config = SamplerConfig::priority(tau_for_size(m, rate * n), sampler.name); break;
          case BenchSampler::Kind::Gsw:
            config = SamplerConfig::gsw(sampler.weights, delta_for_size(sampler.weights, rate * n), sampler.name);
            break;
        }

        BenchRow row;
        row.sampler = sampler.name;
        row.rate = rate;
        row.selectivity = selectivity;
        const auto queries = PreparedQuery::for_timestamps(t, config, workload.constraint, options.measure, eval_ts);
        std::vector<double> rstd, re;
        for (std::size_t j = 0; j < queries.size(); ++j) {
          if (queries[j].exact() == 0.0) continue;
          const auto rep = rstd_monte_carlo(queries[j], options.trials, trial_seed(options.seed, j));
          rstd.push_back(rep.rstd);
          re.push_back(rep.re);
        }
        row.rstd = mean(rstd);
        row.rstd_sd = stdev(rstd);
        row.re = mean(re);

        if (with_forecast) {
          const auto train = PreparedQuery::for_timestamps(t, config, workload.constraint, options.measure, train_ts);
          std::vector<double> errs, widths;
          for (std::size_t k = 0; k < options.forecast_trials; ++k) {
            const std::uint64_t seed = trial_seed(options.seed ^ 0x66637374ULL, k);
            AggregateSeries series;
            for (const auto& q : train) {
              const double v = q.estimate(seed);
              series.values.push_back(v);
              // Plug-in noise from the measured relative error of this configuration.
              series.noise_var.push_back(row.rstd * row.rstd * v * v);
            }
            ForecastResult fr;
            try {
              auto model = make_model(options.model);
              model->fit(series);
              fr = model->predict(series, options.horizon, options.gamma);
            } catch (const Error& e) {
              if (e.code() != ErrorCode::NonStationary && e.code() != ErrorCode::SeriesTooShort) throw;
              continue;
            }
            CompensatedSum err, width;
            for (std::size_t h = 0; h < fr.horizon(); ++h) {
              err += std::abs(fr.point[h] - future_exact[h]) / std::abs(future_exact[h]);
              width += (fr.hi[h] - fr.lo[h]) / std::abs(future_exact[h]);
            }
            errs.push_back(err.value() / static_cast<double>(fr.horizon()));
            widths.push_back(width.value() / static_cast<double>(fr.horizon()));
          }
          row.forecast_err = mean(errs);
          row.interval_width = mean(widths);
        }
        rows.push_back(row);
      }
    }
  }
  return rows;
}

void write_bench_csv(std::ostream& out, std::span<const BenchRow> rows) {
  out << "sampler,rate,selectivity,rstd,rstd_sd,re,forecast_err,interval_width\n";
  for (const auto& r : rows) {
    out << r.sampler << ',' << format_double(r.rate) << ',' << format_double(r.selectivity) << ','
        << format_double(r.rstd) << ',' << format_double(r.rstd_sd) << ',' << format_double(r.re) << ','
        << format_double(r.forecast_err) << ',' << format_double(r.interval_width) << '\n';
  }
}

}  // namespace gswcast
