#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gswcast/engine.hpp"
#include "gswcast/error.hpp"
#include "gswcast/estimation.hpp"
#include "gswcast/exact.hpp"
#include "gswcast/forecast.hpp"
#include "gswcast/grouping.hpp"
#include "gswcast/samplers.hpp"
#include "gswcast/synth.hpp"
#include "gswcast/task.hpp"

namespace py = pybind11;
using namespace gswcast;

namespace {

TimeSeriesTable table_from_csv(const std::string& csv, const std::string& schema) {
  std::istringstream sin(schema);
  std::istringstream in(csv);
  return load_csv(in, parse_schema(sin));
}

std::string table_to_csv(const TimeSeriesTable& t) {
  std::ostringstream out;
  write_csv(out, t);
  return out.str();
}

std::vector<double> to_vector(std::span<const double> s) { return {s.begin(), s.end()}; }

}  // namespace

PYBIND11_MODULE(_gswcast, m) {
  m.doc() = "GSW sampling, subset-sum estimation and ARIMA forecasting over time-series tables";

  static py::exception<Error> error(m, "Error");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = error;
      PyErr_SetObject(exc.ptr(), py::make_tuple(std::string(to_string(e.code())), e.what()).ptr());
    }
  });

  py::class_<TimeSeriesTable>(m, "Table")
      .def_static("from_csv", &table_from_csv, py::arg("csv"), py::arg("schema"))
      .def("to_csv", &table_to_csv)
      .def_property_readonly("num_rows", &TimeSeriesTable::num_rows)
      .def("measure", [](const TimeSeriesTable& t, const std::string& name) { return to_vector(t.measure(name)); })
      .def("measure_names", &TimeSeriesTable::measure_names)
      .def("timestamps", &TimeSeriesTable::distinct_timestamps);

  py::class_<Constraint>(m, "Constraint")
      .def("__str__", &Constraint::to_string)
      .def("__eq__", [](const Constraint& a, const Constraint& b) { return a == b; });
  m.def("parse_constraint", [](const std::string& text) { return parse_constraint(text); });

  m.def("exact_subset_sum",
        [](const TimeSeriesTable& t, const std::string& where, const std::string& measure, std::int64_t ts) {
          return exact_subset_sum(t, parse_constraint(where), measure, ts);
        });

  py::class_<GswSample>(m, "GswSample")
      .def_readonly("delta", &GswSample::delta)
      .def_readonly("seed", &GswSample::seed)
      .def_readonly("row_id", &GswSample::row_id)
      .def_readonly("u", &GswSample::u)
      .def_readonly("weight", &GswSample::weight)
      .def("__len__", &GswSample::size);
  m.def(
      "gsw_draw",
      [](const TimeSeriesTable& t, const std::vector<double>& w, double delta, std::uint64_t seed) {
        return gsw_draw(t, w, delta, seed);
      },
      py::arg("table"), py::arg("weights"), py::arg("delta"), py::arg("seed"));
  m.def("gsw_update", [](const GswSample& s, double delta, const TimeSeriesTable& rows, const std::vector<double>& w) {
    return gsw_update(s, delta, rows, w);
  });

  py::class_<Estimate>(m, "Estimate")
      .def_readonly("value", &Estimate::value)
      .def_readonly("rows_used", &Estimate::rows_used)
      .def_readonly("variance", &Estimate::variance)
      .def_readonly("theta", &Estimate::theta)
      .def_readonly("bound", &Estimate::bound);
  m.def("estimate_sum", [](const GswSample& s, const std::string& where, const std::string& measure, std::int64_t ts) {
    return estimate_sum(s, parse_constraint(where), measure, ts);
  });

  m.def("consistency", [](const std::vector<double>& mv, const std::vector<double>& w) {
    const auto c = consistency(mv, w);
    return py::make_tuple(c.theta_lo, c.theta_hi, c.theta);
  });
  m.def("expected_sample_size", [](const std::vector<double>& w, double delta) { return expected_sample_size(w, delta); });
  m.def("rstd_bound", &rstd_bound, py::arg("theta"), py::arg("expected_size"));
  m.def("mean_weights", [](const std::vector<std::vector<double>>& measures, const std::string& kind) {
    std::vector<MeasureSpan> spans(measures.begin(), measures.end());
    return mean_weights(spans, mean_kind_from_string(kind));
  });
  m.def("l1_distance", [](const std::vector<double>& a, const std::vector<double>& b) { return l1_distance(a, b); });

  py::class_<ArmaModel>(m, "ArmaModel")
      .def(py::init<>())
      .def_readwrite("p", &ArmaModel::p)
      .def_readwrite("d", &ArmaModel::d)
      .def_readwrite("q", &ArmaModel::q)
      .def_readwrite("alpha", &ArmaModel::alpha)
      .def_readwrite("beta", &ArmaModel::beta)
      .def_readwrite("sigma_u2", &ArmaModel::sigma_u2)
      .def_readwrite("mean", &ArmaModel::mean)
      .def("summary", &ArmaModel::summary);
  py::class_<ForecastResult>(m, "ForecastResult")
      .def_readonly("point", &ForecastResult::point)
      .def_readonly("lo", &ForecastResult::lo)
      .def_readonly("hi", &ForecastResult::hi)
      .def_readonly("gamma", &ForecastResult::gamma);

  auto series = [](const std::vector<double>& values, const std::vector<double>& noise) {
    AggregateSeries s;
    s.values = values;
    s.noise_var = noise;
    return s;
  };
  m.def(
      "fit_arima",
      [series](const std::vector<double>& values, int p, int d, int q, const std::vector<double>& noise) {
        return fit_arima(series(values, noise), p, d, q);
      },
      py::arg("values"), py::arg("p"), py::arg("d"), py::arg("q"), py::arg("noise_var") = std::vector<double>{});
  m.def(
      "forecast",
      [series](const ArmaModel& model, const std::vector<double>& values, int h, double gamma,
               const std::vector<double>& noise) { return forecast(model, series(values, noise), h, gamma); },
      py::arg("model"), py::arg("values"), py::arg("h"), py::arg("gamma") = 0.9,
      py::arg("noise_var") = std::vector<double>{});
  m.def("select_order", [series](const std::vector<double>& values, int p_max, int d_max, int q_max) {
    const auto o = select_order(series(values, {}), p_max, d_max, q_max);
    return py::make_tuple(o.p, o.d, o.q);
  });
  m.def("noisy_variance_arma11", &noisy_variance_arma11);
  m.def("normal_quantile", &normal_quantile);

  m.def("parse_task", [](const std::string& text) { return parse_task(text).to_string(); },
        "Parses a FORECAST statement and returns its canonical text");
  m.def("run_task_exact", [](const std::string& text, const TimeSeriesTable& t) {
    return run_task_exact(parse_task(text), t).to_text(false);
  });
  m.def("run_task_sampled",
        [](const std::string& text, const TimeSeriesTable& t, const std::string& measure,
           const std::vector<double>& deltas, std::uint64_t seed) {
          const auto w = t.measure(measure);
          const auto ml = build_multilayer(t, w, deltas, seed, WeightSource::single(measure));
          return run_task(parse_task(text), ml, t.distinct_timestamps()).to_text(false);
        });

  m.def(
      "synth_table",
      [](std::size_t entities, std::size_t timestamps, std::uint64_t seed) {
        SynthConfig cfg;
        cfg.entities = entities;
        cfg.timestamps = timestamps;
        cfg.seed = seed;
        return synth_table(cfg).table;
      },
      py::arg("entities") = 1000, py::arg("timestamps") = 30, py::arg("seed") = 1);
}
