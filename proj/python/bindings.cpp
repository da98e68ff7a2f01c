#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "twinstream/error.hpp"
#include "twinstream/experiment.hpp"
#include "twinstream/metrics.hpp"

namespace py = pybind11;
using namespace twinstream;

namespace {

Codec codec_from(const std::string& name) {
  if (auto c = parse_codec(name)) return *c;
  fail(ErrorKind::InvalidInput, "unknown codec '" + name + "'");
}

DeviceClass device_from(const std::string& name) {
  if (auto d = parse_device_class(name)) return *d;
  fail(ErrorKind::InvalidInput, "unknown device class '" + name + "'");
}

NetworkTrace trace_from(const std::vector<std::tuple<double, double, double>>& rows) {
  std::vector<TraceSample> s;
  s.reserve(rows.size());
  for (const auto& [t, bw, lat] : rows) s.push_back({t, bw, lat});
  return NetworkTrace(std::move(s));
}

}  // namespace

PYBIND11_MODULE(_twinstream, m) {
  m.doc() = "Digital-twin adaptive streaming simulator";

  py::register_exception<Error>(m, "Error", PyExc_ValueError);

  py::class_<PreferenceVector>(m, "PreferenceVector")
      .def(py::init<>())
      .def(py::init([](double qa, double rt, double ds, double st, double su) {
             return PreferenceVector::from_array({qa, rt, ds, st, su});
           }),
           py::arg("quality_affinity"), py::arg("rebuffer_tolerance"), py::arg("data_sensitivity"),
           py::arg("switch_tolerance"), py::arg("startup_tolerance"))
      .def_readwrite("quality_affinity", &PreferenceVector::quality_affinity)
      .def_readwrite("rebuffer_tolerance", &PreferenceVector::rebuffer_tolerance)
      .def_readwrite("data_sensitivity", &PreferenceVector::data_sensitivity)
      .def_readwrite("switch_tolerance", &PreferenceVector::switch_tolerance)
      .def_readwrite("startup_tolerance", &PreferenceVector::startup_tolerance)
      .def("to_list", [](const PreferenceVector& p) {
        const auto a = p.to_array();
        return std::vector<double>(a.begin(), a.end());
      })
      .def(py::self == py::self)
      .def("__repr__", [](const PreferenceVector& p) {
        std::ostringstream s;
        s << "PreferenceVector(" << p.quality_affinity << ", " << p.rebuffer_tolerance << ", "
          << p.data_sensitivity << ", " << p.switch_tolerance << ", " << p.startup_tolerance << ")";
        return s.str();
      });

  m.def("ema_update", &ema_update, py::arg("old"), py::arg("observed"), py::arg("alpha"));

  py::class_<TwinProfile>(m, "TwinProfile")
      .def(py::init<std::string, PreferenceVector, double, std::size_t>(), py::arg("user_id"),
           py::arg("pref") = PreferenceVector{}, py::arg("alpha") = kDefaultLearningRate,
           py::arg("history_capacity") = kDefaultHistoryCapacity)
      .def_property_readonly("user_id", &TwinProfile::user_id)
      .def_property_readonly("pref", &TwinProfile::pref)
      .def_property_readonly("alpha", &TwinProfile::alpha)
      .def_property_readonly("history_size", [](const TwinProfile& p) { return p.history().size(); });

  m.def(
      "update_profile",
      [](const TwinProfile& p, const PreferenceVector& observed) {
        Observation o;
        o.u_obs = observed;
        return update_profile(p, o);
      },
      py::arg("profile"), py::arg("observed"));

  py::class_<PreferenceTree>(m, "PreferenceTree")
      .def("classify", [](const PreferenceTree& t, const std::vector<double>& x) { return static_cast<int>(t.classify(x)); })
      .def_property_readonly("depth", &PreferenceTree::depth)
      .def_property_readonly("node_count", &PreferenceTree::node_count);

  m.def(
      "train_tree",
      [](const std::vector<std::vector<double>>& x, const std::vector<int>& y, std::size_t max_depth,
         std::size_t min_leaf) {
        std::vector<PreferenceClass> labels;
        for (int v : y) {
          if (v < 0 || v >= static_cast<int>(kPreferenceClassCount)) fail(ErrorKind::InvalidInput, "label out of range");
          labels.push_back(static_cast<PreferenceClass>(v));
        }
        return train_tree(x, labels, TreeParams{max_depth, min_leaf});
      },
      py::arg("features"), py::arg("labels"), py::arg("max_depth") = 4, py::arg("min_leaf") = 1);

  m.def(
      "predict_throughput",
      [](const std::vector<double>& samples, std::size_t window) { return predict_throughput(samples, window); },
      py::arg("samples_mbps"), py::arg("window") = kThroughputWindow);

  m.def(
      "download_time",
      [](const std::vector<std::tuple<double, double, double>>& trace, double t0, double bits) {
        return download_time(trace_from(trace), t0, bits);
      },
      py::arg("trace"), py::arg("t0_s"), py::arg("bits"),
      "Seconds to fetch `bits` starting at t0 over a piecewise-constant trace of (t_start_s, mbps, latency_ms).");

  py::class_<Rendition>(m, "Rendition")
      .def(py::init([](std::string id, std::int64_t kbps, int w, int h, double fps, const std::string& codec) {
             Rendition r{std::move(id), kbps, w, h, fps, codec_from(codec)};
             validate(r);
             return r;
           }),
           py::arg("id"), py::arg("bitrate_kbps"), py::arg("width"), py::arg("height"), py::arg("framerate_fps") = 30.0,
           py::arg("codec") = "h264")
      .def_readonly("id", &Rendition::id)
      .def_readonly("bitrate_kbps", &Rendition::bitrate_kbps)
      .def_readonly("width", &Rendition::width)
      .def_readonly("height", &Rendition::height)
      .def_readonly("framerate_fps", &Rendition::framerate_fps)
      .def_property_readonly("codec", [](const Rendition& r) { return std::string(to_string(r.codec)); })
      .def(py::self == py::self)
      .def("__repr__", [](const Rendition& r) { return "Rendition(" + r.id + ", " + std::to_string(r.bitrate_kbps) + " kbps)"; });

  m.def("default_catalog", &default_catalog);
  m.def("load_catalog", &load_catalog, py::arg("path"));

  m.def(
      "optimize_ladder",
      [](const std::vector<Rendition>& catalog, const PreferenceVector& pref, std::int64_t budget_kbps,
         std::size_t max_size, std::int64_t floor_kbps, const std::string& device) {
        const auto ladder = optimize_ladder(catalog, TwinProfile("py", pref), {budget_kbps, max_size, floor_kbps},
                                            default_device(device_from(device)));
        return std::vector<Rendition>(ladder.rungs().begin(), ladder.rungs().end());
      },
      py::arg("catalog"), py::arg("pref"), py::arg("budget_kbps"), py::arg("max_size"), py::arg("floor_kbps"),
      py::arg("device") = "desktop");

  m.def(
      "select_quality",
      [](const std::vector<Rendition>& ladder, const PreferenceVector& pref, double buffer_s, double throughput_mbps,
         double q_target_mbps, std::optional<std::string> previous, const std::string& device,
         double segment_duration_s, double latency_ms) {
        DecisionContext c;
        c.buffer_level_s = buffer_s;
        c.previous_rendition = std::move(previous);
        c.net.predicted_throughput_mbps = throughput_mbps;
        c.net.latency_ms = latency_ms;
        c.segment_duration_s = segment_duration_s;
        return select_quality(BitrateLadder(ladder), default_device(device_from(device)), TwinProfile("py", pref), c,
                              q_target_mbps);
      },
      py::arg("ladder"), py::arg("pref"), py::arg("buffer_s"), py::arg("throughput_mbps"), py::arg("q_target_mbps"),
      py::arg("previous") = py::none(), py::arg("device") = "desktop", py::arg("segment_duration_s") = 4.0,
      py::arg("latency_ms") = 0.0);

  m.def(
      "run_report",
      [](const std::filesystem::path& config, const std::map<std::string, std::string>& overrides,
         std::size_t threads) {
        const auto c = load_experiment_config(config, overrides);
        CohortResult r;
        {
          py::gil_scoped_release nogil;
          r = run_configured_cohort(c, threads);
        }
        return py::make_tuple(report_json(r.report), report_tables_csv(r.report));
      },
      py::arg("config"), py::arg("overrides") = std::map<std::string, std::string>{}, py::arg("threads") = 0,
      "Runs a configured experiment in memory; returns (report_json, tables_csv).");

  m.def(
      "run_experiment",
      [](const std::filesystem::path& config, const std::map<std::string, std::string>& overrides, bool quiet) {
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release nogil;
          code = run_experiment(config, overrides, quiet, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("config"), py::arg("overrides") = std::map<std::string, std::string>{}, py::arg("quiet") = true,
      "Same as `twinstream run`; returns (exit_code, stdout, stderr).");
}
