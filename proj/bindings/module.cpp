#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <string>
#include <tuple>
#include <vector>

#include "rankshift/cli_io.hpp"
#include "rankshift/detector.hpp"
#include "rankshift/synth_bench.hpp"
#include "rankshift/theory_bounds.hpp"

namespace py = pybind11;
using namespace pybind11::literals;

namespace rs = rankshift;

namespace {

// (src, dst, weight) triples into a graph on n nodes.
rs::GraphState build_graph(std::size_t n, const std::vector<std::tuple<rs::NodeId, rs::NodeId, rs::Weight>>& edges) {
  rs::GraphState g(n);
  for (const auto& [u, v, w] : edges) {
    if (u >= n || v >= n) {
      throw rs::UnknownNode("edge endpoint outside node range");
    }
    g.add_weight(u, v, w);
  }
  return g;
}

rs::MetricSet metric_from(const std::string& s) {
  if (s == "s") return rs::MetricSet::S;
  if (s == "w") return rs::MetricSet::W;
  if (s == "both") return rs::MetricSet::Both;
  throw rs::InvalidConfig("metric must be s, w or both");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Streaming anomaly detection on dynamic graphs";

  auto base = py::register_exception<rs::Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<rs::InvalidConfig>(m, "InvalidConfig", base.ptr());
  py::register_exception<rs::ParseError>(m, "ParseError", base.ptr());
  py::register_exception<rs::OutOfOrderTimestamp>(m, "OutOfOrderTimestamp", base.ptr());
  py::register_exception<rs::UnknownNode>(m, "UnknownNode", base.ptr());
  py::register_exception<rs::DeleteNonexistentEdge>(m, "DeleteNonexistentEdge", base.ptr());
  py::register_exception<rs::KTooLarge>(m, "KTooLarge", base.ptr());
  py::register_exception<rs::EmptyGroundTruth>(m, "EmptyGroundTruth", base.ptr());
  py::register_exception<rs::MisalignedWindows>(m, "MisalignedWindows", base.ptr());

  py::class_<rs::EdgeEvent>(m, "EdgeEvent")
      .def(py::init([](double t, rs::NodeId src, rs::NodeId dst, int sign, bool label) {
             return rs::EdgeEvent{t, src, dst, sign, label};
           }),
           "timestamp"_a, "src"_a, "dst"_a, "sign"_a = 1, "label"_a = false)
      .def_readwrite("timestamp", &rs::EdgeEvent::timestamp)
      .def_readwrite("src", &rs::EdgeEvent::src)
      .def_readwrite("dst", &rs::EdgeEvent::dst)
      .def_readwrite("sign", &rs::EdgeEvent::sign)
      .def_readwrite("label", &rs::EdgeEvent::label)
      .def("__repr__", [](const rs::EdgeEvent& e) {
        return "EdgeEvent(" + std::to_string(e.timestamp) + ", " + std::to_string(e.src) + ", " +
               std::to_string(e.dst) + ")";
      });

  py::class_<rs::AnomalyRecord>(m, "AnomalyRecord")
      .def_readonly("window_index", &rs::AnomalyRecord::window_index)
      .def_readonly("t_start", &rs::AnomalyRecord::t_start)
      .def_readonly("score", &rs::AnomalyRecord::score)
      .def_readonly("score_s", &rs::AnomalyRecord::score_s)
      .def_readonly("score_w", &rs::AnomalyRecord::score_w)
      .def_readonly("l1_d1s", &rs::AnomalyRecord::l1_d1s)
      .def_readonly("l1_d2s", &rs::AnomalyRecord::l1_d2s)
      .def_readonly("l1_d1w", &rs::AnomalyRecord::l1_d1w)
      .def_readonly("l1_d2w", &rs::AnomalyRecord::l1_d2w)
      .def_readonly("warmup", &rs::AnomalyRecord::warmup)
      .def_property_readonly("top_nodes", [](const rs::AnomalyRecord& r) {
        std::vector<std::tuple<rs::NodeId, double, std::string>> out;
        for (const auto& a : r.top_nodes) {
          out.emplace_back(a.node, a.magnitude, std::string(rs::channel_name(a.channel)));
        }
        return out;
      });

  m.def(
      "score_s",
      [](std::size_t n, const std::vector<std::tuple<rs::NodeId, rs::NodeId, rs::Weight>>& edges,
         double damping, double epsilon) {
        return rs::batch_score_s(build_graph(n, edges), {damping, epsilon}).values;
      },
      "n"_a, "edges"_a, "damping"_a = 0.5, "epsilon"_a = 1e-9,
      "Structural PageRank of (src, dst, weight) edges on n nodes.");
  m.def(
      "score_w",
      [](std::size_t n, const std::vector<std::tuple<rs::NodeId, rs::NodeId, rs::Weight>>& edges,
         double damping, double epsilon) {
        return rs::batch_score_w(build_graph(n, edges), {damping, epsilon}).values;
      },
      "n"_a, "edges"_a, "damping"_a = 0.5, "epsilon"_a = 1e-9,
      "Weighted PageRank of (src, dst, weight) edges on n nodes.");

  m.def(
      "detect",
      [](const std::vector<rs::EdgeEvent>& events, std::size_t n, double window, double damping,
         double epsilon, std::size_t warmup, const std::string& metric, std::size_t topk) {
        rs::DetectorConfig cfg;
        cfg.window_width = window;
        cfg.solver.damping = damping;
        cfg.solver.epsilon = epsilon;
        cfg.warmup_windows = warmup;
        cfg.metrics = metric_from(metric);
        cfg.topk = topk;
        py::gil_scoped_release release;
        return rs::run_detector(events, n, cfg);
      },
      "events"_a, "n"_a, "window"_a = 3600.0, "damping"_a = 0.5, "epsilon"_a = 1e-3,
      "warmup"_a = 256, "metric"_a = "both", "topk"_a = 10,
      "Scores every window of a time-ordered stream.");

  m.def(
      "generate",
      [](std::size_t nodes, std::size_t edges, std::size_t timestamps, std::uint64_t seed, double skew) {
        rs::GeneratorConfig cfg;
        cfg.n_nodes = nodes;
        cfg.n_base_edges = edges;
        cfg.n_timestamps = timestamps;
        cfg.seed = seed;
        cfg.skew = skew;
        return rs::generate_stream(cfg);
      },
      "nodes"_a = 1000, "edges"_a = 8100, "timestamps"_a = 2700, "seed"_a = 0, "skew"_a = 0.25);

  m.def(
      "inject",
      [](const std::vector<rs::EdgeEvent>& events, std::size_t n, const std::string& kind,
         std::size_t count, std::size_t clique, rs::Weight burst, std::uint64_t seed,
         std::int64_t first, std::int64_t end) {
        rs::InjectionPlan plan;
        if (kind != "s" && kind != "w") {
          throw rs::InvalidConfig("kind must be s or w");
        }
        plan.kind = kind == "s" ? rs::InjectionKind::S : rs::InjectionKind::W;
        plan.n_events = count;
        plan.clique_size = clique;
        plan.burst_weight = burst;
        plan.seed = seed;
        plan.first_timestamp = first;
        plan.end_timestamp = end;
        auto out = rs::inject(events, n, plan);
        return py::make_tuple(out.events, out.timestamps);
      },
      "events"_a, "n"_a, "kind"_a, "count"_a = 50, "clique"_a = 8, "burst"_a = 70, "seed"_a = 0,
      "first"_a = 300, "end"_a = 2700, "Returns (events, injection timestamps).");

  m.def(
      "label_windows",
      [](const std::vector<rs::EdgeEvent>& events, double window, std::size_t min_attack_edges) {
        return rs::label_windows(events, window, min_attack_edges);
      },
      "events"_a, "window"_a = 1.0, "min_attack_edges"_a = 50);

  m.def(
      "precision_at_k",
      [](const std::vector<rs::AnomalyRecord>& records, const rs::WindowLabels& labels,
         std::size_t k, const std::string& column) {
        std::vector<rs::ScoredWindow> w;
        for (const auto& r : records) {
          const double s = column == "score_s" ? r.score_s : column == "score_w" ? r.score_w : r.score;
          w.push_back({r.window_index, s, r.warmup});
        }
        return rs::precision_at_k(w, labels, k);
      },
      "records"_a, "labels"_a, "k"_a, "column"_a = "score");

  m.def("bound_structural_delta", &rs::bound_structural_delta, "dm"_a, "k"_a);
  m.def(
      "bound_weight_delta",
      [](double dm, double m_u, double mm) {
        const auto b = rs::bound_weight_delta(dm, m_u, mm);
        return py::make_tuple(b.aw_bound, b.bw_bound, b.aw_exact, b.bw_exact);
      },
      "dm"_a, "m_u"_a, "m"_a);
  m.def(
      "bound_theorem_s",
      [](double c, double k, double dm, double d2m, double dt) {
        rs::ChangeProfile p;
        p.c = c, p.k = k, p.dm = dm, p.d2m = d2m, p.dt = dt;
        const auto b = rs::bound_theorem_s(p);
        return py::make_tuple(b.b1, b.b2);
      },
      "c"_a, "k"_a, "dm"_a, "d2m"_a, "dt"_a = 1.0);
  m.def(
      "bound_theorem_w",
      [](double c, double k, double m_u, double mm, double dm, double d2m, double dt) {
        rs::ChangeProfile p;
        p.c = c, p.k = k, p.m_u = m_u, p.m = mm, p.dm = dm, p.d2m = d2m, p.dt = dt;
        const auto b = rs::bound_theorem_w(p);
        return py::make_tuple(b.b1, b.b2);
      },
      "c"_a, "k"_a, "m_u"_a, "m"_a, "dm"_a, "d2m"_a, "dt"_a = 1.0);

  m.def(
      "run_score",
      [](const std::filesystem::path& input, const std::filesystem::path& out, double window,
         std::size_t warmup, const std::string& metric, std::size_t topk) {
        rs::ScoreOptions opt;
        opt.input = input;
        opt.out_dir = out;
        opt.detector.window_width = window;
        opt.detector.warmup_windows = warmup;
        opt.detector.metrics = metric_from(metric);
        opt.detector.topk = topk;
        rs::run_score(opt);
      },
      "input"_a, "out"_a, "window"_a = 3600.0, "warmup"_a = 256, "metric"_a = "both", "topk"_a = 10);
}
