#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "flatkhinchin/circle_measure.hpp"
#include "flatkhinchin/cylinders.hpp"
#include "flatkhinchin/experiments.hpp"
#include "flatkhinchin/flow.hpp"
#include "flatkhinchin/iet.hpp"
#include "flatkhinchin/io.hpp"
#include "flatkhinchin/series.hpp"
#include "flatkhinchin/surface.hpp"

namespace py = pybind11;
using namespace flatkhinchin;

namespace {

SurfacePoint as_point(int poly, double x, double y) { return {poly, {x, y}}; }

py::tuple point_tuple(const SurfacePoint& p) {
  return py::make_tuple(p.poly, p.pos.x, p.pos.y);
}

py::dict cylinder_dict(const Cylinder& c) {
  py::dict d;
  d["tau"] = c.direction.tau;
  d["core_length"] = c.core_length;
  d["height"] = c.height;
  d["area"] = c.area_fraction;
  d["witness"] = point_tuple(c.witness);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "straight-line flows, periodic cylinders, and first-return "
            "interval exchanges on translation surfaces";

  py::register_exception<Error>(m, "FlatSurfaceError");

  py::class_<TranslationSurface>(m, "Surface")
      .def_static("builtin", &builtin_surface, py::arg("name"),
                  "square_torus, L(a,b), or regular_octagon")
      .def_static("from_file", &surface_from_file)
      .def_static("from_json", &surface_from_json_text)
      .def_property_readonly("genus", &TranslationSurface::genus)
      .def_property_readonly("sigma", &TranslationSurface::sigma)
      .def_property_readonly("area", &TranslationSurface::total_area)
      .def_property_readonly("multiplicity_sum", &TranslationSurface::multiplicity_sum)
      .def("shortest_saddle", &TranslationSurface::shortest_saddle)
      .def("info_json",
           [](const TranslationSurface& s) { return surface_info_json(s).dump(); })
      .def("to_json",
           [](const TranslationSurface& s) { return surface_to_json(s).dump(); });

  m.def(
      "flow_point",
      [](const TranslationSurface& s, int poly, double x, double y, double tau,
         double t) {
        return point_tuple(flow_point(s, as_point(poly, x, y), Direction(tau), t));
      },
      py::arg("surface"), py::arg("poly"), py::arg("x"), py::arg("y"),
      py::arg("tau"), py::arg("t"));

  m.def(
      "trace",
      [](const TranslationSurface& s, int poly, double x, double y, double tau,
         double t_max) {
        py::list out;
        for (const auto& ev : trace(s, as_point(poly, x, y), Direction(tau), t_max)) {
          const char* kind = ev.kind == TrajectoryEvent::Kind::edge_crossing
                                 ? "edge_crossing"
                                 : ev.kind == TrajectoryEvent::Kind::singularity_hit
                                       ? "singularity_hit"
                                       : "time_reached";
          out.append(py::make_tuple(kind, ev.time, point_tuple(ev.point)));
        }
        return out;
      },
      py::arg("surface"), py::arg("poly"), py::arg("x"), py::arg("y"),
      py::arg("tau"), py::arg("t_max"));

  m.def(
      "distance",
      [](const TranslationSurface& s, py::tuple a, py::tuple b,
         double r_max) -> py::object {
        DistanceOptions opt;
        opt.r_max = r_max;
        auto d = distance(s,
                          as_point(a[0].cast<int>(), a[1].cast<double>(),
                                   a[2].cast<double>()),
                          as_point(b[0].cast<int>(), b[1].cast<double>(),
                                   b[2].cast<double>()),
                          opt);
        if (!d) return py::none();
        return py::float_(*d);
      },
      py::arg("surface"), py::arg("x"), py::arg("y"), py::arg("r_max") = -1.0);

  m.def(
      "saddle_connections",
      [](const TranslationSurface& s, double L) {
        py::list out;
        for (const auto& sc : enumerate_saddle_connections(s, L))
          out.append(py::make_tuple(sc.holonomy.x, sc.holonomy.y));
        return out;
      },
      py::arg("surface"), py::arg("length"));

  m.def(
      "cylinders",
      [](const TranslationSurface& s, double L, double min_area) {
        py::list out;
        double cut = min_area > 0 ? min_area : s.sigma();
        for (const auto& c : enumerate_cylinders(s, L, cut))
          out.append(cylinder_dict(c));
        return out;
      },
      py::arg("surface"), py::arg("length"), py::arg("min_area") = -1.0);

  py::class_<Iet>(m, "Iet")
      .def_readonly("domain_length", &Iet::domain_length)
      .def_readonly("breakpoints", &Iet::breakpoints)
      .def_readonly("translations", &Iet::translations)
      .def_readonly("closed", &Iet::closed)
      .def("apply", &Iet::apply, py::arg("x"), py::arg("n") = 1);

  m.def(
      "first_return_iet",
      [](const TranslationSurface& s, double tau, py::tuple base, double base_tau,
         double length) {
        Transversal t(s,
                      as_point(base[0].cast<int>(), base[1].cast<double>(),
                               base[2].cast<double>()),
                      Direction(base_tau), length);
        return first_return_iet(s, Direction(tau), t);
      },
      py::arg("surface"), py::arg("tau"),
      py::arg("base") = py::make_tuple(0, 0.0, 0.0), py::arg("base_tau") = 0.0,
      py::arg("length") = 1.0);

  m.def(
      "recurrence_scan",
      [](const Iet& iet, double x, const std::string& seq, long N) {
        auto scan = recurrence_scan(iet, x, SequenceSpec::parse(seq), N);
        py::dict d;
        d["hits"] = scan.hits;
        d["hit_distances"] = scan.hit_distances;
        d["min_ratio"] = scan.min_ratio;
        d["tail_min_ratio"] = scan.tail_min_ratio;
        d["first_hit"] = scan.first_hit;
        return d;
      },
      py::arg("iet"), py::arg("x"), py::arg("seq") = "harmonic:1",
      py::arg("N") = 100000);

  m.def(
      "union_measure",
      [](const std::vector<std::pair<double, double>>& arcs, double j0, double j1) {
        std::vector<Arc> a;
        for (auto [c, r] : arcs) a.push_back({c, r});
        return union_measure(a, j0, j1);
      },
      py::arg("arcs"), py::arg("j0") = 0.0, py::arg("j1") = 1.0);

  m.def("covers_circle", [](const std::vector<std::pair<double, double>>& arcs) {
    std::vector<Arc> a;
    for (auto [c, r] : arcs) a.push_back({c, r});
    auto res = covers_circle(a);
    return py::make_tuple(res.covers, res.gap_center, res.gap_length);
  });

  m.def(
      "minimal_covering_constant",
      [](const TranslationSurface& s, double L) {
        return minimal_covering_constant(s, L).c_emp;
      },
      py::arg("surface"), py::arg("length"));

  m.def(
      "partial_sums",
      [](const std::string& gen, long K) {
        auto sums = partial_sums(SequenceSpec::parse(gen), K);
        py::dict d;
        d["sum_i_ai"] = sums.sum_i_ai;
        d["sum_a_floor_sqrt"] = sums.sum_a_floor_sqrt;
        d["sandwich_lower"] = sums.sandwich_lower;
        d["sandwich_upper"] = sums.sandwich_upper;
        return d;
      },
      py::arg("gen"), py::arg("K") = 1000000);

  m.def("divergence_verdict", [](const std::string& gen) {
    auto rep = divergence_verdict(SequenceSpec::parse(gen));
    py::dict d;
    d["sum_ai"] = verdict_name(rep.sum_ai);
    d["sum_i_ai"] = verdict_name(rep.sum_i_ai);
    d["sum_a_floor_sqrt"] = verdict_name(rep.sum_a_floor_sqrt);
    return d;
  });

  m.def(
      "run_khinchin_flow",
      [](const TranslationSurface& s, const std::string& surface_name,
         const std::string& f, int samples, double horizon, std::uint64_t seed,
         int threads) {
        KhinchinFlowConfig cfg;
        cfg.surface_name = surface_name;
        cfg.f = SequenceSpec::parse(f);
        cfg.samples = samples;
        cfg.horizon = horizon;
        cfg.seed = seed;
        cfg.threads = threads;
        return run_khinchin_flow(s, cfg).dump();
      },
      py::arg("surface"), py::arg("surface_name") = "surface",
      py::arg("f") = "harmonic:1", py::arg("samples") = 32,
      py::arg("horizon") = 1000.0, py::arg("seed") = 1, py::arg("threads") = 1);

  m.def(
      "run_iet_recurrence",
      [](const TranslationSurface& s, const std::string& surface_name,
         const std::string& a, int samples, long N, std::uint64_t seed,
         int threads) {
        IetRecurrenceConfig cfg;
        cfg.surface_name = surface_name;
        cfg.a = SequenceSpec::parse(a);
        cfg.samples = samples;
        cfg.N = N;
        cfg.seed = seed;
        cfg.threads = threads;
        return run_iet_khinchin(s, cfg).dump();
      },
      py::arg("surface"), py::arg("surface_name") = "surface",
      py::arg("a") = "harmonic:1", py::arg("samples") = 32, py::arg("N") = 10000,
      py::arg("seed") = 1, py::arg("threads") = 1);
}
