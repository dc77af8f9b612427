#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hadamard/convex_solvers.hpp"
#include "hadamard/scenario.hpp"

namespace py = pybind11;
using namespace hadamard;

namespace {

std::vector<Point> points_of(const ModelSpace& s, const std::vector<Vector>& coords) {
  std::vector<Point> out;
  for (const auto& c : coords) out.push_back(s.make_point(c));
  return out;
}

py::dict defect_dict(const DefectReport& r) {
  py::dict d;
  d["lhs"] = r.lhs;
  d["rhs"] = r.rhs;
  d["defect"] = r.defect;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "CAT(0) model spaces, solvers and scenario runner";
  m.attr("__version__") = kVersion;

  py::register_exception<SchemaError>(m, "SchemaError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ConstructionError>(m, "ConstructionError", PyExc_ValueError);
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);

  py::class_<ModelSpace, std::shared_ptr<ModelSpace>>(m, "Space")
      .def_property_readonly("name", &ModelSpace::name)
      .def_property_readonly("kind", [](const ModelSpace& s) { return to_string(s.kind()); })
      .def("base_point", [](const ModelSpace& s) { return Vector(s.base_point().coords); })
      .def("contains", [](const ModelSpace& s, const Vector& x) { return s.coord_contains(x); })
      .def("distance", [](const ModelSpace& s, const Vector& x, const Vector& y) {
        return s.distance(s.make_point(x), s.make_point(y));
      })
      .def("geodesic_point", [](const ModelSpace& s, const Vector& x, const Vector& y, double t) {
        return Vector(s.geodesic_point(s.make_point(x), s.make_point(y), t).coords);
      })
      .def("__repr__", &ModelSpace::name);

  auto unconst = [](SpacePtr p) { return std::const_pointer_cast<ModelSpace>(p); };
  m.def("euclidean", [=](int dim) { return unconst(make_euclidean(dim)); });
  m.def("hyperbolic", [=](int dim) { return unconst(make_hyperbolic(dim)); });
  m.def("spd", [=](int n) { return unconst(make_spd(n)); });
  m.def("tree", [=](int vertices, const std::vector<std::tuple<int, int, double>>& edges) {
    std::vector<MetricTree::Edge> e;
    for (const auto& [u, v, len] : edges) e.push_back({u, v, len});
    return unconst(make_tree(vertices, e));
  }, py::arg("vertices"), py::arg("edges"));
  m.def("product", [=](const std::vector<std::shared_ptr<ModelSpace>>& factors) {
    return unconst(make_product({factors.begin(), factors.end()}));
  });

  m.def("check_cn", [](const ModelSpace& s, const Vector& x, const Vector& c, const Vector& cp) {
    return defect_dict(check_cn(s, s.make_point(x), s.make_point(c), s.make_point(cp)));
  });
  m.def("check_reshetnyak", [](const ModelSpace& s, const Vector& x, const Vector& xp, const Vector& y,
                               const Vector& yp, double eps) {
    return defect_dict(check_reshetnyak(s, s.make_point(x), s.make_point(xp), s.make_point(y),
                                        s.make_point(yp), eps));
  });
  m.def("barycenter", [](const ModelSpace& s, const std::vector<Vector>& pts, const std::vector<double>& w) {
    return Vector(barycenter(s, points_of(s, pts), w).point.coords);
  });
  m.def("circumcenter", [](const ModelSpace& s, const std::vector<Vector>& pts) {
    const CircumResult r = circumcenter(s, points_of(s, pts));
    return py::make_tuple(Vector(r.center.coords), r.radius);
  });

  m.def("run_scenario_json", [](const std::string& text, std::optional<std::uint64_t> seed,
                                std::optional<std::size_t> trials) {
    RunOptions o;
    o.seed = seed;
    o.trials = trials;
    return report_json(run_scenario_text(text, o));
  }, py::arg("text"), py::arg("seed") = py::none(), py::arg("trials") = py::none());
  m.def("fuzz_json", [](const std::vector<std::string>& spaces, std::size_t trials, std::uint64_t seed) {
    return report_json(run_fuzz(spaces, trials, seed));
  }, py::arg("spaces"), py::arg("trials"), py::arg("seed") = 0);
}
