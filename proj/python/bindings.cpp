#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "l2ext/bergman.hpp"
#include "l2ext/certify.hpp"
#include "l2ext/cli.hpp"
#include "l2ext/constants.hpp"
#include "l2ext/denominator.hpp"
#include "l2ext/weights.hpp"

namespace py = pybind11;
using namespace l2ext;

namespace {

py::tuple run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"l2ext"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  RunConfig cfg;
  int code;
  if (auto early = parse_args(static_cast<int>(argv.size()), argv.data(), cfg, out, err)) {
    code = *early;
  } else {
    py::gil_scoped_release release;
    code = run(cfg, out, err);
  }
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_l2ext, m) {
  m.doc() = "Denominators, twists, extension constants and model verdicts";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<DivergenceError>(m, "DivergenceError", PyExc_ArithmeticError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

  py::class_<DenominatorSpec>(m, "DenominatorSpec")
      .def_static("fn1", &DenominatorSpec::fn1, py::arg("s"), py::arg("scale") = 1.0)
      .def_static("fn2", &DenominatorSpec::fn2, py::arg("scale") = 1.0)
      .def_static("fn3", &DenominatorSpec::fn3, py::arg("s"), py::arg("scale") = 1.0)
      .def_static("fn4", &DenominatorSpec::fn4, py::arg("s"), py::arg("n"), py::arg("scale") = 1.0)
      .def_static(
          "expression",
          [](const std::string& text, const std::map<std::string, double>& params, double scale) {
            return DenominatorSpec::expression(text, ParamMap(params.begin(), params.end()), scale);
          },
          py::arg("text"), py::arg("params") = std::map<std::string, double>{}, py::arg("scale") = 1.0)
      .def("id", &DenominatorSpec::id)
      .def("with_scale", &DenominatorSpec::with_scale)
      .def("__call__", [](const DenominatorSpec& s, double x) { return eval_g(s, x); })
      .def("__repr__", [](const DenominatorSpec& s) { return "<DenominatorSpec " + s.id() + ">"; });

  m.def("c_of_g", [](const DenominatorSpec& s) { return c_of_g(s).value; });
  m.def("disk_mass", [](const DenominatorSpec& s) { return disk_mass(s).value; });
  m.def("normalize", &normalize);
  m.def("is_normalized", &is_normalized, py::arg("spec"), py::arg("tol") = 1e-8);
  m.def("g_delta", &g_delta);
  m.def("k_delta", [](const DenominatorSpec& s, double d) {
    const KDelta k = k_delta(s, d);
    return py::make_tuple(k.K, k.witness_x);
  });
  m.def("h_delta_samples", [](const DenominatorSpec& s, double d, const std::vector<double>& xs) {
    const TwistSamples t = h_delta_samples(s, d, xs);
    py::dict out;
    out["x"] = t.xs;
    out["G"] = t.G;
    out["h"] = t.h;
    out["hp"] = t.hp;
    out["hpp"] = t.hpp;
    return out;
  });

  m.def(
      "check_class_d",
      [](const DenominatorSpec& s, std::vector<double> grid) {
        const ClassDResult r = check_class_d(s, grid);
        py::dict out;
        out["pass"] = r.pass;
        out["violated"] = r.violated;
        out["reason"] = r.reason;
        if (r.best) {
          out["best_delta"] = r.best->delta;
          out["best_bound"] = r.best->bound;
        }
        return out;
      },
      py::arg("spec"), py::arg("delta_grid") = default_delta_grid());

  py::enum_<Objective>(m, "Objective").value("GENERIC", Objective::Generic).value("AS_PRINTED", Objective::AsPrinted);

  m.def("extension_bound", [](const DenominatorSpec& s, double d) {
    const ExtensionBound e = extension_bound(s, d);
    py::dict out;
    out["delta"] = e.delta;
    out["K"] = e.K;
    out["C"] = e.C;
    out["generic_bound"] = e.generic_bound;
    out["as_printed_bound"] = e.as_printed_bound;
    out["K_bound"] = e.K_bound;
    out["discrepancy"] = e.discrepancy;
    return out;
  });
  m.def("optimal_delta", [](const DenominatorSpec& s, Objective o) {
    const DeltaOptimum r = optimal_delta(s, o);
    return py::make_tuple(r.delta, r.value);
  });
  m.def("reproduce_report", [] {
    py::list rows;
    for (const ReportRow& r : reproduce_report().rows) {
      py::dict d;
      d["family"] = r.family;
      d["s"] = r.s;
      d["N"] = r.N;
      d["delta"] = r.delta;
      d["K_numeric"] = r.K_numeric;
      d["K_bound"] = r.K_bound;
      d["generic_bound"] = r.generic_bound;
      d["as_printed_bound"] = r.as_printed_bound;
      d["discrepancy"] = r.discrepancy;
      rows.append(d);
    }
    return rows;
  });

  py::enum_<Domain>(m, "Domain").value("DISK", Domain::Disk).value("BIDISK", Domain::Bidisk);

  py::class_<Kappa>(m, "Kappa")
      .def_static("zero", &Kappa::zero)
      .def_static("quadratic", &Kappa::quadratic, py::arg("a"), py::arg("b"), py::arg("c"))
      .def("id", &Kappa::id);

  py::class_<RModel>(m, "RModel")
      .def_static("zero", &RModel::zero)
      .def_static("constant", &RModel::constant)
      .def("id", &RModel::id);

  py::class_<WeightModel>(m, "WeightModel")
      .def(py::init([](Domain d, const Kappa& k, const RModel& r, bool ohsawa) {
             return WeightModel{d, k, r, ohsawa};
           }),
           py::arg("domain") = Domain::Disk, py::arg("kappa") = Kappa::zero(), py::arg("R") = RModel::zero(),
           py::arg("ohsawa_mode") = false)
      .def("id", &WeightModel::id);

  auto verdict = [](const ModelVerdict& v) {
    py::dict d;
    d["spec"] = v.spec_id;
    d["weight"] = v.weight_id;
    d["delta"] = v.delta;
    d["ratio"] = v.ratio;
    d["bound"] = v.bound;
    d["margin"] = v.margin;
    d["quad_error"] = v.quad_error;
    d["flag"] = v.flag;
    return d;
  };
  m.def(
      "disk_min_extension",
      [verdict](const DenominatorSpec& s, const WeightModel& w, std::optional<double> d) {
        return verdict(disk_min_extension(s, w, d));
      },
      py::arg("spec"), py::arg("weight"), py::arg("delta") = py::none());
  m.def(
      "bidisk_min_extension",
      [verdict](const DenominatorSpec& s, const WeightModel& w, const std::vector<double>& f, int degree,
                std::optional<double> d) { return verdict(bidisk_min_extension(s, w, f, degree, d)); },
      py::arg("spec"), py::arg("weight"), py::arg("f"), py::arg("degree"), py::arg("delta") = py::none());

  m.def("run_cli", &run_cli, py::arg("args"), "Runs the l2ext CLI; returns (exit_code, stdout, stderr).");
}
