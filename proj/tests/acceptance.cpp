// Acceptance gate: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "l2ext/bergman.hpp"
#include "l2ext/certify.hpp"
#include "l2ext/constants.hpp"
#include "l2ext/denominator.hpp"
#include "l2ext/serialize.hpp"

using namespace l2ext;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Records the first failure; later ones only flip the flag.
struct Checker {
  Outcome out;
  void require(bool ok, const std::string& what) {
    if (!ok && out.pass) out.detail = what;
    if (!ok) out.pass = false;
  }
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::vector<DenominatorSpec> normalization_specs() {
  return {DenominatorSpec::fn1(0.1),    DenominatorSpec::fn1(0.5),    DenominatorSpec::fn1(1.0),
          DenominatorSpec::fn2(),       DenominatorSpec::fn3(0.1),    DenominatorSpec::fn3(0.5),
          DenominatorSpec::fn3(1.0),    DenominatorSpec::fn4(0.5, 2), DenominatorSpec::fn4(0.5, 3),
          DenominatorSpec::fn4(0.5, 4)};
}

Outcome normalization_identity() {
  Checker c;
  double worst_c = 0.0, worst_m = 0.0;
  for (const auto& spec : normalization_specs()) {
    const double cv = c_of_g(spec).value, mv = disk_mass(spec).value;
    worst_c = std::max(worst_c, std::abs(cv - 1.0));
    worst_m = std::max(worst_m, std::abs(mv - 1.0));
    c.require(std::abs(cv - 1.0) <= 1e-8, spec.id() + ": C = " + num(cv));
    c.require(std::abs(mv - 1.0) <= 1e-7, spec.id() + ": disk mass = " + num(mv));
  }
  if (c.out.pass) c.out.detail = "max |C-1| = " + num(worst_c) + ", max |mass-1| = " + num(worst_m);
  return c.out;
}

Outcome fn2_optimum() {
  Checker c;
  const DeltaOptimum o = optimal_delta(DenominatorSpec::fn2(), Objective::AsPrinted);
  c.require(std::abs(o.delta - 1.41421) <= 1e-4, "delta* = " + num(o.delta));
  c.require(std::abs(o.value - 5.8284271) <= 1e-6, "value = " + num(o.value));
  if (c.out.pass) c.out.detail = "delta* = " + num(o.delta) + ", value = " + num(o.value);
  return c.out;
}

Outcome fn1_optimum() {
  Checker c;
  std::string detail;
  for (double s : {0.25, 1.0}) {
    const DeltaOptimum o = optimal_delta(DenominatorSpec::fn1(s), Objective::AsPrinted);
    c.require(std::abs(o.delta - 1.0) <= 1e-4, "s = " + num(s) + ": delta* = " + num(o.delta));
    c.require(std::abs(o.value - 16.0 / s) <= 1e-6 * (16.0 / s), "s = " + num(s) + ": value = " + num(o.value));
    detail += "s=" + num(s) + ": (" + num(o.delta) + ", " + num(o.value) + ") ";
  }
  if (c.out.pass) c.out.detail = detail;
  return c.out;
}

Outcome fn3_fn4_formula() {
  Checker c;
  for (double s : {0.04, 0.25, 1.0}) {
    const double d = 1.0 / std::sqrt(s), expect = 4.0 * (1.0 + 2.0 * std::sqrt(s) + s);
    for (const auto& spec : {DenominatorSpec::fn3(s), DenominatorSpec::fn4(s, 3)}) {
      const double v = *extension_bound(spec, d).as_printed_bound;
      c.require(std::abs(v - expect) <= 1e-9, spec.id() + ": " + num(v) + " vs " + num(expect));
    }
  }
  const double nine = family_closed_forms(Family::FN3, 0.25, 2.0).as_printed;
  c.require(nine == 9.0, "s = 0.25 gives " + num(nine));
  if (c.out.pass) c.out.detail = "s = 0.25 gives " + num(nine);
  return c.out;
}

Outcome k_bound_conformance() {
  Checker c;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = -1e300;
  for (int i = 0; i < 50; ++i) {
    const double s = 0.05 + 0.95 * unit(rng);
    const double delta = std::exp(std::log(0.05) + unit(rng) * std::log(400.0));
    DenominatorSpec spec = DenominatorSpec::fn2();
    switch (i % 4) {
      case 0:
        spec = DenominatorSpec::fn1(s);
        break;
      case 2:
        spec = DenominatorSpec::fn3(s);
        break;
      case 3:
        spec = DenominatorSpec::fn4(s, 2 + i % 3);
        break;
    }
    const double K = k_delta(spec, delta).K;
    const double bound = family_closed_forms(spec.family(), s, delta).K_bound;
    worst = std::max(worst, K - bound);
    c.require(K <= bound + 1e-8, spec.id() + " delta = " + num(delta) + ": K = " + num(K) + " > " + num(bound));
  }
  if (c.out.pass) c.out.detail = "50 draws, max K - K_bound = " + num(worst);
  return c.out;
}

Outcome twist_ode_suite() {
  Checker c;
  double worst_ode = 0.0, worst_id = 0.0;
  const std::vector<double> xs = default_twist_grid(200, 100.0);
  for (const auto& spec : normalization_specs())
    for (double delta : {0.1, 1.0, std::numbers::sqrt2, 10.0}) {
      const std::string tag = spec.id() + " delta = " + num(delta);
      for (double x : xs) {
        const double r = ode_residual(spec, delta, x);
        worst_ode = std::max(worst_ode, r);
        c.require(r <= 1e-6, tag + ": ODE residual " + num(r) + " at x = " + num(x));
      }
      const TwistSamples t = h_delta_samples(spec, delta, xs);
      const HConditions hc = check_h_conditions(t);
      c.require(hc.all(), tag + ": h-conditions fail");
      for (std::size_t i = 0; i < xs.size(); ++i) {
        const double err = std::abs((1.0 + t.hp[i]) * t.G[i] - 1.0);
        worst_id = std::max(worst_id, err);
        c.require(err <= 1e-10, tag + ": 1+h' vs 1/G off by " + num(err));
      }
    }
  if (c.out.pass) c.out.detail = "max ODE residual " + num(worst_ode) + ", max |(1+h')G - 1| " + num(worst_id);
  return c.out;
}

Outcome curvature_identity() {
  Checker c;
  std::string detail;
  WeightModel w;
  for (const auto& spec : {DenominatorSpec::fn1(0.5), DenominatorSpec::fn2()}) {
    const CurvatureCheck coarse = curvature_identity_check(spec, 1.0, w, 1.2, 0.2, 16, 1e-3);
    const CurvatureCheck fine = curvature_identity_check(spec, 1.0, w, 1.2, 0.2, 16, 1e-4);
    const double ratio = coarse.max_residual / fine.max_residual;
    c.require(fine.max_residual <= 1e-5, spec.id() + ": residual " + num(fine.max_residual));
    c.require(ratio >= 50.0 && ratio <= 200.0, spec.id() + ": convergence ratio " + num(ratio));
    detail += spec.id() + ": " + num(fine.max_residual) + " (ratio " + num(ratio) + ") ";
  }
  if (c.out.pass) c.out.detail = detail;
  return c.out;
}

Outcome soundness_sweep() {
  Checker c;
  const std::vector<ModelVerdict> vs = sweep_verify(default_sweep_specs(), default_sweep_weights(),
                                                    default_sweep_f(), {1, 2, 3, 4, 5, 6}, std::nullopt);
  c.require(vs.size() >= 100, "only " + std::to_string(vs.size()) + " cases");
  std::map<std::string, double> last;
  double min_margin = 1e300;
  for (const auto& v : vs) {
    const std::string tag = v.spec_id + " " + v.weight_id + " D=" + std::to_string(v.degree);
    c.require(v.ratio <= v.bound + v.quad_error, tag + ": ratio " + num(v.ratio) + " > bound " + num(v.bound));
    min_margin = std::min(min_margin, v.margin);
    const bool flat = v.weight_id.find("kappa=0;R=0") != std::string::npos;
    if (flat) c.require(std::abs(v.ratio - 1.0) <= 1e-7, tag + ": flat ratio " + num(v.ratio));
    if (v.domain != Domain::Bidisk) continue;
    std::string key = v.spec_id + "|" + v.weight_id + "|";
    for (double f : v.f_coeffs) key += format_double(f) + ",";
    if (auto it = last.find(key); it != last.end())
      c.require(v.ratio <= it->second * (1.0 + 1e-12), tag + ": ratio grew with D");
    last[key] = v.ratio;
  }
  if (c.out.pass) c.out.detail = std::to_string(vs.size()) + " cases, min margin " + num(min_margin);
  return c.out;
}

Outcome discrepancy_flag() {
  Checker c;
  const Report rep = reproduce_report();
  const std::string csv = report_csv(rep);
  bool found = false;
  for (const auto& r : rep.rows) {
    if (r.family != "FN2" || std::abs(r.delta - std::numbers::sqrt2) > 1e-4) continue;
    found = true;
    c.require(r.discrepancy, "FN2 row at sqrt2 not flagged");
    c.require(std::abs(r.generic_bound - 10.95) <= 0.01, "generic bound " + num(r.generic_bound));
    c.require(std::abs(r.as_printed_bound - 5.828) <= 0.001, "as-printed " + num(r.as_printed_bound));
    c.require(csv.find(format_double(r.generic_bound)) != std::string::npos, "generic bound missing from CSV");
    c.require(csv.find(format_double(r.as_printed_bound)) != std::string::npos, "as-printed missing from CSV");
    if (c.out.pass) c.out.detail = "generic " + num(r.generic_bound) + " vs as-printed " + num(r.as_printed_bound);
  }
  c.require(found, "no FN2 row at sqrt2");
  return c.out;
}

Outcome scaling_property() {
  Checker c;
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double s = 0.1 + 0.9 * unit(rng), delta = 0.25 + 3.75 * unit(rng);
    DenominatorSpec spec = DenominatorSpec::fn2();
    switch (i % 5) {
      case 0:
        spec = DenominatorSpec::fn1(s);
        break;
      case 2:
        spec = DenominatorSpec::fn3(s);
        break;
      case 3:
        spec = DenominatorSpec::fn4(s, 2 + i % 3);
        break;
      case 4:
        spec = DenominatorSpec::expression("x^2*(1+q*log(x))", {{"q", s}});
        break;
    }
    const KDelta k = k_delta(spec, delta);
    for (double lambda : {0.1, 10.0}) {
      const KDelta ks = k_delta(spec.with_scale(lambda), delta);
      const double rel = std::abs(ks.K * lambda - k.K) / k.K;
      worst = std::max(worst, rel);
      c.require(rel <= 1e-9, spec.id() + " lambda = " + num(lambda) + ": rel error " + num(rel));
      c.require(ks.witness_x == k.witness_x, spec.id() + ": witness moved");
    }
  }
  if (c.out.pass) c.out.detail = "max relative error " + num(worst);
  return c.out;
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "normalization identity", 5.0, normalization_identity},
      {2, "FN2 printed optimum", 1.0, fn2_optimum},
      {3, "FN1 printed optimum", 1.0, fn1_optimum},
      {4, "FN3/FN4 printed formula", 1.0, fn3_fn4_formula},
      {5, "K-bound conformance", 30.0, k_bound_conformance},
      {6, "twist ODE and h-conditions", 30.0, twist_ode_suite},
      {7, "curvature identity", 10.0, curvature_identity},
      {8, "theorem soundness sweep", 300.0, soundness_sweep},
      {9, "discrepancy flag", 1.0, discrepancy_flag},
      {10, "scaling property", 10.0, scaling_property},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (o.pass && secs > c.limit_s) {
      o.pass = false;
      o.detail += " [over time limit]";
    }
    failed += o.pass ? 0 : 1;
    std::printf("[%s] %2d %-28s %8.3f s (limit %g s)  %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                c.limit_s, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
