#include "l2ext/constants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "l2ext/parallel.hpp"

namespace l2ext {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool differs(double a, double b) { return std::abs(a - b) > 1e-9 * std::max(std::abs(a), std::abs(b)); }

}  // namespace

ClosedForm family_closed_forms(Family family, double s, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  ClosedForm cf;
  const double d = delta;
  switch (family) {
    case Family::FN1:
      cf.K_bound = 1.0 + d;
      cf.K_bound_sharp = (1.0 + d) * std::exp(-(1.0 + d - s) / (1.0 + d));
      cf.as_printed = (1.0 + d) * (1.0 + d) / d * 4.0 / s;
      cf.norm_factor = 1.0 / s;
      cf.norm_description = "|w|^{2-2s} weight";
      break;
    case Family::FN2:
      cf.K_bound = (1.0 + d) * (1.0 + d) / (4.0 * d);
      cf.as_printed = (2.0 + d) * (1.0 + d) / d;
      cf.norm_description = "|w|^2 log^2(e/|w|^2) weight";
      break;
    case Family::FN3:
    case Family::FN4:
      cf.K_bound = s * (1.0 + d);
      cf.as_printed = 4.0 * (1.0 + d * s) * (1.0 + d) / d;
      cf.norm_description = "|w|^2 g(log(e/|w|^2)) weight";
      break;
    case Family::Expr:
      throw std::invalid_argument("no closed form for expression denominators");
  }
  return cf;
}

ExtensionBound extension_bound(const DenominatorSpec& spec, double delta) {
  const DenominatorSpec g = is_normalized(spec, 1e-12) ? spec : normalize(spec);
  ExtensionBound eb;
  eb.spec_id = spec.id();
  eb.delta = delta;
  eb.C = c_of_g(g).value;
  const KDelta k = k_delta(g, delta);
  eb.K = k.K;
  eb.generic_bound = k.finite ? 4.0 * (k.K + (1.0 + delta) / delta * eb.C) : kInf;
  eb.norm_description = "|w|^2 g(log(e/|w|^2)) weight";
  if (spec.builtin()) {
    const ClosedForm cf = family_closed_forms(spec.family(), spec.s(), delta);
    eb.as_printed_bound = cf.as_printed;
    eb.K_bound = cf.K_bound;
    eb.generic_from_K_bound = 4.0 * (cf.K_bound + (1.0 + delta) / delta * eb.C) * cf.norm_factor;
    eb.discrepancy = differs(*eb.as_printed_bound, *eb.generic_from_K_bound);
    eb.norm_description = cf.norm_description;
  }
  return eb;
}

DeltaOptimum optimal_delta(const DenominatorSpec& spec, Objective objective) {
  std::function<double(double)> f;
  if (objective == Objective::AsPrinted) {
    if (!spec.builtin()) throw std::invalid_argument("AS_PRINTED objective needs a built-in family");
    f = [&spec](double d) { return family_closed_forms(spec.family(), spec.s(), d).as_printed; };
  } else {
    f = [&spec](double d) { return extension_bound(spec, d).generic_bound; };
  }

  constexpr std::size_t kScan = 256;
  const std::vector<double> ds = log_space(1e-3, 1e3, kScan);
  std::vector<double> vals(kScan);
  parallel_for(kScan, [&](std::size_t i) { vals[i] = f(ds[i]); });
  const std::size_t best = static_cast<std::size_t>(std::min_element(vals.begin(), vals.end()) - vals.begin());
  if (!std::isfinite(vals[best])) throw NumericError("objective is not finite anywhere on [1e-3, 1e3]");

  const double lo = std::log(ds[best == 0 ? 0 : best - 1]);
  const double hi = std::log(ds[std::min(kScan - 1, best + 1)]);
  const optim::Extremum m = optim::golden_min([&f](double u) { return f(std::exp(u)); }, lo, hi, 1e-9);
  if (m.value <= vals[best]) return {std::exp(m.x), m.value};
  return {ds[best], vals[best]};
}

DemaillyComparison demailly_comparison(double s, std::size_t points) {
  if (!(s > 0.0 && s <= 1.0)) throw std::invalid_argument("s must lie in (0, 1]");
  DemaillyComparison dc;
  dc.s = s;
  dc.paper_route = 16.0 / s;
  dc.demailly_route = (3.0 + 2.0 * std::numbers::sqrt2) / (s * s);
  dc.points = points;
  dc.max_gap = -kInf;
  for (std::size_t k = 1; k <= points; ++k) {
    const double x = static_cast<double>(k) / static_cast<double>(points);
    const double lhs = s * (1.0 - std::log(x));
    const double rhs = std::pow(x, -s);
    dc.max_gap = std::max(dc.max_gap, lhs - rhs);
    if (lhs > rhs * (1.0 + 1e-12)) dc.inequality_holds = false;
  }
  return dc;
}

Report reproduce_report() {
  const std::vector<DenominatorSpec> specs = {DenominatorSpec::fn1(1.0), DenominatorSpec::fn2(),
                                              DenominatorSpec::fn3(0.25), DenominatorSpec::fn4(0.25, 3)};
  struct Job {
    const DenominatorSpec* spec;
    double delta;
  };
  std::vector<Job> jobs;
  for (const auto& spec : specs) {
    const double star = optimal_delta(spec, Objective::AsPrinted).delta;
    jobs.push_back({&spec, star});
    if (std::abs(star - 1.0) > 1e-6) jobs.push_back({&spec, 1.0});
  }

  Report rep;
  rep.rows.resize(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) {
    const DenominatorSpec& spec = *jobs[i].spec;
    const ExtensionBound eb = extension_bound(spec, jobs[i].delta);
    ReportRow& row = rep.rows[i];
    row.family = family_name(spec.family());
    row.s = spec.family() == Family::FN2 ? 0.0 : spec.s();
    row.N = spec.family() == Family::FN4 ? spec.n() : 0;
    row.delta = eb.delta;
    row.K_numeric = eb.K;
    row.K_bound = *eb.K_bound;
    row.C = eb.C;
    row.generic_numeric = eb.generic_bound;
    row.generic_bound = *eb.generic_from_K_bound;
    row.as_printed_bound = *eb.as_printed_bound;
    row.discrepancy = eb.discrepancy;
  });
  for (double s : {0.1, 0.5, 1.0}) rep.demailly.push_back(demailly_comparison(s));
  return rep;
}

}  // namespace l2ext
