#include "l2ext/denominator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

namespace l2ext {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Upper limit of the log-variable integration in disk_mass; e^690 ≈ 1e299.
constexpr double kLogCut = 690.0;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void check_s(double s) {
  if (!(s > 0.0 && s <= 1.0)) throw std::invalid_argument("family parameter s must lie in (0, 1], got " + fmt(s));
}

void check_scale(double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw std::invalid_argument("scale must be positive and finite");
}

// Iterated logarithms of E_m x, m = N-1, as ℓ_k = E_{m-k} + d_k. The offsets
// d_k stay small, so towers that overflow do not poison the lower levels.
struct IteratedLogs {
  std::vector<double> ell;  // ℓ_1 .. ℓ_m
};

IteratedLogs iterated_logs(const std::vector<double>& towers, double x) {
  const std::size_t m = towers.size();
  IteratedLogs out;
  out.ell.resize(m);
  double d = std::log(x);
  for (std::size_t k = 1; k <= m; ++k) {
    const double tower = towers[k - 1];  // E_{m-k}
    out.ell[k - 1] = tower + d;
    if (k < m) {
      // d_{k+1} = log1p(d_k / E_{m-k})
      d = std::isfinite(tower) ? std::log1p(d / tower) : 0.0;
    }
  }
  return out;
}

}  // namespace

std::string family_name(Family f) {
  switch (f) {
    case Family::FN1:
      return "FN1";
    case Family::FN2:
      return "FN2";
    case Family::FN3:
      return "FN3";
    case Family::FN4:
      return "FN4";
    case Family::Expr:
      return "EXPR";
  }
  return "?";
}

// ------------------------------------------------------------ construction

DenominatorSpec DenominatorSpec::fn1(double s, double scale) {
  check_s(s);
  check_scale(scale);
  DenominatorSpec d;
  d.family_ = Family::FN1;
  d.s_ = s;
  d.scale_ = scale;
  return d;
}

DenominatorSpec DenominatorSpec::fn2(double scale) {
  check_scale(scale);
  DenominatorSpec d;
  d.family_ = Family::FN2;
  d.scale_ = scale;
  return d;
}

DenominatorSpec DenominatorSpec::fn3(double s, double scale) {
  check_s(s);
  check_scale(scale);
  DenominatorSpec d;
  d.family_ = Family::FN3;
  d.s_ = s;
  d.scale_ = scale;
  return d;
}

DenominatorSpec DenominatorSpec::fn4(double s, int n, double scale) {
  check_s(s);
  check_scale(scale);
  if (n < 2) throw std::invalid_argument("FN4 needs N >= 2");
  DenominatorSpec d;
  d.family_ = Family::FN4;
  d.s_ = s;
  d.n_ = n;
  d.scale_ = scale;
  const int m = n - 1;
  std::vector<double> e(static_cast<std::size_t>(m), 1.0);  // E_0 .. E_{m-1}
  for (int j = 1; j < m; ++j) e[j] = std::exp(e[j - 1]);
  d.towers_.resize(static_cast<std::size_t>(m));
  for (int k = 1; k <= m; ++k) d.towers_[k - 1] = e[static_cast<std::size_t>(m - k)];
  return d;
}

DenominatorSpec DenominatorSpec::expression(const Expr& e, const ParamMap& params, double scale) {
  check_scale(scale);
  DenominatorSpec d;
  d.family_ = Family::Expr;
  d.scale_ = scale;
  d.expr_ = e.bind(params);
  d.derivative_ = differentiate(d.expr_);
  d.text_ = e.to_string();
  for (double x : log_space(1.0, 1e8, 256)) {
    double v = 0.0;
    try {
      v = d.expr_.eval(x);
    } catch (const DomainError& err) {
      throw DomainError("g is undefined at x = " + fmt(x) + ": " + err.what());
    }
    if (!(v > 0.0)) throw DomainError("g must be positive on [1, inf); g(" + fmt(x) + ") = " + fmt(v));
  }
  d.compute_expression_c();
  return d;
}

DenominatorSpec DenominatorSpec::expression(std::string_view text, const ParamMap& params, double scale) {
  std::set<std::string> allowed;
  for (const auto& [k, v] : params) allowed.insert(k);
  return expression(parse(text, allowed), params, scale);
}

void DenominatorSpec::compute_expression_c() {
  quad::Options opt = options();
  auto inv = [this](double t) {
    const double g = expr_.eval(t);
    return std::isinf(g) ? 0.0 : 1.0 / g;
  };
  quad::Result r = quad::integrate_to_infinity(inv, 1.0, opt);
  if (r.converged) {
    base_c_ = r.value;
    base_c_error_ = r.error;
    return;
  }
  if (!std::isfinite(r.value) || std::isinf(r.worst_b)) {
    base_c_ = kInf;
    base_c_error_ = kInf;
    divergence_witness_ = r.worst_a;
    return;
  }
  throw NumericError("C(g) quadrature did not converge for " + id() + " (error " + fmt(r.error) + ")");
}

quad::Options DenominatorSpec::options() const {
  quad::Options opt;
  opt.abs_tol = quad_tol_;
  opt.rel_tol = 1e-13;
  return opt;
}

std::string DenominatorSpec::id() const {
  std::string out;
  switch (family_) {
    case Family::FN1:
      out = "fn1(s=" + fmt(s_) + ")";
      break;
    case Family::FN2:
      out = "fn2";
      break;
    case Family::FN3:
      out = "fn3(s=" + fmt(s_) + ")";
      break;
    case Family::FN4:
      out = "fn4(s=" + fmt(s_) + ";N=" + std::to_string(n_) + ")";
      break;
    case Family::Expr:
      out = "expr(" + text_ + ")";
      break;
  }
  if (scale_ != 1.0) out += "*" + fmt(scale_);
  return out;
}

DenominatorSpec DenominatorSpec::with_scale(double scale) const {
  check_scale(scale);
  DenominatorSpec d = *this;
  d.scale_ = scale;
  return d;
}

DenominatorSpec DenominatorSpec::with_quad_tol(double tol) const {
  if (!(tol > 0.0)) throw std::invalid_argument("quadrature tolerance must be positive");
  DenominatorSpec d = *this;
  d.quad_tol_ = tol;
  if (d.family_ == Family::Expr) d.compute_expression_c();
  return d;
}

// ------------------------------------------------------------ evaluation

double DenominatorSpec::base(double x) const {
  switch (family_) {
    case Family::FN1:
      return std::exp(s_ * (x - 1.0)) / s_;
    case Family::FN2:
      return x * x;
    case Family::FN3:
      return std::pow(x, 1.0 + s_) / s_;
    case Family::FN4: {
      const IteratedLogs L = iterated_logs(towers_, x);
      double g = x / s_;
      for (std::size_t k = 0; k + 1 < L.ell.size(); ++k) g *= L.ell[k];
      return g * std::pow(L.ell.back(), 1.0 + s_);
    }
    case Family::Expr:
      return expr_.eval(x);
  }
  return 0.0;
}

double DenominatorSpec::base_derivative(double x) const {
  switch (family_) {
    case Family::FN1:
      return std::exp(s_ * (x - 1.0));
    case Family::FN2:
      return 2.0 * x;
    case Family::FN3:
      return (1.0 + s_) * std::pow(x, s_) / s_;
    case Family::FN4: {
      // g'/g = Σ_{k<m} 1/P_k + (1+s)/P_m with P_k = x ℓ_1 ⋯ ℓ_k.
      const IteratedLogs L = iterated_logs(towers_, x);
      const std::size_t m = L.ell.size();
      double p = x;
      double ratio = 1.0 / p;
      for (std::size_t k = 0; k < m; ++k) {
        p *= L.ell[k];
        ratio += (k + 1 == m ? 1.0 + s_ : 1.0) / p;
      }
      return base(x) * ratio;
    }
    case Family::Expr:
      return derivative_.eval(x);
  }
  return 0.0;
}

double DenominatorSpec::base_x_over_g(double x) const {
  switch (family_) {
    case Family::FN1:
      return s_ * x * std::exp(-s_ * (x - 1.0));
    case Family::FN2:
      return 1.0 / x;
    case Family::FN3:
      return s_ * std::pow(x, -s_);
    case Family::FN4: {
      const IteratedLogs L = iterated_logs(towers_, x);
      double den = std::pow(L.ell.back(), 1.0 + s_);
      for (std::size_t k = 0; k + 1 < L.ell.size(); ++k) den *= L.ell[k];
      return s_ / den;
    }
    case Family::Expr: {
      const double g = expr_.eval(x);
      return std::isinf(g) ? 0.0 : x / g;
    }
  }
  return 0.0;
}

double DenominatorSpec::upper_fraction(double x) const {
  switch (family_) {
    case Family::FN1:
      return std::exp(-s_ * (x - 1.0));
    case Family::FN2:
      return 1.0 / x;
    case Family::FN3:
      return std::pow(x, -s_);
    case Family::FN4: {
      const IteratedLogs L = iterated_logs(towers_, x);
      return std::pow(L.ell.back(), -s_);
    }
    case Family::Expr:
      return 1.0 - base_tail(x) / base_c_;
  }
  return 0.0;
}

double DenominatorSpec::base_tail(double x) const {
  if (x <= 1.0) return 0.0;
  switch (family_) {
    case Family::FN1:
      return -std::expm1(-s_ * (x - 1.0));
    case Family::FN2:
      return (x - 1.0) / x;
    case Family::FN3:
      return -std::expm1(-s_ * std::log(x));
    case Family::FN4: {
      const IteratedLogs L = iterated_logs(towers_, x);
      return -std::expm1(-s_ * std::log(L.ell.back()));
    }
    case Family::Expr:
      return base_tail_between(1.0, x);
  }
  return 0.0;
}

double DenominatorSpec::base_tail_between(double a, double b) const {
  if (b <= a) return 0.0;
  if (builtin()) {
    const double ua = upper_fraction(a);
    if (ua < 0.5) return ua - upper_fraction(b);
    return base_tail(b) - base_tail(a);
  }
  // log variable: dt/g = (t/g) dv with t = e^v
  auto f = [this](double v) { return base_x_over_g(std::exp(v)); };
  return quad::integrate_or_throw(f, std::log(a), std::log(b), options());
}

// ------------------------------------------------------------ operations

double eval_g(const DenominatorSpec& spec, double x) {
  if (!(x >= 1.0)) throw DomainError("g is defined on x >= 1");
  const double v = spec.scale() * spec.base(x);
  if (std::isnan(v) || !(v > 0.0)) throw DomainError("g is nonpositive or undefined at x = " + fmt(x));
  return v;
}

double tail_cdf(const DenominatorSpec& spec, double x) {
  if (!(x >= 1.0)) throw DomainError("tail_cdf is defined on x >= 1");
  return spec.base_tail(x) / spec.scale();
}

TailConstant c_of_g(const DenominatorSpec& spec) {
  TailConstant c;
  if (!std::isfinite(spec.base_c())) {
    c.value = kInf;
    c.error = kInf;
    c.finite = false;
    c.witness = spec.divergence_witness();
    return c;
  }
  c.value = spec.base_c() / spec.scale();
  c.error = spec.base_c_error() / spec.scale();
  return c;
}

DenominatorSpec normalize(const DenominatorSpec& spec) {
  const TailConstant c = c_of_g(spec);
  if (!c.finite) throw DivergenceError("cannot normalize " + spec.id() + ": C(g) diverges");
  return spec.with_scale(spec.scale() * c.value);
}

bool is_normalized(const DenominatorSpec& spec, double tol) {
  const TailConstant c = c_of_g(spec);
  return c.finite && std::abs(c.value - 1.0) <= tol;
}

double g_delta(const DenominatorSpec& spec, double delta, double x) {
  if (!(x >= 1.0)) throw DomainError("G_delta is defined on x >= 1");
  return Twist(spec, delta).G(x);
}

std::vector<double> default_twist_grid(std::size_t n, double xmax) { return log_space(1.0, xmax, n); }

TwistSamples h_delta_samples(const DenominatorSpec& spec, double delta, std::span<const double> xs) {
  if (xs.empty()) return {delta, {}, {}, {}, {}, {}};
  if (xs.front() < 1.0) throw DomainError("twist grid must lie in [1, inf)");
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] > xs[i - 1])) throw std::invalid_argument("twist grid must be strictly increasing");
  const Twist tw(spec, delta);
  TwistSamples out;
  out.delta = delta;
  out.xs.assign(xs.begin(), xs.end());
  out.h = tw.h_on(xs);
  out.G.reserve(xs.size());
  out.hp.reserve(xs.size());
  out.hpp.reserve(xs.size());
  for (double x : xs) {
    out.G.push_back(tw.G(x));
    out.hp.push_back(tw.hp(x));
    out.hpp.push_back(tw.hpp(x));
  }
  return out;
}

double ode_residual(const DenominatorSpec& spec, double delta, double x) {
  const Twist tw(spec, delta);
  const double step = std::max(1e-5, 1e-7 * x);
  const double eps = delta / (1.0 + delta);
  const double c = spec.base_c();
  const double q0 = tw.upper(x);
  // h' = 1/G - 1 = εQ/(1-εQ); Q(y) from Q(x) and the tail increment.
  auto hp_from_q = [eps](double q) { return eps * q / (1.0 - eps * q); };
  auto q_at = [&](double y) {
    if (spec.builtin()) return spec.upper_fraction(y);
    return y >= x ? q0 - spec.base_tail_between(x, y) / c : q0 + spec.base_tail_between(y, x) / c;
  };
  // Fourth-order central differences: at the prescribed step the second-order
  // stencil's truncation error alone reaches 1e-6 for stiff twists (FN1, large δ).
  // Built-in tails extend smoothly below x = 1; an expression may not, so near the
  // boundary it falls back to a one-sided stencil.
  auto d = [&](double k) { return hp_from_q(q_at(x + k * step)); };
  double hpp_fd;
  if (spec.builtin() || x - 2.0 * step >= 1.0) {
    hpp_fd = (d(-2.0) - 8.0 * d(-1.0) + 8.0 * d(1.0) - d(2.0)) / (12.0 * step);
  } else {
    hpp_fd = (-3.0 * hp_from_q(q0) + 4.0 * d(1.0) - d(2.0)) / (2.0 * step);
  }
  const double g = c * spec.base(x);
  const double one_plus_hp = 1.0 + hp_from_q(q0);
  return std::abs(hpp_fd + delta / ((1.0 + delta) * g) * one_plus_hp * one_plus_hp);
}

KDelta k_delta(const DenominatorSpec& spec, double delta) {
  if (!std::isfinite(spec.base_c())) throw DivergenceError("K_delta needs a finite C(g)");
  const Twist tw(spec, delta);
  // Compactified scan: u = 1/x log-spaced on [1e-8, 1].
  constexpr std::size_t kScan = 2048;
  std::vector<double> xs = log_space(1.0, 1e8, kScan);
  const std::vector<double> hs = tw.h_on(xs);
  std::vector<double> ratio(kScan);
  for (std::size_t i = 0; i < kScan; ++i) {
    const double g = spec.base(xs[i]);
    ratio[i] = std::isinf(g) ? 0.0 : (xs[i] + hs[i]) / g;
  }
  const std::size_t best = static_cast<std::size_t>(std::max_element(ratio.begin(), ratio.end()) - ratio.begin());

  KDelta out;
  // Growth at the far boundary: the maximum sits at x = 1e8 and the last decade increases.
  const std::size_t decade = kScan - 1 - (kScan - 1) / 8;
  if (best == kScan - 1 && ratio[kScan - 1] > ratio[decade]) {
    out.K = kInf;
    out.finite = false;
    out.witness_x = xs.back();
    return out;
  }

  const std::size_t lo = best == 0 ? 0 : best - 1;
  const std::size_t hi = std::min(kScan - 1, best + 1);
  const double x_lo = xs[lo];
  const double h_lo = hs[lo];
  const double q_lo = tw.upper(x_lo);
  auto objective = [&](double log_x) {
    const double x = std::exp(log_x);
    const double g = spec.base(x);
    if (std::isinf(g)) return 0.0;
    return (x + h_lo + tw.h_increment(x_lo, x, q_lo)) / g;
  };
  const optim::Extremum refined = optim::golden_max(objective, std::log(x_lo), std::log(xs[hi]), 1e-12);
  if (refined.value > ratio[best]) {
    out.K = refined.value;
    out.witness_x = std::exp(refined.x);
  } else {
    out.K = ratio[best];
    out.witness_x = xs[best];
  }
  out.K /= spec.scale();
  return out;
}

DiskMass disk_mass(const DenominatorSpec& spec) {
  // 2∫_0^1 dr/(r g(log(e/r²))) with t = 1 - 2 log r is ∫_1^∞ dt/g(t);
  // integrate that in v = log t, where dt/g = (t/g) dv.
  quad::Options opt;
  opt.abs_tol = spec.quad_tol();
  opt.rel_tol = 1e-13;
  auto f = [&spec](double v) { return spec.base_x_over_g(std::exp(v)); };
  const quad::Result body = quad::integrate(f, 0.0, kLogCut, opt);
  if (!body.converged) throw NumericError("disk_mass quadrature did not converge for " + spec.id());
  DiskMass out;
  out.value = body.value;
  out.error = body.error;
  const double t_cut = std::exp(kLogCut);
  if (spec.builtin()) {
    out.value += spec.upper_fraction(t_cut) * spec.base_c();
  } else {
    auto inv = [&spec](double t) {
      const double g = spec.base(t);
      return std::isinf(g) ? 0.0 : 1.0 / g;
    };
    const quad::Result rest = quad::integrate_to_infinity(inv, t_cut, opt);
    if (!rest.converged) throw DivergenceError("disk mass tail diverges for " + spec.id());
    out.value += rest.value;
    out.error += rest.error;
  }
  out.value /= spec.scale();
  out.error /= spec.scale();
  return out;
}

// ------------------------------------------------------------ Twist

Twist::Twist(const DenominatorSpec& spec, double delta) : spec_(spec), delta_(delta), eps_(delta / (1.0 + delta)) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw std::invalid_argument("delta must be positive");
  if (!std::isfinite(spec.base_c())) throw DivergenceError("twist needs a finite C(g) for " + spec.id());
}

double Twist::upper(double x) const { return spec_.upper_fraction(x); }

double Twist::G(double x) const { return 1.0 - eps_ * upper(x); }

double Twist::hp(double x) const {
  const double q = upper(x);
  return eps_ * q / (1.0 - eps_ * q);
}

double Twist::hpp(double x) const {
  const double one_plus = 1.0 / G(x);
  return -delta_ / ((1.0 + delta_) * spec_.base_c() * spec_.base(x)) * one_plus * one_plus;
}

double Twist::h(double x) const {
  if (x <= 1.0) return 0.0;
  switch (spec_.family()) {
    case Family::FN1: {
      const double s = spec_.s();
      return (std::log1p(-eps_ * upper(x)) - std::log1p(-eps_)) / s;
    }
    case Family::FN2:
      return eps_ * std::log1p((1.0 + delta_) * (x - 1.0));
    default:
      return h_increment(1.0, x, 1.0);
  }
}

double Twist::upper_shift(double x, double upper_x, double y) const {
  if (spec_.builtin()) return spec_.upper_fraction(y);
  const double c = spec_.base_c();
  return y >= x ? upper_x - spec_.base_tail_between(x, y) / c : upper_x + spec_.base_tail_between(y, x) / c;
}

double Twist::h_increment(double a, double b, double upper_a) const {
  if (b <= a) return 0.0;
  const Family fam = spec_.family();
  if (fam == Family::FN1 || fam == Family::FN2) return h(b) - h(a);
  auto f = [this, a, upper_a](double v) {
    const double y = std::exp(v);
    const double q = upper_shift(a, upper_a, y);
    return y * eps_ * q / (1.0 - eps_ * q);
  };
  quad::Options opt;
  opt.abs_tol = 1e-13;
  opt.rel_tol = 1e-13;
  quad::Result r = quad::integrate(f, std::log(a), std::log(b), opt);
  if (!r.converged && r.error > 1e-10 * std::max(1.0, std::abs(r.value)))
    throw NumericError("h_delta quadrature did not converge on [" + fmt(a) + ", " + fmt(b) + "]");
  return r.value;
}

double Twist::h_increment_smooth(double a, double b) const {
  if (a == b) return 0.0;
  const Family fam = spec_.family();
  if (fam == Family::FN1 || fam == Family::FN2) return h(b) - h(a);
  auto f = [this](double y) {
    const double q = upper(y);
    return eps_ * q / (1.0 - eps_ * q);
  };
  return quad::kronrod15(f, a, b);
}

std::vector<double> Twist::h_on(std::span<const double> xs) const {
  std::vector<double> out(xs.size());
  const Family fam = spec_.family();
  if (fam == Family::FN1 || fam == Family::FN2) {
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = h(xs[i]);
    return out;
  }
  double prev_x = 1.0, prev_h = 0.0, prev_q = 1.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = xs[i];
    prev_h += h_increment(prev_x, x, prev_q);
    prev_q = upper_shift(prev_x, prev_q, x);
    prev_x = x;
    out[i] = prev_h;
  }
  return out;
}

}  // namespace l2ext
