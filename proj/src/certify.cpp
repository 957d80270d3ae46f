#include "l2ext/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "l2ext/parallel.hpp"

namespace l2ext {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPuncture = 1e-3;
constexpr double kBracketHi = 1e12;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

struct PolarGrid {
  std::vector<double> radii;
  std::vector<double> angles;
  double dr = 0.0;
};

PolarGrid polar_grid(int n, double lo, double hi) {
  PolarGrid g;
  n = std::max(n, 2);
  g.dr = (hi - lo) / (n - 1);
  for (int i = 0; i < n; ++i) g.radii.push_back(lo + g.dr * i);
  for (int j = 0; j < n; ++j) g.angles.push_back(2.0 * std::numbers::pi * j / n);
  return g;
}

// Laplacian stencil step at radius r; small against r so that log|w|² terms
// stay well resolved near the puncture.
double stencil_step(double r, double dr) { return std::min(0.25 * dr, 0.01 * r); }

template <class F>
double laplacian5(const F& f, double x, double y, double h) {
  return (f(x + h, y) + f(x - h, y) + f(x, y + h) + f(x, y - h) - 4.0 * f(x, y)) / (h * h);
}

}  // namespace

std::vector<double> default_delta_grid() { return {0.25, 0.5, 1.0, std::numbers::sqrt2, 2.0, 4.0}; }

// ------------------------------------------------------------ certificates

HConditions check_h_conditions(const TwistSamples& samples) {
  HConditions out;
  const std::size_t n = samples.xs.size();
  for (std::size_t i = 0; i < n; ++i) {
    const bool fails[3] = {
        !(samples.xs[i] + samples.h[i] >= 1.0 - 1e-12),
        !(1.0 + samples.hp[i] >= 1.0),
        // h'' = 0 is accepted only where h' has underflowed along with it
        !(samples.hpp[i] < 0.0 || (samples.hpp[i] == 0.0 && samples.hp[i] == 0.0)),
    };
    for (int k = 0; k < 3; ++k) {
      if (fails[k] && out.ok[k]) {
        out.ok[k] = false;
        out.first_violation[k] = i;
      }
    }
  }
  return out;
}

HConditions check_h_conditions(const DenominatorSpec& spec, double delta, std::span<const double> xs) {
  return check_h_conditions(h_delta_samples(spec, delta, xs));
}

DeltaCertificate certify_delta(const DenominatorSpec& spec, double delta) {
  DeltaCertificate cert;
  cert.delta = delta;
  const TailConstant c = c_of_g(spec);
  if (!c.finite) throw DivergenceError("C(g) diverges for " + spec.id());
  cert.C = c.value;

  const KDelta k = k_delta(spec, delta);
  cert.K = k.K;
  cert.K_finite = k.finite;
  cert.witness_x = k.witness_x;
  cert.bound = k.finite ? 4.0 * (k.K + (1.0 + delta) / delta * c.value) : kInf;

  const std::vector<double> xs = default_twist_grid();
  double worst = 0.0;
  for (double x : xs) worst = std::max(worst, ode_residual(spec, delta, x));
  cert.ode_max_residual = worst;
  cert.h_conditions_ok = check_h_conditions(spec, delta, xs).ok;
  return cert;
}

ClassDResult check_class_d(const DenominatorSpec& spec, std::span<const double> delta_grid) {
  ClassDResult res;

  // monotone: g' ≥ 0 on a log grid
  for (double x : log_space(1.0, 1e8, 512)) {
    double d;
    try {
      d = spec.base_derivative(x);
    } catch (const DomainError& e) {
      res.violated = "monotone";
      res.reason = std::string("g' undefined: ") + e.what();
      res.witness = x;
      return res;
    }
    if (std::isnan(d) || d < 0.0) {
      res.violated = "monotone";
      res.reason = "g is not increasing: g'(" + fmt(x) + ") = " + fmt(d);
      res.witness = x;
      return res;
    }
  }

  // finite C(g)
  const TailConstant c = c_of_g(spec);
  if (!c.finite) {
    res.violated = "finite-C";
    res.reason = "C(g) diverges; tail mass escapes beyond x = " + fmt(c.witness);
    res.witness = c.witness;
    return res;
  }

  // finite K_δ for some δ
  std::vector<DeltaCertificate> certs(delta_grid.size());
  parallel_for(delta_grid.size(), [&](std::size_t i) { certs[i] = certify_delta(spec, delta_grid[i]); });
  res.all = certs;
  for (const auto& cert : certs) {
    if (!cert.K_finite) continue;
    if (!res.best || cert.bound < res.best->bound) res.best = cert;
  }
  if (!res.best) {
    res.violated = "finite-K";
    res.reason = "K_delta is infinite for every delta in the grid";
    res.witness = certs.empty() ? 1.0 : certs.back().witness_x;
    return res;
  }
  res.pass = true;
  return res;
}

// ------------------------------------------------------------ a, τ, A

double inverse_g(const DenominatorSpec& spec, double target) {
  const double g1 = spec.base(1.0);
  if (std::isnan(target)) throw NumericError("g^{-1} of NaN");
  if (target < g1) throw HypothesisError("g^{-1} argument " + fmt(target) + " is below g(1) = " + fmt(g1));
  if (target == g1) return 1.0;
  if (target > spec.base(kBracketHi))
    throw HypothesisError("g^{-1} argument " + fmt(target) + " exceeds g on the bracket [1, 1e12]");
  // Bisection in log x, then in x once the bracket is narrow.
  double lo = 0.0, hi = std::log(kBracketHi);
  for (;;) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi) || hi - lo < 1e-3) break;
    (spec.base(std::exp(mid)) < target ? lo : hi) = mid;
  }
  double xlo = std::exp(lo), xhi = std::exp(hi);
  if (spec.base(xlo) >= target) xlo = std::max(1.0, xlo * (1.0 - 1e-12));
  if (spec.base(xhi) < target) xhi *= 1.0 + 1e-12;
  for (;;) {
    const double mid = 0.5 * (xlo + xhi);
    if (!(mid > xlo && mid < xhi)) break;
    (spec.base(mid) < target ? xlo : xhi) = mid;
  }
  return xhi;
}

double a_function(const DenominatorSpec& spec, const WeightModel& weight, double gamma, double eps, double w_abs2) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (!(w_abs2 >= 0.0)) throw std::invalid_argument("|w|^2 must be nonnegative");
  const double alpha = gamma - std::log(w_abs2 + eps * eps);
  if (alpha < 1.0)
    throw HypothesisError("lower-bound hypothesis: alpha = " + fmt(alpha) + " < 1 at |w|^2 = " + fmt(w_abs2) +
                          "; eps is too large for gamma");
  const double R = weight.R.at(std::sqrt(w_abs2));
  if (R == 0.0) return inverse_g(spec, spec.base(alpha));
  const double target = std::exp(-R) * spec.base(alpha);
  try {
    return inverse_g(spec, target);
  } catch (const HypothesisError&) {
    throw HypothesisError("lower-bound hypothesis: e^{-R} g(alpha) < g(1) at |w|^2 = " + fmt(w_abs2) + " (R = " + fmt(R) +
                          ", alpha = " + fmt(alpha) + ")");
  }
}

TauA tau_and_A(const DenominatorSpec& spec, double delta, double a_val) {
  if (!(a_val >= 1.0)) throw DomainError("tau_and_A needs a >= 1");
  const Twist tw(spec, delta);
  const double hp = tw.hp(a_val);
  const double hpp = tw.hpp(a_val);
  TauA out;
  out.tau = a_val + tw.h(a_val);
  out.A = (1.0 + hp) * (1.0 + hp) / (-hpp);
  if (!std::isfinite(out.A) || !(out.A > 0.0)) throw NumericError("A is not finite and positive at a = " + fmt(a_val));
  return out;
}

// ------------------------------------------------------------ grid checks

BergCheck check_berg(const DenominatorSpec& spec, const WeightModel& weight, std::span<const double> gamma_grid,
                     std::span<const double> eps_grid, int grid_n) {
  const PolarGrid grid = polar_grid(grid_n, kPuncture, 1.0 - kPuncture);
  const double g1 = spec.base(1.0);

  // Lower-bound hypothesis in the stated form: e^{-R} g(1 - log|w|²) ≥ g(1). R is radial, so one ray suffices.
  for (double r : grid.radii) {
    const double target = std::exp(-weight.R.at(r)) * spec.base(1.0 - std::log(r * r));
    if (!(target >= g1)) {
      BergCheck out;
      out.pass = false;
      out.witness = std::array<double, 4>{r, 0.0, std::nan(""), std::nan("")};
      out.reason = "lower-bound hypothesis: e^{-R} g(1 - log|w|^2) < g(1) at |w| = " + fmt(r);
      return out;
    }
  }

  struct Failure {
    bool failed = false;
    std::array<double, 4> witness{};
    std::string reason;
  };
  const std::size_t nr = grid.radii.size();
  const std::size_t pairs = gamma_grid.size() * eps_grid.size();
  std::vector<Failure> fails(pairs * nr);

  parallel_for(pairs * nr, [&](std::size_t idx) {
    const std::size_t p = idx / nr, i = idx % nr;
    const double gamma = gamma_grid[p / eps_grid.size()];
    const double eps = eps_grid[p % eps_grid.size()];
    const double r = grid.radii[i];
    const double h = stencil_step(r, grid.dr);
    const double tol = 1e-6 / (h * h);
    auto phi = [&](double x, double y) {
      const double w2 = x * x + y * y;
      const double alpha = gamma - std::log(w2 + eps * eps);
      return alpha - a_function(spec, weight, gamma, eps, w2);
    };
    Failure& f = fails[idx];
    for (double theta : grid.angles) {
      const double x = r * std::cos(theta), y = r * std::sin(theta);
      try {
        const double lap = laplacian5(phi, x, y, h);
        if (lap < -tol) {
          f = {true, {x, y, gamma, eps},
               "subharmonicity hypothesis: alpha - g^{-1}(e^{-R} g(alpha)) is not subharmonic (Laplacian " + fmt(lap) + ")"};
          return;
        }
      } catch (const HypothesisError& e) {
        f = {true, {x, y, gamma, eps}, e.what()};
        return;
      }
    }
  });

  BergCheck out;
  for (const auto& f : fails) {
    if (!f.failed) continue;
    out.pass = false;
    out.witness = f.witness;
    out.reason = f.reason;
    break;
  }
  return out;
}

BergCheck check_ohsawa(const WeightModel& weight, int grid_n) {
  const PolarGrid grid = polar_grid(grid_n, kPuncture, 1.0 - kPuncture);
  auto R = [&weight](double x, double y) { return weight.R.at(std::hypot(x, y)); };
  auto RL = [&weight](double x, double y) {
    const double w2 = x * x + y * y;
    return weight.R.at(std::sqrt(w2)) + std::log(w2);
  };
  BergCheck out;
  for (double r : grid.radii) {
    const double h = stencil_step(r, grid.dr);
    const double tol = 1e-6 / (h * h);
    for (double theta : grid.angles) {
      const double x = r * std::cos(theta), y = r * std::sin(theta);
      auto fail = [&](std::string why) {
        out.pass = false;
        out.witness = std::array<double, 4>{x, y, std::nan(""), std::nan("")};
        out.reason = std::move(why);
      };
      if (RL(x, y) > 1e-12) {
        fail("Ohsawa condition: R + log|w|^2 > 0 at |w| = " + fmt(r));
        return out;
      }
      if (laplacian5(R, x, y, h) < -tol) {
        fail("R is not subharmonic at |w| = " + fmt(r));
        return out;
      }
      if (laplacian5(RL, x, y, h) < -tol) {
        fail("R + log|w|^2 is not subharmonic at |w| = " + fmt(r));
        return out;
      }
    }
  }
  return out;
}

CurvatureCheck curvature_identity_check(const DenominatorSpec& spec, double delta, const WeightModel& weight,
                                        double gamma, double eps, int grid_n, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("step must be positive");
  // Keep the stencil away from the puncture so singular R profiles stay finite.
  const double lo = std::max(0.01, 10.0 * step);
  if (lo >= 1.0 - kPuncture) throw NumericError("finite-difference step too large for the w-disk");
  const PolarGrid grid = polar_grid(grid_n, lo, 1.0 - kPuncture);
  const Twist tw(spec, delta);

  const std::size_t nr = grid.radii.size(), na = grid.angles.size();
  std::vector<double> residual(nr * na), lower(nr * na);
  parallel_for(nr * na, [&](std::size_t idx) {
    const double r = grid.radii[idx / na], theta = grid.angles[idx % na];
    const double x = r * std::cos(theta), y = r * std::sin(theta);
    auto a_at = [&](double px, double py) { return a_function(spec, weight, gamma, eps, px * px + py * py); };
    const double ac = a_at(x, y);
    const double nb[4] = {a_at(x + step, y), a_at(x - step, y), a_at(x, y + step), a_at(x, y - step)};
    // τ_k - τ_c = (a_k - a_c) + ∫_{a_c}^{a_k} h'
    double da[4], dt[4];
    for (int k = 0; k < 4; ++k) {
      da[k] = nb[k] - ac;
      dt[k] = da[k] + (nb[k] >= ac ? tw.h_increment_smooth(ac, nb[k]) : -tw.h_increment_smooth(nb[k], ac));
    }
    const double h2 = step * step;
    const double lap_a = (da[0] + da[1] + da[2] + da[3]) / h2;
    const double lap_tau = (dt[0] + dt[1] + dt[2] + dt[3]) / h2;
    const double gx = (dt[0] - dt[1]) / (2.0 * step), gy = (dt[2] - dt[3]) / (2.0 * step);
    const TauA ta = tau_and_A(spec, delta, ac);
    // ∂∂̄ = Δ/4 and ∂f∂̄f = |∇f|²/4 in w = x + iy.
    const double lhs = -0.25 * lap_tau - 0.25 * (gx * gx + gy * gy) / ta.A;
    const double rhs = (1.0 + tw.hp(ac)) * (-0.25 * lap_a);
    residual[idx] = std::abs(lhs - rhs);
    const double w2e = r * r + eps * eps;
    lower[idx] = -0.25 * lap_a * w2e * w2e / (eps * eps);
  });

  CurvatureCheck out;
  out.min_lower_bound_ratio = kInf;
  for (std::size_t idx = 0; idx < residual.size(); ++idx) {
    if (residual[idx] > out.max_residual) {
      out.max_residual = residual[idx];
      const double r = grid.radii[idx / na], theta = grid.angles[idx % na];
      out.witness = {r * std::cos(theta), r * std::sin(theta)};
    }
    out.min_lower_bound_ratio = std::min(out.min_lower_bound_ratio, lower[idx]);
  }
  return out;
}

}  // namespace l2ext
