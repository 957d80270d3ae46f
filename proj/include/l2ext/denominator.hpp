#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "l2ext/expr.hpp"
#include "l2ext/quadrature.hpp"

namespace l2ext {

enum class Family { FN1, FN2, FN3, FN4, Expr };

std::string family_name(Family f);

/// C(g) is infinite; the tail integral ∫_1^∞ dt/g does not converge.
class DivergenceError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// A candidate denominator g on [1, ∞): a built-in family or a parsed
/// expression, times a positive scale λ.
///
/// FN4 uses a common base for the iterated logarithms,
///   ℓ_k(x) = log^(k)(E_{N-1} x),  E_j = exp^(j)(1),
///   g(x) = s^-1 x ℓ_1 ⋯ ℓ_{N-2} ℓ_{N-1}^(1+s),
/// for which ∫_1^x dt/g = 1 - ℓ_{N-1}(x)^-s holds exactly.
class DenominatorSpec {
 public:
  static DenominatorSpec fn1(double s, double scale = 1.0);
  static DenominatorSpec fn2(double scale = 1.0);
  static DenominatorSpec fn3(double s, double scale = 1.0);
  static DenominatorSpec fn4(double s, int n, double scale = 1.0);
  /// Throws DomainError if g is not positive on a sampling grid of [1, 1e8].
  static DenominatorSpec expression(const Expr& e, const ParamMap& params = {}, double scale = 1.0);
  static DenominatorSpec expression(std::string_view text, const ParamMap& params = {}, double scale = 1.0);

  Family family() const noexcept { return family_; }
  bool builtin() const noexcept { return family_ != Family::Expr; }
  double s() const noexcept { return s_; }
  int n() const noexcept { return n_; }
  double scale() const noexcept { return scale_; }
  double quad_tol() const noexcept { return quad_tol_; }
  const Expr& expr() const noexcept { return expr_; }

  /// Short identifier, e.g. "fn3(s=0.5)" or "expr(x^3)*0.5".
  std::string id() const;

  DenominatorSpec with_scale(double scale) const;
  DenominatorSpec with_quad_tol(double tol) const;

  // ---- unscaled pieces (λ = 1); public for the twist and certificate code ----

  double base(double x) const;
  double base_derivative(double x) const;
  /// x / base(x), evaluated without overflow for the built-ins.
  double base_x_over_g(double x) const;
  /// ∫_1^x dt / base.
  double base_tail(double x) const;
  /// ∫_a^b dt / base for a ≤ b.
  double base_tail_between(double a, double b) const;
  /// Closed-form 1 - tail(x)/C (built-ins only).
  double upper_fraction(double x) const;
  /// ∫_1^∞ dt / base; infinity when divergent.
  double base_c() const noexcept { return base_c_; }
  double base_c_error() const noexcept { return base_c_error_; }
  /// Location of the unresolved tail mass when C diverges.
  double divergence_witness() const noexcept { return divergence_witness_; }

 private:
  DenominatorSpec() = default;
  void compute_expression_c();
  quad::Options options() const;

  Family family_ = Family::FN2;
  double s_ = 1.0;
  int n_ = 2;
  double scale_ = 1.0;
  double quad_tol_ = 1e-10;
  Expr expr_;        // bound: no free parameters
  Expr derivative_;  // d/dx of expr_
  std::string text_;
  double base_c_ = 1.0;
  double base_c_error_ = 0.0;
  double divergence_witness_ = 0.0;
  // FN4: E_{m-k} for k = 1..m, m = N-1 (index k-1)
  std::vector<double> towers_;
};

/// λ·g(x). Throws DomainError for x < 1 or when g is nonpositive or NaN.
double eval_g(const DenominatorSpec& spec, double x);

/// ∫_1^x dt/g(t).
double tail_cdf(const DenominatorSpec& spec, double x);

struct TailConstant {
  double value = 0.0;  // +inf when divergent
  double error = 0.0;
  bool finite = true;
  double witness = 0.0;  // where the tail mass escapes, if divergent
};

/// C(g) = ∫_1^∞ dt/g(t).
TailConstant c_of_g(const DenominatorSpec& spec);

/// Rescales so that C(g) = 1. Throws DivergenceError if C(g) is infinite.
DenominatorSpec normalize(const DenominatorSpec& spec);

bool is_normalized(const DenominatorSpec& spec, double tol = 1e-8);

/// G_δ(x) = (1 + δ/C · ∫_1^x dt/g) / (1 + δ).
double g_delta(const DenominatorSpec& spec, double delta, double x);

struct TwistSamples {
  double delta = 0.0;
  std::vector<double> xs;
  std::vector<double> G;
  std::vector<double> h;
  std::vector<double> hp;
  std::vector<double> hpp;
};

/// Default sampling grid: n log-spaced points on [1, xmax].
std::vector<double> default_twist_grid(std::size_t n = 200, double xmax = 100.0);

TwistSamples h_delta_samples(const DenominatorSpec& spec, double delta, std::span<const double> xs);

/// |h''(x) + δ/((1+δ) C g(x)) (1+h'(x))²| with h'' from a central difference of h'.
double ode_residual(const DenominatorSpec& spec, double delta, double x);

struct KDelta {
  double K = 0.0;  // +inf when the scan sees growth at x → ∞
  double witness_x = 1.0;
  bool finite = true;
};

/// K_δ(g) = sup_{x≥1} (x + h_δ(x)) / g(x).
KDelta k_delta(const DenominatorSpec& spec, double delta);

struct DiskMass {
  double value = 0.0;
  double error = 0.0;
};

/// 2∫_0^1 dr / (r g(log(e/r²))), equal to C(g) through t = 1 - 2 log r.
DiskMass disk_mass(const DenominatorSpec& spec);

/// G_δ, h_δ and derivatives for one (g, δ). The ODE normalization uses C·g,
/// so unnormalized specs give the same twist as their normalized version.
class Twist {
 public:
  Twist(const DenominatorSpec& spec, double delta);

  const DenominatorSpec& spec() const noexcept { return spec_; }
  double delta() const noexcept { return delta_; }

  /// 1 - ∫_1^x/C.
  double upper(double x) const;
  double G(double x) const;
  double h(double x) const;
  double hp(double x) const;
  double hpp(double x) const;

  /// h at increasing points xs (xs[0] ≥ 1), accumulated interval by interval.
  std::vector<double> h_on(std::span<const double> xs) const;

  /// ∫_a^b (1-G)/G given upper(a).
  double h_increment(double a, double b, double upper_a) const;

  /// ∫_a^b with a single Kronrod panel; smooth in (a, b) for finite differences.
  double h_increment_smooth(double a, double b) const;

 private:
  double upper_shift(double x, double upper_x, double y) const;

  DenominatorSpec spec_;
  double delta_;
  double eps_;  // δ/(1+δ)
};

}  // namespace l2ext
