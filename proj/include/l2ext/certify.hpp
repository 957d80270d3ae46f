#pragma once

#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "l2ext/denominator.hpp"
#include "l2ext/weights.hpp"

namespace l2ext {

/// A hypothesis of the extension theorem fails at a specific point, e.g.
/// e^{-R} g(α) < g(1) so that g^{-1} is out of range.
class HypothesisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BergCheck {
  bool pass = true;
  /// (Re w, Im w, γ, ε) of the first violation.
  std::optional<std::array<double, 4>> witness;
  std::string reason;
};

struct HConditions {
  std::array<bool, 3> ok{true, true, true};
  /// First violating grid index for x + h ≥ 1, h' ≥ 0 and h'' < 0.
  std::array<std::optional<std::size_t>, 3> first_violation;
  bool all() const { return ok[0] && ok[1] && ok[2]; }
};

struct DeltaCertificate {
  double delta = 0.0;
  double C = 0.0;
  double K = 0.0;
  bool K_finite = true;
  double witness_x = 1.0;
  double ode_max_residual = 0.0;
  std::array<bool, 3> h_conditions_ok{true, true, true};
  /// 4 (K + (1+δ)/δ C); infinite iff K is.
  double bound = 0.0;
  std::optional<BergCheck> berg;
};

struct ClassDResult {
  bool pass = false;
  /// "monotone", "finite-C" or "finite-K" when pass is false.
  std::string violated;
  std::string reason;
  double witness = 0.0;
  std::optional<DeltaCertificate> best;
  std::vector<DeltaCertificate> all;
};

DeltaCertificate certify_delta(const DenominatorSpec& spec, double delta);

/// Membership in the denominator class: g' ≥ 0 on a log grid, finite
/// C(g), and finite K_δ for some δ in the grid. `best` minimizes the bound.
ClassDResult check_class_d(const DenominatorSpec& spec, std::span<const double> delta_grid);

HConditions check_h_conditions(const TwistSamples& samples);
HConditions check_h_conditions(const DenominatorSpec& spec, double delta, std::span<const double> xs);

/// g^{-1}(e^{-R} g(γ - log(|w|² + ε²))), inverted by bisection in log x on [1, 1e12].
/// Throws HypothesisError when the argument falls below g(1).
double a_function(const DenominatorSpec& spec, const WeightModel& weight, double gamma, double eps, double w_abs2);

/// g^{-1}(target) on [1, 1e12] for the unscaled g.
double inverse_g(const DenominatorSpec& spec, double target);

/// Lower-bound and subharmonicity hypotheses on an n×n polar grid of the punctured disk, radii in
/// [1e-3, 1 - 1e-3], for every (γ, ε) pair.
BergCheck check_berg(const DenominatorSpec& spec, const WeightModel& weight, std::span<const double> gamma_grid,
                     std::span<const double> eps_grid, int grid_n);

/// R + log|w|² ≤ 0, and R, R + log|w|² subharmonic on the same grid.
BergCheck check_ohsawa(const WeightModel& weight, int grid_n);

struct TauA {
  double tau = 0.0;
  double A = 0.0;
};

TauA tau_and_A(const DenominatorSpec& spec, double delta, double a_val);

struct CurvatureCheck {
  double max_residual = 0.0;
  /// min (-Δa/4)(|w|²+ε²)²/ε² over the grid; only meaningful for R = 0.
  double min_lower_bound_ratio = 0.0;
  std::array<double, 2> witness{0.0, 0.0};
};

/// Finite-difference check of -∂∂̄τ - (1/A)∂τ∧∂̄τ = (1+h'(a))(-∂∂̄a) on the w-disk.
CurvatureCheck curvature_identity_check(const DenominatorSpec& spec, double delta, const WeightModel& weight,
                                        double gamma, double eps, int grid_n, double step = 1e-4);

/// Default δ grid {0.25, 0.5, 1, √2, 2, 4}.
std::vector<double> default_delta_grid();

}  // namespace l2ext
