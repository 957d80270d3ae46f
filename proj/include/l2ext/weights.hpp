#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace l2ext {

/// A radial function of |w| on (0, 1]: either tabulated (linear interpolation,
/// clamped at the ends) or analytic.
class RadialProfile {
 public:
  RadialProfile() = default;
  static RadialProfile tabulated(std::vector<double> radii, std::vector<double> values);
  /// σ log|w|².
  static RadialProfile log_multiple(double sigma);
  static RadialProfile function(std::function<double(double)> f, std::string name);

  double operator()(double r) const;
  const std::string& name() const noexcept { return name_; }

 private:
  std::vector<double> radii_;
  std::vector<double> values_;
  std::function<double(double)> fn_;
  std::string name_;
};

/// Reads the two-column CSV (|w|, R) used by `--R radial:<file>`.
RadialProfile read_radial_csv(const std::string& path);

/// The function R of the submanifold norm, restricted to radial models in |w|.
class RModel {
 public:
  enum class Kind { Zero, Constant, Radial };

  static RModel zero() { return RModel(); }
  static RModel constant(double v);
  static RModel radial(RadialProfile p);

  Kind kind() const noexcept { return kind_; }
  double constant_value() const noexcept { return constant_; }
  const RadialProfile& profile() const noexcept { return profile_; }

  double at(double w_abs) const;
  std::string id() const;

 private:
  Kind kind_ = Kind::Zero;
  double constant_ = 0.0;
  RadialProfile profile_;
};

/// κ = P_z(|z|²) + P_w(|w|²) + c·Re(z w̄); polynomials in r² by coefficient.
/// On the disk only P_w is used.
struct Kappa {
  std::vector<double> z_poly;
  std::vector<double> w_poly;
  double coupling = 0.0;

  static Kappa zero() { return {}; }
  /// a|z|² + b|w|² + c Re(z w̄).
  static Kappa quadratic(double a, double b, double c);

  double z_part(double r2) const;
  double w_part(double r2) const;
  double at(std::complex<double> z, std::complex<double> w) const;
  std::string id() const;
};

enum class Domain { Disk, Bidisk };

struct WeightModel {
  Domain domain = Domain::Disk;
  Kappa kappa;
  RModel R;
  /// Additionally require R + log|w|² ≤ 0 and subharmonic R.
  bool ohsawa_mode = false;

  std::string id() const;
};

struct Admissibility {
  bool ok = true;
  std::string reason;
};

/// Structural checks: finite R on (0,1], coupling positivity (Hessian of κ
/// positive semidefinite on a grid), and the curvature hypothesis
/// i∂∂̄(κ + R + log|w|²) ≥ 0 sampled on the w-disk.
Admissibility check_weight(const WeightModel& weight, int grid_n = 64);

}  // namespace l2ext
