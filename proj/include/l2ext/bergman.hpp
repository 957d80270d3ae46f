#pragma once

#include <optional>
#include <string>
#include <vector>

#include "l2ext/certify.hpp"
#include "l2ext/denominator.hpp"
#include "l2ext/weights.hpp"

namespace l2ext {

/// m_k = 2∫_0^1 r^{2k+1} e^{-κ(r²)} / (r² g(log(e/r²))) dr, k = 0..K_max.
struct MomentTable {
  std::string spec_id;
  std::string kappa_id;
  std::vector<double> moments;
  std::vector<double> errors;
};

/// Computed in t = 1 - 2 log r, where the integrand is e^{-κ(r²)} r^{2k} / g(t).
/// Only κ.w_poly is used. Throws DomainError for an unnormalized spec.
MomentTable disk_moments(const DenominatorSpec& spec, const Kappa& kappa, int k_max);

struct ModelVerdict {
  Domain domain = Domain::Disk;
  std::string spec_id;
  std::string weight_id;
  std::vector<double> f_coeffs;
  double delta = 0.0;
  /// N_min / ν_f.
  double ratio = 0.0;
  double bound = 0.0;
  double margin = 0.0;
  int degree = 0;
  double quad_error = 0.0;
  /// "pass"; "CRITICAL" when ratio > bound + quad_error for a weight that passed
  /// the hypothesis checks; "uncertified" for a violation under failed hypotheses.
  std::string flag;
};

/// Bound and δ used by the verdicts: a fixed δ, or the best certificate on the
/// default δ grid.
DeltaCertificate verdict_certificate(const DenominatorSpec& spec, std::optional<double> delta);

/// Unit disk, Z = {0}: the minimal extension of F(0) = f is the constant, so the
/// ratio is m_0 e^{(R+κ)(0)}. R must be ZERO or CONSTANT.
ModelVerdict disk_min_extension(const DenominatorSpec& spec, const WeightModel& weight,
                                std::optional<double> delta = std::nullopt);
ModelVerdict disk_min_extension(const DenominatorSpec& spec, const WeightModel& weight, const DeltaCertificate& cert,
                                bool hypotheses_ok);

enum class GramMethod { Auto, Separable, Tensor };

/// Gram matrix of z^p w^q, 0 ≤ p, q ≤ D, in the N_F inner product on the bidisk,
/// stored row-major with index p (D+1) + q. Real and symmetric; entries vanish
/// unless p + q = p' + q'.
struct Gram {
  int degree = 0;
  std::vector<double> entries;
  std::vector<double> errors;
  double min_eigenvalue = 0.0;

  std::size_t size() const { return static_cast<std::size_t>((degree + 1) * (degree + 1)); }
  static std::size_t index(int p, int q, int degree) { return static_cast<std::size_t>(p * (degree + 1) + q); }
  double at(int p, int q, int pp, int qq) const { return entries[index(p, q, degree) * size() + index(pp, qq, degree)]; }
  /// The Gram of degree d ≤ degree, taken as a principal submatrix.
  Gram truncated(int d) const;
};

/// Tensor quadrature in (t, ρ, ψ) with t = 1 - 2 log|w| and ψ = θ_z - θ_w; for
/// c = 0 the separable path multiplies z-moments by w-moments. Throws
/// NumericError when the smallest eigenvalue is below -1e-10 relative.
Gram bidisk_gram(const DenominatorSpec& spec, const WeightModel& weight, int degree,
                 GramMethod method = GramMethod::Auto);

/// z-moments μ_p = 4π ∫_0^1 ρ^{2p+1} e^{-P_z(ρ²)} dρ, p = 0..p_max.
std::vector<double> z_moments(const Kappa& kappa, int p_max);

/// ν_f = ∫_{|z|<1} |f|² e^{-(R+κ)(z,0)} with |dz|² = 2 dA.
double bidisk_nu(const WeightModel& weight, const std::vector<double>& f_coeffs);

/// Minimal N_F over extensions F = Σ c_pq z^p w^q dz∧dw with c_{p0} = f_p, from
/// the KKT system [[M, Bᵀ], [B, 0]].
ModelVerdict bidisk_min_extension(const DenominatorSpec& spec, const WeightModel& weight,
                                  const std::vector<double>& f_coeffs, int degree,
                                  std::optional<double> delta = std::nullopt);

/// Same, reusing a precomputed Gram (truncated to `degree`).
ModelVerdict bidisk_min_extension(const DenominatorSpec& spec, const WeightModel& weight, const Gram& gram,
                                  const std::vector<double>& f_coeffs, int degree, const DeltaCertificate& cert,
                                  bool hypotheses_ok);

/// Weight hypotheses for the theorem: check_weight plus check_berg on the default
/// (γ, ε) grids at grid size 16.
bool weight_hypotheses_ok(const DenominatorSpec& spec, const WeightModel& weight);

/// Cross product of specs × weights × f × degrees. Disk weights give one verdict
/// per (spec, weight); bidisk weights one per (f, degree). Unnormalized specs are
/// rejected with DomainError before any work starts.
std::vector<ModelVerdict> sweep_verify(const std::vector<DenominatorSpec>& specs,
                                       const std::vector<WeightModel>& weights,
                                       const std::vector<std::vector<double>>& f_list, const std::vector<int>& degrees,
                                       std::optional<double> delta = std::nullopt);

/// The default sweep used by the acceptance suite and `l2ext sweep`.
std::vector<DenominatorSpec> default_sweep_specs();
std::vector<WeightModel> default_sweep_weights();
std::vector<std::vector<double>> default_sweep_f();

}  // namespace l2ext
