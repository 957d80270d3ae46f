#include "l2ext/bergman.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "l2ext/constants.hpp"
#include "l2ext/parallel.hpp"

namespace l2ext {

namespace {

// In t = 1 - 2 log r the radial factors decay like e^{-(t-1)} or faster once
// the r → 0 limit is removed; e^{-90} is far below double resolution.
constexpr double kTMax = 91.0;
constexpr int kRhoNodes = 64;
constexpr int kPsiNodes = 64;

void require_normalized(const DenominatorSpec& spec) {
  if (!is_normalized(spec))
    throw DomainError(spec.id() + " is not normalized (C(g) != 1); normalize it before model verification");
}

double kappa_w0(const Kappa& k) { return k.w_poly.empty() ? 0.0 : k.w_poly[0]; }

double r_at(double t) { return std::exp(0.5 * (1.0 - t)); }

double inv_g(const DenominatorSpec& spec, double t) {
  const double g = spec.scale() * spec.base(t);
  return std::isinf(g) ? 0.0 : 1.0 / g;
}

quad::Options moment_options() {
  quad::Options opt;
  opt.abs_tol = 1e-13;
  opt.max_intervals = 20000;
  return opt;
}

std::string verdict_flag(double ratio, double bound, double qe, bool hypotheses_ok) {
  if (ratio <= bound + qe) return "pass";
  return hypotheses_ok ? "CRITICAL" : "uncertified";
}

}  // namespace

// ------------------------------------------------------------ disk

MomentTable disk_moments(const DenominatorSpec& spec, const Kappa& kappa, int k_max) {
  require_normalized(spec);
  if (k_max < 0) throw std::invalid_argument("k_max must be nonnegative");
  const double e0 = std::exp(-kappa_w0(kappa));
  const double C = c_of_g(spec).value;
  const std::size_t dim = static_cast<std::size_t>(k_max) + 1;
  auto f = [&](double t, std::span<double> out) {
    const double r2 = r_at(t) * r_at(t);
    const double ig = inv_g(spec, t);
    const double ek = std::exp(-kappa.w_part(r2));
    double rk = 1.0;
    for (std::size_t k = 0; k < dim; ++k) {
      // k = 0 keeps the slowly decaying 1/g part out of the quadrature
      out[k] = (k == 0 ? ek - e0 : rk * ek) * ig;
      rk *= r2;
    }
  };
  const quad::VectorResult res = quad::integrate_vector(f, dim, 1.0, kTMax, moment_options());
  if (!res.converged) throw NumericError("disk moment quadrature did not converge for " + spec.id());
  MomentTable mt;
  mt.spec_id = spec.id();
  mt.kappa_id = kappa.id();
  mt.moments = res.value;
  mt.errors = res.error;
  mt.moments[0] += e0 * C;
  mt.errors[0] += e0 * c_of_g(spec).error;
  return mt;
}

DeltaCertificate verdict_certificate(const DenominatorSpec& spec, std::optional<double> delta) {
  if (delta) return certify_delta(spec, *delta);
  const std::vector<double> grid = default_delta_grid();
  ClassDResult cls = check_class_d(spec, grid);
  if (!cls.pass) throw DomainError(spec.id() + " fails class membership " + cls.violated + ": " + cls.reason);
  DeltaCertificate best = *cls.best;
  const DeltaOptimum opt = optimal_delta(spec, Objective::Generic);
  if (opt.value < best.bound) best = certify_delta(spec, opt.delta);
  return best;
}

bool weight_hypotheses_ok(const DenominatorSpec& spec, const WeightModel& weight) {
  if (!check_weight(weight).ok) return false;
  if (weight.R.kind() == RModel::Kind::Zero) return true;
  const double gammas[] = {1.05, 1.2, 1.5, 2.0};
  const double epss[] = {0.01, 0.05, 0.1};
  if (!check_berg(spec, weight, gammas, epss, 16).pass) return false;
  return !weight.ohsawa_mode || check_ohsawa(weight, 16).pass;
}

ModelVerdict disk_min_extension(const DenominatorSpec& spec, const WeightModel& weight, const DeltaCertificate& cert,
                                bool hypotheses_ok) {
  if (weight.R.kind() == RModel::Kind::Radial)
    throw DomainError("the disk model needs R = ZERO or CONSTANT (R(0) enters nu_f)");
  const MomentTable mt = disk_moments(spec, weight.kappa, 0);
  const double lift = std::exp(weight.R.at(0.0) + kappa_w0(weight.kappa));
  ModelVerdict v;
  v.domain = Domain::Disk;
  v.spec_id = spec.id();
  v.weight_id = weight.id();
  v.f_coeffs = {1.0};
  v.delta = cert.delta;
  v.ratio = mt.moments[0] * lift;
  v.quad_error = mt.errors[0] * lift;
  v.bound = cert.bound;
  v.margin = v.bound - v.ratio;
  v.degree = 0;
  v.flag = verdict_flag(v.ratio, v.bound, v.quad_error, hypotheses_ok);
  return v;
}

ModelVerdict disk_min_extension(const DenominatorSpec& spec, const WeightModel& weight, std::optional<double> delta) {
  require_normalized(spec);
  return disk_min_extension(spec, weight, verdict_certificate(spec, delta), weight_hypotheses_ok(spec, weight));
}

// ------------------------------------------------------------ bidisk

std::vector<double> z_moments(const Kappa& kappa, int p_max) {
  const quad::Rule rule = quad::gauss_legendre(kRhoNodes, 0.0, 1.0);
  std::vector<double> mu(static_cast<std::size_t>(p_max) + 1, 0.0);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double rho = rule.nodes[i];
    const double base = rule.weights[i] * rho * std::exp(-kappa.z_part(rho * rho));
    double rp = 1.0;
    for (auto& m : mu) {
      m += base * rp;
      rp *= rho * rho;
    }
  }
  for (auto& m : mu) m *= 4.0 * std::numbers::pi;
  return mu;
}

double bidisk_nu(const WeightModel& weight, const std::vector<double>& f_coeffs) {
  if (weight.R.kind() == RModel::Kind::Radial)
    throw DomainError("the bidisk model needs R = ZERO or CONSTANT (R(0) enters nu_f)");
  if (f_coeffs.empty()) return 0.0;
  const std::vector<double> mu = z_moments(weight.kappa, static_cast<int>(f_coeffs.size()) - 1);
  double nu = 0.0;
  for (std::size_t p = 0; p < f_coeffs.size(); ++p) nu += f_coeffs[p] * f_coeffs[p] * mu[p];
  return nu * std::exp(-kappa_w0(weight.kappa) - weight.R.at(0.0));
}

Gram Gram::truncated(int d) const {
  if (d > degree || d < 0) throw std::invalid_argument("truncation degree out of range");
  Gram out;
  out.degree = d;
  const std::size_t n = out.size();
  out.entries.assign(n * n, 0.0);
  out.errors.assign(n * n, 0.0);
  for (int p = 0; p <= d; ++p)
    for (int q = 0; q <= d; ++q)
      for (int pp = 0; pp <= d; ++pp)
        for (int qq = 0; qq <= d; ++qq) {
          const std::size_t src = index(p, q, degree) * size() + index(pp, qq, degree);
          const std::size_t dst = index(p, q, d) * n + index(pp, qq, d);
          out.entries[dst] = entries[src];
          out.errors[dst] = errors[src];
        }
  Eigen::Map<const Eigen::MatrixXd> m(out.entries.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  out.min_eigenvalue = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly).eigenvalues()(0);
  return out;
}

namespace {

struct EntryKey {
  int P, Q, m;  // p + p', q + q', |p - p'|
};

Gram separable_gram(const DenominatorSpec& spec, const Kappa& kappa, int D) {
  const std::vector<double> mu = z_moments(kappa, D);
  const MomentTable mt = disk_moments(spec, kappa, D);
  Gram g;
  g.degree = D;
  const std::size_t n = g.size();
  g.entries.assign(n * n, 0.0);
  g.errors.assign(n * n, 0.0);
  for (int p = 0; p <= D; ++p)
    for (int q = 0; q <= D; ++q) {
      const std::size_t i = Gram::index(p, q, D);
      g.entries[i * n + i] = mu[static_cast<std::size_t>(p)] * mt.moments[static_cast<std::size_t>(q)];
      g.errors[i * n + i] = mu[static_cast<std::size_t>(p)] * mt.errors[static_cast<std::size_t>(q)];
    }
  return g;
}

Gram tensor_gram(const DenominatorSpec& spec, const Kappa& kappa, int D) {
  // Unique entries (i ≤ j) with equal total degree.
  std::vector<std::pair<std::size_t, std::size_t>> slots;
  std::vector<EntryKey> keys;
  for (int p = 0; p <= D; ++p)
    for (int q = 0; q <= D; ++q)
      for (int pp = 0; pp <= D; ++pp)
        for (int qq = 0; qq <= D; ++qq) {
          if (p + q != pp + qq) continue;
          const std::size_t i = Gram::index(p, q, D), j = Gram::index(pp, qq, D);
          if (i > j) continue;
          slots.emplace_back(i, j);
          keys.push_back({p + pp, q + qq, std::abs(p - pp)});
        }

  const int P_max = 2 * D, m_max = D;
  const quad::Rule rho = quad::gauss_legendre(kRhoNodes, 0.0, 1.0);
  std::vector<double> rho_w(kRhoNodes), cos_psi(kPsiNodes), cos_table(static_cast<std::size_t>((m_max + 1) * kPsiNodes));
  for (int a = 0; a < kRhoNodes; ++a) rho_w[a] = rho.weights[a] * std::exp(-kappa.z_part(rho.nodes[a] * rho.nodes[a]));
  for (int b = 0; b < kPsiNodes; ++b) cos_psi[b] = std::cos(2.0 * std::numbers::pi * b / kPsiNodes);
  for (int m = 0; m <= m_max; ++m)
    for (int b = 0; b < kPsiNodes; ++b)
      cos_table[static_cast<std::size_t>(m * kPsiNodes + b)] = std::cos(m * 2.0 * std::numbers::pi * b / kPsiNodes);
  const double c = kappa.coupling;

  // J(P, m; r) = ∫_0^1 ρ^{P+1} e^{-P_z(ρ²)} Ψ_m(c ρ r) dρ, Ψ_m(x) = ∫_0^{2π} cos(mψ) e^{-x cos ψ} dψ.
  auto J_table = [&](double r, std::vector<double>& J) {
    J.assign(static_cast<std::size_t>((P_max + 1) * (m_max + 1)), 0.0);
    std::vector<double> psi(static_cast<std::size_t>(m_max + 1));
    for (int a = 0; a < kRhoNodes; ++a) {
      const double x = c * rho.nodes[a] * r;
      std::fill(psi.begin(), psi.end(), 0.0);
      for (int b = 0; b < kPsiNodes; ++b) {
        const double e = std::exp(-x * cos_psi[b]);
        for (int m = 0; m <= m_max; ++m) psi[static_cast<std::size_t>(m)] += cos_table[static_cast<std::size_t>(m * kPsiNodes + b)] * e;
      }
      double rp = rho.nodes[a] * rho_w[a];  // ρ^{P+1} weight
      for (int P = 0; P <= P_max; ++P) {
        for (int m = 0; m <= m_max; ++m)
          J[static_cast<std::size_t>(P * (m_max + 1) + m)] += rp * psi[static_cast<std::size_t>(m)] * (2.0 * std::numbers::pi / kPsiNodes);
        rp *= rho.nodes[a];
      }
    }
  };

  std::vector<double> J0;
  J_table(0.0, J0);
  const double ew0 = std::exp(-kappa_w0(kappa));
  const std::size_t dim = keys.size();

  auto integrand = [&](double t, std::span<double> out) {
    const double r = r_at(t);
    const double ig = inv_g(spec, t);
    const double ew = std::exp(-kappa.w_part(r * r));
    thread_local std::vector<double> J;
    J_table(r, J);
    for (std::size_t e = 0; e < dim; ++e) {
      const EntryKey& k = keys[e];
      const std::size_t jk = static_cast<std::size_t>(k.P * (m_max + 1) + k.m);
      double v = std::pow(r, k.Q) * ew * J[jk];
      if (k.Q == 0) v -= ew0 * J0[jk];  // r → 0 limit, added back through C(g)
      out[e] = 2.0 * v * ig;
    }
  };
  const quad::VectorResult res = quad::integrate_vector(integrand, dim, 1.0, kTMax, moment_options());
  if (!res.converged) throw NumericError("bidisk Gram quadrature did not converge for " + spec.id());
  const TailConstant C = c_of_g(spec);

  Gram g;
  g.degree = D;
  const std::size_t n = g.size();
  g.entries.assign(n * n, 0.0);
  g.errors.assign(n * n, 0.0);
  for (std::size_t e = 0; e < dim; ++e) {
    const EntryKey& k = keys[e];
    double v = res.value[e], err = res.error[e];
    if (k.Q == 0) {
      const double lim = 2.0 * ew0 * J0[static_cast<std::size_t>(k.P * (m_max + 1) + k.m)];
      v += lim * C.value;
      err += std::abs(lim) * C.error;
    }
    const auto [i, j] = slots[e];
    g.entries[i * n + j] = g.entries[j * n + i] = v;
    g.errors[i * n + j] = g.errors[j * n + i] = err;
  }
  return g;
}

}  // namespace

Gram bidisk_gram(const DenominatorSpec& spec, const WeightModel& weight, int degree, GramMethod method) {
  require_normalized(spec);
  if (degree < 0 || degree > 12) throw std::invalid_argument("Gram degree must lie in [0, 12]");
  const Kappa& kappa = weight.kappa;
  if (method == GramMethod::Auto) method = kappa.coupling == 0.0 ? GramMethod::Separable : GramMethod::Tensor;
  if (method == GramMethod::Separable && kappa.coupling != 0.0)
    throw std::invalid_argument("the separable Gram path needs c = 0");
  Gram g = method == GramMethod::Separable ? separable_gram(spec, kappa, degree) : tensor_gram(spec, kappa, degree);

  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::Map<const Eigen::MatrixXd> m(g.entries.data(), n, n);
  g.min_eigenvalue = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly).eigenvalues()(0);
  const double scale = m.diagonal().cwiseAbs().maxCoeff();
  if (g.min_eigenvalue < -1e-10 * scale)
    throw NumericError("bidisk Gram lost positive definiteness (min eigenvalue " + std::to_string(g.min_eigenvalue) +
                       ")");
  return g;
}

ModelVerdict bidisk_min_extension(const DenominatorSpec& spec, const WeightModel& weight, const Gram& gram,
                                  const std::vector<double>& f_coeffs, int degree, const DeltaCertificate& cert,
                                  bool hypotheses_ok) {
  if (f_coeffs.empty() || std::all_of(f_coeffs.begin(), f_coeffs.end(), [](double v) { return v == 0.0; }))
    throw DomainError("f must be a nonzero polynomial");
  if (static_cast<int>(f_coeffs.size()) - 1 > degree)
    throw DomainError("degree " + std::to_string(degree) + " is too small for deg f = " +
                      std::to_string(f_coeffs.size() - 1));
  const Gram G = degree == gram.degree ? gram : gram.truncated(degree);
  const auto n = static_cast<Eigen::Index>(G.size());
  const Eigen::Index k = degree + 1;
  Eigen::Map<const Eigen::MatrixXd> M(G.entries.data(), n, n);

  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + k, n + k);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + k);
  kkt.topLeftCorner(n, n) = M;
  for (Eigen::Index p = 0; p < k; ++p) {
    const auto col = static_cast<Eigen::Index>(Gram::index(static_cast<int>(p), 0, degree));
    kkt(n + p, col) = 1.0;
    kkt(col, n + p) = 1.0;
    rhs(n + p) = static_cast<std::size_t>(p) < f_coeffs.size() ? f_coeffs[static_cast<std::size_t>(p)] : 0.0;
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
  if (!lu.isInvertible()) throw NumericError("KKT system is singular at degree " + std::to_string(degree));
  const Eigen::VectorXd sol = lu.solve(rhs);
  const Eigen::VectorXd c = sol.head(n);
  const double n_min = c.dot(M * c);

  Eigen::Map<const Eigen::MatrixXd> E(G.errors.data(), n, n);
  const Eigen::VectorXd ac = c.cwiseAbs();
  const double n_err = ac.dot(E * ac);
  const double nu = bidisk_nu(weight, f_coeffs);

  ModelVerdict v;
  v.domain = Domain::Bidisk;
  v.spec_id = spec.id();
  v.weight_id = weight.id();
  v.f_coeffs = f_coeffs;
  v.delta = cert.delta;
  v.ratio = n_min / nu;
  // ν_f uses a 64-point Gauss rule on a polynomial times e^{-P_z}; its error is negligible.
  v.quad_error = n_err / nu + 1e-12 * v.ratio;
  v.bound = cert.bound;
  v.margin = v.bound - v.ratio;
  v.degree = degree;
  v.flag = verdict_flag(v.ratio, v.bound, v.quad_error, hypotheses_ok);
  return v;
}

ModelVerdict bidisk_min_extension(const DenominatorSpec& spec, const WeightModel& weight,
                                  const std::vector<double>& f_coeffs, int degree, std::optional<double> delta) {
  const Gram gram = bidisk_gram(spec, weight, degree);
  const DeltaCertificate cert = verdict_certificate(spec, delta);
  return bidisk_min_extension(spec, weight, gram, f_coeffs, degree, cert, weight_hypotheses_ok(spec, weight));
}

// ------------------------------------------------------------ sweep

std::vector<ModelVerdict> sweep_verify(const std::vector<DenominatorSpec>& specs,
                                       const std::vector<WeightModel>& weights,
                                       const std::vector<std::vector<double>>& f_list, const std::vector<int>& degrees,
                                       std::optional<double> delta) {
  for (const auto& s : specs) require_normalized(s);
  const int d_max = degrees.empty() ? 0 : *std::max_element(degrees.begin(), degrees.end());

  std::vector<DeltaCertificate> certs(specs.size());
  parallel_for(specs.size(), [&](std::size_t i) { certs[i] = verdict_certificate(specs[i], delta); });

  // One job per (spec, weight); each produces its verdicts in a fixed order.
  const std::size_t jobs = specs.size() * weights.size();
  std::vector<std::vector<ModelVerdict>> out(jobs);
  parallel_for(jobs, [&](std::size_t idx) {
    const DenominatorSpec& spec = specs[idx / weights.size()];
    const WeightModel& weight = weights[idx % weights.size()];
    const DeltaCertificate& cert = certs[idx / weights.size()];
    const bool hyp = weight_hypotheses_ok(spec, weight);
    auto& verdicts = out[idx];
    if (weight.domain == Domain::Disk) {
      verdicts.push_back(disk_min_extension(spec, weight, cert, hyp));
      return;
    }
    const Gram gram = bidisk_gram(spec, weight, d_max);
    for (const auto& f : f_list)
      for (int d : degrees) {
        if (static_cast<int>(f.size()) - 1 > d) continue;
        verdicts.push_back(bidisk_min_extension(spec, weight, gram, f, d, cert, hyp));
      }
  });

  std::vector<ModelVerdict> all;
  for (auto& v : out) all.insert(all.end(), std::make_move_iterator(v.begin()), std::make_move_iterator(v.end()));
  return all;
}

std::vector<DenominatorSpec> default_sweep_specs() {
  return {DenominatorSpec::fn1(0.5), DenominatorSpec::fn1(1.0),     DenominatorSpec::fn2(),
          DenominatorSpec::fn3(0.1), DenominatorSpec::fn3(0.5),     DenominatorSpec::fn4(0.5, 3)};
}

std::vector<WeightModel> default_sweep_weights() {
  std::vector<WeightModel> w;
  auto disk = [](Kappa k, RModel r) {
    WeightModel m;
    m.domain = Domain::Disk;
    m.kappa = std::move(k);
    m.R = std::move(r);
    return m;
  };
  auto bidisk = [](double a, double b, double c) {
    WeightModel m;
    m.domain = Domain::Bidisk;
    m.kappa = Kappa::quadratic(a, b, c);
    return m;
  };
  w.push_back(disk(Kappa::zero(), RModel::zero()));
  w.push_back(disk(Kappa::quadratic(0.0, 1.0, 0.0), RModel::zero()));
  w.push_back(disk(Kappa::zero(), RModel::constant(-0.3)));
  w.push_back(bidisk(0.0, 0.0, 0.0));
  w.push_back(bidisk(1.0, 1.0, 0.0));
  w.push_back(bidisk(1.0, 1.0, 1.0));
  w.push_back(bidisk(2.0, 0.5, 1.5));
  return w;
}

std::vector<std::vector<double>> default_sweep_f() { return {{1.0}, {0.0, 1.0}, {3.0, 0.0, 2.0}}; }

}  // namespace l2ext
