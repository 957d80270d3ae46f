#include <Eigen/Dense>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <map>
#include <numbers>
#include <tuple>

#include "doctest.h"
#include "l2ext/bergman.hpp"
#include "support.hpp"

using namespace l2ext;

namespace {

constexpr double kPi = std::numbers::pi;

WeightModel bidisk(double a, double b, double c) {
  WeightModel w;
  w.domain = Domain::Bidisk;
  w.kappa = Kappa::quadratic(a, b, c);
  return w;
}

WeightModel disk(Kappa k = Kappa::zero(), RModel R = RModel::zero()) {
  WeightModel w;
  w.kappa = std::move(k);
  w.R = std::move(R);
  return w;
}

// ∫_1^∞ F(t) dt by exp-sinh.
template <class F>
double tail_integral(F f) {
  boost::math::quadrature::exp_sinh<double> rule;
  return rule.integrate([&](double u) { return f(1.0 + u); }, 1e-13);
}

// Gram entry for κ = a|z|² + b|w|² + c Re(z w̄) and g(t) = t², from the angular
// reduction ∫ e^{imψ} e^{-x cos ψ} dψ = 2π (-1)^m I_m(x):
//   4π (-1)^m ∫_1^∞ r^Q e^{-b r²} / g(t) ∫_0^1 ρ^{P+1} e^{-a ρ²} I_m(c ρ r) dρ dt,  r = e^{(1-t)/2}.
double bessel_entry(double a, double b, double c, int p, int q, int pp, int qq) {
  const int P = p + pp, Q = q + qq, m = std::abs(p - pp);
  auto inner = [&](double r) {
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        [&](double rho) { return std::pow(rho, P + 1) * std::exp(-a * rho * rho) * std::cyl_bessel_i(m, c * rho * r); },
        0.0, 1.0, 10, 1e-14);
  };
  const double v = tail_integral([&](double t) {
    const double r = std::exp(0.5 * (1.0 - t));
    return std::pow(r, Q) * std::exp(-b * r * r) * inner(r) / (t * t);
  });
  return 4.0 * kPi * (m % 2 ? -1.0 : 1.0) * v;
}

}  // namespace

TEST_SUITE("bergman") {

TEST_CASE("m_0 = 1 for every normalized family at kappa = 0") {
  for (const auto& spec : default_sweep_specs()) {
    INFO(spec.id());
    CHECK(disk_moments(spec, Kappa::zero(), 0).moments[0] == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("FN2 moments against exponential integrals") {
  // m_k = ∫_1^∞ e^{k(1-t)} / t² dt = 1 - k e^k E_1(k)
  const MomentTable mt = disk_moments(DenominatorSpec::fn2(), Kappa::zero(), 3);
  for (int k = 1; k <= 3; ++k) {
    const double expect = 1.0 + k * std::exp(double(k)) * std::expint(-double(k));
    CHECK(mt.moments[std::size_t(k)] == doctest::Approx(expect).epsilon(1e-11));
  }
  CHECK(mt.moments[1] == doctest::Approx(0.403652637676806).epsilon(1e-12));
}

TEST_CASE("kappa = |w|^2 moment against direct integration") {
  const double expect = tail_integral([](double t) { return std::exp(-std::exp(1.0 - t)) / (t * t); });
  const MomentTable mt = disk_moments(DenominatorSpec::fn2(), Kappa::quadratic(0.0, 1.0, 0.0), 0);
  CHECK(mt.moments[0] == doctest::Approx(expect).epsilon(1e-11));
}

TEST_CASE("unnormalized specs are rejected") {
  CHECK_THROWS_AS(disk_moments(DenominatorSpec::fn2(2.0), Kappa::zero(), 1), DomainError);
  CHECK_THROWS_AS(sweep_verify({DenominatorSpec::fn2(2.0)}, default_sweep_weights(), {{1.0}}, {1}), DomainError);
}

TEST_CASE("disk verdicts") {
  const DenominatorSpec spec = DenominatorSpec::fn2();
  const ModelVerdict flat = disk_min_extension(spec, disk(), 1.4142);
  CHECK(flat.ratio == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(flat.flag == "pass");
  CHECK(flat.bound > 10.0);
  const ModelVerdict shifted = disk_min_extension(spec, disk(Kappa::zero(), RModel::constant(-0.3)), 1.0);
  CHECK(shifted.ratio == doctest::Approx(std::exp(-0.3)).epsilon(1e-10));
  CHECK_THROWS_AS(disk_min_extension(spec, disk(Kappa::zero(), RModel::radial(RadialProfile::log_multiple(0.1)))),
                  DomainError);
}

TEST_CASE("coupled Gram entries match the Bessel reduction") {
  const DenominatorSpec spec = DenominatorSpec::fn2();
  for (auto [a, b, c] : {std::tuple{1.0, 1.0, 1.0}, std::tuple{2.0, 0.5, 1.5}}) {
    const Gram g = bidisk_gram(spec, bidisk(a, b, c), 3, GramMethod::Tensor);
    CHECK(g.min_eigenvalue > 0.0);
    for (int p = 0; p <= 3; ++p)
      for (int q = 0; q <= 3; ++q)
        for (int pp = 0; pp <= 3; ++pp)
          for (int qq = 0; qq <= 3; ++qq) {
            const double v = g.at(p, q, pp, qq);
            if (p + q != pp + qq) {
              CHECK(v == 0.0);
              continue;
            }
            if (pp < p || (pp == p && qq < q)) continue;
            INFO("(", p, ",", q, ") x (", pp, ",", qq, ") c = ", c);
            const double expect = bessel_entry(a, b, c, p, q, pp, qq);
            CHECK(std::abs(v - expect) <= 1e-9 * std::max(1.0, std::abs(expect)));
          }
  }
}

TEST_CASE("separable and tensor paths agree at c = 0") {
  for (const auto& spec : {DenominatorSpec::fn1(0.5), DenominatorSpec::fn4(0.5, 3)}) {
    const Gram s = bidisk_gram(spec, bidisk(1.0, 1.0, 0.0), 4, GramMethod::Separable);
    const Gram t = bidisk_gram(spec, bidisk(1.0, 1.0, 0.0), 4, GramMethod::Tensor);
    for (std::size_t i = 0; i < s.entries.size(); ++i)
      CHECK(std::abs(s.entries[i] - t.entries[i]) <= 1e-12 * std::max(1.0, std::abs(s.entries[i])));
  }
  CHECK_THROWS(bidisk_gram(DenominatorSpec::fn2(), bidisk(1.0, 1.0, 1.0), 2, GramMethod::Separable));
}

TEST_CASE("z-moments against incomplete gamma") {
  // 4π ∫_0^1 ρ^{2p+1} e^{-ρ²} dρ = 2π γ(p+1, 1)
  const std::vector<double> mu = z_moments(Kappa::quadratic(1.0, 0.0, 0.0), 5);
  for (int p = 0; p <= 5; ++p)
    CHECK(mu[std::size_t(p)] == doctest::Approx(2.0 * kPi * boost::math::tgamma_lower(p + 1.0, 1.0)).epsilon(1e-13));
}

TEST_CASE("bidisk KKT minimum equals the Schur complement") {
  const DenominatorSpec spec = DenominatorSpec::fn3(0.5);
  const WeightModel w = bidisk(1.0, 1.0, 1.0);
  const int D = 4;
  const Gram g = bidisk_gram(spec, w, D);
  const DeltaCertificate cert = verdict_certificate(spec, 1.0);
  const std::vector<double> f = {3.0, 0.0, 2.0};
  const ModelVerdict v = bidisk_min_extension(spec, w, g, f, D, cert, true);

  std::vector<int> fixed, free;
  for (int p = 0; p <= D; ++p)
    for (int q = 0; q <= D; ++q) (q == 0 ? fixed : free).push_back(int(Gram::index(p, q, D)));
  const std::size_t n = g.size();
  auto M = [&](int i, int j) { return g.entries[std::size_t(i) * n + std::size_t(j)]; };
  Eigen::MatrixXd Mff(free.size(), free.size()), Mfx(free.size(), fixed.size()), Mxx(fixed.size(), fixed.size());
  for (std::size_t i = 0; i < free.size(); ++i) {
    for (std::size_t j = 0; j < free.size(); ++j) Mff(i, j) = M(free[i], free[j]);
    for (std::size_t j = 0; j < fixed.size(); ++j) Mfx(i, j) = M(free[i], fixed[j]);
  }
  for (std::size_t i = 0; i < fixed.size(); ++i)
    for (std::size_t j = 0; j < fixed.size(); ++j) Mxx(i, j) = M(fixed[i], fixed[j]);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(fixed.size());
  for (std::size_t p = 0; p < f.size(); ++p) x(p) = f[p];
  const double n_min = x.dot(Mxx * x) - (Mfx * x).dot(Mff.ldlt().solve(Mfx * x));
  CHECK(v.ratio * bidisk_nu(w, f) == doctest::Approx(n_min).epsilon(1e-10));
}

TEST_CASE("separable weights reduce to the disk ratio") {
  // With c = 0 the z- and w-variables decouple and the minimum keeps only q = 0.
  const DenominatorSpec spec = DenominatorSpec::fn2();
  const double disk_ratio = disk_min_extension(spec, disk(Kappa::quadratic(0.0, 1.0, 0.0)), 1.0).ratio;
  for (const auto& f : default_sweep_f()) {
    const ModelVerdict v = bidisk_min_extension(spec, bidisk(1.0, 1.0, 0.0), f, 3, 1.0);
    CHECK(v.ratio == doctest::Approx(disk_ratio).epsilon(1e-10));
  }
}

TEST_CASE("property: truncation monotonicity and the theorem bound") {
  const std::vector<ModelVerdict> vs =
      sweep_verify({DenominatorSpec::fn2(), DenominatorSpec::fn3(0.5)}, default_sweep_weights(), default_sweep_f(),
                   {1, 2, 3, 4}, std::nullopt);
  std::map<std::string, double> last;
  for (const auto& v : vs) {
    CHECK(v.flag == "pass");
    CHECK(v.ratio <= v.bound + v.quad_error);
    if (v.weight_id.find("kappa=0;R=0") != std::string::npos) CHECK(std::abs(v.ratio - 1.0) <= 1e-7);
    if (v.domain != Domain::Bidisk) continue;
    std::string key = v.spec_id + "|" + v.weight_id + "|";
    for (double c : v.f_coeffs) key += std::to_string(c) + ",";
    if (auto it = last.find(key); it != last.end()) CHECK(v.ratio <= it->second * (1.0 + 1e-12));
    last[key] = v.ratio;
  }
}

}  // TEST_SUITE
