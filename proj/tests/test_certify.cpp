#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "l2ext/certify.hpp"
#include "support.hpp"

using namespace l2ext;

namespace {

WeightModel disk_weight(RModel R = RModel::zero()) {
  WeightModel w;
  w.R = std::move(R);
  return w;
}

// K_δ for FN2 from the closed-form h, by a dense scan.
double fn2_k(double delta) {
  const double eps = delta / (1.0 + delta);
  double best = 0.0;
  for (int i = 0; i <= 200000; ++i) {
    const double x = 1.0 + 9.0 * i / 200000.0;
    best = std::max(best, (x + eps * std::log((x - eps) / (1.0 - eps))) / (x * x));
  }
  return best;
}

}  // namespace

TEST_SUITE("certify") {

TEST_CASE("class membership of FN2 picks the smallest bound on the grid") {
  const std::vector<double> grid = {0.5, 1.0, std::numbers::sqrt2, 2.0};
  const ClassDResult r = check_class_d(DenominatorSpec::fn2(), grid);
  REQUIRE(r.pass);
  REQUIRE(r.all.size() == 4);
  for (const auto& c : r.all) {
    CHECK(c.bound == doctest::Approx(4.0 * (fn2_k(c.delta) + (1.0 + c.delta) / c.delta)).epsilon(1e-9));
    CHECK(c.ode_max_residual <= 1e-6);
    CHECK(c.h_conditions_ok[0]);
    CHECK(c.h_conditions_ok[1]);
    CHECK(c.h_conditions_ok[2]);
  }
  // the numeric K sits below (1+δ)²/(4δ), so δ = 2 beats δ = √2 here
  CHECK(r.best->delta == 2.0);
  CHECK(r.best->bound == doctest::Approx(4.0 * (fn2_k(2.0) + 1.5)).epsilon(1e-9));
}

TEST_CASE("class membership failures name the violated condition") {
  const double grid[] = {1.0};
  const ClassDResult dec = check_class_d(DenominatorSpec::expression("1/x"), grid);
  CHECK_FALSE(dec.pass);
  CHECK(dec.violated == "monotone");
  CHECK(dec.witness == doctest::Approx(1.0));

  const ClassDResult div = check_class_d(DenominatorSpec::expression("x*log(e*x)"), grid);
  CHECK(div.violated == "finite-C");
  CHECK(div.reason.find("diverges") != std::string::npos);

  CHECK(check_class_d(DenominatorSpec::expression("x^2"), grid).pass);
}

TEST_CASE("h-conditions detect injected faults") {
  const auto xs = default_twist_grid(50, 100.0);
  const TwistSamples good = h_delta_samples(DenominatorSpec::fn3(0.5), 1.0, xs);
  CHECK(check_h_conditions(good).all());

  TwistSamples t = good;
  t.h[10] = -xs[10];  // x + h = 0 < 1
  HConditions hc = check_h_conditions(t);
  CHECK_FALSE(hc.ok[0]);
  CHECK(hc.first_violation[0] == 10u);
  CHECK(hc.ok[1]);

  t = good;
  t.hp[7] = -0.01;
  hc = check_h_conditions(t);
  CHECK_FALSE(hc.ok[1]);
  CHECK(hc.first_violation[1] == 7u);

  t = good;
  t.hpp[3] = 0.0;
  hc = check_h_conditions(t);
  CHECK_FALSE(hc.ok[2]);
  CHECK(hc.first_violation[2] == 3u);

  // far out on FN1 both h' and h'' underflow; that is not a concavity failure
  const auto far = default_twist_grid(40, 1e4);
  const TwistSamples fn1 = h_delta_samples(DenominatorSpec::fn1(0.36), 0.53, far);
  CHECK(fn1.hpp.back() == 0.0);
  CHECK(check_h_conditions(fn1).all());
}

TEST_CASE("a(w) with R = 0 is alpha itself") {
  const DenominatorSpec spec = DenominatorSpec::fn2();
  const double alpha = 1.5 - std::log(0.01);
  CHECK(a_function(spec, disk_weight(), 1.5, 0.1, 0.0) == doctest::Approx(alpha).epsilon(1e-12));
  // e^{-R} = e: a = g^{-1}(e g(α)) = sqrt(e) α for g = x²
  const double a = a_function(spec, disk_weight(RModel::constant(-1.0)), 1.5, 0.1, 0.0);
  CHECK(a == doctest::Approx(std::sqrt(std::numbers::e) * alpha).epsilon(1e-12));
}

TEST_CASE("a(w) below g(1) is a hypothesis error") {
  CHECK_THROWS_AS(a_function(DenominatorSpec::fn2(), disk_weight(RModel::constant(0.5)), 1.0, 1e-6, 1.0),
                  HypothesisError);
}

TEST_CASE("inverse_g round trip") {
  Rng rng(5);
  const DenominatorSpec spec = DenominatorSpec::fn4(0.5, 3);
  for (int i = 0; i < 20; ++i) {
    const double x = rng.log_uniform(1.0, 1e6);
    CHECK(close_rel(inverse_g(spec, spec.base(x)), x, 1e-12));
  }
}

TEST_CASE("tau and A") {
  const TauA t = tau_and_A(DenominatorSpec::fn2(), 1.0, 1.0);
  CHECK(t.tau == doctest::Approx(1.0));
  CHECK(t.A == doctest::Approx(2.0));
  // A = (1+h')²/(-h'') = (1+δ) C g / δ
  const DenominatorSpec fn3 = DenominatorSpec::fn3(0.5);
  CHECK(tau_and_A(fn3, 2.0, 4.0).A == doctest::Approx(1.5 * fn3.base(4.0)).epsilon(1e-10));
}

TEST_CASE("lower-bound and subharmonicity hypotheses") {
  const double gammas[] = {1.05, 1.5};
  const double epss[] = {0.01, 0.1};
  for (const auto& spec : {DenominatorSpec::fn1(0.5), DenominatorSpec::fn2(), DenominatorSpec::fn3(0.5),
                           DenominatorSpec::fn4(0.5, 3)})
    CHECK(check_berg(spec, disk_weight(), gammas, epss, 12).pass);

  const BergCheck pos = check_berg(DenominatorSpec::fn2(), disk_weight(RModel::constant(0.5)), gammas, epss, 12);
  CHECK_FALSE(pos.pass);
  CHECK(pos.reason.find("lower-bound") != std::string::npos);
  REQUIRE(pos.witness);
  const double w = std::hypot((*pos.witness)[0], (*pos.witness)[1]);
  CHECK(w > 0.8);  // e^{-1/2} g(1 - log|w|²) < g(1) exactly when |w| > e^{(1-e^{1/4})/2}
  CHECK(w < 0.92);

  // φ = α - g^{-1}(e^{-R} g(α)) with R = σ log|w|² is α(1 - |w|^{-σ}) for g = x², which is superharmonic
  const BergCheck sig =
      check_berg(DenominatorSpec::fn2(), disk_weight(RModel::radial(RadialProfile::log_multiple(0.05))), gammas,
                 epss, 12);
  CHECK_FALSE(sig.pass);
  CHECK(sig.reason.find("subharmonic") != std::string::npos);
}

TEST_CASE("Ohsawa checks") {
  CHECK(check_ohsawa(disk_weight(RModel::constant(-0.3)), 16).pass);
  CHECK_FALSE(check_ohsawa(disk_weight(RModel::constant(0.5)), 16).pass);
}

TEST_CASE("curvature identity converges at second order") {
  const WeightModel w = disk_weight();
  const CurvatureCheck coarse = curvature_identity_check(DenominatorSpec::fn2(), 1.0, w, 1.2, 0.2, 8, 1e-3);
  const CurvatureCheck fine = curvature_identity_check(DenominatorSpec::fn2(), 1.0, w, 1.2, 0.2, 8, 1e-4);
  CHECK(fine.max_residual <= 1e-5);
  const double ratio = coarse.max_residual / fine.max_residual;
  CHECK(ratio >= 50.0);
  CHECK(ratio <= 200.0);
  // -Δa/4 ≥ ε²/(|w|²+ε²)² for R = 0
  CHECK(fine.min_lower_bound_ratio >= 1.0 - 1e-3);
}

}  // TEST_SUITE
