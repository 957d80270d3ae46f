#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "l2ext/weights.hpp"

using namespace l2ext;

TEST_SUITE("weights") {

TEST_CASE("kappa evaluation") {
  const Kappa k = Kappa::quadratic(2.0, 0.5, 1.5);
  const std::complex<double> z(0.3, 0.1), w(-0.2, 0.4);
  const double expect = 2.0 * std::norm(z) + 0.5 * std::norm(w) + 1.5 * std::real(z * std::conj(w));
  CHECK(k.at(z, w) == doctest::Approx(expect));
  CHECK(k.z_part(0.25) == doctest::Approx(0.5));
  CHECK(Kappa::zero().id() == "0");
}

TEST_CASE("R models") {
  CHECK(RModel::zero().at(0.5) == 0.0);
  CHECK(RModel::constant(-0.3).at(0.9) == -0.3);
  CHECK(RModel::constant(-0.3).id() == "const:-0.3");
  const RModel tab = RModel::radial(RadialProfile::tabulated({0.1, 0.5, 1.0}, {0.0, -1.0, -2.0}));
  CHECK(tab.at(0.3) == doctest::Approx(-0.5));
  CHECK(tab.at(0.01) == doctest::Approx(0.0));
  const RModel lg = RModel::radial(RadialProfile::log_multiple(0.05));
  CHECK(lg.at(0.5) == doctest::Approx(0.05 * std::log(0.25)));
}

TEST_CASE("radial CSV reader") {
  const std::string path = "l2ext_test_radial.csv";
  {
    std::ofstream f(path);
    f << "# |w|, R\nr,R\n0.1, -0.1\n0.5 -0.5\n1.0,-1.0\n";
  }
  const RadialProfile p = read_radial_csv(path);
  std::remove(path.c_str());
  CHECK(p(0.75) == doctest::Approx(-0.75));
  CHECK_THROWS(read_radial_csv("does-not-exist.csv"));
}

TEST_CASE("admissibility") {
  WeightModel disk;
  CHECK(check_weight(disk).ok);

  WeightModel bad = disk;
  bad.domain = Domain::Bidisk;
  bad.kappa = Kappa::quadratic(1.0, 1.0, 3.0);  // |c| > 2 sqrt(ab)
  const Admissibility a = check_weight(bad);
  CHECK_FALSE(a.ok);
  CHECK(a.reason.find("Levi form") != std::string::npos);

  WeightModel concave = disk;
  concave.kappa = Kappa::quadratic(0.0, -1.0, 0.0);
  CHECK_FALSE(check_weight(concave).ok);

  WeightModel ohsawa = disk;
  ohsawa.ohsawa_mode = true;
  ohsawa.R = RModel::constant(0.5);
  CHECK_FALSE(check_weight(ohsawa).ok);
  ohsawa.R = RModel::constant(-0.3);
  CHECK(check_weight(ohsawa).ok);
}

}  // TEST_SUITE
