#include "l2ext/weights.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "l2ext/expr.hpp"

namespace l2ext {

namespace {

double poly(const std::vector<double>& c, double t) {
  double v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * t + *it;
  return v;
}

// i∂∂̄ P(|z|²) = P'(t) + t P''(t) at t = |z|².
double levi(const std::vector<double>& c, double t) {
  double v = 0.0;
  for (std::size_t k = 1; k < c.size(); ++k) v += static_cast<double>(k * k) * c[k] * std::pow(t, static_cast<double>(k - 1));
  return v;
}

std::string poly_id(const std::vector<double>& c) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < c.size(); ++i) os << (i ? "," : "") << c[i];
  os << ']';
  return os.str();
}

// 5-point Laplacian of a radial function at (x, 0).
double radial_laplacian(const std::function<double(double)>& f, double r, double h) {
  const double c = f(r);
  const double side = f(std::hypot(r, h));
  return (f(r + h) + f(r - h) + 2.0 * side - 4.0 * c) / (h * h);
}

}  // namespace

RadialProfile RadialProfile::tabulated(std::vector<double> radii, std::vector<double> values) {
  if (radii.size() != values.size() || radii.size() < 2)
    throw DomainError("radial profile needs at least two (r, R) rows");
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] > radii[i - 1])) throw DomainError("radial profile radii must increase");
  for (double v : values)
    if (!std::isfinite(v)) throw DomainError("radial profile values must be finite");
  RadialProfile p;
  p.radii_ = std::move(radii);
  p.values_ = std::move(values);
  p.name_ = "table";
  return p;
}

RadialProfile RadialProfile::log_multiple(double sigma) {
  std::ostringstream os;
  os << "log*" << sigma;
  return function([sigma](double r) { return sigma * std::log(r * r); }, os.str());
}

RadialProfile RadialProfile::function(std::function<double(double)> f, std::string name) {
  RadialProfile p;
  p.fn_ = std::move(f);
  p.name_ = std::move(name);
  return p;
}

double RadialProfile::operator()(double r) const {
  if (fn_) return fn_(r);
  if (radii_.empty()) return 0.0;
  if (r <= radii_.front()) return values_.front();
  if (r >= radii_.back()) return values_.back();
  const auto it = std::upper_bound(radii_.begin(), radii_.end(), r);
  const std::size_t i = static_cast<std::size_t>(it - radii_.begin());
  const double t = (r - radii_[i - 1]) / (radii_[i] - radii_[i - 1]);
  return values_[i - 1] + t * (values_[i] - values_[i - 1]);
}

RadialProfile read_radial_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open radial profile " + path);
  std::vector<double> r, v;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double a = 0.0, b = 0.0;
    if (!(row >> a >> b)) continue;  // header
    r.push_back(a);
    v.push_back(b);
  }
  RadialProfile p = RadialProfile::tabulated(std::move(r), std::move(v));
  return p;
}

RModel RModel::constant(double v) {
  if (!std::isfinite(v)) throw DomainError("constant R must be finite");
  RModel m;
  m.kind_ = Kind::Constant;
  m.constant_ = v;
  return m;
}

RModel RModel::radial(RadialProfile p) {
  RModel m;
  m.kind_ = Kind::Radial;
  m.profile_ = std::move(p);
  return m;
}

double RModel::at(double w_abs) const {
  switch (kind_) {
    case Kind::Zero:
      return 0.0;
    case Kind::Constant:
      return constant_;
    case Kind::Radial:
      return profile_(w_abs);
  }
  return 0.0;
}

std::string RModel::id() const {
  switch (kind_) {
    case Kind::Zero:
      return "0";
    case Kind::Constant: {
      std::ostringstream os;
      os << "const:" << constant_;
      return os.str();
    }
    case Kind::Radial:
      return "radial:" + profile_.name();
  }
  return "?";
}

Kappa Kappa::quadratic(double a, double b, double c) {
  Kappa k;
  k.z_poly = {0.0, a};
  k.w_poly = {0.0, b};
  k.coupling = c;
  return k;
}

double Kappa::z_part(double r2) const { return poly(z_poly, r2); }
double Kappa::w_part(double r2) const { return poly(w_poly, r2); }

double Kappa::at(std::complex<double> z, std::complex<double> w) const {
  return z_part(std::norm(z)) + w_part(std::norm(w)) + coupling * (z * std::conj(w)).real();
}

std::string Kappa::id() const {
  if (z_poly.empty() && w_poly.empty() && coupling == 0.0) return "0";
  std::ostringstream os;
  os << "z" << poly_id(z_poly) << "w" << poly_id(w_poly);
  if (coupling != 0.0) os << "c" << coupling;
  return os.str();
}

std::string WeightModel::id() const {
  std::string s = domain == Domain::Disk ? "disk" : "bidisk";
  s += ";kappa=" + kappa.id() + ";R=" + R.id();
  if (ohsawa_mode) s += ";ohsawa";
  return s;
}

Admissibility check_weight(const WeightModel& weight, int grid_n) {
  const int n = std::max(grid_n, 4);
  const double lo = 1e-3, hi = 1.0 - 1e-3;
  const double dr = (hi - lo) / (n - 1);
  auto R = [&weight](double r) { return weight.R.at(r); };

  for (int i = 0; i < n; ++i) {
    const double r = lo + dr * i;
    const double v = R(r);
    if (!std::isfinite(v)) return {false, "R is not finite at |w| = " + std::to_string(r)};
  }
  if (!std::isfinite(R(1.0))) return {false, "R is not finite at |w| = 1"};

  // Levi form of κ + R + log|w|² on the (|z|, |w|) grid. log|w|² is harmonic
  // off w = 0, so the w-entry only sees P_w and R.
  for (int j = 0; j < n; ++j) {
    const double rw = lo + dr * j;
    const double h = std::min(0.25 * dr, 0.01 * rw);
    const double lap_r = weight.R.kind() == RModel::Kind::Radial ? radial_laplacian(R, rw, h) : 0.0;
    const double tol = 1e-6 / (h * h);
    const double b = levi(weight.kappa.w_poly, rw * rw) + 0.25 * lap_r;
    if (b < -0.25 * tol)
      return {false, "curvature hypothesis fails in w at |w| = " + std::to_string(rw)};
    if (weight.domain == Domain::Disk) continue;
    for (int i = 0; i < n; ++i) {
      const double rz = lo + dr * i;
      const double a = levi(weight.kappa.z_poly, rz * rz);
      const double c2 = 0.25 * weight.kappa.coupling * weight.kappa.coupling;
      if (a < 0.0 || std::max(b, 0.0) * a < c2 * (1.0 - 1e-12))
        return {false, "Levi form of kappa + R is not positive semidefinite at (|z|, |w|) = (" + std::to_string(rz) +
                           ", " + std::to_string(rw) + ")"};
    }
  }

  if (weight.ohsawa_mode) {
    for (int i = 0; i < n; ++i) {
      const double r = lo + dr * i;
      if (R(r) + std::log(r * r) > 1e-12)
        return {false, "R + log|w|^2 > 0 at |w| = " + std::to_string(r)};
    }
  }
  return {};
}

}  // namespace l2ext
