#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace l2ext {

/// A numerical procedure failed to meet its tolerance within its budget.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace quad {

struct Options {
  double abs_tol = 1e-10;
  double rel_tol = 0.0;
  std::size_t max_intervals = 100000;
};

struct Result {
  double value = 0.0;
  double error = 0.0;
  std::size_t intervals = 0;
  bool converged = false;
  // Interval carrying the largest error when the loop stopped.
  double worst_a = 0.0;
  double worst_b = 0.0;
};

/// Global adaptive Gauss-Kronrod 7/15 with bisection of the worst interval.
/// Endpoints are never evaluated, so integrable endpoint singularities are fine.
Result integrate(const std::function<double(double)>& f, double a, double b, const Options& opt = {});

/// Integral over [a, inf), a > 0, through u = 1/t on (0, 1/a].
Result integrate_to_infinity(const std::function<double(double)>& f, double a, const Options& opt = {});

/// Same as integrate() but throws NumericError when the tolerance is not met.
double integrate_or_throw(const std::function<double(double)>& f, double a, double b, const Options& opt = {});

/// One 15-point Kronrod application without subdivision; for very short intervals
/// where smoothness in the endpoints matters more than an error estimate.
double kronrod15(const std::function<double(double)>& f, double a, double b);

struct VectorResult {
  std::vector<double> value;
  std::vector<double> error;   // per component
  std::size_t intervals = 0;
  bool converged = false;
};

/// Vector-valued integrand f(t, out) with out.size() == dim. The interval
/// error is the max over components; the tolerance applies to that norm.
VectorResult integrate_vector(const std::function<void(double, std::span<double>)>& f, std::size_t dim,
                              double a, double b, const Options& opt = {});

/// Gauss-Legendre nodes and weights on [a, b].
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
Rule gauss_legendre(std::size_t n, double a = -1.0, double b = 1.0);

/// Sum in a fixed pairwise order, independent of how the values were produced.
double pairwise_sum(std::span<const double> values);

}  // namespace quad

namespace optim {

struct Extremum {
  double x = 0.0;
  double value = 0.0;
};

/// Golden-section search for a maximum of f on [lo, hi] to relative width `rel_tol`.
Extremum golden_max(const std::function<double(double)>& f, double lo, double hi, double rel_tol = 1e-10,
                    int max_iter = 200);

Extremum golden_min(const std::function<double(double)>& f, double lo, double hi, double rel_tol = 1e-10,
                    int max_iter = 200);

}  // namespace optim

/// n log-spaced points from lo to hi inclusive (lo, hi > 0).
std::vector<double> log_space(double lo, double hi, std::size_t n);

}  // namespace l2ext
