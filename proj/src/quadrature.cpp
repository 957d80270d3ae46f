#include "l2ext/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <queue>

namespace l2ext {
namespace quad {

namespace {

// Kronrod abscissae on [0,1): odd indices are the embedded Gauss points.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

constexpr std::array<double, 4> kWg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                       0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
};

struct WorstFirst {
  bool operator()(const Panel& l, const Panel& r) const { return l.error < r.error; }
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kron = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double fsum = f(c - dx) + f(c + dx);
    kron += kWgk[j] * fsum;
    if (j % 2 == 1) gauss += kWg[j / 2] * fsum;
  }
  kron *= h;
  gauss *= h;
  double err = std::abs(kron - gauss);
  if (!std::isfinite(kron)) err = std::numeric_limits<double>::infinity();
  return {a, b, kron, err};
}

bool splittable(double a, double b) {
  const double m = 0.5 * (a + b);
  return m > a && m < b && (b - a) > 4.0 * std::numeric_limits<double>::min();
}

}  // namespace

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double kronrod15(const std::function<double(double)>& f, double a, double b) { return gk15(f, a, b).value; }

Result integrate(const std::function<double(double)>& f, double a, double b, const Options& opt) {
  Result res;
  if (a == b) {
    res.converged = true;
    return res;
  }
  const double sign = b < a ? -1.0 : 1.0;
  if (b < a) std::swap(a, b);

  std::priority_queue<Panel, std::vector<Panel>, WorstFirst> heap;
  Panel first = gk15(f, a, b);
  double total = first.value;
  double total_err = first.error;
  heap.push(first);
  std::vector<Panel> frozen;  // panels that cannot be split further

  auto tolerance = [&] { return std::max(opt.abs_tol, opt.rel_tol * std::abs(total)); };

  while (!heap.empty() && total_err > tolerance() && heap.size() + frozen.size() < opt.max_intervals) {
    Panel worst = heap.top();
    if (!std::isfinite(worst.value) && !std::isfinite(worst.error)) break;
    if (!splittable(worst.a, worst.b)) {
      heap.pop();
      frozen.push_back(worst);
      if (worst.error > tolerance()) break;
      continue;
    }
    heap.pop();
    const double m = 0.5 * (worst.a + worst.b);
    Panel left = gk15(f, worst.a, m);
    Panel right = gk15(f, m, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }

  std::vector<Panel> all = std::move(frozen);
  while (!heap.empty()) {
    all.push_back(heap.top());
    heap.pop();
  }
  std::sort(all.begin(), all.end(), [](const Panel& l, const Panel& r) { return l.a < r.a; });
  std::vector<double> values(all.size()), errors(all.size());
  const Panel* worst = &all.front();
  for (std::size_t i = 0; i < all.size(); ++i) {
    values[i] = all[i].value;
    errors[i] = all[i].error;
    if (all[i].error > worst->error) worst = &all[i];
  }
  res.value = sign * pairwise_sum(values);
  res.error = pairwise_sum(errors);
  res.intervals = all.size();
  res.converged = std::isfinite(res.value) && res.error <= std::max(opt.abs_tol, opt.rel_tol * std::abs(res.value));
  res.worst_a = worst->a;
  res.worst_b = worst->b;
  return res;
}

Result integrate_to_infinity(const std::function<double(double)>& f, double a, const Options& opt) {
  if (!(a > 0.0)) throw std::invalid_argument("integrate_to_infinity needs a > 0");
  auto mapped = [&f](double u) {
    const double t = 1.0 / u;
    const double v = f(t);
    if (v == 0.0) return 0.0;
    return v / (u * u);
  };
  Result r = integrate(mapped, 0.0, 1.0 / a, opt);
  // Report the worst interval back in t coordinates.
  const double wa = r.worst_b > 0.0 ? 1.0 / r.worst_b : 0.0;
  const double wb = r.worst_a > 0.0 ? 1.0 / r.worst_a : std::numeric_limits<double>::infinity();
  r.worst_a = wa;
  r.worst_b = wb;
  return r;
}

double integrate_or_throw(const std::function<double(double)>& f, double a, double b, const Options& opt) {
  Result r = integrate(f, a, b, opt);
  if (!r.converged)
    throw NumericError("quadrature did not converge on [" + std::to_string(a) + ", " + std::to_string(b) +
                       "], error estimate " + std::to_string(r.error));
  return r.value;
}

VectorResult integrate_vector(const std::function<void(double, std::span<double>)>& f, std::size_t dim, double a,
                              double b, const Options& opt) {
  struct VPanel {
    double a, b;
    std::vector<double> value, error;
    double norm;
  };
  std::vector<double> fc(dim), fl(dim), fr(dim);
  auto rule = [&](double lo, double hi) {
    VPanel p{lo, hi, std::vector<double>(dim, 0.0), std::vector<double>(dim, 0.0), 0.0};
    std::vector<double> gauss(dim, 0.0);
    const double c = 0.5 * (lo + hi);
    const double h = 0.5 * (hi - lo);
    f(c, fc);
    for (std::size_t k = 0; k < dim; ++k) {
      p.value[k] = fc[k] * kWgk[7];
      gauss[k] = fc[k] * kWg[3];
    }
    for (int j = 0; j < 7; ++j) {
      const double dx = h * kXgk[j];
      f(c - dx, fl);
      f(c + dx, fr);
      for (std::size_t k = 0; k < dim; ++k) {
        const double s = fl[k] + fr[k];
        p.value[k] += kWgk[j] * s;
        if (j % 2 == 1) gauss[k] += kWg[j / 2] * s;
      }
    }
    for (std::size_t k = 0; k < dim; ++k) {
      p.value[k] *= h;
      p.error[k] = std::abs(p.value[k] - h * gauss[k]);
      p.norm = std::max(p.norm, p.error[k]);
    }
    return p;
  };

  auto cmp = [](const VPanel& l, const VPanel& r) { return l.norm < r.norm; };
  std::priority_queue<VPanel, std::vector<VPanel>, decltype(cmp)> heap(cmp);
  heap.push(rule(a, b));
  double total_err = heap.top().norm;
  while (total_err > opt.abs_tol && heap.size() < opt.max_intervals) {
    VPanel worst = heap.top();
    if (!splittable(worst.a, worst.b)) break;
    heap.pop();
    const double m = 0.5 * (worst.a + worst.b);
    VPanel l = rule(worst.a, m);
    VPanel r = rule(m, worst.b);
    total_err += l.norm + r.norm - worst.norm;
    heap.push(std::move(l));
    heap.push(std::move(r));
  }

  std::vector<VPanel> all;
  while (!heap.empty()) {
    all.push_back(heap.top());
    heap.pop();
  }
  std::sort(all.begin(), all.end(), [](const VPanel& l, const VPanel& r) { return l.a < r.a; });
  VectorResult res;
  res.value.assign(dim, 0.0);
  res.error.assign(dim, 0.0);
  std::vector<double> column(all.size());
  for (std::size_t k = 0; k < dim; ++k) {
    for (std::size_t i = 0; i < all.size(); ++i) column[i] = all[i].value[k];
    res.value[k] = pairwise_sum(column);
    for (std::size_t i = 0; i < all.size(); ++i) column[i] = all[i].error[k];
    res.error[k] = pairwise_sum(column);
  }
  double norm = 0.0;
  for (const auto& p : all) norm += p.norm;
  res.intervals = all.size();
  res.converged = norm <= opt.abs_tol;
  return res;
}

Rule gauss_legendre(std::size_t n, double a, double b) {
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const std::size_t m = (n + 1) / 2;
  for (std::size_t i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (std::size_t j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / static_cast<double>(j);
      }
      dp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    r.nodes[i] = mid - half * z;
    r.nodes[n - 1 - i] = mid + half * z;
    r.weights[i] = r.weights[n - 1 - i] = w * half;
  }
  return r;
}

}  // namespace quad

namespace optim {

Extremum golden_max(const std::function<double(double)>& f, double lo, double hi, double rel_tol, int max_iter) {
  constexpr double inv_phi = 0.6180339887498948482;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < max_iter && (b - a) > rel_tol * std::max(1.0, std::abs(a) + std::abs(b)); ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? Extremum{c, fc} : Extremum{d, fd};
}

Extremum golden_min(const std::function<double(double)>& f, double lo, double hi, double rel_tol, int max_iter) {
  Extremum e = golden_max([&f](double x) { return -f(x); }, lo, hi, rel_tol, max_iter);
  return {e.x, -e.value};
}

}  // namespace optim

std::vector<double> log_space(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double llo = std::log(lo), lhi = std::log(hi);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = std::exp(llo + (lhi - llo) * static_cast<double>(i) / static_cast<double>(n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

}  // namespace l2ext
