#include "etalab/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "etalab/error.hpp"

namespace etalab {

namespace {

GaussRule compute_rule(int n) {
  GaussRule r;
  r.x.assign(n, 0.0);
  r.w.assign(n, 0.0);
  const double pi = 3.14159265358979323846;
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      // Legendre P_n(z) via the three-term recurrence; pp = P_n'(z).
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    r.x[i] = -z;
    r.x[n - 1 - i] = z;
    double w = 2.0 / ((1.0 - z * z) * pp * pp);
    r.w[i] = w;
    r.w[n - 1 - i] = w;
  }
  return r;
}

std::complex<double> eval_panel(const std::function<std::complex<double>(double)>& f, double a,
                                double b, const GaussRule& rule) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  std::complex<double> acc{0.0, 0.0};
  for (size_t i = 0; i < rule.x.size(); ++i) acc += rule.w[i] * f(mid + half * rule.x[i]);
  return half * acc;
}

}  // namespace

const GaussRule& gauss_rule(int n) {
  if (n < 1 || n > 1024) fail_numeric("gauss_rule: order out of range");
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lk(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_rule(n)).first;
  return it->second;
}

QuadResult integrate_adaptive(const std::function<std::complex<double>(double)>& f, double a,
                              double b, double tol, int order, int max_depth) {
  if (!(b > a)) fail_numeric("integrate_adaptive: empty interval");
  if (!(tol > 0.0)) fail_numeric("integrate_adaptive: tol must be positive");
  const GaussRule& coarse = gauss_rule(order);
  const GaussRule& fine = gauss_rule(2 * order);
  const double total = b - a;

  struct Panel {
    double a, b;
    int depth;
  };
  std::vector<Panel> stack;
  stack.push_back({a, b, 0});
  QuadResult out;
  while (!stack.empty()) {
    Panel p = stack.back();
    stack.pop_back();
    std::complex<double> lo = eval_panel(f, p.a, p.b, coarse);
    std::complex<double> hi = eval_panel(f, p.a, p.b, fine);
    double diff = std::abs(hi - lo);
    double share = tol * (p.b - p.a) / total;
    if (diff <= share || p.depth >= max_depth) {
      out.value += hi;
      out.err_estimate += diff;
      out.panels += 1;
      if (diff > share) out.depth_capped = true;
    } else {
      double mid = 0.5 * (p.a + p.b);
      // push right first so the left half is processed first (LIFO):
      // accumulation order is then left-to-right, independent of splitting.
      stack.push_back({mid, p.b, p.depth + 1});
      stack.push_back({p.a, mid, p.depth + 1});
    }
  }
  return out;
}

double gauss_tail_upper(double T, double g2, double q) {
  if (!(T > 0.0) || !(g2 > 0.0)) fail_numeric("gauss_tail_upper: need T > 0 and g2 > 0");
  if (q <= 0.0) {
    // t^q <= T^q on [T, inf) and int_T^inf e^{-g2 t^2} dt <= e^{-g2 T^2}/(2 g2 T).
    return std::pow(T, q) * std::exp(-g2 * T * T) / (2.0 * g2 * T);
  }
  double qr = std::round(q);
  if (std::abs(q - qr) > 1e-9 || qr > 64.0)
    fail_numeric("gauss_tail_upper: positive q must be a small integer");
  // by parts: int_T^inf t^q e^{-g2 t^2} dt
  //         = T^{q-1} e^{-g2 T^2}/(2 g2) + (q-1)/(2 g2) * int_T^inf t^{q-2} ...
  double boundary = std::pow(T, qr - 1.0) * std::exp(-g2 * T * T) / (2.0 * g2);
  if (qr <= 1.0) {
    // q == 1 closes exactly; fractional-free by the integer check above.
    return boundary;
  }
  return boundary + (qr - 1.0) / (2.0 * g2) * gauss_tail_upper(T, g2, qr - 2.0);
}

double tail_cutoff(double gap, double c, double m_exp, double tol) {
  if (!(gap > 0.0)) fail_precondition("tail_cutoff: spectral gap must be positive");
  if (!(tol > 0.0) || !(c >= 0.0)) fail_numeric("tail_cutoff: need tol > 0 and c >= 0");
  if (c == 0.0) return 1e-6;
  const double g2 = gap * gap;
  auto bound = [&](double T) { return c * gauss_tail_upper(T, g2, -m_exp); };
  double lo = 1e-6, hi = 1.0;
  int guard = 0;
  while (bound(hi) > tol) {
    hi *= 2.0;
    if (++guard > 200) fail_numeric("tail_cutoff: bound never reaches tolerance");
  }
  if (bound(lo) <= tol) return lo;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (bound(mid) <= tol)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) fail_numeric("fit_line: need >= 2 matched points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double det = n * sxx - sx * sx;
  if (std::abs(det) < 1e-300) fail_numeric("fit_line: degenerate abscissae");
  LineFit f;
  f.slope = (n * sxy - sx * sy) / det;
  f.intercept = (sy * sxx - sx * sxy) / det;
  for (size_t i = 0; i < x.size(); ++i)
    f.residual = std::max(f.residual, std::abs(y[i] - (f.slope * x[i] + f.intercept)));
  return f;
}

}  // namespace etalab
