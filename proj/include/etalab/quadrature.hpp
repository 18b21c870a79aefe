#pragma once
#include <complex>
#include <functional>
#include <vector>

namespace etalab {

struct GaussRule {
  std::vector<double> x;  // nodes on [-1, 1], ascending
  std::vector<double> w;  // positive weights
};

// n-point Gauss-Legendre rule, cached per n.  Nodes from Newton iteration on
// the Legendre recurrence; accurate to ~1e-15 for n <= 512.
const GaussRule& gauss_rule(int n);

struct QuadResult {
  std::complex<double> value{0.0, 0.0};
  double err_estimate = 0.0;  // sum over panels of |GL(2m) - GL(m)|
  int panels = 0;
  bool depth_capped = false;  // a panel hit max_depth before reaching tolerance
};

// Adaptive panel integration of f over [a, b]: each panel compares GL(order)
// against GL(2*order) and splits until the difference meets the local
// tolerance share.  Deterministic: fixed traversal order, fixed summation
// order, no parallelism.
QuadResult integrate_adaptive(const std::function<std::complex<double>(double)>& f, double a,
                              double b, double tol, int order = 16, int max_depth = 12);

// Upper bound for the Gaussian tail integral  int_T^inf t^q e^{-g2 t^2} dt
// (g2 = gap^2 > 0, T > 0).  For q <= 0 this is the elementary bound
// T^q e^{-g2 T^2} / (2 g2 T); positive integer q reduces by parts.  This is
// the first approximant of the upper-incomplete-gamma continued fraction.
double gauss_tail_upper(double T, double g2, double q);

// Smallest t_max with  c * int_{t_max}^inf t^{-m_exp} e^{-gap^2 t^2} dt <= tol,
// located by bisection on the bound above.  gap <= 0 is an error.
double tail_cutoff(double gap, double c, double m_exp, double tol);

// Ordinary least squares slope/intercept of y against x.
struct LineFit {
  double slope = 0.0, intercept = 0.0, residual = 0.0;  // residual: max |y - fit|
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace etalab
