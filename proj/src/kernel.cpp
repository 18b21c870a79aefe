#include "etalab/kernel.hpp"

#include <cmath>

#include "etalab/error.hpp"
#include "etalab/quadrature.hpp"

namespace etalab {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kInvSqrt2Pi = 0.39894228040143267793994605993438;
constexpr double kOnePlusSqrt2 = 2.4142135623730950488;

// comp x n_eig matrix of eigenfunction values at x: column i is u_i(x)
// = Sum_l e^{2 pi i l x} vec[(l+K)*comp + s, i].
Eigen::MatrixXcd eig_values_at(const CellSpectrum& cs, double x) {
  if (cs.vec.size() == 0) fail_precondition("kernel evaluation needs eigenvectors");
  const int comp = cs.components;
  const Eigen::Index neig = cs.vec.cols();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(comp, neig);
  for (int l = -cs.K; l <= cs.K; ++l) {
    double ang = kTwoPi * l * x;
    std::complex<double> ph(std::cos(ang), std::sin(ang));
    for (int s = 0; s < comp; ++s) out.row(s) += ph * cs.vec.row((l + cs.K) * comp + s);
  }
  return out;
}

// Kernel contribution of one cell: Sum_i lam e^{-t^2 lam^2} u_i(x) u_i(y)^*.
Eigen::MatrixXcd cell_kernel(const CellSpectrum& cs, double t, double x, double y) {
  Eigen::MatrixXcd Ux = eig_values_at(cs, x), Uy = eig_values_at(cs, y);
  Eigen::VectorXcd wts(cs.lam.size());
  for (Eigen::Index i = 0; i < cs.lam.size(); ++i) {
    double l = cs.lam(i);
    wts(i) = l * std::exp(-t * t * l * l);
  }
  return Ux * wts.asDiagonal() * Uy.adjoint();
}

// Dropped-mode certificate: true eigenpairs beyond the cutoff contribute at
// most |lam| e^{-t^2 lam^2} * sup|u|^2 each, with sup|u| <= 1.3(1+|lam|+B)
// (Fourier-decay of true cell eigenfunctions) and at most 2*comp eigenvalues
// per pi-length magnitude bin.
double mode_tail_bound(const ModelOperator& op, int K, double t) {
  const double B = op.symbol_bound();
  const double pi = kTwoPi / 2;
  double lo = kTwoPi * (K - 1) - B;
  if (lo <= 0.0) return 1e300;  // cutoff too small to certify
  double s = 0.0;
  for (int k = 0; k < 200000; ++k) {
    double R = lo + k * pi;
    double hi = R + pi;
    double term = 2.0 * op.components * hi * std::exp(-t * t * R * R) * 1.69 *
                  (1.0 + hi + B) * (1.0 + hi + B);
    s += term;
    if (term < 1e-300 && k > 2) break;
  }
  return s;
}
}  // namespace

KernelSample finite_kernel(const SpectralData& sd, double t, double x, double y) {
  if (t <= 0.0) fail_parse("kernel time t must be > 0");
  KernelSample ks;
  ks.t = t;
  ks.x = x;
  ks.y = y;
  ks.value = Eigen::MatrixXcd::Zero(sd.op.components, sd.op.components);
  for (int j = 0; j < sd.n; ++j) {
    double ang = kTwoPi * j * (x - y) / sd.n;
    std::complex<double> ph(std::cos(ang), std::sin(ang));
    ks.value += ph * cell_kernel(sd.sectors[j], t, x, y);
  }
  ks.value /= (double)sd.n;
  ks.err_bound = mode_tail_bound(sd.op, sd.K, t);
  return ks;
}

Eigen::MatrixXcd fold_finite_kernel(const SpectralData& sd_from, int n_to, double t, double x,
                                    double y) {
  if (n_to < 1 || sd_from.n % n_to != 0)
    fail_parse("fold target must divide the source cover index");
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(sd_from.op.components, sd_from.op.components);
  for (int k = 0; k < sd_from.n / n_to; ++k)
    acc += finite_kernel(sd_from, t, x, y + (double)k * n_to).value;
  return acc;
}

LineKernel::LineKernel(const ModelOperator& op, int nodes, int K, bool with_vectors) : op_(op) {
  op_.validate();
  if (nodes < 8) fail_parse("LineKernel needs >= 8 Bloch nodes");
  K_ = K > 0 ? K : default_cell_K(op);
  const GaussRule& gr = gauss_rule(nodes);
  double minabs = 1e300;
  for (int i = 0; i < nodes; ++i) {
    double q = (gr.x[i] + 1.0) / 2.0;
    q_.push_back(q);
    w_.push_back(gr.w[i] / 2.0);
    cells_.push_back(cell_eig(op_, op_.theta + q, K_, with_vectors));
    for (Eigen::Index k = 0; k < cells_.back().lam.size(); ++k)
      minabs = std::min(minabs, std::fabs(cells_.back().lam(k)));
  }
  min_abs_eig_ = minabs;
}

Eigen::MatrixXcd LineKernel::eval(double t, double x, double y) const {
  if (t <= 0.0) fail_parse("kernel time t must be > 0");
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(op_.components, op_.components);
  for (size_t i = 0; i < cells_.size(); ++i) {
    double ang = kTwoPi * q_[i] * (x - y);
    std::complex<double> ph(std::cos(ang), std::sin(ang));
    acc += (w_[i] * ph) * cell_kernel(cells_[i], t, x, y);
  }
  return acc;
}

double LineKernel::mode_tail(double t) const { return mode_tail_bound(op_, K_, t); }

std::complex<double> LineKernel::trace_class(int a, double t) const {
  std::complex<double> s{0.0, 0.0};
  for (size_t i = 0; i < cells_.size(); ++i) {
    double ang = -kTwoPi * q_[i] * a;
    s += w_[i] * std::complex<double>(std::cos(ang), std::sin(ang)) * theta_sum(cells_[i], t);
  }
  return s;
}

double LineKernel::abs_trace_bound(double t) const {
  double s = 0.0;
  for (size_t i = 0; i < cells_.size(); ++i) s += w_[i] * theta_abs_sum(cells_[i], t);
  return s;
}

double kernel_offdiag_bound(int dim, double t, double u) {
  double au = std::fabs(u);
  double pref = std::pow((double)dim, 1.5) * kOnePlusSqrt2 *
                (1.0 / (t * std::sqrt(2.0 * M_E)) + au / (2.0 * t * t));
  return pref * std::exp(-au * au / (4.0 * t * t));
}

// N-node Gauss error model for the oscillatory Bloch integral at deck shift
// u: the phase e^{2 pi i q u} costs (pi e |u| / 4N)^{2N} relative accuracy
// (entire-integrand Gauss rate), so sampled evals past the resolved zone are
// aliasing junk and must not enter the fold.  `scale` converts to kernel
// magnitude; the model is conservative, and verify_folding measures the
// actual deviation independently.
static double gl_shift_err(const LineKernel& lk, double t, double u) {
  double N = (double)lk.nodes();
  // +8 covers the Bloch-cell factor's own bandwidth; x100 is a safety margin
  double r = M_PI * M_E * (std::fabs(u) + 8.0) / (4.0 * N);
  double scale = 100.0 * lk.op().components * std::max(1.0, lk.abs_trace_bound(t));
  if (r >= 0.95) return 1e300;
  return scale * std::exp(2.0 * N * std::log(r));
}

FoldResult fold_line_kernel(const LineKernel& lk, int n, double t, double x, double y,
                            int line_truncation) {
  if (n < 1) fail_parse("fold index n must be >= 1");
  const int dim = (2 * lk.K() + 1) * lk.op().components;
  int kmax = line_truncation;
  if (kmax <= 0) {
    // widen while the dropped true-kernel mass still matters and the node
    // count still resolves the next shift's oscillation
    kmax = 1;
    while (kmax < 400) {
      double drop = kernel_offdiag_bound(dim, t, (double)(kmax + 1) * n - std::fabs(x - y) - n);
      if (drop < 1e-14) break;
      if (gl_shift_err(lk, t, (double)(kmax + 1) * n + std::fabs(x - y)) > 1e-14) break;
      ++kmax;
    }
  }
  FoldResult fr;
  fr.value = Eigen::MatrixXcd::Zero(lk.op().components, lk.op().components);
  double gl_total = 0.0;
  for (int k = -kmax; k <= kmax; ++k) {
    fr.value += lk.eval(t, x, y + (double)k * n);
    gl_total += std::min(gl_shift_err(lk, t, (double)k * n + std::fabs(x - y)), 1e300);
  }
  double tail = 0.0;
  for (int k = kmax + 1; k <= kmax + 400; ++k) {
    double b = kernel_offdiag_bound(dim, t, (double)k * n - std::fabs(x - y)) +
               kernel_offdiag_bound(dim, t, (double)k * n + std::fabs(x - y));
    tail += b;
    if (b < 1e-300) break;
  }
  // roundoff floor: summed eigensolve/arithmetic noise across the deck
  fr.tail_bound = tail + gl_total + 2 * lk.mode_tail(t) * (2 * kmax + 1) + 1e-15 * dim;
  return fr;
}

FoldingCheck verify_folding(const ModelOperator& op, int n, const std::vector<double>& ts,
                            const std::vector<std::pair<double, double>>& xys, int nodes, int K) {
  if (ts.empty() || xys.empty()) fail_parse("verify_folding needs nonempty sample grids");
  int cellK = K > 0 ? K : default_cell_K(op);
  SpectralData sd = spectrum_on_cover(op, n, cellK, true);
  LineKernel lk(op, nodes, cellK, true);
  FoldingCheck fc;
  for (double t : ts)
    for (auto [x, y] : xys) {
      FoldResult folded = fold_line_kernel(lk, n, t, x, y);
      KernelSample direct = finite_kernel(sd, t, x, y);
      double dev = (folded.value - direct.value).cwiseAbs().maxCoeff();
      fc.max_dev = std::max(fc.max_dev, dev);
      fc.max_cert = std::max(fc.max_cert, folded.tail_bound + direct.err_bound);
    }
  return fc;
}

double l1_norm(const LineKernel& lk, double t, int truncation, int grid) {
  if (truncation < 1 || grid < 1) fail_parse("l1_norm needs truncation >= 1 and grid >= 1");
  const int dim = (2 * lk.K() + 1) * lk.op().components;
  double best = 0.0;
  for (int ix = 0; ix < grid; ++ix)
    for (int iy = 0; iy < grid; ++iy) {
      double x = (double)ix / grid, y = (double)iy / grid;
      double s = 0.0;
      for (int g = -truncation; g <= truncation; ++g) {
        double u = (double)g;
        // beyond the node-resolved zone the sampled eval is aliasing junk;
        // fall back to the analytic decay bound for those shifts
        if (gl_shift_err(lk, t, u + std::fabs(x - y)) > 1e-12)
          s += kernel_offdiag_bound(dim, t, std::fabs(u) - std::fabs(x - y));
        else
          s += lk.eval(t, x, y + u).operatorNorm();
      }
      for (int g = truncation + 1; g <= truncation + 400; ++g) {
        double b = kernel_offdiag_bound(dim, t, (double)g - std::fabs(x - y)) +
                   kernel_offdiag_bound(dim, t, (double)g + std::fabs(x - y));
        s += b;
        if (b < 1e-300) break;
      }
      best = std::max(best, s);
    }
  return best;
}

std::complex<double> one_comp_small_t_term(const ModelOperator& op, int u, double T) {
  if (u == 0) fail_parse("small-t mode term needs u != 0");
  double w = kTwoPi * op.theta + op.c;
  double damp = std::exp(-(double)u * u / (4.0 * T * T));
  std::complex<double> ph(std::cos(u * w), std::sin(u * w));
  // -i e^{iuw} e^{-u^2/4T^2} / (pi u)
  return std::complex<double>(0.0, -1.0) * ph * (damp / (M_PI * u));
}

double hat_theta_strip_bound(const ModelOperator& op, double t, int m) {
  if (m == 0) fail_parse("strip bound needs m != 0");
  const double B = op.symbol_bound();
  double am = std::fabs((double)m);
  double ghat = op.components * (kInvSqrt2Pi / t + B / M_PI + 1.0);
  double pref = kOnePlusSqrt2 * (std::sqrt(2.0 / M_E) / t + am / (2.0 * t * t)) * ghat;
  return pref * std::exp(-am * am / (4.0 * t * t));
}

double small_t_integral_bound(const ModelOperator& op, double T, int m) {
  if (m == 0) fail_parse("small-t integral bound needs m != 0");
  const double B = op.symbol_bound();
  const double am = std::fabs((double)m);
  const double a = std::sqrt(2.0 / M_E), b = am / 2.0;
  const double g1 = kInvSqrt2Pi, g0 = B / M_PI + 1.0;
  const double g2 = am * am / 4.0;
  double gtu0 = gauss_tail_upper(1.0 / T, g2, 0.0);
  double i3 = (2.0 / (am * am)) * std::exp(-g2 / (T * T));
  double total = (g1 * a + g0 * b) * gtu0 + g1 * b * i3 + g0 * a * T * gtu0;
  return (2.0 / std::sqrt(M_PI)) * kOnePlusSqrt2 * op.components * total;
}

}  // namespace etalab
