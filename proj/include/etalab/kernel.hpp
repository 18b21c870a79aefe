#pragma once
#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "etalab/operator_model.hpp"
#include "etalab/spectrum.hpp"

namespace etalab {

struct KernelSample {
  double t = 0.0, x = 0.0, y = 0.0;
  Eigen::MatrixXcd value;  // components x components
  double err_bound = 0.0;  // dropped-mode certificate
};

// K_t(x,y) of D e^{-t^2 D^2} on Finite(n), from sector eigendata (vectors
// required).  err_bound covers the modes beyond the Fourier cutoff.
KernelSample finite_kernel(const SpectralData& sd, double t, double x, double y);

// Push a finite-cover kernel down a sub-cover (n_to | n_from):
// Sum_k K^{(n_from)}(x, y + k*n_to), k = 0..n_from/n_to - 1.
Eigen::MatrixXcd fold_finite_kernel(const SpectralData& sd_from, int n_to, double t, double x,
                                    double y);

// Bloch-integral line kernel: cells at theta+q over Gauss-Legendre nodes
// q in [0,1).  Immutable after construction; evaluation is const.
class LineKernel {
 public:
  LineKernel(const ModelOperator& op, int nodes = 64, int K = 0, bool with_vectors = true);

  const ModelOperator& op() const { return op_; }
  int nodes() const { return (int)cells_.size(); }
  int K() const { return K_; }

  Eigen::MatrixXcd eval(double t, double x, double y) const;
  double mode_tail(double t) const;  // dropped-mode bound for eval

  // tr_a^line(t) = int_0^1 e^{-2 pi i q a} Theta(theta+q, t) dq  (GL sum)
  std::complex<double> trace_class(int a, double t) const;
  double abs_trace_bound(double t) const;
  double min_abs_eig() const { return min_abs_eig_; }

 private:
  ModelOperator op_;
  int K_;
  std::vector<double> q_, w_;
  std::vector<CellSpectrum> cells_;
  double min_abs_eig_ = 0.0;
};

// Entrywise bound on the line kernel at separation u = x - y, from shifting
// the Bloch contour into the strip: dim^{3/2} (1+sqrt2) (1/(t sqrt(2e)) +
// |u|/(2 t^2)) e^{-u^2/4t^2}.  `dim` is the cell dimension in use.
double kernel_offdiag_bound(int dim, double t, double u);

// Sum_{beta in nZ} K^line(x, y+beta) with the remainder certified by the
// off-diagonal bound; deviation against Finite(n) is the folding test.
struct FoldResult {
  Eigen::MatrixXcd value;
  double tail_bound = 0.0;
};
FoldResult fold_line_kernel(const LineKernel& lk, int n, double t, double x, double y,
                            int line_truncation = 0);

struct FoldingCheck {
  double max_dev = 0.0;
  double max_cert = 0.0;  // largest attached certificate among samples
};
FoldingCheck verify_folding(const ModelOperator& op, int n, const std::vector<double>& ts,
                            const std::vector<std::pair<double, double>>& xys, int nodes = 128,
                            int K = 0);

// sup over an (x,y) grid of Sum_{gamma in Z} |K_t(x, y+gamma)| (operator
// norm), deck tail certified by the off-diagonal bound.
double l1_norm(const LineKernel& lk, double t, int truncation, int grid = 8);

// --- small-t analytic pieces -------------------------------------------
// 1-component exact Fourier mode of the trace at deck shift u != 0:
//   (2/sqrt(pi)) int_0^T hatTheta_u dt = -i e^{iuw} e^{-u^2/4T^2} / (pi u),
// with w = 2 pi theta + c.
std::complex<double> one_comp_small_t_term(const ModelOperator& op, int u, double T);

// 2-component strip certificate |hatTheta_m(t)| <= C(t) e^{-m^2/4t^2}, m != 0.
double hat_theta_strip_bound(const ModelOperator& op, double t, int m);

// (2/sqrt(pi)) int_0^T of the strip certificate, in closed form (s = 1/t).
double small_t_integral_bound(const ModelOperator& op, double T, int m);

}  // namespace etalab
