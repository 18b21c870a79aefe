#pragma once
#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "etalab/operator_model.hpp"

namespace etalab {

// Hermitian Bloch cell at quasimomentum tau on Fourier modes |l| <= K
// (row blocks of size `components`, row = (l+K)*comp + spinor):
//   1-comp:  diag 2*pi*(l+tau) + c
//   2-comp:  2*pi*(l+tau)*s3 + c on the diagonal block, mass m*s1, and the
//            potential coupling blocks s1*(a_f -+ i b_f)/2 at l -> l +- f.
Eigen::MatrixXcd cell_matrix(const ModelOperator& op, double tau, int K);

struct CellSpectrum {
  double tau = 0.0;
  int K = 0;
  int components = 1;
  Eigen::VectorXd lam;   // ascending
  Eigen::MatrixXcd vec;  // eigenvector columns; empty unless requested
};

CellSpectrum cell_eig(const ModelOperator& op, double tau, int K, bool vectors = false);

double theta_sum(const CellSpectrum& cs, double t);      // Sum l e^{-t^2 l^2}
double theta_abs_sum(const CellSpectrum& cs, double t);  // Sum |l| e^{-t^2 l^2}
double gauss_sum(const CellSpectrum& cs, double t);      // Sum e^{-t^2 l^2}

// v=0 closed-form eigenvalues on the n-cover over global frequencies |k| <= KG:
// 1-comp 2*pi*(k/n+theta)+c; 2-comp both of c ± sqrt((2*pi*(k/n+theta))^2+m^2).
std::vector<double> closed_eigs(const ModelOperator& op, int n, int KG);

struct SpectralData {
  ModelOperator op;
  int n = 1;
  int K = 0;
  std::vector<CellSpectrum> sectors;  // j = 0..n-1 at tau_j = j/n + theta
  double trunc_bound = 0.0;           // central-window eigenvalue drift, K vs 2K
  double min_abs_eig = 0.0;

  // Deck-translation weight of a sector-j eigenfunction against class a.
  std::complex<double> deloc_weight(int j, int a) const;
  // tr_a(t) = (1/n) Sum_j e^{-2 pi i j a/n} Theta_j(t); complex in general,
  // conjugate-symmetric between classes a and n-a.
  std::complex<double> trace(int a, double t) const;
  double abs_trace_bound(double t) const;
  std::vector<double> all_eigs() const;  // ascending
};

// Sector-wise eigendecomposition of the n-cover.  K=0 picks a default;
// explicit K < 16 with a potential violates the resolution precondition.
// certify_trunc=false skips the per-sector cutoff-doubling drift check
// (for callers that certify truncation at a higher level themselves).
SpectralData spectrum_on_cover(const ModelOperator& op, int n, int K = 0,
                               bool with_vectors = false, bool certify_trunc = true);

int default_cell_K(const ModelOperator& op);

// Min over a uniform Bloch grid (plus the exact frequency-zero point) of
// min|eig| of the unit cell; equals m-|c| exactly when v=0.
double line_gap(const ModelOperator& op, int theta_grid = 256);

// Exact for 1-component (closed form); computed spectrum otherwise.
double finite_cover_min_eig(const SpectralData& sd);

}  // namespace etalab
