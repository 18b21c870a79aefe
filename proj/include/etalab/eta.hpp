#pragma once
#include <complex>
#include <optional>
#include <vector>

#include "etalab/operator_model.hpp"
#include "etalab/spectrum.hpp"

namespace etalab {

struct QuadraturePlan {
  double t_min = 1e-2;   // analytic bound below this; no quadrature
  double t_split = 1.0;  // panel boundary
  double t_max = 0.0;    // 0 -> auto from the gap via tail_cutoff
  double tol = 1e-8;     // per-panel quadrature target
  int K = 0;             // Fourier cutoff override (doubled for certification)
  int bloch_nodes = 0;   // line nodes override; 0 -> max(64, ceil(4.5|a|)+24)
  int quad_order = 16;
};

// value is complex: the class trace tr_a is conjugate-symmetric between a and
// n-a, so eta is real only for inversion-closed classes (a = 0 or 2a = n).
struct EtaResult {
  std::complex<double> value{0.0, 0.0};
  double quad_err = 0.0;
  double small_t_bound = 0.0;
  double tail_bound = 0.0;
  double trunc_bound = 0.0;  // |fine - coarse| under (K, nodes) doubling
  double gap = 0.0;          // spectral floor used for the tail
  double t_hi = 0.0;
  bool small_t_estimated = false;  // identity-class small-t piece was sampled, not bounded
  bool flagged = false;            // certified error above tolerance
  double wall_ms = 0.0;            // diagnostics only
  double total_error() const { return quad_err + small_t_bound + tail_bound + trunc_bound; }
};

// (2/sqrt(pi)) int_0^inf tr_a(D e^{-t^2 D^2}) dt with the four-part error
// decomposition; the (0, t_min] piece is exact for 1-component covers,
// strip-certified for nonzero classes otherwise, and a flagged sample
// estimate only for the 2-component identity class on finite covers.
EtaResult eta_quadrature(const ModelOperator& op, const CoverSpec& cover, int a,
                         const QuadraturePlan& plan = {});

// Independent check: Sum_lambda sign(lambda) w_a(lambda) e^{-s lambda^2} on a
// decreasing s-grid, quadratic Richardson extrapolation to s=0.  Errors if
// the extrapolants from successive triples are not Cauchy.
std::complex<double> eta_spectral_oracle(const ModelOperator& op, int n, int a,
                                         const std::vector<double>& sgrid = {1e-1, 1e-2, 1e-3,
                                                                             1e-4});

// v=0 1-component closed form (Abel-summed geometric series):
//   beta = n(theta + c/2pi);  a=0: (1-2 frac(beta))/n;
//   else (2/n) w^{k0}/(1-w), w = e^{-2 pi i a/n}, k0 = ceil(-beta).
// Degenerate (beta integral) is an error: the cover spectrum hits zero.
std::complex<double> eta_closed_form_1comp(const ModelOperator& op, int n, int a);

struct ConvergenceRow {
  int n = 0;
  EtaResult eta;
  double abs_diff = 0.0;  // |eta_n - eta_line| when the line value exists
  bool has_diff = false;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  std::optional<EtaResult> line_value;  // 2-component gapped, a != 0 only
  int stabilization_index = -1;         // first row from which values repeat exactly
  // growth-side context for the tower (deck group Z, quotients Z/n_i)
  double K_Gamma = 0.0, K_u = 0.0, R = 0.0;
  double sigma_Gamma = 0.0, sigma_u = 0.0, sigma_R = 0.0;
  double gap_margin = 0.0;  // gap - sigma_u
};

// Eta along the cover tower; line comparison by the independent
// Bloch-quadrature path when the 2-component gap certificate holds.
ConvergenceReport converge_tower(const ModelOperator& op, const std::vector<int>& ns, int a,
                                 const QuadraturePlan& plan = {}, int threads = 1);

}  // namespace etalab
