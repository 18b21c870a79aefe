#pragma once
#include <string>
#include <vector>

#include "etalab/operator_model.hpp"

namespace etalab {

// One checked trace sample.  regime: "large-t" (t >= 1, gap-driven bound),
// "small-t" (t < 1, a != 0, distance-driven bound), or "excluded" (identity
// class below t = 1, where the trace tends to a nonzero constant).
struct DecaySample {
  double t = 0.0;
  int a = 0;
  double value = 0.0;   // |tr_a(t)|
  double bound = 0.0;   // fitted envelope at this sample
  double margin = 0.0;  // bound - value
  std::string regime;
};

// Per-class small-t envelope |tr_a(t)| <= c6 e^{-eps1/t^2} with
// eps1 = 3 d^2 / 16 and d the wrapped distance min(a, n-a).
struct DecayClassFit {
  int a = 0;
  int d = 0;
  double eps1 = 0.0;
  double c6 = 0.0;
};

// Off-diagonal Gaussian check at one t: fitted slope of log|K(x, x+s)|
// against wrapped s^2 must beat -1/(4 mu t^2).
struct OffdiagFit {
  double t = 0.0;
  double slope = 0.0;
  double required = 0.0;
  int points = 0;
  bool ok = true;
};

struct DecayReport {
  double gap = 0.0;
  double eps = 0.0;  // 0.95 * gap: large-t envelope |tr_a| <= c5 e^{-eps^2 t^2}
  double c5 = 0.0;
  double mu = 0.0;
  double stability_growth = 0.0;  // c5 drift, first half of the t-grid vs all
  bool failed = false;
  std::string offending;
  std::vector<DecayClassFit> class_fits;
  std::vector<OffdiagFit> offdiag;
  std::vector<DecaySample> samples;
};

// Envelope constants are fitted (so margins are >= 0 by construction); the
// content of the check is their stability: c5 computed from the first half
// of the large-t grid must not grow by more than 10% when the rest of the
// grid is added, and off-diagonal kernel decay must beat the mu-relaxed
// Gaussian slope.  Failures are reported in the result, not thrown.
DecayReport decay_check(const ModelOperator& op, const CoverSpec& cover,
                        const std::vector<double>& tgrid, const std::vector<int>& agrid,
                        double mu);

}  // namespace etalab
