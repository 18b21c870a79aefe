#pragma once
#include <string>
#include <vector>

#include "etalab/cayley.hpp"
#include "etalab/group.hpp"
#include "etalab/quotient.hpp"

namespace etalab {

struct GrowthEstimate {
  double rate = 0.0;       // 0 when flagged subexponential
  double raw_slope = 0.0;  // least-squares slope before the subexponential test
  double residual = 0.0;   // max absolute log-count misfit
  bool subexponential = false;
};

// Least-squares slope of log(count) against radius over the window
// [n_lo, n_lo + counts.size() - 1].  Exponential growth has a stable local
// slope; polynomial growth has a decaying one.  Flag subexponential when the
// overall slope is below 1e-3, or when the slope over the trailing half falls
// under 90% of the leading half's (curvature test; needs >= 4 points).
GrowthEstimate estimate_growth_rate(const std::vector<long long>& counts, int n_lo);

struct SigmaConstants {
  double sigma_Gamma = 0.0;  // 2 K_Gamma / theta0
  double sigma_u = 0.0;      // 2 K_u / theta0
  double sigma_R = 0.0;      // 2 sqrt(K_Gamma R) / theta0
};
SigmaConstants sigma_constants(double K_Gamma, double K_u, double R, double theta0);

struct GrowthConstants {
  double K_Gamma = 0.0;
  double K_class = 0.0;  // set when a class was supplied
  double K_u = 0.0;      // sup over tower quotients of the image-class growth
  double R = 0.0;        // separation rate when a tower was supplied
  double theta0 = 1.0, theta1 = 1.0;  // unit-translation geometry
  double c0 = 0.0, c1 = 0.0;
  SigmaConstants sigma;
  int fit_lo = 0, fit_hi = 0;
  bool K_Gamma_subexponential = false;
  bool K_class_subexponential = false;
  std::vector<long long> ball;        // ball sizes over the BFS range
  std::vector<long long> class_ball;  // class ball sizes (if class supplied)
};

// Ball growth, optional class growth, optional uniform class growth over a
// tower, and the sigma thresholds, from BFS out to `radius`.
GrowthConstants group_constants(std::shared_ptr<const Group> g, const ConjClass* cls,
                                const Tower* tower, int radius, double theta0,
                                long long max_states = kDefaultStateBudget);

}  // namespace etalab
