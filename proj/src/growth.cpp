#include "etalab/growth.hpp"

#include <cmath>
#include <cstring>
#include <unordered_set>

#include "etalab/cayley.hpp"
#include "etalab/error.hpp"
#include "etalab/quadrature.hpp"

namespace etalab {

GrowthEstimate estimate_growth_rate(const std::vector<long long>& counts, int n_lo) {
  if (counts.size() < 3) fail_parse("estimate_growth_rate needs at least 3 data points");
  for (size_t i = 1; i < counts.size(); ++i)
    if (counts[i] < counts[i - 1]) fail_parse("estimate_growth_rate: counts must be nondecreasing");
  std::vector<double> xs, ys;
  for (size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] <= 0) continue;  // class may be absent from small balls
    xs.push_back(n_lo + (double)i);
    ys.push_back(std::log((double)counts[i]));
  }
  GrowthEstimate out;
  if (xs.size() < 3) {
    out.subexponential = true;  // bounded evidence
    return out;
  }
  LineFit fit = fit_line(xs, ys);
  out.raw_slope = fit.slope;
  out.residual = fit.residual;
  if (fit.slope < 1e-3) {
    out.subexponential = true;
    return out;
  }
  if (xs.size() >= 4) {
    size_t h = (xs.size() + 1) / 2;
    std::vector<double> xh(xs.begin(), xs.begin() + h), yh(ys.begin(), ys.begin() + h);
    std::vector<double> xt(xs.end() - h, xs.end()), yt(ys.end() - h, ys.end());
    double sh = fit_line(xh, yh).slope, st = fit_line(xt, yt).slope;
    // Polynomial growth: the local slope decays along the window.
    if (st <= 0.9 * sh) {
      out.subexponential = true;
      return out;
    }
  }
  out.rate = fit.slope;
  return out;
}

SigmaConstants sigma_constants(double K_Gamma, double K_u, double R, double theta0) {
  if (!(theta0 > 0.0)) fail_precondition("sigma constants need theta0 > 0");
  if (K_Gamma < 0 || K_u < 0 || R < 0) fail_precondition("growth constants must be >= 0");
  SigmaConstants s;
  s.sigma_Gamma = 2.0 * K_Gamma / theta0;
  s.sigma_u = 2.0 * K_u / theta0;
  s.sigma_R = 2.0 * std::sqrt(K_Gamma * R) / theta0;
  return s;
}

namespace {

// Class ball sizes inside a finite quotient under its own word metric
// (generator images), for the uniform growth constant.
std::vector<long long> quotient_class_counts(const Quotient& q, const QElem& rep, int radius) {
  std::vector<QElem> cls = q.class_of(rep);
  std::vector<std::string> cls_keys;
  auto key = [](const QElem& v) {
    std::string k(v.size() * sizeof(long long), '\0');
    memcpy(k.data(), v.data(), v.size() * sizeof(long long));
    return k;
  };
  std::unordered_set<std::string> in_class;
  for (const QElem& e : cls) in_class.insert(key(e));

  std::vector<QElem> gens;
  for (int i = 0; i < q.parent().gen_count(); ++i) {
    Elem g = q.parent().generator(i);
    gens.push_back(q.pi(g));
    gens.push_back(q.pi(q.parent().inv(g)));
  }
  std::vector<long long> counts(radius + 1, 0);
  std::unordered_set<std::string> seen;
  std::vector<QElem> frontier{q.qid()};
  seen.insert(key(frontier.front()));
  long long acc = in_class.count(key(q.qid())) ? 1 : 0;
  counts[0] = acc;
  for (int r = 1; r <= radius; ++r) {
    std::vector<QElem> next;
    for (const QElem& cur : frontier)
      for (const QElem& s : gens) {
        QElem nb = q.qmul(cur, s);
        std::string nk = key(nb);
        if (seen.insert(nk).second) {
          if (in_class.count(nk)) ++acc;
          next.push_back(std::move(nb));
        }
      }
    counts[r] = acc;
    frontier = std::move(next);
    if (frontier.empty()) {
      for (int rr = r + 1; rr <= radius; ++rr) counts[rr] = acc;
      break;
    }
  }
  return counts;
}

}  // namespace

GrowthConstants group_constants(std::shared_ptr<const Group> g, const ConjClass* cls,
                                const Tower* tower, int radius, double theta0,
                                long long max_states) {
  if (radius < 6) fail_parse("growth constants need radius >= 6 for a usable fit window");
  GrowthConstants out;
  out.theta0 = theta0;
  out.fit_lo = std::max(4, radius - 8);
  out.fit_hi = radius;
  out.ball = ball_counts(*g, radius, max_states);
  std::vector<long long> window(out.ball.begin() + out.fit_lo, out.ball.end());
  GrowthEstimate kg = estimate_growth_rate(window, out.fit_lo);
  out.K_Gamma = kg.rate;
  out.K_Gamma_subexponential = kg.subexponential;

  if (cls != nullptr) {
    out.class_ball.assign(radius + 1, 0);
    {
      // One BFS pass: cumulative class membership per radius.
      long long acc = 0;
      int max_r = 0;
      std::vector<long long> per(radius + 1, 0);
      // reuse class_ball_count per radius would re-run BFS; do it in one pass
      // via ball_data (affordable at the radii used for class growth).
      BallData ball = ball_data(*g, radius, max_states);
      for (size_t i = 0; i < ball.elems.size(); ++i)
        if (cls->member(ball.elems[i])) per[ball.length[i]] += 1;
      for (int r = 0; r <= radius; ++r) {
        acc += per[r];
        out.class_ball[r] = acc;
        max_r = r;
      }
      (void)max_r;
    }
    std::vector<long long> cwindow(out.class_ball.begin() + out.fit_lo, out.class_ball.end());
    GrowthEstimate kc = estimate_growth_rate(cwindow, out.fit_lo);
    out.K_class = kc.rate;
    out.K_class_subexponential = kc.subexponential;
  }

  if (tower != nullptr && cls != nullptr) {
    double ku = 0.0;
    for (const auto& q : tower->quotients) {
      std::vector<long long> qc = quotient_class_counts(*q, q->pi(cls->rep()), radius);
      GrowthEstimate e = estimate_growth_rate(qc, 0);
      ku = std::max(ku, e.rate);
    }
    out.K_u = ku;
    out.R = separation_rate(*tower, *cls, std::min(radius, kDefaultRadiusCap)).rate;
  }

  out.sigma = sigma_constants(out.K_Gamma, out.K_u, out.R, theta0);
  return out;
}

}  // namespace etalab
