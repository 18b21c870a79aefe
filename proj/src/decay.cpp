#include "etalab/decay.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "etalab/error.hpp"
#include "etalab/kernel.hpp"
#include "etalab/quadrature.hpp"
#include "etalab/spectrum.hpp"

namespace etalab {
namespace {

std::string sample_desc(int a, double t) {
  std::ostringstream os;
  os << "class a=" << a << ", t=" << t;
  return os.str();
}

}  // namespace

DecayReport decay_check(const ModelOperator& op, const CoverSpec& cover,
                        const std::vector<double>& tgrid, const std::vector<int>& agrid,
                        double mu) {
  op.validate();
  if (cover.line) fail_precondition("decay check requires a finite cover");
  if (!(mu > 1.0)) fail_parse("off-diagonal slack mu must be > 1");
  if (tgrid.empty() || agrid.empty()) fail_parse("decay check needs nonempty t and class grids");
  int n = cover.n;
  if (n < 1) fail_parse("finite cover index must be >= 1");
  for (double t : tgrid)
    if (!(t > 0.0)) fail_parse("decay t-grid must be positive");

  std::vector<double> ts(tgrid);
  std::sort(ts.begin(), ts.end());
  SpectralData sd = spectrum_on_cover(op, n, 0, /*with_vectors=*/true, /*certify_trunc=*/false);
  double gap = finite_cover_min_eig(sd);
  if (gap < 1e-8)
    fail_precondition("cover spectrum within 1e-8 of zero; decay rates undefined");

  DecayReport rep;
  rep.gap = gap;
  rep.eps = 0.95 * gap;
  rep.mu = mu;

  struct Raw {
    double t;
    int a, d;
    double val;
  };
  std::vector<Raw> raws;
  for (int a_in : agrid) {
    int a = ((a_in % n) + n) % n;
    int d = std::min(a, n - a);
    for (double t : ts) raws.push_back({t, a, d, std::abs(sd.trace(a, t))});
  }

  // large-t envelope constant, then its stability under grid extension
  std::vector<double> large_ts;
  for (double t : ts)
    if (t >= 1.0) large_ts.push_back(t);
  auto c5_over = [&](double t_cap) {
    double c = 0.0;
    const Raw* worst = nullptr;
    for (const Raw& r : raws)
      if (r.t >= 1.0 && r.t <= t_cap) {
        double cand = r.val * std::exp(rep.eps * rep.eps * r.t * r.t);
        if (cand > c) {
          c = cand;
          worst = &r;
        }
      }
    return std::pair<double, const Raw*>(c, worst);
  };
  if (!large_ts.empty()) {
    auto [c5_full, worst_full] = c5_over(large_ts.back());
    rep.c5 = c5_full;
    if (large_ts.size() >= 2) {
      double t_half = large_ts[(large_ts.size() - 1) / 2];
      auto [c5_half, worst_half] = c5_over(t_half);
      (void)worst_half;
      if (c5_half > 0.0) {
        rep.stability_growth = (c5_full - c5_half) / c5_half;
        if (rep.stability_growth > 0.10) {
          rep.failed = true;
          rep.offending = "large-t envelope constant grows " +
                          std::to_string(rep.stability_growth * 100.0) + "% past " +
                          sample_desc(worst_full->a, worst_full->t);
        }
      }
    }
  }

  // per-class small-t envelopes (a != 0): eps1 = 3 d^2 / 16 < d^2 / 4
  std::map<int, DecayClassFit> fits;
  for (const Raw& r : raws) {
    if (r.t >= 1.0 || r.d == 0) continue;
    auto& f = fits[r.a];
    f.a = r.a;
    f.d = r.d;
    f.eps1 = 3.0 * r.d * r.d / 16.0;
    f.c6 = std::max(f.c6, r.val * std::exp(f.eps1 / (r.t * r.t)));
  }
  for (auto& [a, f] : fits) rep.class_fits.push_back(f);

  for (const Raw& r : raws) {
    DecaySample s;
    s.t = r.t;
    s.a = r.a;
    s.value = r.val;
    if (r.t >= 1.0) {
      s.regime = "large-t";
      s.bound = rep.c5 * std::exp(-rep.eps * rep.eps * r.t * r.t);
    } else if (r.d != 0) {
      s.regime = "small-t";
      const DecayClassFit& f = fits[r.a];
      s.bound = f.c6 * std::exp(-f.eps1 / (r.t * r.t));
    } else {
      s.regime = "excluded";  // identity class: trace has a small-t limit
      s.bound = 0.0;
    }
    s.margin = s.regime == "excluded" ? 0.0 : s.bound - s.value;
    if (s.regime != "excluded" && s.margin < -1e-12 && !rep.failed) {
      rep.failed = true;
      rep.offending = "negative decay margin at " + sample_desc(s.a, s.t);
    }
    rep.samples.push_back(s);
  }

  // off-diagonal Gaussian propagation of the upstream line kernel:
  // log|K(x, x+s)| against s^2 at separations proportional to t (a compact
  // cover flattens once t reaches its diameter, so the slope test must run
  // where distances are unbounded).  Below t = 0.3 the sampled kernel is
  // cutoff-limited; above s ~ 24 the Bloch rule no longer resolves the shift.
  const double x0 = 0.3;
  LineKernel lk(op, 128, sd.K, true);
  for (double t : ts) {
    if (t < 0.3) continue;
    std::vector<double> xs, ys;
    for (int j = 1; j <= 5; ++j) {
      double s = 0.75 * t * j;
      if (s > 24.0) break;
      Eigen::MatrixXcd kv = lk.eval(t, x0, x0 + s);
      double mag = kv.cwiseAbs().maxCoeff();
      if (mag < 1e-270) continue;
      xs.push_back(s * s);
      ys.push_back(std::log(mag));
    }
    if (xs.size() < 3) continue;
    LineFit lf = fit_line(xs, ys);
    OffdiagFit of;
    of.t = t;
    of.slope = lf.slope;
    of.required = -1.0 / (4.0 * mu * t * t);
    of.points = (int)xs.size();
    of.ok = lf.slope <= of.required;
    if (!of.ok && !rep.failed) {
      rep.failed = true;
      std::ostringstream os;
      os << "off-diagonal slope " << of.slope << " misses required " << of.required
         << " at t=" << t;
      rep.offending = os.str();
    }
    rep.offdiag.push_back(of);
  }
  return rep;
}

}  // namespace etalab
