#include "etalab/eta.hpp"

#include <functional>
#include <optional>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <future>
#include <limits>
#include <set>
#include <sstream>

#include "etalab/cayley.hpp"
#include "etalab/error.hpp"
#include "etalab/group.hpp"
#include "etalab/growth.hpp"
#include "etalab/kernel.hpp"
#include "etalab/quadrature.hpp"
#include "etalab/quotient.hpp"

namespace etalab {
namespace {

constexpr double kTwoOverSqrtPi = 1.1283791670955126;

void check_plan(const QuadraturePlan& plan) {
  if (!(plan.t_min > 0.0) || !(plan.t_split > plan.t_min))
    fail_parse("quadrature plan requires 0 < t_min < t_split");
  if (plan.t_max != 0.0 && !(plan.t_max > plan.t_split))
    fail_parse("quadrature plan requires t_max > t_split");
  if (!(plan.tol > 0.0)) fail_parse("quadrature tolerance must be positive");
  if (plan.quad_order < 2) fail_parse("quadrature order must be >= 2");
}

int auto_bloch_nodes(int a) { return std::max(64, (int)std::ceil(4.5 * std::abs((double)a)) + 24); }

// Exact (0,T] piece for 1-component covers: the class trace is a sum of
// line Fourier modes u = a mod n, and each u != 0 mode integrates in closed
// form; the u = 0 mode of the 1-component kernel is odd and vanishes.
std::complex<double> small_t_exact_1comp(const ModelOperator& op, int n, int a_mod, double T,
                                         double* bound_out) {
  std::complex<double> acc{0.0, 0.0};
  double next_u = 1e300;  // smallest |u| in either chain not yet summed
  for (int dir = 0; dir < 2; ++dir) {
    long long u = 0;
    for (int k = 0; k < 4096; ++k) {
      u = dir == 0 ? (long long)a_mod + (long long)k * n
                   : (long long)a_mod - (long long)(k + 1) * n;
      if (u == 0) continue;
      std::complex<double> term = one_comp_small_t_term(op, (int)u, T);
      acc += term;
      if (std::abs(term) < 1e-300) break;
    }
    next_u = std::min(next_u, std::abs((double)u) + n);
  }
  // both chains beyond U: (u+jn)^2 >= u^2 + 2Ujn gives a geometric majorant,
  // evaluated in logs so the certificate survives underflow
  double U = next_u;
  double log_ratio = -U * (double)n / (2.0 * T * T);
  double lb = std::log(4.0 / (M_PI * U)) - U * U / (4.0 * T * T) - std::log1p(-std::exp(log_ratio));
  *bound_out = lb < -745.0 ? std::numeric_limits<double>::min() : std::exp(lb);
  return acc;
}

// Strip-certified (0,T] bound for the modes m = a mod n, m != 0.
double small_t_strip_sum(const ModelOperator& op, int n_or_zero, int a, double T) {
  double acc = 0.0;
  if (n_or_zero == 0) return small_t_integral_bound(op, T, a);  // line: single mode
  int n = n_or_zero;
  for (int dir = 0; dir < 2; ++dir) {
    for (int k = 0; k < 4096; ++k) {
      long long m =
          dir == 0 ? (long long)a + (long long)k * n : (long long)a - (long long)(k + 1) * n;
      if (m == 0) continue;
      double term = small_t_integral_bound(op, T, (int)m);
      acc += term;
      if (term < 1e-300) break;
    }
  }
  return acc;
}

struct PassResult {
  std::complex<double> value{0.0, 0.0};
  double quad_err = 0.0, small_t_bound = 0.0, tail_bound = 0.0;
  double t_hi = 0.0;
  bool small_t_estimated = false, depth_capped = false;
};

double resolve_t_hi(const QuadraturePlan& plan, double gap) {
  double t_hi = plan.t_max;
  if (t_hi == 0.0) t_hi = tail_cutoff(gap, 1.0, 0.0, plan.tol * 0.1);
  return std::max(t_hi, plan.t_split * 1.25);
}

template <class TraceFn, class AbsFn>
PassResult run_pass(const ModelOperator& op, int n_or_line0, int a_mod, const QuadraturePlan& plan,
                    double gap, TraceFn&& trace, AbsFn&& abs_bound,
                    const std::function<std::complex<double>(double)>* est_trace = nullptr) {
  PassResult out;
  double t_hi = resolve_t_hi(plan, gap);
  out.t_hi = t_hi;

  auto log_integrand = [&](double s) {
    double t = std::exp(s);
    return trace(t) * t;  // dt = t ds
  };
  QuadResult q1 = integrate_adaptive(log_integrand, std::log(plan.t_min), std::log(plan.t_split),
                                     plan.tol, plan.quad_order);
  QuadResult q2 = integrate_adaptive(log_integrand, std::log(plan.t_split), std::log(t_hi),
                                     plan.tol, plan.quad_order);
  out.value = kTwoOverSqrtPi * (q1.value + q2.value);
  out.quad_err = kTwoOverSqrtPi * (q1.err_estimate + q2.err_estimate);
  out.depth_capped = q1.depth_capped || q2.depth_capped;

  // tail: |tr_a(t)| <= S(t_hi) e^{g^2 t_hi^2} e^{-g^2 t^2} for t >= t_hi
  double S = abs_bound(t_hi);
  out.tail_bound = kTwoOverSqrtPi * S / (2.0 * gap * gap * t_hi);

  double T = plan.t_min;
  if (op.components == 1) {
    double rem = 0.0;
    out.value += small_t_exact_1comp(op, n_or_line0, a_mod, T, &rem);
    out.small_t_bound = rem;
  } else if (n_or_line0 == 0 || a_mod != 0) {
    out.small_t_bound = small_t_strip_sum(op, n_or_line0, a_mod, T);
  } else {
    // 2-component identity class on a finite cover: the zero Fourier mode of
    // the trace has a finite t->0 limit but no closed form here.  Estimate
    // the (0,T] piece from samples on [T/2, T] (the caller supplies an
    // estimator trace resolved down to T/2) and report the spread as an
    // uncertainty, plus strip bounds for the nonzero modes m = kn.
    std::complex<double> mean{0.0, 0.0};
    const double fracs[4] = {0.5, 2.0 / 3.0, 5.0 / 6.0, 1.0};
    double vlo = 1e300, vhi = -1e300;
    for (double f : fracs) {
      std::complex<double> v = est_trace ? (*est_trace)(f * T) : trace(f * T);
      mean += 0.25 * v;
      vlo = std::min(vlo, v.real());
      vhi = std::max(vhi, v.real());
    }
    out.value += kTwoOverSqrtPi * T * mean;
    out.small_t_bound =
        kTwoOverSqrtPi * T * 2.0 * (vhi - vlo) + small_t_strip_sum(op, n_or_line0, 0, T);
    out.small_t_estimated = true;
  }
  return out;
}

EtaResult pack_result(const PassResult& p, double gap) {
  EtaResult r;
  r.value = p.value;
  r.quad_err = p.quad_err;
  r.small_t_bound = p.small_t_bound;
  r.tail_bound = p.tail_bound;
  r.gap = gap;
  r.t_hi = p.t_hi;
  r.small_t_estimated = p.small_t_estimated;
  r.flagged = p.depth_capped;
  return r;
}

EtaResult finite_pass(const ModelOperator& op, int n, int a_mod, const QuadraturePlan& plan,
                      int K) {
  SpectralData sd = spectrum_on_cover(op, n, K, false, /*certify_trunc=*/false);
  double gap = finite_cover_min_eig(sd);
  if (gap < 1e-8)
    fail_precondition("cover spectrum within 1e-8 of zero; eta undefined on this cover");
  // identity-class estimator samples go down to t_min/2; resolve that scale
  // with a dedicated eigenvalue-only spectrum (Lambda * t_min/2 >= 6)
  std::optional<SpectralData> est_sd;
  std::function<std::complex<double>(double)> est_trace;
  const std::function<std::complex<double>(double)>* est_ptr = nullptr;
  if (op.components == 2 && a_mod == 0) {
    int K_est = (int)std::ceil(6.0 / (M_PI * plan.t_min)) + 6 * op.v_max_freq() + 16;
    if (K_est > K) {
      est_sd.emplace(spectrum_on_cover(op, n, K_est, false, /*certify_trunc=*/false));
      est_trace = [&sd_ref = *est_sd, a_mod](double t) { return sd_ref.trace(a_mod, t); };
      est_ptr = &est_trace;
    }
  }
  PassResult p = run_pass(
      op, n, a_mod, plan, gap, [&](double t) { return sd.trace(a_mod, t); },
      [&](double t) { return sd.abs_trace_bound(t); }, est_ptr);
  return pack_result(p, gap);
}

EtaResult line_pass(const ModelOperator& op, int a, const QuadraturePlan& plan, int K, int nodes) {
  double gap = op.certified_line_gap();
  LineKernel lk(op, nodes, K, /*with_vectors=*/false);
  PassResult p = run_pass(
      op, 0, a, plan, gap, [&](double t) { return lk.trace_class(a, t); },
      [&](double t) { return lk.abs_trace_bound(t); });
  return pack_result(p, gap);
}

int eta_cell_K(const ModelOperator& op, const QuadraturePlan& plan) {
  if (plan.K > 0) return plan.K;
  if (op.components == 1) return 512;
  // resolve e^{-t^2 lambda^2} at t = t_min out to where dropped pairs are
  // below 1e-14: 2 pi (K-1) t_min >= 6
  int K = (int)std::ceil(6.0 / (2.0 * M_PI * plan.t_min)) + 1;
  return std::max(K, default_cell_K(op)) + 6 * op.v_max_freq();
}

}  // namespace

EtaResult eta_quadrature(const ModelOperator& op, const CoverSpec& cover, int a,
                         const QuadraturePlan& plan) {
  op.validate();
  check_plan(plan);
  auto t0 = std::chrono::steady_clock::now();
  int K = eta_cell_K(op, plan);
  EtaResult coarse, fine;
  if (cover.line) {
    if (op.components == 1)
      fail_precondition("line cover gapless for this family (1-component operator)");
    if (op.certified_line_gap() <= 0.0)
      fail_precondition("no certified line gap: require m - |v|_1 - |c| > 0");
    if (a == 0) fail_precondition("identity class on the line cover is not summable");
    int nodes = plan.bloch_nodes > 0 ? plan.bloch_nodes : auto_bloch_nodes(a);
    coarse = line_pass(op, a, plan, K, nodes);
    fine = line_pass(op, a, plan, 2 * K, 2 * nodes);
  } else {
    int n = cover.n;
    if (n < 1) fail_parse("finite cover index must be >= 1");
    int a_mod = ((a % n) + n) % n;
    coarse = finite_pass(op, n, a_mod, plan, K);
    fine = finite_pass(op, n, a_mod, plan, 2 * K);
  }
  EtaResult r = fine;
  r.trunc_bound = std::abs(fine.value - coarse.value);
  r.flagged = r.flagged || r.total_error() > std::max(100.0 * plan.tol, 1e-7);
  r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                  .count();
  return r;
}

std::complex<double> eta_closed_form_1comp(const ModelOperator& op, int n, int a) {
  op.validate();
  if (op.components != 1) fail_precondition("closed form applies to 1-component operators");
  if (op.has_potential()) fail_precondition("closed form applies to v = 0 only");
  if (n < 1) fail_parse("finite cover index must be >= 1");
  double beta = n * (op.theta + op.c / (2.0 * M_PI));
  double frac = beta - std::floor(beta);
  int a_mod = ((a % n) + n) % n;
  if (std::abs(frac) < 1e-12 || std::abs(frac - 1.0) < 1e-12)
    fail_precondition("degenerate cover: spectrum contains zero");
  if (a_mod == 0) return {(1.0 - 2.0 * frac) / n, 0.0};
  std::complex<double> w = std::exp(std::complex<double>(0.0, -2.0 * M_PI * a_mod / n));
  double k0 = std::ceil(-beta);
  std::complex<double> wk0 = std::exp(std::complex<double>(0.0, -2.0 * M_PI * a_mod * k0 / n));
  return (2.0 / n) * wk0 / (1.0 - w);
}

std::complex<double> eta_spectral_oracle(const ModelOperator& op, int n, int a,
                                         const std::vector<double>& sgrid) {
  op.validate();
  if (n < 1) fail_parse("finite cover index must be >= 1");
  if (sgrid.size() < 4) fail_parse("oracle needs at least 4 s-grid points");
  std::vector<double> s = sgrid;
  std::sort(s.begin(), s.end(), std::greater<double>());
  for (double si : s)
    if (!(si > 0.0)) fail_parse("oracle s-grid must be positive");
  int a_mod = ((a % n) + n) % n;
  int K = op.components == 1 ? std::max(512, 32 * n) : default_cell_K(op) * 2;
  SpectralData sd = spectrum_on_cover(op, n, K, false, /*certify_trunc=*/false);
  if (sd.min_abs_eig < 1e-8)
    fail_precondition("cover spectrum within 1e-8 of zero; eta undefined on this cover");

  std::vector<std::complex<double>> V(s.size(), {0.0, 0.0});
  for (size_t i = 0; i < s.size(); ++i) {
    std::complex<double> acc{0.0, 0.0};
    for (int j = 0; j < n; ++j) {
      double partial = 0.0;
      for (double lam : sd.sectors[j].lam)
        partial += (lam > 0.0 ? 1.0 : -1.0) * std::exp(-s[i] * lam * lam);
      acc += sd.deloc_weight(j, a_mod) * partial;
    }
    V[i] = acc;
  }
  // quadratic model V(s) = V0 + A s + B s^2; Lagrange value at s = 0
  auto extrap3 = [&](size_t i0) {
    std::complex<double> v0{0.0, 0.0};
    for (size_t i = i0; i < i0 + 3; ++i) {
      double num = 1.0, den = 1.0;
      for (size_t j = i0; j < i0 + 3; ++j) {
        if (j == i) continue;
        num *= -s[j];
        den *= s[i] - s[j];
      }
      v0 += V[i] * (num / den);
    }
    return v0;
  };
  // The coarse triple carries the cubic model term, ~s_coarse/s_fine = 1e3
  // times the fine extrapolant's own error; a 1e-4 guard therefore keeps the
  // returned value's error near 1e-7.
  std::complex<double> fine = extrap3(s.size() - 3);
  std::complex<double> prev = extrap3(s.size() - 4);
  if (std::abs(fine - prev) > 1e-4) {
    std::ostringstream os;
    os << "regularized spectral sum not Cauchy: extrapolants differ by " << std::abs(fine - prev)
       << " (grid too coarse or spectrum truncated)";
    fail_numeric(os.str());
  }
  return fine;
}

ConvergenceReport converge_tower(const ModelOperator& op, const std::vector<int>& ns, int a,
                                 const QuadraturePlan& plan, int threads) {
  op.validate();
  if (ns.size() < 2) fail_parse("tower needs at least 2 covers");
  std::vector<int> order(ns);
  if (!std::is_sorted(order.begin(), order.end()))
    fail_parse("tower cover list must be nondecreasing");
  for (int n : order)
    if (n < 1) fail_parse("tower cover indices must be >= 1");

  ConvergenceReport rep;
  rep.rows.resize(order.size());
  auto row_job = [&](size_t i) {
    ConvergenceRow row;
    row.n = order[i];
    row.eta = eta_quadrature(op, CoverSpec{false, order[i]}, a, plan);
    return row;
  };
  if (threads > 1) {
    std::vector<std::future<ConvergenceRow>> futs;
    futs.reserve(order.size());
    for (size_t i = 0; i < order.size(); ++i)
      futs.push_back(std::async(std::launch::async, row_job, i));
    for (size_t i = 0; i < order.size(); ++i) rep.rows[i] = futs[i].get();
  } else {
    for (size_t i = 0; i < order.size(); ++i) rep.rows[i] = row_job(i);
  }

  bool want_line = op.components == 2 && op.certified_line_gap() > 0.0 && a != 0;
  if (want_line) {
    rep.line_value = eta_quadrature(op, CoverSpec{true, 0}, a, plan);
    for (auto& row : rep.rows) {
      row.abs_diff = std::abs(row.eta.value - rep.line_value->value);
      row.has_diff = true;
    }
  }

  // exact stabilization: first index from which every later value is
  // bitwise equal to the final one (needs at least two equal rows)
  if (rep.rows.size() >= 2) {
    std::complex<double> last = rep.rows.back().eta.value;
    int idx = (int)rep.rows.size() - 1;
    while (idx > 0 && rep.rows[idx - 1].eta.value == last) --idx;
    if (idx < (int)rep.rows.size() - 1) rep.stabilization_index = idx;
  }

  // growth-side constants for the deck tower Z -> Z/n_i
  auto g = make_group("z");
  ConjClass cls = make_class(g, std::to_string(a));
  std::set<int> uniq(order.begin(), order.end());
  std::ostringstream ts;
  ts << "iZ:";
  bool first = true;
  for (int n : uniq) {
    if (!first) ts << ",";
    ts << n;
    first = false;
  }
  Tower tower = make_tower(g, ts.str());
  GrowthConstants gc = group_constants(g, &cls, &tower, 12, 1.0);
  rep.K_Gamma = gc.K_Gamma;
  rep.K_u = gc.K_u;
  rep.R = gc.R;
  rep.sigma_Gamma = gc.sigma.sigma_Gamma;
  rep.sigma_u = gc.sigma.sigma_u;
  rep.sigma_R = gc.sigma.sigma_R;
  double gap_used = want_line ? op.certified_line_gap() : rep.rows.front().eta.gap;
  for (const auto& row : rep.rows) gap_used = std::min(gap_used, row.eta.gap);
  rep.gap_margin = gap_used - rep.sigma_u;
  return rep;
}

}  // namespace etalab
