// Bloch-cell spectra, heat-kernel assembly, folding identities, and the
// analytic bounds that certify them.
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "etalab/error.hpp"
#include "etalab/kernel.hpp"
#include "etalab/operator_model.hpp"
#include "etalab/quadrature.hpp"
#include "etalab/spectrum.hpp"

using namespace etalab;

namespace {

ModelOperator scalar_op() {
  ModelOperator op;
  op.components = 1;
  op.c = 0.3;
  op.theta = 0.25;
  return op;
}

ModelOperator massive_op() {
  ModelOperator op;
  op.components = 2;
  op.m = 1.0;
  op.c = 0.3;
  op.theta = 0.25;
  return op;
}

ModelOperator massive_op_v() {
  ModelOperator op = massive_op();
  op.v = {PotTerm{0.2, 1, false}};
  return op;
}

std::vector<double> central(const std::vector<double>& v, double cut) {
  std::vector<double> out;
  for (double x : v)
    if (std::fabs(x) <= cut) out.push_back(x);
  return out;
}

}  // namespace

TEST_CASE("assembled spectra match the closed-form eigenvalues when v = 0") {
  for (int comp : {1, 2}) {
    ModelOperator op = comp == 1 ? scalar_op() : massive_op();
    int n = comp == 1 ? 3 : 2;
    SpectralData sd = spectrum_on_cover(op, n, 32, false, false);
    std::vector<double> got = central(sd.all_eigs(), 20.0);
    std::vector<double> want = closed_eigs(op, n, 32);
    std::sort(want.begin(), want.end());
    want = central(want, 20.0);
    REQUIRE(got.size() == want.size());
    for (size_t i = 0; i < got.size(); ++i) CHECK(std::fabs(got[i] - want[i]) < 1e-12);
  }
  CHECK_THROWS_AS((void)closed_eigs(massive_op_v(), 2, 32), Error);
}

TEST_CASE("all_eigs is sorted and min_abs_eig is attained") {
  SpectralData sd = spectrum_on_cover(massive_op_v(), 3, 32, false, false);
  std::vector<double> eigs = sd.all_eigs();
  CHECK(std::is_sorted(eigs.begin(), eigs.end()));
  double lo = 1e300;
  for (double lam : eigs) lo = std::min(lo, std::fabs(lam));
  CHECK(sd.min_abs_eig == doctest::Approx(lo).epsilon(1e-14));
  CHECK(sd.min_abs_eig > 0.5);  // certified line gap is a lower bound
}

TEST_CASE("class weights: unit mass at the identity sector, cancellation elsewhere") {
  SpectralData sd = spectrum_on_cover(massive_op_v(), 3, 32, false, false);
  for (int j = 0; j < 3; ++j) {
    for (int a = 0; a < 3; ++a) CHECK(std::abs(sd.deloc_weight(j, a)) ==
                                      doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    std::complex<double> row{0.0, 0.0};
    for (int a = 0; a < 3; ++a) row += sd.deloc_weight(j, a);
    CHECK(std::abs(row - (j == 0 ? 1.0 : 0.0)) < 1e-14);
  }
}

TEST_CASE("summing the class traces telescopes to the base-sector trace") {
  SpectralData sd = spectrum_on_cover(massive_op_v(), 3, 64, false, false);
  for (double t : {0.5, 1.1}) {
    std::complex<double> s{0.0, 0.0};
    for (int a = 0; a < 3; ++a) s += sd.trace(a, t);
    CHECK(std::abs(s - theta_sum(sd.sectors[0], t)) < 1e-13);
  }
}

TEST_CASE("theta sums agree with direct evaluation on a closed spectrum") {
  CellSpectrum cs = cell_eig(scalar_op(), 0.25, 8, false);
  double t = 0.6, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  for (Eigen::Index i = 0; i < cs.lam.size(); ++i) {
    double lam = cs.lam(i), w = std::exp(-t * t * lam * lam);
    s1 += lam * w;
    s2 += std::fabs(lam) * w;
    s3 += w;
  }
  CHECK(theta_sum(cs, t) == doctest::Approx(s1).epsilon(1e-14));
  CHECK(theta_abs_sum(cs, t) == doctest::Approx(s2).epsilon(1e-14));
  CHECK(gauss_sum(cs, t) == doctest::Approx(s3).epsilon(1e-14));
}

TEST_CASE("chirality at c = 0: every delocalized trace vanishes") {
  ModelOperator op = massive_op_v();
  op.c = 0.0;
  SpectralData sd = spectrum_on_cover(op, 3, 64, false, false);
  for (int a = 0; a < 3; ++a)
    for (double t : {0.3, 0.7, 1.5}) CHECK(std::abs(sd.trace(a, t)) < 1e-12);
}

TEST_CASE("heat kernels are Hermitian under swapping the two points") {
  SpectralData sd = spectrum_on_cover(massive_op_v(), 3, 64, true, false);
  KernelSample k1 = finite_kernel(sd, 0.8, 0.3, 1.7);
  KernelSample k2 = finite_kernel(sd, 0.8, 1.7, 0.3);
  CHECK((k1.value - k2.value.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(k1.err_bound >= 0.0);

  LineKernel lk(massive_op_v(), 64, 0, true);
  Eigen::MatrixXcd a = lk.eval(0.7, 0.2, 1.9);
  Eigen::MatrixXcd b = lk.eval(0.7, 1.9, 0.2);
  CHECK((a - b.adjoint()).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("a 4-cover kernel folds onto the 2-cover kernel") {
  ModelOperator op = massive_op_v();
  SpectralData sd4 = spectrum_on_cover(op, 4, 64, true, false);
  SpectralData sd2 = spectrum_on_cover(op, 2, 64, true, false);
  double dev = 0.0;
  for (double t : {0.6, 1.2})
    for (auto [x, y] : {std::pair<double, double>{0.2, 0.9}, {1.1, 1.9}}) {
      Eigen::MatrixXcd folded = fold_finite_kernel(sd4, 2, t, x, y);
      Eigen::MatrixXcd direct = finite_kernel(sd2, t, x, y).value;
      dev = std::max(dev, (folded - direct).cwiseAbs().maxCoeff());
    }
  CHECK(dev < 1e-12);
}

TEST_CASE("line kernel folds onto finite-cover kernels with honest certificates") {
  // v = 0: the identity holds to eigensolver roundoff
  FoldingCheck f0 = verify_folding(massive_op(), 2, {0.5, 1.0}, {{0.3, 0.7}, {0.1, 1.4}}, 96);
  CHECK(f0.max_dev <= 1e-10);
  CHECK(f0.max_cert >= f0.max_dev);
  CHECK(f0.max_cert <= 1e-10);

  // with a potential the quadrature aliasing model caps the certificate
  FoldingCheck fv = verify_folding(massive_op_v(), 3, {0.5, 1.0}, {{0.3, 0.7}}, 96);
  CHECK(fv.max_dev <= 1e-6);
  CHECK(fv.max_cert >= fv.max_dev);
}

TEST_CASE("spectral gaps: certified lower bounds vs grid scans") {
  CHECK(massive_op().certified_line_gap() == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(line_gap(massive_op()) == doctest::Approx(0.7).epsilon(1e-6));

  ModelOperator op = massive_op_v();
  CHECK(op.certified_line_gap() == doctest::Approx(0.5).epsilon(1e-14));
  double grid = line_gap(op);
  CHECK(grid >= op.certified_line_gap());
  CHECK(grid == doctest::Approx(0.698988).epsilon(1e-4));

  CHECK_THROWS_AS((void)line_gap(scalar_op()), Error);
  try {
    (void)line_gap(scalar_op());
  } catch (const Error& e) {
    CHECK(e.kind() == ErrKind::Precondition);
  }
}

TEST_CASE("integrated line kernel: trace norm is stable under truncation doubling") {
  LineKernel lk(massive_op_v(), 96, 0, true);
  double n24 = l1_norm(lk, 0.8, 24);
  double n48 = l1_norm(lk, 0.8, 48);
  CHECK(n24 > 0.1);
  CHECK(n24 < 10.0);
  CHECK(std::fabs(n24 - n48) < 1e-10);
}

TEST_CASE("off-diagonal Gaussian bound dominates actual kernel entries") {
  LineKernel lk(massive_op_v(), 96, 0, true);
  int dim = 2 * (2 * lk.K() + 1);
  for (double u : {2.0, 5.0}) {
    double actual = lk.eval(0.7, 0.0, u).cwiseAbs().maxCoeff();
    CHECK(actual <= kernel_offdiag_bound(dim, 0.7, u));
  }
  // the bound decays in the separation
  CHECK(kernel_offdiag_bound(dim, 0.7, 6.0) < kernel_offdiag_bound(dim, 0.7, 3.0));
}

TEST_CASE("small-t deck term: closed form matches quadrature on a deep cover") {
  ModelOperator op = scalar_op();
  SpectralData sd = spectrum_on_cover(op, 9, 512, false, false);
  // integrate only over the window the 512-mode spectrum resolves
  double T0 = 0.02, T = 0.2;
  auto f = [&](double t) { return sd.trace(1, t); };
  QuadResult q = integrate_adaptive(f, T0, T, 1e-14);
  std::complex<double> numeric = 2.0 / std::sqrt(M_PI) * q.value;
  std::complex<double> closed =
      one_comp_small_t_term(op, 1, T) - one_comp_small_t_term(op, 1, T0);
  CHECK(std::abs(numeric - closed) < 1e-12);

  // the analytic small-t bounds dominate trace and integral alike
  for (double t : {0.15, 0.3}) CHECK(std::abs(sd.trace(1, t)) <= hat_theta_strip_bound(op, t, 1));
  CHECK(std::abs(numeric) <= small_t_integral_bound(op, T, 1));
}

TEST_CASE("truncation certificate: central eigenvalues are stable under K doubling") {
  SpectralData sd = spectrum_on_cover(massive_op_v(), 2, 0, false, true);
  CHECK(sd.K == default_cell_K(massive_op_v()));
  CHECK(sd.trunc_bound > 0.0);
  CHECK(sd.trunc_bound < 1e-9);
  CHECK(sd.min_abs_eig == doctest::Approx(1.5595842177596).epsilon(1e-10));
}

TEST_CASE("dimension guards: potential needs headroom, huge cutoffs exceed budget") {
  CHECK_THROWS_AS((void)spectrum_on_cover(massive_op_v(), 2, 8), Error);
  try {
    (void)spectrum_on_cover(massive_op_v(), 2, 8);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrKind::Parse);
  }
  try {
    (void)spectrum_on_cover(massive_op(), 1, 15001);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrKind::Budget);
  }
}

TEST_CASE("operator validation: impossible field combinations are rejected") {
  ModelOperator bad = scalar_op();
  bad.m = 1.0;  // mass on a 1-component operator
  CHECK_THROWS_AS(bad.validate(), Error);

  ModelOperator bad2 = scalar_op();
  bad2.v = {PotTerm{0.1, 1, false}};  // potential on a 1-component operator
  CHECK_THROWS_AS(bad2.validate(), Error);

  ModelOperator bad3 = massive_op();
  bad3.theta = 1.5;  // holonomy outside [0, 1)
  CHECK_THROWS_AS(bad3.validate(), Error);
}
