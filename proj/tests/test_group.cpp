// Word-metric balls, conjugacy classes, finite quotients, trace
// stabilization, and growth constants.
#include <doctest.h>

#include <random>
#include <vector>

#include "etalab/algebra.hpp"
#include "etalab/cayley.hpp"
#include "etalab/error.hpp"
#include "etalab/growth.hpp"
#include "etalab/group.hpp"
#include "etalab/quotient.hpp"

using namespace etalab;

TEST_CASE("ball counts: free, abelian, and modular-group growth") {
  // F2: |B(r)| = 2*3^r - 1
  auto f2 = make_group("f2");
  std::vector<long long> expect_f2 = {1, 5, 17, 53, 161, 485};
  CHECK(ball_counts(*f2, 5) == expect_f2);

  // Z^2 with the standard generators: |B(r)| = 2r^2 + 2r + 1
  auto z2 = make_group("z2");
  std::vector<long long> expect_z2 = {1, 5, 13, 25};
  CHECK(ball_counts(*z2, 3) == expect_z2);

  // Z: |B(r)| = 2r + 1
  auto z = make_group("z");
  std::vector<long long> expect_z = {1, 3, 5, 7, 9};
  CHECK(ball_counts(*z, 4) == expect_z);

  // modular group on the order-4 / order-6 generating pair
  auto sl = make_group("sl2z");
  std::vector<long long> expect_sl = {1, 5, 16, 28, 44, 68, 100, 148, 212, 308};
  CHECK(ball_counts(*sl, 9) == expect_sl);
}

TEST_CASE("word length: coordinate words and generator words") {
  auto z2 = make_group("z2");
  auto wl = word_length(*z2, z2->parse_word("2,-1"), 12);
  REQUIRE(wl.has_value());
  CHECK(*wl == 3);
  CHECK(*word_length(*z2, z2->identity(), 12) == 0);

  auto sl = make_group("sl2z");
  CHECK(*word_length(*sl, sl->parse_word("x^2"), 12) == 2);

  auto f2 = make_group("f2");
  CHECK(*word_length(*f2, f2->parse_word("a*b*a^-1*b^-1"), 12) == 4);
}

TEST_CASE("conjugacy classes: membership and class-ball growth") {
  auto sl = make_group("sl2z");
  ConjClass cx = make_class(sl, "x");
  CHECK(cx.member(sl->parse_word("x")));
  CHECK(cx.member(sl->parse_word("y*x*y^-1")));
  CHECK_FALSE(cx.member(sl->parse_word("x^3")));
  CHECK_FALSE(cx.member(sl->identity()));
  CHECK_FALSE(cx.is_identity_class());

  std::vector<long long> cballs;
  for (int r = 0; r <= 8; ++r) cballs.push_back(class_ball_count(*sl, cx, r));
  CHECK(cballs == std::vector<long long>{0, 1, 1, 3, 3, 5, 5, 9, 9});

  auto f2 = make_group("f2");
  ConjClass comm = make_class(f2, "a*b*a^-1*b^-1");
  CHECK(class_ball_count(*f2, comm, 4) == 4);  // the four cyclic rotations
}

TEST_CASE("order-12 character quotient: value table and power separation") {
  auto sl = make_group("sl2z");
  auto q = make_quotient(sl, "psi-only");
  CHECK(q->order() == 12);
  auto val = [&](const char* w) { return q->pi(sl->parse_word(w)).back(); };
  CHECK(val("e") == 0);
  CHECK(val("x") == 3);
  CHECK(val("x^2") == 6);
  CHECK(val("x^3") == 9);
  CHECK(val("y") == 2);
  CHECK(val("y^2") == 4);
  CHECK(val("y^3") == 6);  // = x^2: both are the central involution
  CHECK(val("y^4") == 8);
  CHECK(val("y^5") == 10);

  // x and x^3 map to 3 and 9: distinguished already by the abelian quotient
  CHECK_FALSE(q->same_class(q->pi(sl->parse_word("x")), q->pi(sl->parse_word("x^3"))));
  CHECK(q->same_class(q->pi(sl->parse_word("x^2")), q->pi(sl->parse_word("y^3"))));
}

TEST_CASE("injective radius: exact values on cyclic quotients of the integers") {
  auto z = make_group("z");
  ConjClass one = make_class(z, "1");

  // Z -> Z/5: the shortest off-class preimage of [1] is -4, length 4
  auto q5 = make_quotient(z, "iZ:5");
  InjectiveRadius r5 = injective_radius(*q5, one, 8);
  CHECK(r5.value == 3);
  CHECK_FALSE(r5.at_cap);

  // Z -> Z/2: -1 is a length-1 violator, so the radius is 0
  auto q2 = make_quotient(z, "iZ:2");
  InjectiveRadius r2 = injective_radius(*q2, one, 8);
  CHECK(r2.value == 0);
  CHECK_FALSE(r2.at_cap);
}

TEST_CASE("injective radius: character-only vs composite quotient of the modular group") {
  auto sl = make_group("sl2z");
  ConjClass cx = make_class(sl, "x");

  // order-12 character alone: radius exactly 5
  auto q1 = make_quotient(sl, "psi-only");
  InjectiveRadius r1 = injective_radius(*q1, cx, 8);
  CHECK(r1.value == 5);
  CHECK_FALSE(r1.at_cap);

  // composite (level-3 congruence + character): no violator up to the cap
  auto q2 = make_quotient(sl, "psi");
  InjectiveRadius r2 = injective_radius(*q2, cx, 8);
  CHECK(r2.value == 8);
  CHECK(r2.at_cap);
}

TEST_CASE("tower distinguishing: cyclic quotients of growing level") {
  auto z = make_group("z");
  ConjClass one = make_class(z, "1");
  Tower tw = make_tower(z, "iZ:2,4,8,16");
  REQUIRE(tw.quotients.size() == 4);

  // 5 collides with 1 mod 2 and mod 4 but separates from level 8 on
  DistinguishResult r = distinguishes(tw, one, {z->parse_word("5")});
  CHECK(r.found);
  CHECK(r.index == 2);
  CHECK(r.violating == std::vector<int>{1, 1, 0, 0});

  // a class member is never a violator
  DistinguishResult rid = distinguishes(tw, one, {z->parse_word("1")});
  CHECK(rid.found);
  CHECK(rid.index == 0);
  CHECK(rid.violating == std::vector<int>{0, 0, 0, 0});
}

TEST_CASE("tower distinguishing: composite congruence tower separates a short ball") {
  auto sl = make_group("sl2z");
  ConjClass cx = make_class(sl, "x");
  Tower tw = make_tower(sl, "congruence+psi:2..16");
  REQUIRE(tw.quotients.size() == 15);
  BallData bd = ball_data(*sl, 3);
  DistinguishResult r = distinguishes(tw, cx, bd.elems);
  CHECK(r.found);
  CHECK(r.index == 0);
  for (int v : r.violating) CHECK(v == 0);
}

TEST_CASE("separation rate vanishes on a constant finite quotient") {
  auto sl = make_group("sl2z");
  ConjClass cx = make_class(sl, "x");
  Tower tw = make_tower(sl, "psi");
  SeparationRate sr = separation_rate(tw, cx, 6);
  CHECK(sr.rate == 0.0);
  CHECK(sr.bounded_classes);
  REQUIRE(sr.rows.size() == 1);
  CHECK(sr.rows[0].class_size == 6);
  CHECK(sr.rows[0].radius.at_cap);
}

TEST_CASE("pushed traces: integer-line element with an aliasing collision") {
  auto z = make_group("z");
  ConjClass five = make_class(z, "5");
  // f = delta_5 - (1/2) delta_{-3}; note -3 = 5 mod 8, so the collision
  // persists through level 8 and resolves only at level 16.
  AlgebraElem f = make_algebra_elem(z, {{"5", RatC(Rat(1))}, {"-3", RatC(Rat(-1, 2))}});
  CHECK(algebra_trace(f, five) == RatC(Rat(1)));

  Tower tw = make_tower(z, "iZ:2,4,8,16");
  StabilizationReport rep = trace_stabilization(f, tw, five);
  CHECK(rep.limit == RatC(Rat(1)));
  REQUIRE(rep.rows.size() == 4);
  CHECK(rep.rows[0].pushed_trace == RatC(Rat(1, 2)));
  CHECK(rep.rows[1].pushed_trace == RatC(Rat(1, 2)));
  CHECK(rep.rows[2].pushed_trace == RatC(Rat(1, 2)));
  CHECK(rep.rows[3].pushed_trace == RatC(Rat(1)));
  CHECK(rep.index == 3);
  CHECK(rep.stabilized);
}

TEST_CASE("pushed traces: random short-support modular-group elements stabilize") {
  auto sl = make_group("sl2z");
  ConjClass cx = make_class(sl, "x");
  Tower tw = make_tower(sl, "congruence+psi:2..8");
  BallData bd = ball_data(*sl, 3);

  // first tower index whose injective radius exceeds the support radius
  int safe_index = -1;
  for (size_t i = 0; i < tw.quotients.size(); ++i) {
    InjectiveRadius r = injective_radius(*tw.quotients[i], cx, 4);
    if (r.value >= 4 || r.at_cap) {
      safe_index = (int)i;
      break;
    }
  }
  REQUIRE(safe_index >= 0);

  std::mt19937 rng(20240817);
  std::uniform_int_distribution<int> pick(0, (int)bd.elems.size() - 1);
  std::uniform_int_distribution<long long> coeff(-3, 3);
  for (int trial = 0; trial < 10; ++trial) {
    AlgebraElem f(sl);
    for (int k = 0; k < 3; ++k)
      f.add(bd.elems[pick(rng)], RatC(Rat(coeff(rng)), Rat(coeff(rng))));
    CHECK(f.support_radius() <= 3);
    StabilizationReport rep = trace_stabilization(f, tw, cx);
    CHECK(rep.stabilized);
    CHECK(rep.limit == algebra_trace(f, cx));
    REQUIRE(rep.index >= 0);
    CHECK(rep.index <= safe_index);
  }
}

TEST_CASE("group algebra: merging, scaling, pushforward mass conservation") {
  auto z = make_group("z");
  AlgebraElem f = make_algebra_elem(z, {{"2", RatC(Rat(1, 3))}, {"-1", RatC(Rat(1))}});
  f.add(z->parse_word("2"), RatC(Rat(2, 3)));  // merges with the existing term
  CHECK(f.support_size() == 2);
  CHECK(f.coeff_sum() == RatC(Rat(2)));
  CHECK(f.support_radius() == 2);

  AlgebraElem g = f.scaled(RatC(Rat(0), Rat(1)));  // multiply by i
  CHECK(g.coeff_sum() == RatC(Rat(0), Rat(2)));

  // adding a term with coefficient zero erases it
  AlgebraElem h = make_algebra_elem(z, {{"4", RatC(Rat(1))}});
  h.add(z->parse_word("4"), RatC(Rat(-1)));
  CHECK(h.support_size() == 0);

  // pushforward to Z/6 preserves total mass and sums colliding fibers
  auto q = make_quotient(z, "iZ:6");
  AlgebraElem big = make_algebra_elem(
      z, {{"1", RatC(Rat(1, 2))}, {"7", RatC(Rat(1, 3))}, {"-5", RatC(Rat(1, 6))}, {"2", RatC(Rat(5))}});
  QAlgebraElem pf = pushforward(big, *q);
  CHECK(pf.coeff_sum() == big.coeff_sum());
  // 1, 7, -5 all reduce to 1 mod 6
  CHECK(pf.terms().size() == 2);
  ConjClass one = make_class(z, "1");
  CHECK(q_trace(pf, q->pi(z->parse_word("1"))) == RatC(Rat(1)));
}

TEST_CASE("growth rate estimation: exponential detected, polynomial flagged") {
  std::vector<long long> tripling;
  for (int r = 0; r <= 12; ++r) {
    long long v = 1;
    for (int i = 0; i < r; ++i) v *= 3;
    tripling.push_back(2 * v - 1);
  }
  GrowthEstimate ge = estimate_growth_rate(tripling, 4);
  CHECK_FALSE(ge.subexponential);
  CHECK(ge.rate == doctest::Approx(std::log(3.0)).epsilon(0.02));

  std::vector<long long> quadratic;
  for (int r = 0; r <= 12; ++r) quadratic.push_back(2 * r * r + 2 * r + 1);
  GrowthEstimate gp = estimate_growth_rate(quadratic, 4);
  CHECK(gp.subexponential);
  CHECK(gp.rate == 0.0);
}

TEST_CASE("growth constants: flat group vanishes, free group hits log 3") {
  auto z2 = make_group("z2");
  GrowthConstants gz = group_constants(z2, nullptr, nullptr, 12, 1.0);
  CHECK(gz.K_Gamma == 0.0);
  CHECK(gz.K_Gamma_subexponential);
  CHECK(gz.sigma.sigma_Gamma == 0.0);

  auto f2 = make_group("f2");
  GrowthConstants gf = group_constants(f2, nullptr, nullptr, 12, 1.0);
  CHECK_FALSE(gf.K_Gamma_subexponential);
  CHECK(std::fabs(gf.K_Gamma - std::log(3.0)) <= 0.02 * std::log(3.0));
  CHECK(gf.fit_lo == 4);
  CHECK(gf.fit_hi == 12);
}

TEST_CASE("sigma constants: closed-form combinations of the growth data") {
  SigmaConstants sc = sigma_constants(2.0, 3.0, 4.0, 0.5);
  CHECK(sc.sigma_Gamma == doctest::Approx(8.0).epsilon(1e-15));
  CHECK(sc.sigma_u == doctest::Approx(12.0).epsilon(1e-15));
  CHECK(sc.sigma_R == doctest::Approx(2.0 * std::sqrt(8.0) / 0.5).epsilon(1e-15));
}

TEST_CASE("spec parsing failures carry the parse error kind") {
  auto sl = make_group("sl2z");
  CHECK_THROWS_AS((void)make_group("so3"), Error);
  CHECK_THROWS_AS((void)make_quotient(sl, "mod:0"), Error);
  CHECK_THROWS_AS((void)sl->parse_word("w^2"), Error);
  try {
    (void)make_group("so3");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrKind::Parse);
  }
}
