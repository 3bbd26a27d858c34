#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "linkform/laurent.hpp"

using namespace linkform;

namespace {

LaurentPoly random_poly(const FieldContext& ctx, std::mt19937_64& rng, long max_span = 3) {
  std::uniform_int_distribution<long> exp(-max_span, max_span), coef(-3, 3);
  LaurentPoly p(ctx);
  for (int i = 0; i < 4; ++i)
    p.add_term(exp(rng), FieldElement::from_rational(ctx, coef(rng)));
  return p;
}

} // namespace

TEST_CASE("sharp on pinned examples") {
  FieldContext ctx = FieldContext::make(12);
  LaurentPoly t = LaurentPoly::variable(ctx);
  FieldElement i = imaginary_unit(ctx);

  // sharp(t - i) vanishes at i
  LaurentPoly p = t - LaurentPoly::constant(ctx, i);
  CHECK(eval_at(sharp(p), i).is_zero());

  LaurentPoly three = LaurentPoly::constant(ctx, FieldElement::from_rational(ctx, 3));
  CHECK(sharp(three) == three);

  LaurentPoly tre = basic_poly(ctx, Mode::Real, RootOfUnity(1, 6));
  CHECK(sharp(tre) == tre);
}

TEST_CASE("sharp is an involutive ring map") {
  FieldContext ctx = FieldContext::make(12);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 30; ++i) {
    LaurentPoly a = random_poly(ctx, rng), b = random_poly(ctx, rng);
    CHECK(sharp(sharp(a)) == a);
    CHECK(sharp(a * b) == sharp(a) * sharp(b));
  }
}

TEST_CASE("basic polynomials") {
  FieldContext ctx = FieldContext::make(12);
  LaurentPoly t = LaurentPoly::variable(ctx);
  CHECK(basic_poly(ctx, Mode::Complex, RootOfUnity(1, 4)) ==
        t - LaurentPoly::constant(ctx, imaginary_unit(ctx)));
  // real trefoil polynomial t - 1 + t^{-1}
  LaurentPoly tre = basic_poly(ctx, Mode::Real, RootOfUnity(1, 6));
  CHECK(tre.coeff(1) == FieldElement::one(ctx));
  CHECK(tre.coeff(0) == -FieldElement::one(ctx));
  CHECK(tre.coeff(-1) == FieldElement::one(ctx));
  CHECK(basic_poly(ctx, Mode::Real, RootOfUnity(0, 1)) == t - LaurentPoly::one(ctx));
  CHECK_THROWS_AS(basic_poly(ctx, Mode::Real, RootOfUnity(5, 6)), Error); // lower half
}

TEST_CASE("order_at on pinned examples") {
  FieldContext ctx = FieldContext::make(52);
  LaurentPoly t = LaurentPoly::variable(ctx);
  LaurentPoly one = LaurentPoly::one(ctx);
  LaurentPoly two = one + one;

  auto o = order_at((t - one).pow(3) * (t + two), RootOfUnity(0, 1));
  CHECK(o.order == 3);
  CHECK(eval_at_root(o.cofactor, RootOfUnity(0, 1)) == FieldElement::from_rational(ctx, 3));

  // Delta_1 for k = 6 has no zero at zeta_13
  LaurentPoly delta1 = LaurentPoly::one(ctx);
  for (long i = 2; i <= 6; ++i) delta1 *= basic_poly(ctx, Mode::Real, RootOfUnity(i, 13));
  CHECK(order_at(delta1, RootOfUnity(1, 13)).order == 0);

  // t^{-6} P_12(t) has a simple zero at every nontrivial 13th root
  LaurentPoly p12(ctx);
  for (long i = 0; i <= 12; ++i) p12.set(i - 6, FieldElement::one(ctx));
  CHECK(order_at(p12, RootOfUnity(2, 13)).order == 1);

  CHECK_THROWS_AS(order_at(LaurentPoly::zero(ctx), RootOfUnity(0, 1)), Error);
}

TEST_CASE("order_at is additive on products") {
  FieldContext ctx = FieldContext::make(12);
  std::mt19937_64 rng(17);
  RootOfUnity xi(1, 6);
  for (int i = 0; i < 20; ++i) {
    LaurentPoly a = random_poly(ctx, rng), b = random_poly(ctx, rng);
    if (a.is_zero() || b.is_zero()) continue;
    CHECK(order_at(a * b, xi).order == order_at(a, xi).order + order_at(b, xi).order);
  }
}

TEST_CASE("substitution examples and properties") {
  FieldContext ctx = FieldContext::make(52);
  // t - 1 + t^{-1}: rational coefficients, so it lives in Q(zeta_52) too
  LaurentPoly tre(ctx);
  tre.set(1, FieldElement::one(ctx));
  tre.set(0, -FieldElement::one(ctx));
  tre.set(-1, FieldElement::one(ctx));
  CHECK(substitute(tre, RootOfUnity(0, 1), 1) == tre);

  LaurentPoly rot = substitute(tre, RootOfUnity(1, 13), 1);
  FieldElement z13 = embed_root(ctx, RootOfUnity(1, 13));
  CHECK(rot.coeff(1) == z13);
  CHECK(rot.coeff(0) == -FieldElement::one(ctx));
  CHECK(rot.coeff(-1) == z13.conj());

  LaurentPoly t = LaurentPoly::variable(ctx);
  CHECK(substitute(t, RootOfUnity(1, 13), 2) == LaurentPoly::t_power(ctx, 2, z13));

  std::mt19937_64 rng(23);
  for (int i = 0; i < 15; ++i) {
    LaurentPoly a = random_poly(ctx, rng), b = random_poly(ctx, rng);
    RootOfUnity eta(i % 13, 13);
    long w = (i % 3 == 0) ? 2 : 1;
    CHECK(substitute(a * b, eta, w) == substitute(a, eta, w) * substitute(b, eta, w));
    CHECK(substitute(a + b, eta, w) == substitute(a, eta, w) + substitute(b, eta, w));
    CHECK(sharp(substitute(a, eta, w)) == substitute(sharp(a), eta, w));
  }
  CHECK_THROWS_AS(substitute(tre, RootOfUnity(1, 7), 1), Error); // ConductorMismatch
}

TEST_CASE("division, gcd and units") {
  FieldContext ctx = FieldContext::make(52);
  LaurentPoly t = LaurentPoly::variable(ctx);
  LaurentPoly one = LaurentPoly::one(ctx);

  auto [q, r] = divmod_field(t * t - one, t - one);
  CHECK(q == t + one);
  CHECK(r.is_zero());

  auto [q2, r2] = divmod_field(t + one - LaurentPoly::t_power(ctx, -1, FieldElement::one(ctx)),
                               t + one - LaurentPoly::t_power(ctx, -1, FieldElement::one(ctx)));
  CHECK(q2 == one);
  CHECK(r2.is_zero());

  CHECK_THROWS_AS(divmod_field(t, LaurentPoly::zero(ctx)), Error);

  // gcd(Delta_1, Delta_2) = prod_{i not in {1,2}} R_{zeta13^i} up to units
  LaurentPoly d1 = LaurentPoly::one(ctx), d2 = LaurentPoly::one(ctx), expect = LaurentPoly::one(ctx);
  for (long i = 1; i <= 6; ++i) {
    LaurentPoly b = basic_poly(ctx, Mode::Real, RootOfUnity(i, 13));
    if (i != 1) d1 *= b;
    if (i != 2) d2 *= b;
    if (i != 1 && i != 2) expect *= b;
  }
  CHECK(associates(poly_gcd(d1, d2), expect));

  std::mt19937_64 rng(29);
  for (int i = 0; i < 20; ++i) {
    LaurentPoly a = random_poly(ctx, rng), b = random_poly(ctx, rng);
    if (b.is_zero()) continue;
    auto [qq, rr] = divmod_field(a, b);
    CHECK(a == qq * b + rr);
    if (!rr.is_zero()) CHECK(rr.span() < b.span());
    ExtGcd eg = ext_gcd(a, b);
    CHECK(eg.s * a + eg.t * b == eg.g);
  }
}

TEST_CASE("mod_window is a class invariant") {
  FieldContext ctx = FieldContext::make(12);
  LaurentPoly t = LaurentPoly::variable(ctx);
  LaurentPoly den = t - LaurentPoly::constant(ctx, imaginary_unit(ctx));
  // 2it and -2 represent the same class mod (t - i)
  LaurentPoly x = LaurentPoly::t_power(ctx, 1, imaginary_unit(ctx) * mpq_class(2));
  LaurentPoly y = LaurentPoly::constant(ctx, FieldElement::from_rational(ctx, -2));
  CHECK(mod_window(x, den) == mod_window(y, den));
  std::mt19937_64 rng(31);
  for (int i = 0; i < 20; ++i) {
    LaurentPoly a = random_poly(ctx, rng), w = random_poly(ctx, rng);
    LaurentPoly b = basic_poly(ctx, Mode::Real, RootOfUnity(1, 6));
    CHECK(mod_window(a + w * b, b) == mod_window(a, b));
  }
}

TEST_CASE("symmetric values on the circle are conj-fixed") {
  FieldContext ctx = FieldContext::make(24);
  std::mt19937_64 rng(37);
  for (int i = 0; i < 20; ++i) {
    LaurentPoly a = random_poly(ctx, rng);
    LaurentPoly s = a + sharp(a); // symmetric by construction
    CHECK(is_symmetric(s));
    CHECK(eval_at_root(s, RootOfUnity(i % 24, 24)).is_conj_fixed());
  }
}

TEST_CASE("weak symmetry detection") {
  FieldContext ctx = FieldContext::make(12);
  LaurentPoly t = LaurentPoly::variable(ctx);
  LaurentPoly one = LaurentPoly::one(ctx);
  LaurentPoly p = (t - one) * (t + one); // p# = t^{-2} p
  auto u = weakly_symmetric_unit(p);
  REQUIRE(u.has_value());
  CHECK(*u * p == sharp(p));
  CHECK_FALSE(weakly_symmetric_unit(t + LaurentPoly::constant(ctx, imaginary_unit(ctx)) * t * t +
                                    one)
                  .has_value());
}
