#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "linkform/cyclotomic.hpp"

using namespace linkform;

namespace {

// independent sign oracle: straight 200-bit floating evaluation of the
// real part, no interval machinery
int float_sign_oracle(const FieldElement& x, mpfr_prec_t prec = 200) {
  mpfr_t acc, term, angle, pi;
  mpfr_init2(acc, prec);
  mpfr_init2(term, prec);
  mpfr_init2(angle, prec);
  mpfr_init2(pi, prec);
  mpfr_set_zero(acc, 1);
  mpfr_const_pi(pi, MPFR_RNDN);
  long n = x.ctx().N();
  for (long j = 0; j < x.ctx().degree(); ++j) {
    const mpq_class& q = x.coeffs()[static_cast<std::size_t>(j)];
    if (q == 0) continue;
    mpq_class frac(2 * j, n);
    frac.canonicalize();
    mpfr_mul_q(angle, pi, frac.get_mpq_t(), MPFR_RNDN);
    mpfr_cos(term, angle, MPFR_RNDN);
    mpfr_mul_q(term, term, q.get_mpq_t(), MPFR_RNDN);
    mpfr_add(acc, acc, term, MPFR_RNDN);
  }
  int s = mpfr_sgn(acc);
  mpfr_clears(acc, term, angle, pi, nullptr);
  return s;
}

FieldElement random_element(const FieldContext& ctx, std::mt19937_64& rng) {
  std::uniform_int_distribution<long> num(-4, 4), den(1, 3);
  std::vector<mpq_class> c(static_cast<std::size_t>(ctx.degree()));
  for (auto& q : c) {
    q = mpq_class(num(rng), den(rng));
    q.canonicalize();
  }
  return FieldElement(ctx, std::move(c));
}

} // namespace

TEST_CASE("root of unity canonical form and arithmetic") {
  RootOfUnity r(14, 12);
  CHECK(r.num == 1);
  CHECK(r.den == 6);
  CHECK(RootOfUnity(-1, 6) == RootOfUnity(5, 6));
  CHECK(RootOfUnity(0, 7) == RootOfUnity(0, 1));
  CHECK((RootOfUnity(1, 6) * RootOfUnity(1, 4)) == RootOfUnity(5, 12));
  CHECK(RootOfUnity(3, 7).pow(3) == RootOfUnity(2, 7));
  CHECK(RootOfUnity(1, 6).inverse() == RootOfUnity(5, 6));
  CHECK(RootOfUnity(1, 6).upper_half());
  CHECK_FALSE(RootOfUnity(5, 6).upper_half());
  CHECK(RootOfUnity(1, 2).is_real());
}

TEST_CASE("context construction enforces 4 | N") {
  CHECK_THROWS_AS(FieldContext::make(6), Error);
  FieldContext ctx = FieldContext::make(12);
  CHECK(ctx.degree() == 4);
}

TEST_CASE("embed_root examples") {
  FieldContext ctx = FieldContext::make(12);
  CHECK(embed_root(ctx, RootOfUnity(1, 1)) == FieldElement::one(ctx));
  // i = zeta_12^3
  FieldElement z = embed_root(ctx, RootOfUnity(1, 12));
  CHECK(embed_root(ctx, RootOfUnity(1, 4)) == z.pow(3));
  CHECK(embed_root(ctx, RootOfUnity(1, 6)) == z.pow(2));
  CHECK_THROWS_AS(embed_root(ctx, RootOfUnity(1, 5)), Error); // ConductorMismatch
}

TEST_CASE("embed_root is multiplicative") {
  FieldContext ctx = FieldContext::make(24);
  for (long a = 0; a < 24; ++a)
    for (long b = 0; b < 24; ++b) {
      RootOfUnity ra(a, 24), rb(b, 24);
      CHECK(embed_root(ctx, ra * rb) == embed_root(ctx, ra) * embed_root(ctx, rb));
    }
}

TEST_CASE("real_sign on pinned values") {
  FieldContext ctx = FieldContext::make(12);
  CHECK(real_sign(FieldElement::zero(ctx)) == 0);
  FieldElement z = embed_root(ctx, RootOfUnity(1, 12));
  CHECK(real_sign(z.pow(2) + z.pow(-2)) == 1); // 2 cos(pi/3) = 1
  FieldContext c13 = FieldContext::make(52);
  FieldElement w = embed_root(c13, RootOfUnity(1, 13));
  CHECK(real_sign(w + w.conj() - FieldElement::from_rational(c13, 2)) == -1);
  CHECK_THROWS_AS(real_sign(z), Error); // NotReal
}

TEST_CASE("imag_sign on pinned values") {
  FieldContext ctx = FieldContext::make(12);
  CHECK(imag_sign(FieldElement::one(ctx)) == 0);
  CHECK(imag_sign(-imaginary_unit(ctx)) == -1);
  CHECK(imag_sign(embed_root(ctx, RootOfUnity(1, 12))) == 1);
}

TEST_CASE("field axioms on random elements") {
  FieldContext ctx = FieldContext::make(20);
  std::mt19937_64 rng(7);
  for (int i = 0; i < 40; ++i) {
    FieldElement a = random_element(ctx, rng);
    FieldElement b = random_element(ctx, rng);
    FieldElement c = random_element(ctx, rng);
    CHECK((a + b) * c == a * c + b * c);
    if (!a.is_zero()) CHECK(a * a.inverse() == FieldElement::one(ctx));
    CHECK(a.conj().conj() == a);
    CHECK((a * b).conj() == a.conj() * b.conj());
    CHECK(real_sign(a * a.conj()) >= 0);
  }
}

TEST_CASE("real_sign agrees with 200-bit floating evaluation") {
  FieldContext ctx = FieldContext::make(28);
  std::mt19937_64 rng(11);
  int checked = 0;
  for (int i = 0; i < 1200 && checked < 1000; ++i) {
    FieldElement a = random_element(ctx, rng);
    FieldElement x = a + a.conj(); // real by construction
    if (x.is_zero()) continue;
    int oracle = float_sign_oracle(x);
    REQUIRE(oracle != 0); // 200 bits is far beyond these tiny values
    CHECK(real_sign(x) == oracle);
    ++checked;
  }
  CHECK(checked == 1000);
}

TEST_CASE("extension to a larger conductor is a ring embedding") {
  FieldContext small = FieldContext::make(12), big = FieldContext::make(60);
  std::mt19937_64 rng(3);
  FieldElement a = random_element(small, rng), b = random_element(small, rng);
  CHECK((a * b).extend(big) == a.extend(big) * b.extend(big));
  CHECK((a + b).extend(big) == a.extend(big) + b.extend(big));
  CHECK(embed_root(small, RootOfUnity(1, 6)).extend(big) == embed_root(big, RootOfUnity(1, 6)));
}
