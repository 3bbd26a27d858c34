#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "linkform/signatures.hpp"

using namespace linkform;

namespace {

LinkingForm trefoil_form(const FieldContext& ctx) {
  LinkingForm f;
  f.mode = Mode::Real;
  f.ctx = ctx;
  f.summands.push_back(
      CyclicPairing{basic_poly(ctx, Mode::Real, RootOfUnity(1, 6)), LaurentPoly::one(ctx), Mode::Real});
  return f;
}

// a random non-singular form together with its context
LinkingForm random_nonsingular_form(std::mt19937_64& rng, const FieldContext& ctx) {
  std::uniform_int_distribution<long> pick(0, 100);
  Mode mode = (pick(rng) % 2 == 0) ? Mode::Real : Mode::Complex;
  std::vector<RootOfUnity> circle = {RootOfUnity(1, 8), RootOfUnity(1, 6), RootOfUnity(1, 4),
                                     RootOfUnity(1, 3), RootOfUnity(3, 8), RootOfUnity(1, 2)};
  LinkingForm f;
  f.mode = mode;
  f.ctx = ctx;
  long nsum = 1 + pick(rng) % 3;
  for (long s = 0; s < nsum; ++s) {
    if (pick(rng) % 5 == 0) {
      long a = 1 + pick(rng) % 2;
      FieldElement xi = FieldElement::from_rational(ctx, mpq_class(1, 2));
      if (mode == Mode::Complex && pick(rng) % 2 == 0) xi = imaginary_unit(ctx) * mpq_class(1, 2);
      f.summands.push_back(make_basic(ctx, mode, BasicForm::Fw(a, a, 0, xi)));
      f.roots.add_off(xi);
      continue;
    }
    RootOfUnity xi = circle[pick(rng) % circle.size()];
    if (mode == Mode::Real && !xi.upper_half() && !xi.is_real()) xi = xi.conj();
    long n = 1 + pick(rng) % 3;
    if (mode == Mode::Real && xi.is_real() && n % 2 != 0) n += 1;
    int eps = (pick(rng) % 2 == 0) ? +1 : -1;
    CyclicPairing c = make_basic(ctx, mode, BasicForm::E(n, 0, eps, xi));
    if (pick(rng) % 2 == 0) {
      // twist the numerator by a norm u u#
      FieldElement cu = FieldElement::from_rational(ctx, 1 + pick(rng) % 3);
      LaurentPoly u = LaurentPoly::t_power(ctx, pick(rng) % 3 - 1, cu);
      c.h = mod_window(c.h * u * sharp(u), c.f);
    }
    f.summands.push_back(c);
    f.roots.add_circle(xi);
  }
  return f;
}

LinkingForm random_metabolic_generator(std::mt19937_64& rng, const FieldContext& ctx, Mode mode) {
  std::uniform_int_distribution<long> pick(0, 100);
  LinkingForm f;
  f.mode = mode;
  f.ctx = ctx;
  if (pick(rng) % 2 == 0) {
    RootOfUnity xi(1, pick(rng) % 2 == 0 ? 6 : 8);
    f.summands.push_back(
        make_basic(ctx, mode, BasicForm::E(2 * (1 + pick(rng) % 2), 0, pick(rng) % 2 ? 1 : -1, xi)));
    f.roots.add_circle(xi);
  } else {
    FieldElement xi = FieldElement::from_rational(ctx, mpq_class(1, 2));
    long n = 1 + pick(rng) % 2;
    f.summands.push_back(make_basic(ctx, mode, BasicForm::Fw(n, n, 0, xi)));
    f.roots.add_off(xi);
  }
  return f;
}

} // namespace

TEST_CASE("jump tables of pinned decompositions") {
  Decomposition real_tre;
  real_tre.mode = Mode::Real;
  real_tre.add(BasicForm::E(1, 0, +1, RootOfUnity(1, 6)));
  JumpTable t = jumps(real_tre);
  CHECK(t.jump_at(RootOfUnity(1, 6)) == 1);
  CHECK(t.jump_at(RootOfUnity(5, 6)) == -1);
  CHECK(t.jump_at(RootOfUnity(1, 4)) == 0);

  Decomposition cplx;
  cplx.mode = Mode::Complex;
  cplx.add(BasicForm::E(1, 0, +1, RootOfUnity(1, 8)));
  CHECK(jumps(cplx).jump_at(RootOfUnity(1, 8)) == -1); // complex-mode minus sign

  Decomposition even;
  even.mode = Mode::Complex;
  even.add(BasicForm::E(2, 0, +1, RootOfUnity(1, 8)));
  JumpTable te = jumps(even);
  CHECK(te.all_zero());
  CHECK(te.local_at(RootOfUnity(1, 8)) == -1);

  Decomposition sing;
  sing.mode = Mode::Complex;
  sing.add(BasicForm::E(2, 1, +1, RootOfUnity(1, 8)));
  CHECK_THROWS_AS(jumps(sing), Error); // SingularForm
}

TEST_CASE("signature function of the trefoil by the defining sum") {
  FieldContext ctx = FieldContext::make(12);
  Decomposition d = classify(trefoil_form(ctx));
  CHECK(signature_function(d, RootOfUnity(1, 2)) == 2);
  CHECK(signature_function(d, RootOfUnity(1, 24)) == 0);
  CHECK(averaged_signature(d, RootOfUnity(1, 6)) == 1);
  CHECK(averaged_signature(d, RootOfUnity(0, 1)) == 0);

  Decomposition empty;
  empty.mode = Mode::Real;
  for (long j = 0; j < 12; ++j) CHECK(signature_function(empty, RootOfUnity(j, 12)) == 0);

  Decomposition even;
  even.mode = Mode::Complex;
  even.add(BasicForm::E(2, 0, +1, RootOfUnity(1, 8)));
  for (long j = 0; j < 8; ++j) CHECK(averaged_signature(even, RootOfUnity(j, 8)) == 0);
}

TEST_CASE("real signature function is conjugation symmetric") {
  FieldContext ctx = FieldContext::make(24);
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 20; ++trial) {
    LinkingForm f = random_nonsingular_form(rng, ctx);
    if (f.mode != Mode::Real) continue;
    Decomposition d = classify(f);
    for (long j = 0; j < 24; ++j) {
      RootOfUnity w(j, 24);
      CHECK(signature_function(d, w) == signature_function(d, w.conj()));
    }
  }
}

TEST_CASE("signature function is constant between jump points") {
  Decomposition d;
  d.mode = Mode::Complex;
  d.add(BasicForm::E(1, 0, +1, RootOfUnity(1, 6)));
  d.add(BasicForm::E(3, 0, -1, RootOfUnity(1, 3)));
  long prev = signature_function(d, RootOfUnity(1, 5));
  CHECK(prev == signature_function(d, RootOfUnity(2, 7))); // same arc (1/6, 1/3)
}

TEST_CASE("witt reduction on pinned examples") {
  FieldContext ctx = FieldContext::make(12);
  Decomposition f_off;
  f_off.mode = Mode::Complex;
  f_off.add(BasicForm::Fw(3, 3, 0, FieldElement::from_rational(ctx, mpq_class(1, 2))));
  CHECK(is_metabolic(f_off));

  Decomposition odd;
  odd.mode = Mode::Complex;
  odd.add(BasicForm::E(3, 0, +1, RootOfUnity(1, 8)));
  CHECK_FALSE(is_metabolic(odd));

  // e(3,0,eps) is Witt equivalent to e(1,0,eps)
  Decomposition one;
  one.mode = Mode::Complex;
  one.add(BasicForm::E(1, 0, +1, RootOfUnity(1, 8)));
  CHECK(witt_equivalent(odd, one));
}

TEST_CASE("representability over the complex Laurent ring") {
  Decomposition plus;
  plus.mode = Mode::Complex;
  plus.add(BasicForm::E(1, 0, +1, RootOfUnity(1, 8)));
  CHECK_FALSE(is_representable_complex(plus));
  Decomposition pair = plus;
  pair.add(BasicForm::E(1, 0, -1, RootOfUnity(1, 8)));
  CHECK(is_representable_complex(pair));
  Decomposition empty;
  empty.mode = Mode::Complex;
  CHECK(is_representable_complex(empty));
}

TEST_CASE("jumps and averaged signatures are additive and flip under negation") {
  FieldContext ctx = FieldContext::make(24);
  std::mt19937_64 rng(67);
  for (int trial = 0; trial < 15; ++trial) {
    LinkingForm f1 = random_nonsingular_form(rng, ctx);
    LinkingForm f2 = random_nonsingular_form(rng, ctx);
    f2.mode = f1.mode;
    for (auto& s : f2.summands) s.mode = f1.mode;
    if (f1.mode == Mode::Real) {
      // regenerate until both real (make_basic output already real)
      bool ok = true;
      for (const auto& s : f2.summands)
        ok = ok && s.f.conj_invariant_coeffs() && s.h.conj_invariant_coeffs();
      if (!ok) continue;
    }
    Decomposition d1 = classify(f1), d2 = classify(f2);
    Decomposition dsum = classify(direct_sum(f1, f2));
    JumpTable expect = jumps(d1);
    JumpTable other = jumps(d2);
    for (const auto& [xi, v] : other.jumps) expect.jumps[xi] += v;
    for (const auto& [xi, v] : other.local) expect.local[xi] += v;
    JumpTable got = jumps(dsum);
    for (long j = 0; j < 24; ++j) {
      RootOfUnity w(j, 24);
      CHECK(got.jump_at(w) == expect.jump_at(w));
      CHECK(averaged_signature(got, w) ==
            averaged_signature(jumps(d1), w) + averaged_signature(jumps(d2), w));
    }
    JumpTable neg = jumps(classify(negate(f1)));
    for (long j = 0; j < 24; ++j) CHECK(neg.jump_at(RootOfUnity(j, 24)) == -jumps(d1).jump_at(RootOfUnity(j, 24)));
  }
}

TEST_CASE("averaged signature is a Witt invariant") {
  FieldContext ctx = FieldContext::make(24);
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 15; ++trial) {
    LinkingForm f = random_nonsingular_form(rng, ctx);
    LinkingForm m = random_metabolic_generator(rng, ctx, f.mode);
    Decomposition d = classify(f);
    Decomposition dm = classify(direct_sum(f, m));
    CHECK(is_metabolic(classify(m)));
    for (long j = 0; j < 24; ++j) {
      RootOfUnity w(j, 24);
      CHECK(averaged_signature(d, w) == averaged_signature(dm, w));
    }
  }
}

TEST_CASE("random representable forms have zero total jump") {
  // random Hermitian matrices with factorable determinant: congruence
  // images P D P^{#T} of diagonal basic-polynomial fixtures
  FieldContext ctx = FieldContext::make(12);
  std::mt19937_64 rng(73);
  std::uniform_int_distribution<long> coef(-2, 2), shift(-1, 1);
  std::vector<LaurentPoly> sym = {
      basic_poly(ctx, Mode::Real, RootOfUnity(1, 6)),
      basic_poly(ctx, Mode::Real, RootOfUnity(1, 4)),
      basic_poly(ctx, Mode::Real, RootOfUnity(1, 3)),
  };
  for (int trial = 0; trial < 10; ++trial) {
    LaurentMatrix A(ctx, 2, 2);
    A.at(0, 0) = sym[static_cast<std::size_t>(trial) % sym.size()] * mpq_class(trial % 3 == 0 ? -1 : 1);
    A.at(1, 1) = sym[static_cast<std::size_t>(trial + 1) % sym.size()] *
                 sym[static_cast<std::size_t>(trial + 2) % sym.size()];
    LaurentMatrix P = LaurentMatrix::identity(ctx, 2);
    LaurentPoly mix(ctx);
    mix.add_term(shift(rng), FieldElement::from_rational(ctx, coef(rng)) +
                                 imaginary_unit(ctx) * mpq_class(coef(rng)));
    P.at(1, 0) = mix;
    LaurentMatrix M = P * A * P.sharp_transpose();
    REQUIRE(hermitian_check(M));
    Decomposition d = classify(complexify(from_matrix(M, Mode::Complex)));
    CHECK(total_jump(jumps(d)) == 0);
    CHECK(is_representable_complex(d));
  }
}

TEST_CASE("crosscheck_matrix on the trefoil and sanity cases") {
  FieldContext ctx = FieldContext::make(12);
  LaurentMatrix A(ctx, 1, 1);
  A.at(0, 0) = basic_poly(ctx, Mode::Real, RootOfUnity(1, 6));
  Decomposition d = classify(trefoil_form(ctx));
  std::vector<RootOfUnity> grid;
  for (long j = 0; j < 24; ++j) grid.push_back(RootOfUnity(j, 24));
  CHECK(crosscheck_matrix(d, A, grid).ok);

  Decomposition empty;
  empty.mode = Mode::Complex;
  CHECK(crosscheck_matrix(empty, LaurentMatrix::identity(ctx, 2), grid).ok);

  LaurentMatrix nA(ctx, 1, 1);
  nA.at(0, 0) = -A.at(0, 0);
  CHECK_FALSE(crosscheck_matrix(d, nA, grid).ok);
}
