#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "linkform/forms.hpp"

using namespace linkform;

namespace {

LaurentPoly random_entry(const FieldContext& ctx, std::mt19937_64& rng) {
  std::uniform_int_distribution<long> exp(-2, 2), coef(-2, 2), nterms(0, 2);
  LaurentPoly p(ctx);
  long n = nterms(rng);
  for (long i = 0; i <= n; ++i) p.add_term(exp(rng), FieldElement::from_rational(ctx, coef(rng)));
  return p;
}

LaurentMatrix random_matrix(const FieldContext& ctx, long rows, long cols, std::mt19937_64& rng) {
  LaurentMatrix m(ctx, rows, cols);
  for (long i = 0; i < rows; ++i)
    for (long j = 0; j < cols; ++j) m.at(i, j) = random_entry(ctx, rng);
  return m;
}

void check_snf_contract(const LaurentMatrix& a) {
  SNFResult s = smith_normal_form(a);
  CHECK(s.U * s.D * s.V == a);
  CHECK(s.U * s.Uinv == LaurentMatrix::identity(a.ctx(), a.rows()));
  CHECK(s.Vinv * s.V == LaurentMatrix::identity(a.ctx(), a.cols()));
  auto diag = s.diagonal();
  bool seen_zero = false;
  for (std::size_t i = 0; i + 1 < diag.size(); ++i) {
    if (diag[i].is_zero()) seen_zero = true;
    CHECK_FALSE((seen_zero && !diag[i + 1].is_zero())); // zeros come last
    if (!diag[i].is_zero() && !diag[i + 1].is_zero()) CHECK(divides(diag[i], diag[i + 1]));
  }
  CHECK(is_unit(det(s.U)));
  CHECK(is_unit(det(s.V)));
}

} // namespace

TEST_CASE("smith normal form pinned examples") {
  FieldContext ctx = FieldContext::make(12);
  LaurentMatrix I2 = LaurentMatrix::identity(ctx, 2);
  SNFResult s = smith_normal_form(I2);
  CHECK(s.D == I2);

  // (t - xi) A for invertible A has SNF diag(t - xi, t - xi)
  LaurentPoly t = LaurentPoly::variable(ctx);
  FieldElement i = imaginary_unit(ctx);
  auto C = [&](FieldElement x) { return LaurentPoly::constant(ctx, x); };
  LaurentPoly ti = LaurentPoly::t_power(ctx, -1, FieldElement::one(ctx));
  LaurentMatrix A(ctx, 2, 2);
  A.at(0, 0) = ti * mpq_class(2) + C(i * mpq_class(2));
  A.at(0, 1) = ti * (-(i * mpq_class(2))) + LaurentPoly::one(ctx);
  A.at(1, 0) = ti * i - LaurentPoly::one(ctx) - LaurentPoly::one(ctx);
  A.at(1, 1) = ti + C(i);
  LaurentMatrix B = (t - C(i)) * A;
  SNFResult sb = smith_normal_form(B);
  LaurentPoly tmi = t - C(i);
  CHECK(associates(sb.D.at(0, 0), tmi));
  CHECK(associates(sb.D.at(1, 1), tmi));

  // random 3x3 with unit determinant reduces to the identity
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    LaurentMatrix M = LaurentMatrix::identity(ctx, 3);
    for (int step = 0; step < 6; ++step) {
      long r1 = static_cast<long>(rng() % 3), r2 = static_cast<long>(rng() % 3);
      if (r1 == r2) continue;
      LaurentPoly q = random_entry(ctx, rng);
      for (long c = 0; c < 3; ++c) M.at(r1, c) += q * M.at(r2, c);
    }
    SNFResult sm = smith_normal_form(M);
    CHECK(sm.D == LaurentMatrix::identity(ctx, 3));
    CHECK(is_unit(det(M)));
  }
}

TEST_CASE("smith normal form contract on random matrices") {
  FieldContext ctx = FieldContext::make(4);
  std::mt19937_64 rng(43);
  std::uniform_int_distribution<long> dim(1, 4);
  for (int trial = 0; trial < 40; ++trial)
    check_snf_contract(random_matrix(ctx, dim(rng), dim(rng), rng));
}

TEST_CASE("hermitian_check") {
  FieldContext ctx = FieldContext::make(12);
  CHECK(hermitian_check(LaurentMatrix::identity(ctx, 2)));
  LaurentMatrix t1(ctx, 1, 1);
  t1.at(0, 0) = LaurentPoly::variable(ctx);
  CHECK_FALSE(hermitian_check(t1));
  t1.at(0, 0) = basic_poly(ctx, Mode::Real, RootOfUnity(1, 6));
  CHECK(hermitian_check(t1));
}

TEST_CASE("const_signature pinned examples") {
  FieldContext ctx = FieldContext::make(12);
  FieldMatrix d(ctx, 2);
  d.at(0, 0) = FieldElement::one(ctx);
  d.at(1, 1) = -FieldElement::one(ctx);
  CHECK(const_signature(d) == Inertia{1, 1, 0});

  FieldMatrix h(ctx, 2);
  h.at(0, 1) = FieldElement::one(ctx);
  h.at(1, 0) = FieldElement::one(ctx);
  CHECK(const_signature(h) == Inertia{1, 1, 0});

  // purely imaginary off-diagonal needs the e_k + i e_l fallback
  FieldMatrix im(ctx, 2);
  im.at(0, 1) = imaginary_unit(ctx);
  im.at(1, 0) = -imaginary_unit(ctx);
  CHECK(const_signature(im) == Inertia{1, 1, 0});

  LaurentMatrix tre(ctx, 1, 1);
  tre.at(0, 0) = basic_poly(ctx, Mode::Real, RootOfUnity(1, 6));
  CHECK(signature_at(tre, RootOfUnity(1, 2)) == Inertia{0, 1, 0}); // value -3

  FieldMatrix nh(ctx, 2);
  nh.at(0, 1) = FieldElement::one(ctx);
  CHECK_THROWS_AS(const_signature(nh), Error);
}

TEST_CASE("const_signature is a congruence invariant") {
  FieldContext ctx = FieldContext::make(12);
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 15; ++trial) {
    long n = 3;
    FieldMatrix h(ctx, n);
    std::uniform_int_distribution<long> coef(-2, 2);
    for (long i = 0; i < n; ++i) {
      h.at(i, i) = FieldElement::from_rational(ctx, coef(rng));
      for (long j = i + 1; j < n; ++j) {
        FieldElement v = FieldElement::from_rational(ctx, coef(rng)) +
                         imaginary_unit(ctx) * mpq_class(coef(rng));
        h.at(i, j) = v;
        h.at(j, i) = v.conj();
      }
    }
    Inertia base = const_signature(h);
    // congruence by a random invertible triangular matrix
    FieldMatrix p(ctx, n);
    for (long i = 0; i < n; ++i) {
      p.at(i, i) = FieldElement::one(ctx);
      for (long j = 0; j < i; ++j) p.at(i, j) = FieldElement::from_rational(ctx, coef(rng));
    }
    FieldMatrix phps(ctx, n);
    for (long i = 0; i < n; ++i)
      for (long j = 0; j < n; ++j) {
        FieldElement acc = FieldElement::zero(ctx);
        for (long r = 0; r < n; ++r)
          for (long c = 0; c < n; ++c) acc += p.at(i, r) * h.at(r, c) * p.at(j, c).conj();
        phps.at(i, j) = acc;
      }
    CHECK(const_signature(phps) == base);
  }
}

TEST_CASE("one-sided signatures at exact samples") {
  FieldContext ctx = FieldContext::make(12);
  LaurentMatrix tre(ctx, 1, 1);
  tre.at(0, 0) = basic_poly(ctx, Mode::Real, RootOfUnity(1, 6));
  CHECK(signature_one_sided(tre, RootOfUnity(1, 6), +1) == Inertia{0, 1, 0});
  CHECK(signature_one_sided(tre, RootOfUnity(1, 6), -1) == Inertia{1, 0, 0});

  LaurentMatrix I3 = LaurentMatrix::identity(ctx, 3);
  CHECK(signature_one_sided(I3, RootOfUnity(1, 7), +1) == Inertia{3, 0, 0});

  LaurentMatrix z(ctx, 1, 1);
  CHECK_THROWS_AS(signature_one_sided(z, RootOfUnity(0, 1), +1), Error); // SingularEverywhere

  // locally constant: two samples between the same det zeros agree
  CHECK(signature_at(tre, RootOfUnity(1, 4)) == signature_at(tre, RootOfUnity(1, 3)));
}

TEST_CASE("jump identity for diagonal Hermitian matrices") {
  // lim+ sign - lim- sign = 2 delta sigma (complex-mode conventions)
  FieldContext ctx = FieldContext::make(12);
  std::vector<LaurentPoly> entries = {
      basic_poly(ctx, Mode::Real, RootOfUnity(1, 6)),
      basic_poly(ctx, Mode::Real, RootOfUnity(1, 4)) * basic_poly(ctx, Mode::Real, RootOfUnity(1, 6)),
      basic_poly(ctx, Mode::Real, RootOfUnity(1, 6)).pow(2),
  };
  for (const auto& e : entries) {
    LaurentMatrix m(ctx, 1, 1);
    m.at(0, 0) = e;
    LinkingForm f = from_matrix(m);
    Decomposition d = classify(complexify(f));
    for (const auto& p : d.parts) {
      if (p.kind != BasicForm::Kind::E || p.n % 2 == 0) continue;
      long lhs = signature_one_sided(m, p.xi, +1).signature() -
                 signature_one_sided(m, p.xi, -1).signature();
      long dsig = 0;
      for (const auto& q : d.parts)
        if (q.kind == BasicForm::Kind::E && q.n % 2 != 0 && q.xi == p.xi) dsig -= q.eps;
      CHECK(lhs == 2 * dsig);
    }
  }
}
