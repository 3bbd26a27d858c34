// Torus-knot chain complexes, metabelian representations, the chain-level
// Blanchfield pairing, satellite assembly and the sliceness-obstruction
// sweep for the Hedden-Kirk-Livingston knot.
//
// Only the T(2, 2k+1) family is built: the 0-surgery group is
//   G0 = < a, b | a^{2k+1} b^2, (a^k b)^{2k+1} a^{2k+1} (a^k b)^{2k+1} >
// and the cell structure of the universal cover, the Fox-derivative
// boundary maps and the duality chain map Phi are written down in closed
// form below.
#pragma once

#include <functional>
#include <thread>

#include "groupring.hpp"
#include "signatures.hpp"

namespace linkform {

// ---------------------------------------------------------------------
// Symbolic chain data over Z[G0].

struct ChainComplexData {
  long k = 0;
  GroupWord mu;                 // (a^k b)^{-1}
  GroupRingElem relator_torus;  // a^{2k+1} b^2
  GroupRingElem relator_surgery;
  GroupRingElem d1[2];          // boundary C_1 -> C_0, column (a-1; b-1)
  GroupRingElem d2[2][2];       // boundary C_2 -> C_1
  GroupRingElem d3[2];          // boundary C_3 -> C_2, row
  GroupRingElem phi[2][2];      // duality chain map C^2 -> C_1
};

inline ChainComplexData build_complex(long k) {
  if (k < 1) fail_pre("BadTorusParameter", "build_complex needs k >= 1");
  ChainComplexData c;
  c.k = k;
  GroupWord a = GroupWord::gen(Gen::a);
  GroupWord b = GroupWord::gen(Gen::b);
  GroupWord akb = GroupWord::gen(Gen::a, k) * b;
  GroupWord r = GroupWord::gen(Gen::a, 2 * k + 1) * GroupWord::gen(Gen::b, 2);
  GroupWord lambda0 = akb.pow(2 * k + 1) * GroupWord::gen(Gen::a, 2 * k + 1) * akb.pow(2 * k + 1);
  c.mu = akb.inverse();
  c.relator_torus = GroupRingElem::of(r);
  c.relator_surgery = GroupRingElem::of(lambda0);

  c.d1[0] = GroupRingElem::of(a) - GroupRingElem::one();
  c.d1[1] = GroupRingElem::of(b) - GroupRingElem::one();

  c.d2[0][0] = fox_derivative(r, Gen::a);
  c.d2[0][1] = fox_derivative(r, Gen::b);
  c.d2[1][0] = fox_derivative(lambda0, Gen::a);
  c.d2[1][1] = fox_derivative(lambda0, Gen::b);

  c.d3[0] = GroupRingElem::of(c.mu.pow(-2 * k - 1)) -
            GroupRingElem::of(c.mu.pow(-2 * k) * GroupWord::gen(Gen::a, k));
  c.d3[1] = GroupRingElem::of(c.mu) - GroupRingElem::one();

  // Phi, the chain map representing Poincare duality (eq. for C^2 -> C_1)
  GroupWord mu_inv_pow = c.mu.pow(-2 * k) * GroupWord::gen(Gen::a, k);
  GroupRingElem mu_p = GroupRingElem::of(c.mu.pow(2 * k + 1));
  GroupRingElem pre = GroupRingElem::of(GroupWord::gen(Gen::a, -k) * c.mu.pow(2 * k));
  for (int g = 0; g < 2; ++g) {
    Gen gen = (g == 0) ? Gen::a : Gen::b;
    c.phi[0][g] = mu_p * fox_derivative(GroupRingElem::of(c.mu.pow(-2 * k - 1)), gen) -
                  pre * fox_derivative(GroupRingElem::of(mu_inv_pow), gen);
    c.phi[1][g] = GroupRingElem::of(c.mu.inverse()) *
                  fox_derivative(GroupRingElem::of(c.mu), gen);
  }
  return c;
}

// The free-group identity behind the surgery presentation:
//   mu L mu^{-1} L^{-1} = [mu^{-2k} a^k] r [mu^{-2k} a^k]^{-1} mu^{-2k-1} r^{-1} mu^{2k+1}
inline bool presentation_identity_holds(long k) {
  GroupWord a = GroupWord::gen(Gen::a);
  GroupWord b = GroupWord::gen(Gen::b);
  GroupWord akb = GroupWord::gen(Gen::a, k) * b;
  GroupWord mu = akb.inverse();
  GroupWord r = GroupWord::gen(Gen::a, 2 * k + 1) * GroupWord::gen(Gen::b, 2);
  GroupWord L = akb.pow(2 * k + 1) * GroupWord::gen(Gen::a, 2 * k + 1) * akb.pow(2 * k + 1);
  GroupWord lhs = mu * L * mu.inverse() * L.inverse();
  GroupWord w = mu.pow(-2 * k) * a.pow(k);
  GroupWord rhs = w * r * w.inverse() * mu.pow(-2 * k - 1) * r.inverse() * mu.pow(2 * k + 1);
  return lhs == rhs;
}

// ---------------------------------------------------------------------
// Representations of G0 into GL_d(C[t^{+-1}]).

class Rep {
public:
  Rep(FieldContext ctx, LaurentMatrix img_a, LaurentMatrix img_b)
      : ctx_(std::move(ctx)), a_(std::move(img_a)), b_(std::move(img_b)) {
    require(a_.rows() == a_.cols() && b_.rows() == b_.cols() && a_.rows() == b_.rows(),
            "representation images must be square of equal size");
    require(unitary(a_) && unitary(b_), "representation images must be unitary");
  }

  long dim() const { return a_.rows(); }
  const FieldContext& ctx() const { return ctx_; }

  LaurentMatrix word(const GroupWord& w) const {
    auto it = memo_.find(w);
    if (it != memo_.end()) return it->second;
    LaurentMatrix m = LaurentMatrix::identity(ctx_, dim());
    for (const auto& [g, e] : w.syl) {
      const LaurentMatrix& base = (g == Gen::a) ? a_ : b_;
      LaurentMatrix p = mat_pow(e >= 0 ? base : base.sharp_transpose(), std::labs(e));
      m = m * p;
    }
    memo_.emplace(w, m);
    return m;
  }

  LaurentMatrix operator()(const GroupRingElem& e) const {
    LaurentMatrix acc(ctx_, dim(), dim());
    for (const auto& [w, c] : e.terms) {
      LaurentMatrix m = word(w);
      for (long i = 0; i < dim(); ++i)
        for (long j = 0; j < dim(); ++j) acc.at(i, j) += m.at(i, j) * mpq_class(c);
    }
    return acc;
  }

private:
  static bool unitary(const LaurentMatrix& m) {
    return (m * m.sharp_transpose()) == LaurentMatrix::identity(m.ctx(), m.rows());
  }
  static LaurentMatrix mat_pow(LaurentMatrix base, long e) {
    LaurentMatrix r = LaurentMatrix::identity(base.ctx(), base.rows());
    while (e > 0) {
      if (e & 1) r = r * base;
      base = base * base;
      e >>= 1;
    }
    return r;
  }

  FieldContext ctx_;
  LaurentMatrix a_, b_;
  mutable std::map<GroupWord, LaurentMatrix> memo_;
};

// rho_theta = alpha(2, chi_theta): a |-> diag(t xi^-theta, t xi^theta),
// b |-> offdiag(t^{-k-1} xi^{k theta}; t^{-k} xi^{-k theta}), xi = zeta_ell
inline Rep metabelian_rep(long k, long theta, long ell, const FieldContext& ctx) {
  if (ell <= 0 || (2 * k + 1) % ell != 0)
    fail_pre("CharacterOrderMismatch", "character order must divide 2k+1");
  RootOfUnity xi(theta, ell);
  LaurentMatrix A(ctx, 2, 2), B(ctx, 2, 2);
  A.at(0, 0) = LaurentPoly::t_power(ctx, 1, embed_root(ctx, xi.inverse()));
  A.at(1, 1) = LaurentPoly::t_power(ctx, 1, embed_root(ctx, xi));
  B.at(0, 1) = LaurentPoly::t_power(ctx, -k - 1, embed_root(ctx, xi.pow(k)));
  B.at(1, 0) = LaurentPoly::t_power(ctx, -k, embed_root(ctx, xi.pow(-k)));
  return Rep(ctx, A, B);
}

inline Rep metabelian_rep(long k, long theta) {
  FieldContext ctx = FieldContext::make(4 * (2 * k + 1));
  return metabelian_rep(k, theta, 2 * k + 1, ctx);
}

// abelianization: a |-> t^2, b |-> t^{-2k-1}
inline Rep abelian_rep(long k, const FieldContext& ctx) {
  LaurentMatrix A(ctx, 1, 1), B(ctx, 1, 1);
  A.at(0, 0) = LaurentPoly::t_power(ctx, 2, FieldElement::one(ctx));
  B.at(0, 0) = LaurentPoly::t_power(ctx, -2 * k - 1, FieldElement::one(ctx));
  return Rep(ctx, A, B);
}

inline Rep abelian_rep(long k) { return abelian_rep(k, FieldContext::make(4 * (2 * k + 1))); }

// gamma_K(n, chi)(t^j, v): the metabelian representation of the
// semidirect product Z x| H_1 on pairs (j, chi-values of t^i v)
inline LaurentMatrix semidirect_rep_matrix(const FieldContext& ctx, long n, long ell, long j,
                                           const std::vector<long>& chi_of_tiv) {
  require(static_cast<long>(chi_of_tiv.size()) == n, "need chi(t^i v) for i = 0..n-1");
  LaurentMatrix shift(ctx, n, n);
  for (long i = 0; i + 1 < n; ++i) shift.at(i, i + 1) = LaurentPoly::one(ctx);
  shift.at(n - 1, 0) = LaurentPoly::variable(ctx);
  LaurentMatrix diag(ctx, n, n);
  for (long i = 0; i < n; ++i)
    diag.at(i, i) = LaurentPoly::constant(ctx, embed_root(ctx, RootOfUnity(chi_of_tiv[static_cast<std::size_t>(i)], ell)));
  LaurentMatrix pw = LaurentMatrix::identity(ctx, n);
  LaurentMatrix base = j >= 0 ? shift : shift.sharp_transpose();
  for (long i = 0; i < std::labs(j); ++i) pw = pw * base;
  return pw * diag;
}

// ---------------------------------------------------------------------
// Twisted cohomology of the 0-surgery and the Blanchfield pairing.

struct TwistedComplex {
  LaurentMatrix b1, b2, b3; // rep images of the boundary maps (block form)
  LaurentMatrix phi;        // rep image of the duality map
  LaurentMatrix n2, n3;     // cochain differentials on row vectors
};

inline TwistedComplex twisted_complex(const Rep& rep, const ChainComplexData& chain) {
  long d = rep.dim();
  const FieldContext& ctx = rep.ctx();
  TwistedComplex tc{LaurentMatrix(ctx, 2 * d, d), LaurentMatrix(ctx, 2 * d, 2 * d),
                    LaurentMatrix(ctx, d, 2 * d), LaurentMatrix(ctx, 2 * d, 2 * d),
                    LaurentMatrix(ctx, 2 * d, 2 * d), LaurentMatrix(ctx, 2 * d, d)};
  auto place = [&](LaurentMatrix& dst, long bi, long bj, const LaurentMatrix& blk) {
    for (long i = 0; i < blk.rows(); ++i)
      for (long j = 0; j < blk.cols(); ++j) dst.at(bi * blk.rows() + i, bj * blk.cols() + j) = blk.at(i, j);
  };
  place(tc.b1, 0, 0, rep(chain.d1[0]));
  place(tc.b1, 1, 0, rep(chain.d1[1]));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) place(tc.b2, i, j, rep(chain.d2[i][j]));
  place(tc.b3, 0, 0, rep(chain.d3[0]));
  place(tc.b3, 0, 1, rep(chain.d3[1]));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) place(tc.phi, i, j, rep(chain.phi[i][j]));
  // cochain differentials: beta(d^i) = (-1)^i beta(d_i)^{#T}
  tc.n2 = tc.b2.sharp_transpose();
  LaurentMatrix n3 = tc.b3.sharp_transpose();
  for (long i = 0; i < n3.rows(); ++i)
    for (long j = 0; j < n3.cols(); ++j) n3.at(i, j) = -n3.at(i, j);
  tc.n3 = n3;
  return tc;
}

// presentation of H^2 with a chosen set of cyclic generators
struct CohomologyPresentation {
  std::vector<LaurentPoly> factors;          // non-unit invariant factors
  std::vector<std::vector<LaurentPoly>> gens; // cocycle rows in C^2
  LaurentPoly order;                          // product of the factors
};

inline CohomologyPresentation twisted_cohomology(const Rep& rep, const ChainComplexData& chain) {
  const FieldContext& ctx = rep.ctx();
  long d = rep.dim();
  TwistedComplex tc = twisted_complex(rep, chain);
  require((tc.b3 * tc.b2).is_zero() && (tc.b2 * tc.b1).is_zero(), "chain complex not exact: d d != 0");

  // kernel of n3 acting on row vectors, via the SNF of n3
  SNFResult s3 = smith_normal_form(tc.n3);
  std::vector<long> ker_idx;
  for (long i = 0; i < 2 * d; ++i) {
    bool zero = i >= std::min<long>(2 * d, d) || s3.D.at(i, i).is_zero();
    if (zero) ker_idx.push_back(i);
  }
  long r = static_cast<long>(ker_idx.size());
  // relations: rows of n2 expressed in the kernel basis (rows of Uinv)
  LaurentMatrix coords = tc.n2 * s3.U;
  for (long i = 0; i < 2 * d; ++i)
    for (long j = 0; j < 2 * d; ++j) {
      bool in_kernel = false;
      for (long kk : ker_idx) in_kernel = in_kernel || kk == j;
      if (!in_kernel) require(coords.at(i, j).is_zero(), "image of d^2 is not contained in ker d^3");
    }
  LaurentMatrix P(ctx, 2 * d, r);
  for (long i = 0; i < 2 * d; ++i)
    for (long j = 0; j < r; ++j) P.at(i, j) = coords.at(i, ker_idx[static_cast<std::size_t>(j)]);
  SNFResult sp = smith_normal_form(P);
  CohomologyPresentation pres;
  pres.order = LaurentPoly::one(ctx);
  for (long i = 0; i < r; ++i) {
    LaurentPoly e = (i < std::min<long>(2 * d, r)) ? sp.D.at(i, i) : LaurentPoly::zero(ctx);
    if (e.is_zero()) fail_pre("NonTorsion", "H^2 has a free summand; representation not acyclic");
    if (is_unit(e)) continue;
    pres.factors.push_back(e);
    pres.order *= e;
    // generator: row i of V' expanded in the kernel basis rows of Uinv
    std::vector<LaurentPoly> gen(static_cast<std::size_t>(2 * d), LaurentPoly::zero(ctx));
    for (long j = 0; j < r; ++j) {
      const LaurentPoly& cij = sp.V.at(i, j);
      if (cij.is_zero()) continue;
      long row = ker_idx[static_cast<std::size_t>(j)];
      for (long c = 0; c < 2 * d; ++c) gen[static_cast<std::size_t>(c)] += cij * s3.Uinv.at(row, c);
    }
    pres.gens.push_back(std::move(gen));
  }
  pres.order = canonical(pres.order);
  return pres;
}

namespace detail {

// minimal-denominator solution of Z n2 = s w over the Laurent ring
struct Lift {
  std::vector<LaurentPoly> z;
  LaurentPoly s;
};

inline Lift solve_lift(const SNFResult& s2, const std::vector<LaurentPoly>& w_row,
                       const FieldContext& ctx) {
  long n = static_cast<long>(w_row.size());
  // coordinates of w in the V2-basis: w V2^{-1}
  std::vector<LaurentPoly> wv(static_cast<std::size_t>(n), LaurentPoly::zero(ctx));
  for (long j = 0; j < n; ++j)
    for (long i = 0; i < n; ++i)
      if (!w_row[static_cast<std::size_t>(i)].is_zero())
        wv[static_cast<std::size_t>(j)] += w_row[static_cast<std::size_t>(i)] * s2.Vinv.at(i, j);
  LaurentPoly s = LaurentPoly::one(ctx);
  for (long i = 0; i < n; ++i) {
    const LaurentPoly& di = s2.D.at(i, i);
    const LaurentPoly& wi = wv[static_cast<std::size_t>(i)];
    if (di.is_zero()) {
      if (!wi.is_zero())
        throw Error(ErrorKind::Internal, "UnsolvableLift", "cocycle outside the image of d^2");
      continue;
    }
    if (wi.is_zero()) continue;
    LaurentPoly g = poly_gcd(di, wi);
    s = poly_lcm(s, exact_div(di, g));
  }
  std::vector<LaurentPoly> u(static_cast<std::size_t>(n), LaurentPoly::zero(ctx));
  for (long i = 0; i < n; ++i) {
    const LaurentPoly& di = s2.D.at(i, i);
    if (di.is_zero() || wv[static_cast<std::size_t>(i)].is_zero()) continue;
    u[static_cast<std::size_t>(i)] = exact_div(s * wv[static_cast<std::size_t>(i)], di);
  }
  Lift lift;
  lift.s = s;
  lift.z.assign(static_cast<std::size_t>(n), LaurentPoly::zero(ctx));
  for (long j = 0; j < n; ++j)
    for (long i = 0; i < n; ++i)
      if (!u[static_cast<std::size_t>(i)].is_zero())
        lift.z[static_cast<std::size_t>(j)] += u[static_cast<std::size_t>(i)] * s2.Uinv.at(i, j);
  return lift;
}

} // namespace detail

// Chain-level twisted Blanchfield pairing (Powell's formula): on cocycle
// classes [v], [w],
//   Bl([v], [w]) = (1/s) (v . beta(Phi) . Z^{#T})^{#T}  with  Z beta(d^2) = s w.
inline LinkingForm blanchfield(const Rep& rep, const ChainComplexData& chain) {
  const FieldContext& ctx = rep.ctx();
  long dd = 2 * rep.dim();
  TwistedComplex tc = twisted_complex(rep, chain);
  CohomologyPresentation pres = twisted_cohomology(rep, chain);
  SNFResult s2 = smith_normal_form(tc.n2);
  std::size_t m = pres.factors.size();

  std::vector<detail::Lift> lifts;
  lifts.reserve(m);
  for (std::size_t j = 0; j < m; ++j) lifts.push_back(detail::solve_lift(s2, pres.gens[j], ctx));

  GramPresentation g;
  g.mode = Mode::Complex;
  g.ctx = ctx;
  g.ann = pres.factors;
  g.gram.assign(m, std::vector<RatFn>(m, RatFn::zero(ctx)));
  for (std::size_t i = 0; i < m; ++i) {
    // row_i = gens[i] . phi
    std::vector<LaurentPoly> row(static_cast<std::size_t>(dd), LaurentPoly::zero(ctx));
    for (long c = 0; c < dd; ++c)
      for (long r = 0; r < dd; ++r)
        if (!pres.gens[i][static_cast<std::size_t>(r)].is_zero())
          row[static_cast<std::size_t>(c)] += pres.gens[i][static_cast<std::size_t>(r)] * tc.phi.at(r, c);
    for (std::size_t j = 0; j < m; ++j) {
      LaurentPoly val(ctx);
      for (long c = 0; c < dd; ++c)
        if (!row[static_cast<std::size_t>(c)].is_zero())
          val += row[static_cast<std::size_t>(c)] * sharp(lifts[j].z[static_cast<std::size_t>(c)]);
      g.gram[i][j] = RatFn(sharp(val), lifts[j].s);
    }
  }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      require(g.gram[i][j] == g.gram[j][i].sharped(), "Blanchfield pairing is not Hermitian");
  return orthogonalize(g);
}

// ---------------------------------------------------------------------
// Closed forms for T(2, 2k+1) (used as oracles and for fast assembly).

inline LaurentPoly p_sum(const FieldContext& ctx, long k) { // 1 + t + ... + t^k
  LaurentPoly p(ctx);
  for (long i = 0; i <= k; ++i) p.set(i, FieldElement::one(ctx));
  return p;
}

// Delta_theta = t^{-k} P_2k(t) / R_{xi^theta}(t) = prod_{i != theta} R_{xi^i}(t)
inline LaurentPoly delta_theta(const FieldContext& ctx, long k, long theta) {
  LaurentPoly acc = LaurentPoly::one(ctx);
  for (long i = 1; i <= k; ++i) {
    if (i == theta) continue;
    acc *= basic_poly(ctx, Mode::Real, RootOfUnity(i, 2 * k + 1));
  }
  return acc;
}

// G(t) = 1/2 (t^{2k+1} xi^{k theta} - t^{k+1} - t^k + xi^{(k+1) theta}) (t^{-2k-1} + 1)
inline LaurentPoly torus_pairing_numerator(const FieldContext& ctx, long k, long theta) {
  long q = 2 * k + 1;
  RootOfUnity xi(theta, q);
  LaurentPoly lhs(ctx);
  lhs.set(q, embed_root(ctx, xi.pow(k)));
  lhs.add_term(k + 1, -FieldElement::one(ctx));
  lhs.add_term(k, -FieldElement::one(ctx));
  lhs.add_term(0, embed_root(ctx, xi.pow(k + 1)));
  LaurentPoly rhs(ctx);
  rhs.set(-q, FieldElement::one(ctx));
  rhs.add_term(0, FieldElement::one(ctx));
  return (lhs * rhs) * mpq_class(1, 2);
}

// the closed-form pairing on H^2(T_{2,2k+1}): lambda(1,1) = F(t)
// presented over Lambda/Delta_theta
inline CyclicPairing torus_reference_pairing(const FieldContext& ctx, long k, long theta) {
  LaurentPoly delta = delta_theta(ctx, k, theta);
  LaurentPoly g = torus_pairing_numerator(ctx, k, theta);
  LaurentPoly h = exact_div(g, basic_poly(ctx, Mode::Real, RootOfUnity(theta, 2 * k + 1)));
  return CyclicPairing{delta, mod_window(h, delta), Mode::Complex};
}

// isometry type of Bl^{rho_theta}(T_{2,2k+1}) for 1 <= theta <= k:
// lambda^odd over e with theta+e odd, lambda^even split by e < theta
inline Decomposition classify_torus_metabelian(long k, long theta) {
  if (theta < 1 || theta > k) fail_pre("BadTorusParameter", "closed form needs 1 <= theta <= k");
  long q = 2 * k + 1;
  Decomposition d;
  d.mode = Mode::Complex;
  for (long e = 1; e <= k; ++e) {
    if (e == theta) continue;
    int sign_at_e;
    if ((theta + e) % 2 != 0)
      sign_at_e = +1;
    else
      sign_at_e = (e < theta) ? +1 : -1;
    d.add(BasicForm::E(1, 0, sign_at_e, RootOfUnity(e, q)));
    d.add(BasicForm::E(1, 0, -sign_at_e, RootOfUnity(q - e, q)));
  }
  return d;
}

// sign table of the numerator: sign of (-1)^{theta+1} G(xi^e), 1 <= e <= k
inline int torus_numerator_sign(const FieldContext& ctx, long k, long theta, long e) {
  LaurentPoly g = torus_pairing_numerator(ctx, k, theta);
  FieldElement v = eval_at_root(g, RootOfUnity(e, 2 * k + 1));
  int s = real_sign(v);
  return (theta % 2 == 0) ? -s : s;
}

// ---------------------------------------------------------------------
// Knot expressions and Witt-class assembly.

struct KnotExpr;
using KnotExprPtr = std::shared_ptr<const KnotExpr>;

struct KnotExpr {
  enum class Kind { Torus2, Cable2, Sum, Neg };
  Kind kind = Kind::Torus2;
  long q = 0;                     // Torus2: odd q >= 3; Cable2: cable parameter d
  KnotExprPtr child;              // Cable2 companion, Neg child
  std::vector<KnotExprPtr> parts; // Sum

  static KnotExprPtr torus(long q) {
    if (q < 3 || q % 2 == 0) fail_pre("BadTorusParameter", "T(2,q) needs odd q >= 3");
    auto e = std::make_shared<KnotExpr>();
    e->kind = Kind::Torus2;
    e->q = q;
    return e;
  }
  static KnotExprPtr cable(long d, KnotExprPtr companion) {
    if (d < 3 || d % 2 == 0) fail_pre("BadTorusParameter", "(2,d)-cable needs odd d >= 3");
    auto e = std::make_shared<KnotExpr>();
    e->kind = Kind::Cable2;
    e->q = d;
    e->child = std::move(companion);
    return e;
  }
  static KnotExprPtr sum(std::vector<KnotExprPtr> parts) {
    auto e = std::make_shared<KnotExpr>();
    e->kind = Kind::Sum;
    e->parts = std::move(parts);
    return e;
  }
  static KnotExprPtr neg(KnotExprPtr child) {
    auto e = std::make_shared<KnotExpr>();
    e->kind = Kind::Neg;
    e->child = std::move(child);
    return e;
  }
};

// leaves in depth-first order; each leaf carries the order of
// H_1(L_2) = Z_q resp. Z_d, which constrains its character
inline void collect_leaves(const KnotExprPtr& e, std::vector<long>& orders) {
  switch (e->kind) {
  case KnotExpr::Kind::Torus2:
  case KnotExpr::Kind::Cable2:
    orders.push_back(e->q);
    break;
  case KnotExpr::Kind::Sum:
    for (const auto& p : e->parts) collect_leaves(p, orders);
    break;
  case KnotExpr::Kind::Neg:
    collect_leaves(e->child, orders);
    break;
  }
}

inline LinkingForm form_extend(const LinkingForm& f, const FieldContext& ctx) {
  if (ctx == f.ctx) return f;
  LinkingForm r;
  r.mode = f.mode;
  r.ctx = ctx;
  for (const auto& c : f.summands)
    r.summands.push_back(CyclicPairing{c.f.extend(ctx), c.h.extend(ctx), c.mode});
  r.roots.circle = f.roots.circle;
  for (const auto& x : f.roots.off) r.roots.add_off(x.extend(ctx));
  return r;
}

// cache for the heavyweight pipeline computations during assembly
struct LeafCache {
  std::map<long, LinkingForm> untwisted;                  // q -> Bl(T_{2,q})
  std::map<std::pair<long, long>, Decomposition> metab;   // (q, theta_eff) -> decomposition
};

// untwisted Blanchfield form of an expression, via the abelian pipeline
// on torus leaves and the satellite formula Bl(K_{2,d}) = Bl(T_{2,d}) (+) Bl(K')(t^2)
inline LinkingForm untwisted_form(const KnotExprPtr& e, LeafCache& cache) {
  switch (e->kind) {
  case KnotExpr::Kind::Torus2: {
    auto it = cache.untwisted.find(e->q);
    if (it != cache.untwisted.end()) return it->second;
    long k = (e->q - 1) / 2;
    LinkingForm f = blanchfield(abelian_rep(k), build_complex(k));
    cache.untwisted.emplace(e->q, f);
    return f;
  }
  case KnotExpr::Kind::Cable2: {
    LinkingForm pattern = untwisted_form(KnotExpr::torus(e->q), cache);
    LinkingForm companion = substitute_form(untwisted_form(e->child, cache), RootOfUnity(0, 1), 2);
    FieldContext ctx = FieldContext::make(lcm_long(pattern.ctx.N(), companion.ctx.N()));
    return direct_sum(form_extend(pattern, ctx), form_extend(companion, ctx));
  }
  case KnotExpr::Kind::Sum: {
    require(!e->parts.empty(), "empty connected sum");
    LinkingForm acc = untwisted_form(e->parts[0], cache);
    for (std::size_t i = 1; i < e->parts.size(); ++i) {
      LinkingForm next = untwisted_form(e->parts[i], cache);
      FieldContext ctx = FieldContext::make(lcm_long(acc.ctx.N(), next.ctx.N()));
      acc = direct_sum(form_extend(acc, ctx), form_extend(next, ctx));
    }
    return acc;
  }
  case KnotExpr::Kind::Neg:
    return negate(untwisted_form(e->child, cache));
  }
  fail_internal("unhandled expression kind");
}

// Witt-relevant decomposition of Bl_{alpha(2,chi_theta)}(T_{2,q}) where
// the character takes values in Z_ell. The trivial character runs
// through the generic pipeline; nontrivial ones use the closed form at
// theta_eff with zeta_ell^theta = zeta_q^theta_eff.
inline Decomposition metabelian_decomposition(long q, long theta, long ell, LeafCache& cache) {
  long k = (q - 1) / 2;
  theta = ((theta % ell) + ell) % ell;
  if (theta != 0 && q % ell != 0)
    fail_pre("CharacterOrderMismatch", "nontrivial character needs ell | q");
  long theta_eff = 0;
  if (theta != 0) {
    long te = (theta * (q / ell)) % q;
    theta_eff = std::min(te, q - te);
  }
  auto it = cache.metab.find({q, theta_eff});
  if (it != cache.metab.end()) return it->second;
  Decomposition d;
  if (theta_eff == 0) {
    d = classify(blanchfield(metabelian_rep(k, 0), build_complex(k)));
  } else {
    d = classify_torus_metabelian(k, theta_eff);
  }
  cache.metab.emplace(std::make_pair(q, theta_eff), d);
  return d;
}

inline JumpTable add_tables(const JumpTable& x, const JumpTable& y) {
  JumpTable r = x;
  for (const auto& [xi, v] : y.jumps) r.jumps[xi] += v;
  for (const auto& [xi, v] : y.local) r.local[xi] += v;
  return r;
}
inline JumpTable negate_table(const JumpTable& x) {
  JumpTable r = x;
  for (auto& [xi, v] : r.jumps) v = -v;
  for (auto& [xi, v] : r.local) v = -v;
  return r;
}

// Witt class of the metabelian Blanchfield form of the expression with
// the given per-leaf characters (values in Z_ell), assembled leaf by
// leaf: metabelian classes for the patterns, rotated untwisted classes
// for cable companions, negation for mirrors.
inline JumpTable assemble_witt(const KnotExprPtr& e, long ell, const std::vector<long>& thetas,
                               LeafCache& cache) {
  std::size_t cursor = 0;
  std::function<JumpTable(const KnotExprPtr&)> go = [&](const KnotExprPtr& node) -> JumpTable {
    switch (node->kind) {
    case KnotExpr::Kind::Torus2: {
      long theta = thetas.at(cursor++);
      return jumps(metabelian_decomposition(node->q, theta, ell, cache));
    }
    case KnotExpr::Kind::Cable2: {
      long theta = thetas.at(cursor++);
      JumpTable acc = jumps(metabelian_decomposition(node->q, theta, ell, cache));
      LinkingForm companion = untwisted_form(node->child, cache);
      for (long sgn : {+1L, -1L}) {
        RootOfUnity rot(sgn * theta, ell);
        FieldContext ctx = FieldContext::make(lcm_long(companion.ctx.N(), lcm_long(ell, 4)));
        LinkingForm rotated = substitute_form(form_extend(companion, ctx), rot, 1);
        acc = add_tables(acc, jumps(classify(rotated)));
      }
      return acc;
    }
    case KnotExpr::Kind::Sum: {
      JumpTable acc;
      acc.mode = Mode::Complex;
      for (const auto& p : node->parts) acc = add_tables(acc, go(p));
      return acc;
    }
    case KnotExpr::Kind::Neg:
      return negate_table(go(node->child));
    }
    fail_internal("unhandled expression kind");
  };
  JumpTable t = go(e);
  std::vector<long> orders;
  collect_leaves(e, orders);
  require(cursor == orders.size() && thetas.size() == orders.size(),
          "character count must match the number of leaves");
  return t;
}

// ---------------------------------------------------------------------
// The Hedden-Kirk-Livingston knot and the character sweep.

inline KnotExprPtr hkl_knot() {
  return KnotExpr::sum({KnotExpr::cable(13, KnotExpr::torus(3)), KnotExpr::torus(15),
                        KnotExpr::neg(KnotExpr::cable(15, KnotExpr::torus(3))),
                        KnotExpr::neg(KnotExpr::torus(13))});
}

struct SweepClassResult {
  std::vector<long> thetas; // per leaf, depth-first order
  bool metabolic = false;
  std::vector<std::pair<RootOfUnity, long>> jump_support;
};

struct SweepReport {
  long ell = 0;
  long nontrivial_classes = 0;
  long nontrivial_metabolic = 0;
  bool trivial_metabolic = false;
  std::vector<SweepClassResult> classes; // sorted by theta tuple
  std::string note;
};

// Sweep all Z_ell-characters of the HKL knot up to the identification
// chi ~ -chi; only the trivial character may produce a metabolic form.
// Leaf computations run once per normalized character value, classes
// are evaluated by adding the cached jump tables.
inline SweepReport hkl_sweep(long ell, long jobs = 1) {
  if (ell != 3 && ell != 5 && ell != 13)
    fail_input("BadSweepPrime", "the HKL sweep runs at ell in {3, 5, 13}");
  KnotExprPtr expr = hkl_knot();
  std::vector<long> orders;
  collect_leaves(expr, orders);
  std::size_t nleaf = orders.size();
  LeafCache cache;

  // per-leaf jump tables for every normalized character value
  std::vector<std::map<long, JumpTable>> leaf_table(nleaf);
  auto leaf_values = [&](std::size_t i) {
    std::vector<long> vals{0};
    if (orders[i] % ell == 0)
      for (long v = 1; v <= ell / 2; ++v) vals.push_back(v);
    return vals;
  };
  // assemble leaf tables directly (depth-first walk mirroring assemble_witt)
  std::function<void(const KnotExprPtr&, std::size_t&, long)> walk =
      [&](const KnotExprPtr& node, std::size_t& cursor, long sign) {
        switch (node->kind) {
        case KnotExpr::Kind::Torus2: {
          std::size_t i = cursor++;
          for (long v : leaf_values(i)) {
            JumpTable t = jumps(metabelian_decomposition(node->q, v, ell, cache));
            leaf_table[i][v] = sign > 0 ? t : negate_table(t);
          }
          break;
        }
        case KnotExpr::Kind::Cable2: {
          std::size_t i = cursor++;
          for (long v : leaf_values(i)) {
            JumpTable t = jumps(metabelian_decomposition(node->q, v, ell, cache));
            LinkingForm companion = untwisted_form(node->child, cache);
            for (long sgn : {+1L, -1L}) {
              RootOfUnity rot(sgn * v, ell);
              FieldContext cctx = FieldContext::make(lcm_long(companion.ctx.N(), lcm_long(ell, 4)));
              LinkingForm rotated = substitute_form(form_extend(companion, cctx), rot, 1);
              t = add_tables(t, jumps(classify(rotated)));
            }
            leaf_table[i][v] = sign > 0 ? t : negate_table(t);
          }
          break;
        }
        case KnotExpr::Kind::Sum:
          for (const auto& p : node->parts) walk(p, cursor, sign);
          break;
        case KnotExpr::Kind::Neg:
          walk(node->child, cursor, -sign);
          break;
        }
      };
  std::size_t cur = 0;
  walk(expr, cur, +1);
  require(cur == nleaf, "leaf walk out of sync");

  // enumerate character classes modulo chi ~ -chi
  std::vector<std::size_t> free_idx;
  for (std::size_t i = 0; i < nleaf; ++i)
    if (orders[i] % ell == 0) free_idx.push_back(i);
  std::vector<std::vector<long>> classes;
  std::vector<long> assign(free_idx.size(), 0);
  std::function<void(std::size_t)> enumerate = [&](std::size_t pos) {
    if (pos == assign.size()) {
      bool all_zero = true;
      std::vector<long> negated(assign.size());
      for (std::size_t i = 0; i < assign.size(); ++i) {
        all_zero = all_zero && assign[i] == 0;
        negated[i] = (ell - assign[i]) % ell;
      }
      if (all_zero) return;
      if (assign <= negated) classes.push_back(assign);
      return;
    }
    for (long v = 0; v < ell; ++v) {
      assign[pos] = v;
      enumerate(pos + 1);
    }
    assign[pos] = 0;
  };
  enumerate(0);
  std::sort(classes.begin(), classes.end());

  auto class_result = [&](const std::vector<long>& cls) {
    SweepClassResult res;
    res.thetas.assign(nleaf, 0);
    JumpTable total;
    total.mode = Mode::Complex;
    for (std::size_t i = 0, f = 0; i < nleaf; ++i) {
      long v = 0;
      if (f < free_idx.size() && free_idx[f] == i) v = cls[f], ++f;
      res.thetas[i] = v;
      long vm = ((v % ell) + ell) % ell;
      long vn = std::min(vm, (ell - vm) % ell);
      total = add_tables(total, leaf_table[i].at(vn));
    }
    res.metabolic = total.all_zero();
    res.jump_support = total.support();
    return res;
  };

  SweepReport rep;
  rep.ell = ell;
  rep.nontrivial_classes = static_cast<long>(classes.size());
  rep.classes.resize(classes.size());
  long nthreads = std::max(1L, std::min(jobs, static_cast<long>(classes.size())));
  if (nthreads <= 1) {
    for (std::size_t i = 0; i < classes.size(); ++i) rep.classes[i] = class_result(classes[i]);
  } else {
    std::vector<std::thread> workers;
    std::size_t chunk = (classes.size() + static_cast<std::size_t>(nthreads) - 1) /
                        static_cast<std::size_t>(nthreads);
    for (long w = 0; w < nthreads; ++w) {
      std::size_t lo = static_cast<std::size_t>(w) * chunk;
      std::size_t hi = std::min(classes.size(), lo + chunk);
      workers.emplace_back([&, lo, hi] {
        for (std::size_t i = lo; i < hi; ++i) rep.classes[i] = class_result(classes[i]);
      });
    }
    for (auto& t : workers) t.join();
  }
  for (const auto& c : rep.classes) rep.nontrivial_metabolic += c.metabolic ? 1 : 0;

  // the trivial character
  JumpTable trivial;
  trivial.mode = Mode::Complex;
  for (std::size_t i = 0; i < nleaf; ++i) trivial = add_tables(trivial, leaf_table[i].at(0));
  rep.trivial_metabolic = trivial.all_zero();

  rep.note =
      "Obstruction logic: H_1 of the double branched cover of the HKL knot is "
      "Z_13 + Z_15 + Z_15 + Z_13, and a metabolizer has order 13 * 15. For each "
      "prime l in {3, 5, 13} the l-primary part of a metabolizer has rank at most "
      "one inside (Z_l)^2, so some nontrivial character to Z_l vanishes on it. "
      "Since the sweep finds every nontrivial character class non-metabolic, no "
      "metabolizer satisfies the sliceness criterion.";
  return rep;
}

} // namespace linkform
