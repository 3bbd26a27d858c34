// Linking-form data model and the isometry classification into basic
// pairings e(n,k,eps,xi) and f^w((a,b),k,xi).
//
// A linking form is presented as an orthogonal sum of cyclic pairings
// (f, h), the pairing on Lambda/f being (x,y) -> h x y# / f. The
// classifier splits each summand into primary pieces by CRT over a set
// of declared roots, then reads (n, k, eps) off the local polar part.
#pragma once

#include <optional>

#include "plinalg.hpp"

namespace linkform {

// value in F(t)/Lambda as a reduced fraction: den canonical (monic,
// nonzero constant term), gcd(num, den) = 1, span(num) < span(den).
class RatFn {
public:
  RatFn() = default;
  RatFn(LaurentPoly num, LaurentPoly den) : num_(std::move(num)), den_(std::move(den)) {
    reduce();
  }
  static RatFn zero(const FieldContext& ctx) {
    return RatFn(LaurentPoly::zero(ctx), LaurentPoly::one(ctx));
  }

  const LaurentPoly& num() const { return num_; }
  const LaurentPoly& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  const FieldContext& ctx() const { return den_.ctx(); }

  friend bool operator==(const RatFn& a, const RatFn& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const RatFn& a, const RatFn& b) { return !(a == b); }

  friend RatFn operator+(const RatFn& a, const RatFn& b) {
    return RatFn(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend RatFn operator-(const RatFn& a, const RatFn& b) {
    return RatFn(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
  }
  RatFn operator-() const {
    RatFn r = *this;
    r.num_ = -r.num_;
    return r;
  }
  friend RatFn operator*(const RatFn& a, const RatFn& b) {
    return RatFn(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend RatFn operator*(const LaurentPoly& p, const RatFn& a) {
    return RatFn(p * a.num_, a.den_);
  }
  friend RatFn operator*(const RatFn& a, const LaurentPoly& p) { return p * a; }

  RatFn sharped() const { return RatFn(sharp(num_), sharp(den_)); }

private:
  void reduce() {
    if (den_.is_zero()) fail_pre("DivisionByZero", "fraction with zero denominator");
    const FieldContext& ctx = den_.ctx();
    if (num_.is_zero()) {
      num_ = LaurentPoly::zero(ctx);
      den_ = LaurentPoly::one(ctx);
      return;
    }
    LaurentPoly g = poly_gcd(num_, den_);
    if (!is_unit(g)) {
      num_ = exact_div(num_, g);
      den_ = exact_div(den_, g);
    }
    UnitSplit u = unit_split(den_);
    den_ = u.canonical;
    num_ = num_ * LaurentPoly::t_power(ctx, -u.shift, u.lead.inverse());
    num_ = mod_window(num_, den_);
    if (num_.is_zero()) den_ = LaurentPoly::one(ctx);
  }

  LaurentPoly num_, den_;
};

struct CyclicPairing {
  LaurentPoly f; // annihilator, nonzero
  LaurentPoly h; // pairing numerator, taken mod f
  Mode mode = Mode::Complex;
};

// checks that h/f is #-symmetric as an element of F(t)/Lambda
inline bool pairing_is_hermitian(const CyclicPairing& c) {
  RatFn v(c.h, c.f);
  return v == v.sharped();
}

// declared roots used to factor annihilators
struct RootSet {
  std::vector<RootOfUnity> circle;
  std::vector<FieldElement> off; // xi with xi conj(xi) != 1

  void add_circle(const RootOfUnity& r) {
    for (const auto& x : circle)
      if (x == r) return;
    circle.push_back(r);
  }
  void add_off(const FieldElement& x) {
    for (const auto& y : off)
      if (y == x) return;
    off.push_back(x);
  }
  void merge(const RootSet& o) {
    for (const auto& r : o.circle) add_circle(r);
    for (const auto& x : o.off) add_off(x);
  }
};

struct LinkingForm {
  Mode mode = Mode::Complex;
  FieldContext ctx;
  std::vector<CyclicPairing> summands; // declared pairwise orthogonal
  RootSet roots;                       // hints for the classifier
};

// ---------------------------------------------------------------------
// Basic forms and decompositions.

struct BasicForm {
  enum class Kind { E, Fw };
  Kind kind = Kind::E;
  // E(n, k, eps, xi)
  long n = 0, k = 0;
  int eps = 1;
  RootOfUnity xi;
  // f^w((a, b), k, xi_off)
  long a = 0, b = 0;
  FieldElement xi_off;

  static BasicForm E(long n, long k, int eps, RootOfUnity xi) {
    BasicForm f;
    f.kind = Kind::E;
    f.n = n;
    f.k = k;
    f.eps = eps;
    f.xi = xi;
    return f;
  }
  static BasicForm Fw(long a, long b, long k, FieldElement xi) {
    BasicForm f;
    f.kind = Kind::Fw;
    f.a = a;
    f.b = b;
    f.k = k;
    f.xi_off = std::move(xi);
    return f;
  }
};

inline int compare_field_elements(const FieldElement& x, const FieldElement& y) {
  if (x.ctx().N() != y.ctx().N()) return x.ctx().N() < y.ctx().N() ? -1 : 1;
  for (std::size_t i = 0; i < x.coeffs().size(); ++i) {
    int c = cmp(x.coeffs()[i], y.coeffs()[i]);
    if (c != 0) return c;
  }
  return 0;
}

inline bool operator<(const BasicForm& p, const BasicForm& q) {
  if (p.kind != q.kind) return p.kind < q.kind;
  if (p.kind == BasicForm::Kind::E) {
    if (p.xi != q.xi) return p.xi < q.xi;
    if (p.n != q.n) return p.n < q.n;
    if (p.k != q.k) return p.k < q.k;
    return p.eps < q.eps;
  }
  int c = compare_field_elements(p.xi_off, q.xi_off);
  if (c != 0) return c < 0;
  if (p.a != q.a) return p.a < q.a;
  if (p.b != q.b) return p.b < q.b;
  return p.k < q.k;
}

inline bool operator==(const BasicForm& p, const BasicForm& q) {
  return !(p < q) && !(q < p);
}

struct Decomposition {
  Mode mode = Mode::Complex;
  std::vector<BasicForm> parts; // kept sorted (multiset order)

  void add(BasicForm f) {
    parts.insert(std::upper_bound(parts.begin(), parts.end(), f), std::move(f));
  }
  void add_all(const Decomposition& o) {
    for (const auto& p : o.parts) add(p);
  }
  friend bool operator==(const Decomposition& a, const Decomposition& b) {
    return a.mode == b.mode && a.parts == b.parts;
  }
};

inline bool is_nonsingular(const Decomposition& d) {
  for (const auto& p : d.parts) {
    if (p.k != 0) return false;
    if (p.kind == BasicForm::Kind::Fw && p.a != p.b) return false;
  }
  return true;
}

enum class IsometryVerdict { Yes, No, EqualDecompositionsOnly };

// For non-singular forms the decomposition is a complete invariant; for
// singular ones equality of decompositions certifies isometry but
// uniqueness is only conjectural, so the verdict is weakened.
inline IsometryVerdict isometric(const Decomposition& a, const Decomposition& b) {
  bool equal = (a == b);
  if (is_nonsingular(a) && is_nonsingular(b)) return equal ? IsometryVerdict::Yes : IsometryVerdict::No;
  return equal ? IsometryVerdict::EqualDecompositionsOnly : IsometryVerdict::No;
}

// Hodge numbers: multiplicity of e(n,0,eps,xi) resp. f(n,0,xi)
inline long hodge_P(const Decomposition& d, long n, int eps, const RootOfUnity& xi) {
  long c = 0;
  for (const auto& p : d.parts)
    if (p.kind == BasicForm::Kind::E && p.n == n && p.k == 0 && p.eps == eps && p.xi == xi) ++c;
  return c;
}
inline long hodge_Q(const Decomposition& d, long n, const FieldElement& xi) {
  long c = 0;
  for (const auto& p : d.parts)
    if (p.kind == BasicForm::Kind::Fw && p.a == n && p.b == n && p.k == 0 &&
        compare_field_elements(p.xi_off, xi) == 0)
      ++c;
  return c;
}

// ---------------------------------------------------------------------
// Reference pairings for the basic forms (used by tests, random form
// generation and round-tripping a decomposition back into a form).

// canonical xi-positive linear polynomial: +-(1 - xi t) away from +-1,
// -i(t + 1) at xi = 1 and -i(t - 1) at xi = -1; each choice is checked
// against the residue criterion Re(conj(xi) r(xi)) = 0, Im < 0.
inline LaurentPoly xi_positive_linear(const FieldContext& ctx, const RootOfUnity& xi) {
  LaurentPoly t = LaurentPoly::variable(ctx);
  LaurentPoly r(ctx);
  if (xi.is_real()) {
    FieldElement mi = -imaginary_unit(ctx);
    LaurentPoly base = (xi.num == 0) ? t + LaurentPoly::one(ctx) : t - LaurentPoly::one(ctx);
    r = base * mi;
  } else {
    r = LaurentPoly::one(ctx) - t * embed_root(ctx, xi);
    if (!xi.upper_half()) r = -r;
  }
  FieldElement w = embed_root(ctx, xi.conj()) * eval_at_root(r, xi);
  require((w + w.conj()).is_zero(), "xi-positive candidate: residue not purely imaginary");
  require(imag_sign(w) < 0, "xi-positive candidate: residue criterion failed");
  return r;
}

inline LaurentPoly off_plus_poly(const FieldContext& ctx, Mode mode, const FieldElement& xi) {
  LaurentPoly t = LaurentPoly::variable(ctx);
  LaurentPoly p = t - LaurentPoly::constant(ctx, xi);
  if (mode == Mode::Real && !xi.is_conj_fixed())
    p = p * (t - LaurentPoly::constant(ctx, xi.conj()));
  return p;
}
inline LaurentPoly off_minus_poly(const FieldContext& ctx, Mode mode, const FieldElement& xi) {
  return sharp(off_plus_poly(ctx, mode, xi));
}

// the cyclic pairing realizing a basic form
inline CyclicPairing make_basic(const FieldContext& ctx, Mode mode, const BasicForm& bf) {
  CyclicPairing c;
  c.mode = mode;
  if (bf.kind == BasicForm::Kind::Fw) {
    LaurentPoly fp = off_plus_poly(ctx, mode, bf.xi_off);
    LaurentPoly fm = off_minus_poly(ctx, mode, bf.xi_off);
    c.f = fp.pow(bf.a) * fm.pow(bf.b);
    long m = std::min(bf.a, bf.b) - bf.k;
    c.h = fp.pow(bf.a - m) * fm.pow(bf.b - m);
    return c;
  }
  long n = bf.n, k = bf.k, m = n - k;
  const RootOfUnity& xi = bf.xi;
  mpq_class eps(bf.eps);
  if (mode == Mode::Complex) {
    LaurentPoly B = basic_poly(ctx, Mode::Complex, xi);
    c.f = B.pow(n);
    if (m % 2 == 0) {
      // eps (t-xi)^k (-1)^{m/2} xi^{m/2} t^{m/2}
      FieldElement u = embed_root(ctx, xi.pow(m / 2));
      if ((m / 2) % 2 != 0) u = -u;
      c.h = B.pow(k) * LaurentPoly::t_power(ctx, m / 2, u) * eps;
    } else {
      LaurentPoly r = xi_positive_linear(ctx, xi);
      long mp = (m - 1) / 2;
      FieldElement u = embed_root(ctx, xi.pow(mp));
      if (mp % 2 != 0) u = -u;
      c.h = r * B.pow(k) * LaurentPoly::t_power(ctx, mp, u) * eps;
    }
    return c;
  }
  // real mode
  if (xi.is_real()) {
    require(m % 2 == 0, "real basic form at +-1 needs n-k even");
    LaurentPoly B = basic_poly(ctx, Mode::Real, xi);
    c.f = B.pow(n);
    // eps (t-xi)^k (-xi t)^{m/2}
    mpq_class s = (xi.num == 0) ? -1 : 1; // -xi
    mpq_class coef = ((m / 2) % 2 != 0) ? s : mpq_class(1);
    c.h = B.pow(k) * LaurentPoly::t_power(ctx, m / 2, FieldElement::from_rational(ctx, coef)) * eps;
  } else {
    LaurentPoly B = basic_poly(ctx, Mode::Real, xi);
    c.f = B.pow(n);
    c.h = B.pow(k) * eps;
  }
  return c;
}

// ---------------------------------------------------------------------
// Classification.

namespace detail {

struct PrimaryFactor {
  LaurentPoly poly; // the basic polynomial power actually dividing f
  long n = 0;       // exponent for E; unused for Fw
  bool off = false;
  RootOfUnity xi;
  FieldElement xi_off;
  long a = 0, b = 0; // Fw exponents
};

// factor f into basic-polynomial powers over the declared roots;
// the leftover must be a unit.
inline std::vector<PrimaryFactor> factor_annihilator(const LaurentPoly& f, Mode mode,
                                                     const RootSet& roots) {
  const FieldContext& ctx = f.ctx();
  LaurentPoly rest = f;
  std::vector<PrimaryFactor> out;
  std::vector<RootOfUnity> circle = roots.circle;
  for (const auto& r : s1_root_zeros(f)) {
    bool seen = false;
    for (const auto& x : circle) seen = seen || x == r;
    if (!seen) circle.push_back(r);
  }
  std::vector<RootOfUnity> used;
  for (const auto& r0 : circle) {
    RootOfUnity r = r0;
    if (mode == Mode::Real && !r.upper_half() && !r.is_real()) r = r.conj();
    bool seen = false;
    for (const auto& x : used) seen = seen || x == r;
    if (seen) continue;
    used.push_back(r);
    LaurentPoly B = basic_poly(ctx, mode, r);
    long n = 0;
    while (divides(B, rest)) {
      rest = exact_div(rest, B);
      ++n;
    }
    if (n == 0) continue;
    PrimaryFactor pf;
    pf.poly = B.pow(n);
    pf.n = n;
    pf.xi = r;
    out.push_back(std::move(pf));
  }
  for (const auto& x0 : roots.off) {
    FieldElement x = x0.ctx() == ctx ? x0 : x0.extend(ctx);
    FieldElement norm = x * x.conj();
    int cmp1 = real_sign(norm - FieldElement::one(ctx));
    if (cmp1 == 0) fail_pre("BadOffRoot", "declared off-circle root lies on S^1");
    if (cmp1 > 0) x = x.conj().inverse(); // move inside the unit disc
    if (mode == Mode::Real && imag_sign(x) < 0) x = x.conj();
    LaurentPoly fp = off_plus_poly(ctx, mode, x);
    LaurentPoly fm = off_minus_poly(ctx, mode, x);
    long a = 0, b = 0;
    while (divides(fp, rest)) {
      rest = exact_div(rest, fp);
      ++a;
    }
    while (divides(fm, rest)) {
      rest = exact_div(rest, fm);
      ++b;
    }
    if (a == 0 && b == 0) continue;
    PrimaryFactor pf;
    pf.off = true;
    pf.xi_off = x;
    pf.a = a;
    pf.b = b;
    pf.poly = fp.pow(a) * fm.pow(b);
    out.push_back(std::move(pf));
  }
  if (!is_unit(rest))
    fail_pre("UnfactorableAnnihilator", "annihilator has a factor with no declared root");
  return out;
}

} // namespace detail

struct PrimaryPiece {
  CyclicPairing pairing;
  detail::PrimaryFactor factor;
};

// Chinese-remainder split of a cyclic pairing into primary pieces, one
// per basic-polynomial power dividing the annihilator. Orthogonality of
// the pieces is guaranteed by the construction.
inline std::vector<PrimaryPiece> crt_split(const CyclicPairing& c, const RootSet& roots) {
  if (c.f.is_zero()) fail_pre("ZeroPolynomial", "cyclic pairing with zero annihilator");
  const FieldContext& ctx = c.f.ctx();
  auto factors = detail::factor_annihilator(c.f, c.mode, roots);
  std::vector<PrimaryPiece> out;
  if (factors.size() == 1) {
    PrimaryPiece p;
    p.pairing = c;
    p.factor = factors[0];
    out.push_back(std::move(p));
    return out;
  }
  for (const auto& pf : factors) {
    LaurentPoly q = exact_div(c.f, pf.poly);
    ExtGcd eg = ext_gcd(q, pf.poly);
    require(is_unit(eg.g), "CRT factors not coprime");
    UnitSplit gs = unit_split(eg.g);
    LaurentPoly u = eg.s * LaurentPoly::t_power(ctx, -gs.shift, gs.lead.inverse());
    // new generator is q u . 1, so the pairing numerator picks up
    // q# u u# (one copy of q cancels against f = p q)
    LaurentPoly hnew = mod_window(c.h * sharp(q) * u * sharp(u), pf.poly);
    PrimaryPiece p;
    p.pairing = CyclicPairing{pf.poly, hnew, c.mode};
    p.factor = pf;
    out.push_back(std::move(p));
  }
  return out;
}

// Classification of a primary cyclic pairing. The sign recipes read the
// polar part of lambda(1,1) at the basic polynomial: with pole order m,
// the leading value v = num(xi)/e0(xi) decides eps via real_sign (m
// even / real case) or via the residue criterion Re(conj(xi) r0) = 0,
// Im(conj(xi) r0) < 0 (complex, m odd).
inline BasicForm classify_primary(const PrimaryPiece& piece) {
  const CyclicPairing& c = piece.pairing;
  const detail::PrimaryFactor& pf = piece.factor;
  const FieldContext& ctx = c.f.ctx();
  RatFn lam(c.h, c.f);

  if (pf.off) {
    // isometry type determined by the module and the common pole order
    long cpole = 0;
    if (!lam.is_zero()) {
      LaurentPoly fp = off_plus_poly(ctx, c.mode, pf.xi_off);
      LaurentPoly fm = off_minus_poly(ctx, c.mode, pf.xi_off);
      long cp = 0, cm = 0;
      LaurentPoly den = lam.den();
      while (divides(fp, den)) {
        den = exact_div(den, fp);
        ++cp;
      }
      while (divides(fm, den)) {
        den = exact_div(den, fm);
        ++cm;
      }
      require(is_unit(den), "off-circle pairing denominator has stray factors");
      require(cp == cm, "off-circle pole orders differ; pairing not Hermitian");
      cpole = cp;
    }
    return BasicForm::Fw(pf.a, pf.b, std::min(pf.a, pf.b) - cpole, pf.xi_off);
  }

  const RootOfUnity& xi = pf.xi;
  long n = pf.n;
  if (lam.is_zero()) return BasicForm::E(n, n, +1, xi);

  LaurentPoly B = basic_poly(ctx, c.mode, xi);
  long m = 0;
  LaurentPoly e0 = lam.den();
  while (divides(B, e0)) {
    e0 = exact_div(e0, B);
    ++m;
  }
  require(is_unit(e0), "primary pairing denominator has stray factors");
  require(m <= n, "pole order exceeds annihilator exponent");
  long k = n - m;
  if (m == 0) return BasicForm::E(n, n, +1, xi);

  FieldElement xiv = embed_root(ctx, xi);
  FieldElement numv = eval_at_root(lam.num(), xi);
  FieldElement e0v = eval_at_root(e0, xi);
  require(!numv.is_zero() && !e0v.is_zero(), "leading polar value vanished");
  // sign of num/e0 equals sign of num * conj(e0) (denominator cleared by
  // the positive real e0 conj(e0))
  FieldElement A = numv * e0v.conj();

  int eps = 0;
  if (c.mode == Mode::Complex) {
    FieldElement mxi2 = -(xiv.conj() * xiv.conj());
    if (m % 2 == 0) {
      eps = real_sign(A * mxi2.pow(m / 2));
    } else {
      FieldElement w = xiv.conj() * A * mxi2.pow((m - 1) / 2);
      require((w + w.conj()).is_zero(), "residue criterion: real part not zero");
      int is = imag_sign(w);
      require(is != 0, "residue criterion: zero imaginary part");
      eps = (is < 0) ? +1 : -1;
    }
  } else if (!xi.is_real()) {
    eps = real_sign(A); // value is real by Hermitian-ness
  } else {
    if (m % 2 != 0)
      fail_pre("RealModeParity", "real pairing at +-1 with odd pole order");
    eps = real_sign(A);
    if ((m / 2) % 2 != 0) eps = -eps;
  }
  require(eps != 0, "sign recipe produced zero");
  return BasicForm::E(n, k, eps, xi);
}

inline Decomposition classify(const LinkingForm& form) {
  Decomposition d;
  d.mode = form.mode;
  LaurentPoly order_product = LaurentPoly::one(form.ctx);
  LaurentPoly f_product = LaurentPoly::one(form.ctx);
  for (const auto& c : form.summands) {
    if (c.f.is_zero()) fail_pre("ZeroPolynomial", "summand with zero annihilator");
    if (form.mode == Mode::Real && !(c.f.conj_invariant_coeffs() && c.h.conj_invariant_coeffs()))
      fail_pre("RealModeCoefficients", "real-mode summand with non-real coefficients");
    if (!pairing_is_hermitian(c))
      fail_pre("NotHermitianPairing", "summand pairing h/f is not #-symmetric");
    f_product *= c.f;
    for (const auto& piece : crt_split(c, form.roots)) {
      d.add(classify_primary(piece));
      order_product *= piece.factor.poly;
    }
  }
  require(associates(order_product, f_product), "order product mismatch after splitting");
  return d;
}

// ---------------------------------------------------------------------
// Direct sum, negation, substitution.

inline LinkingForm direct_sum(const LinkingForm& a, const LinkingForm& b) {
  if (a.mode != b.mode) fail_pre("ModeMismatch", "direct sum of mixed-mode forms");
  if (!(a.ctx == b.ctx)) fail_pre("ConductorMismatch", "direct sum of mixed-conductor forms");
  LinkingForm r = a;
  r.summands.insert(r.summands.end(), b.summands.begin(), b.summands.end());
  r.roots.merge(b.roots);
  return r;
}

inline LinkingForm negate(const LinkingForm& a) {
  LinkingForm r = a;
  for (auto& c : r.summands) c.h = -c.h;
  return r;
}

// apply t -> eta t^w to every annihilator and numerator; the result is
// a complex-mode form with root hints rotated accordingly
inline LinkingForm substitute_form(const LinkingForm& a, const RootOfUnity& eta, long w = 1) {
  LinkingForm r;
  r.mode = Mode::Complex;
  r.ctx = a.ctx;
  if (a.ctx.N() % eta.den != 0) fail_pre("ConductorMismatch", "substitution root not in field");
  for (const auto& c : a.summands)
    r.summands.push_back(CyclicPairing{substitute(c.f, eta, w), substitute(c.h, eta, w), Mode::Complex});
  // transform root hints: solutions t of eta t^w = rho
  for (const auto& rho : a.roots.circle) {
    RootOfUnity base = rho * eta.inverse();
    long wa = std::labs(w);
    for (long j = 0; j < wa; ++j) {
      // w-th roots of base: angle (num/den + j)/w
      RootOfUnity cand(base.num + j * base.den, base.den * wa);
      if (w < 0) cand = cand.conj();
      r.roots.add_circle(cand);
    }
  }
  for (const auto& x : a.roots.off) r.roots.add_off(x); // filtered later by divisibility
  return r;
}

inline LinkingForm complexify(const LinkingForm& a) {
  LinkingForm r = a;
  r.mode = Mode::Complex;
  for (auto& c : r.summands) c.mode = Mode::Complex;
  return r;
}

// ---------------------------------------------------------------------
// Gram presentations and orthogonalization (used by from_matrix and the
// chain-level Blanchfield computation).

struct GramPresentation {
  Mode mode = Mode::Complex;
  FieldContext ctx;
  std::vector<LaurentPoly> ann;          // annihilators of the generators
  std::vector<std::vector<RatFn>> gram;  // lambda(g_i, g_j) in F(t)/Lambda
  RootSet roots;
};

namespace detail {

struct BlockElem {
  std::vector<LaurentPoly> coeff; // combination of the original generators
  long n = 0;                     // annihilator exponent of the piece
};

inline RatFn pair_elems(const GramPresentation& g, const BlockElem& x, const BlockElem& y) {
  RatFn acc = RatFn::zero(g.ctx);
  for (std::size_t a = 0; a < x.coeff.size(); ++a) {
    if (x.coeff[a].is_zero()) continue;
    for (std::size_t b = 0; b < y.coeff.size(); ++b) {
      if (y.coeff[b].is_zero()) continue;
      acc = acc + x.coeff[a] * g.gram[a][b] * sharp(y.coeff[b]);
    }
  }
  return acc;
}

inline long pole_order(const RatFn& v, const LaurentPoly& B) {
  if (v.is_zero()) return 0;
  long m = 0;
  LaurentPoly den = v.den();
  while (divides(B, den)) {
    den = exact_div(den, B);
    ++m;
  }
  return m;
}

// inverse of a unit c t^k
inline LaurentPoly unit_inverse(const LaurentPoly& u) {
  require(is_unit(u), "unit_inverse of non-unit");
  UnitSplit s = unit_split(u);
  return LaurentPoly::t_power(u.ctx(), -s.shift, s.lead.inverse());
}

// inverse of u modulo B^L (u coprime to B)
inline LaurentPoly inverse_mod(const LaurentPoly& u, const LaurentPoly& B, long L) {
  LaurentPoly modulus = B.pow(L);
  ExtGcd eg = ext_gcd(mod_window(u, modulus), modulus);
  require(is_unit(eg.g), "inverse_mod of non-coprime element");
  UnitSplit gs = unit_split(eg.g);
  return mod_window(eg.s * LaurentPoly::t_power(u.ctx(), -gs.shift, gs.lead.inverse()), modulus);
}

// Orthogonalize one primary block by local Gram-Schmidt. Pivots must
// realize the maximal pole order on the diagonal with annihilator
// exponent equal to that order; for non-singular blocks (the only
// multi-generator case the pipelines produce) this always succeeds,
// possibly after mixing a pair with a unit multiplier.
inline void orthogonalize_block(const GramPresentation& g, const LaurentPoly& B,
                                std::vector<BlockElem> elems, const PrimaryFactor& pf,
                                std::vector<PrimaryPiece>& out) {
  const FieldContext& ctx = g.ctx;
  while (elems.size() > 1) {
    long mstar = 0;
    for (std::size_t i = 0; i < elems.size(); ++i)
      for (std::size_t j = i; j < elems.size(); ++j)
        mstar = std::max(mstar, pole_order(pair_elems(g, elems[i], elems[j]), B));
    if (mstar == 0) break; // all pairings vanish; pieces already orthogonal
    auto pivot_ok = [&](std::size_t i) {
      return elems[i].n == mstar && pole_order(pair_elems(g, elems[i], elems[i]), B) == mstar;
    };
    std::optional<std::size_t> piv;
    for (std::size_t i = 0; i < elems.size() && !piv; ++i)
      if (pivot_ok(i)) piv = i;
    if (!piv) {
      // mix a maximal off-diagonal pair into a diagonal entry
      bool fixed = false;
      for (std::size_t i = 0; i < elems.size() && !fixed; ++i)
        for (std::size_t j = 0; j < elems.size() && !fixed; ++j) {
          if (i == j) continue;
          if (pole_order(pair_elems(g, elems[i], elems[j]), B) != mstar) continue;
          if (elems[i].n != mstar) continue;
          const FieldElement onef = FieldElement::one(ctx);
          const std::vector<LaurentPoly> deltas = {
              LaurentPoly::constant(ctx, onef), LaurentPoly::constant(ctx, -onef),
              LaurentPoly::constant(ctx, imaginary_unit(ctx)), LaurentPoly::variable(ctx)};
          for (const auto& delta : deltas) {
            if (g.mode == Mode::Real && !delta.conj_invariant_coeffs()) continue;
            BlockElem trial = elems[i];
            for (std::size_t c = 0; c < trial.coeff.size(); ++c)
              trial.coeff[c] += delta * elems[j].coeff[c];
            if (pole_order(pair_elems(g, trial, trial), B) == mstar) {
              elems[i] = std::move(trial);
              fixed = true;
              break;
            }
          }
        }
      require(fixed, "cannot orthogonalize primary block (degenerate pivot)");
      for (std::size_t i = 0; i < elems.size() && !piv; ++i)
        if (pivot_ok(i)) piv = i;
      require(piv.has_value(), "pivot still missing after mixing");
    }
    std::size_t p = *piv;
    RatFn lpp = pair_elems(g, elems[p], elems[p]);
    // lpp = num / (B^mstar * unit); invert num locally mod B^{n_p}
    LaurentPoly modulus = B.pow(elems[p].n);
    LaurentPoly e0p = exact_div(lpp.den(), B.pow(mstar));
    require(is_unit(e0p), "pivot denominator has stray factors");
    LaurentPoly a_inv = inverse_mod(lpp.num(), B, elems[p].n);
    for (std::size_t j = 0; j < elems.size(); ++j) {
      if (j == p) continue;
      RatFn ljp = pair_elems(g, elems[j], elems[p]);
      if (ljp.is_zero()) continue;
      long s = pole_order(ljp, B);
      LaurentPoly e0j = exact_div(ljp.den(), B.pow(s));
      require(is_unit(e0j), "pairing denominator has stray factors");
      // c = ljp / lpp in the local ring at B, reduced mod B^{n_p}
      LaurentPoly c = mod_window(
          ljp.num() * a_inv * B.pow(mstar - s) * e0p * unit_inverse(e0j), modulus);
      for (std::size_t cidx = 0; cidx < elems[j].coeff.size(); ++cidx)
        elems[j].coeff[cidx] -= c * elems[p].coeff[cidx];
      require(pair_elems(g, elems[j], elems[p]).is_zero(), "Gram-Schmidt failed to clear");
    }
    // emit the pivot as its own cyclic pairing
    RatFn lam = pair_elems(g, elems[p], elems[p]);
    LaurentPoly f = B.pow(elems[p].n);
    LaurentPoly h = lam.num() * exact_div(f, lam.den()); // den | B^n
    PrimaryPiece piece;
    piece.pairing = CyclicPairing{f, mod_window(h, f), g.mode};
    piece.factor = pf;
    piece.factor.poly = f;
    piece.factor.n = elems[p].n;
    out.push_back(std::move(piece));
    elems.erase(elems.begin() + static_cast<std::ptrdiff_t>(p));
  }
  for (const auto& e : elems) {
    RatFn lam = pair_elems(g, e, e);
    LaurentPoly f = B.pow(e.n);
    LaurentPoly h = lam.is_zero() ? LaurentPoly::zero(ctx) : lam.num() * exact_div(f, lam.den());
    PrimaryPiece piece;
    piece.pairing = CyclicPairing{f, mod_window(h, f), g.mode};
    piece.factor = pf;
    piece.factor.poly = f;
    piece.factor.n = e.n;
    out.push_back(std::move(piece));
  }
}

} // namespace detail

// Turn a Gram presentation into a weakly split linking form: CRT over
// the primary factors of each annihilator, then local Gram-Schmidt on
// each primary block. Cross-primary pairings must vanish.
inline LinkingForm orthogonalize(const GramPresentation& g) {
  const FieldContext& ctx = g.ctx;
  std::size_t ngen = g.ann.size();
  // split every generator into primary components
  struct Piece {
    detail::BlockElem elem;
    detail::PrimaryFactor factor;
  };
  std::vector<Piece> pieces;
  for (std::size_t i = 0; i < ngen; ++i) {
    auto factors = detail::factor_annihilator(g.ann[i], g.mode, g.roots);
    for (const auto& pf : factors) {
      LaurentPoly mult = LaurentPoly::one(ctx);
      if (factors.size() > 1) {
        LaurentPoly q = exact_div(g.ann[i], pf.poly);
        ExtGcd eg = ext_gcd(q, pf.poly);
        require(is_unit(eg.g), "CRT factors not coprime");
        UnitSplit gs = unit_split(eg.g);
        mult = q * eg.s * LaurentPoly::t_power(ctx, -gs.shift, gs.lead.inverse());
      }
      Piece p;
      p.elem.coeff.assign(ngen, LaurentPoly::zero(ctx));
      p.elem.coeff[i] = mult;
      p.elem.n = pf.off ? std::max(pf.a, pf.b) : pf.n;
      p.factor = pf;
      pieces.push_back(std::move(p));
    }
  }
  // distinct primary parts pair to zero; verify before grouping
  auto same_factor = [](const Piece& x, const Piece& y) {
    if (x.factor.off != y.factor.off) return false;
    if (x.factor.off) return compare_field_elements(x.factor.xi_off, y.factor.xi_off) == 0;
    return x.factor.xi == y.factor.xi;
  };
  for (std::size_t i = 0; i < pieces.size(); ++i)
    for (std::size_t j = i + 1; j < pieces.size(); ++j)
      if (!same_factor(pieces[i], pieces[j]))
        require(detail::pair_elems(g, pieces[i].elem, pieces[j].elem).is_zero(),
                "cross-primary pairing does not vanish");
  // group by primary factor identity
  std::vector<PrimaryPiece> result;
  std::vector<bool> consumed(pieces.size(), false);
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (consumed[i]) continue;
    std::vector<std::size_t> group{i};
    consumed[i] = true;
    for (std::size_t j = i + 1; j < pieces.size(); ++j) {
      if (consumed[j]) continue;
      if (same_factor(pieces[i], pieces[j])) {
        group.push_back(j);
        consumed[j] = true;
      }
    }
    if (pieces[i].factor.off) {
      // Off-circle pieces: the isometry type is determined by the module
      // together with the common pole order. Distinct generators at the
      // same root are emitted separately; their cross pairings must
      // vanish (the pipelines never produce coupled off-circle blocks).
      for (std::size_t ai = 0; ai < group.size(); ++ai)
        for (std::size_t bi = ai + 1; bi < group.size(); ++bi)
          require(detail::pair_elems(g, pieces[group[ai]].elem, pieces[group[bi]].elem).is_zero(),
                  "coupled off-circle block is not supported");
      for (std::size_t aidx : group) {
        RatFn lam = detail::pair_elems(g, pieces[aidx].elem, pieces[aidx].elem);
        const auto& pf = pieces[aidx].factor;
        LaurentPoly f = pf.poly;
        LaurentPoly h = lam.is_zero() ? LaurentPoly::zero(ctx) : lam.num() * exact_div(f, lam.den());
        PrimaryPiece piece;
        piece.pairing = CyclicPairing{f, mod_window(h, f), g.mode};
        piece.factor = pf;
        result.push_back(std::move(piece));
      }
      continue;
    }
    LaurentPoly B = basic_poly(ctx, g.mode, pieces[i].factor.xi);
    std::vector<detail::BlockElem> elems;
    for (std::size_t a : group) elems.push_back(pieces[a].elem);
    detail::orthogonalize_block(g, B, std::move(elems), pieces[i].factor, result);
  }
  LinkingForm form;
  form.mode = g.mode;
  form.ctx = ctx;
  form.roots = g.roots;
  for (auto& p : result) {
    form.roots.add_circle(p.factor.xi);
    form.summands.push_back(std::move(p.pairing));
  }
  return form;
}

// ---------------------------------------------------------------------
// Representable forms: (x, y) -> x^T A^{-1} y# on Lambda^n / A^T Lambda^n.

inline LinkingForm from_matrix(const LaurentMatrix& A, std::optional<Mode> mode_hint = std::nullopt,
                               const RootSet& roots = {}) {
  if (!hermitian_check(A)) fail_pre("NotHermitian", "from_matrix needs a Hermitian matrix");
  const FieldContext& ctx = A.ctx();
  Mode mode = mode_hint.value_or(Mode::Complex);
  if (!mode_hint) {
    bool real = true;
    for (long i = 0; i < A.rows(); ++i)
      for (long j = 0; j < A.cols(); ++j) real = real && A.at(i, j).conj_invariant_coeffs();
    mode = real ? Mode::Real : Mode::Complex;
  }
  SNFResult snf = smith_normal_form(A.transpose());
  auto diag = snf.diagonal();
  for (const auto& d : diag)
    if (d.is_zero()) fail_pre("SingularMatrix", "matrix determinant vanishes");
  // gram(i, j) = (V^{-T} U^sharp)_{ij} / d_i
  LaurentMatrix W = snf.Vinv.transpose();
  LaurentMatrix Us(ctx, A.rows(), A.cols());
  for (long i = 0; i < A.rows(); ++i)
    for (long j = 0; j < A.cols(); ++j) Us.at(i, j) = sharp(snf.U.at(i, j));
  W = W * Us;
  GramPresentation g;
  g.mode = mode;
  g.ctx = ctx;
  g.roots = roots;
  std::vector<long> keep;
  for (long i = 0; i < static_cast<long>(diag.size()); ++i)
    if (!is_unit(diag[static_cast<std::size_t>(i)])) keep.push_back(i);
  for (long i : keep) g.ann.push_back(diag[static_cast<std::size_t>(i)]);
  g.gram.assign(keep.size(), std::vector<RatFn>(keep.size(), RatFn::zero(ctx)));
  for (std::size_t a = 0; a < keep.size(); ++a)
    for (std::size_t b = 0; b < keep.size(); ++b)
      g.gram[a][b] = RatFn(W.at(keep[a], keep[b]), diag[static_cast<std::size_t>(keep[a])]);
  // Hermitian-ness of the presented pairing
  for (std::size_t a = 0; a < keep.size(); ++a)
    for (std::size_t b = 0; b < keep.size(); ++b)
      require(g.gram[a][b] == g.gram[b][a].sharped(), "from_matrix pairing is not Hermitian");
  return orthogonalize(g);
}

} // namespace linkform
