// Laurent polynomials over a cyclotomic field, with the involution
// p = sum a_i t^i  ->  p# = sum conj(a_i) t^{-i}.
#pragma once

#include <map>
#include <optional>
#include <utility>

#include "cyclotomic.hpp"

namespace linkform {

enum class Mode { Real, Complex };

class LaurentPoly {
public:
  LaurentPoly() = default;
  explicit LaurentPoly(FieldContext ctx) : ctx_(std::move(ctx)) {}

  static LaurentPoly zero(const FieldContext& ctx) { return LaurentPoly(ctx); }
  static LaurentPoly constant(const FieldContext& ctx, FieldElement c) {
    LaurentPoly p(ctx);
    p.set(0, std::move(c));
    return p;
  }
  static LaurentPoly one(const FieldContext& ctx) {
    return constant(ctx, FieldElement::one(ctx));
  }
  static LaurentPoly t_power(const FieldContext& ctx, long e, FieldElement c) {
    LaurentPoly p(ctx);
    p.set(e, std::move(c));
    return p;
  }
  static LaurentPoly variable(const FieldContext& ctx) {
    return t_power(ctx, 1, FieldElement::one(ctx));
  }

  const FieldContext& ctx() const { return ctx_; }
  const std::map<long, FieldElement>& terms() const { return terms_; }

  bool is_zero() const { return terms_.empty(); }
  long min_exp() const {
    require(!terms_.empty(), "min_exp of zero polynomial");
    return terms_.begin()->first;
  }
  long max_exp() const {
    require(!terms_.empty(), "max_exp of zero polynomial");
    return terms_.rbegin()->first;
  }
  // degree after stripping the t-power unit; -1 for zero
  long span() const { return terms_.empty() ? -1 : max_exp() - min_exp(); }

  FieldElement coeff(long e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? FieldElement::zero(ctx_) : it->second;
  }
  void set(long e, FieldElement c) {
    if (c.is_zero())
      terms_.erase(e);
    else
      terms_.insert_or_assign(e, std::move(c));
  }
  void add_term(long e, const FieldElement& c) {
    auto it = terms_.find(e);
    if (it == terms_.end()) {
      if (!c.is_zero()) terms_.emplace(e, c);
    } else {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  friend bool operator==(const LaurentPoly& a, const LaurentPoly& b) {
    return a.terms_ == b.terms_;
  }
  friend bool operator!=(const LaurentPoly& a, const LaurentPoly& b) { return !(a == b); }

  LaurentPoly operator-() const {
    LaurentPoly r(ctx_);
    for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
    return r;
  }
  friend LaurentPoly operator+(const LaurentPoly& a, const LaurentPoly& b) {
    LaurentPoly r = a;
    for (const auto& [e, c] : b.terms_) r.add_term(e, c);
    return r;
  }
  friend LaurentPoly operator-(const LaurentPoly& a, const LaurentPoly& b) {
    LaurentPoly r = a;
    for (const auto& [e, c] : b.terms_) r.add_term(e, -c);
    return r;
  }
  friend LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
    LaurentPoly r(a.ctx_);
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) r.add_term(ea + eb, ca * cb);
    return r;
  }
  LaurentPoly& operator+=(const LaurentPoly& o) { return *this = *this + o; }
  LaurentPoly& operator-=(const LaurentPoly& o) { return *this = *this - o; }
  LaurentPoly& operator*=(const LaurentPoly& o) { return *this = *this * o; }

  friend LaurentPoly operator*(const LaurentPoly& a, const FieldElement& c) {
    LaurentPoly r(a.ctx_);
    for (const auto& [e, x] : a.terms_) r.add_term(e, x * c);
    return r;
  }
  friend LaurentPoly operator*(const FieldElement& c, const LaurentPoly& a) { return a * c; }
  friend LaurentPoly operator*(const LaurentPoly& a, const mpq_class& q) {
    LaurentPoly r(a.ctx_);
    if (q != 0)
      for (const auto& [e, x] : a.terms_) r.terms_.emplace(e, x * q);
    return r;
  }

  LaurentPoly shifted(long k) const {
    LaurentPoly r(ctx_);
    for (const auto& [e, c] : terms_) r.terms_.emplace(e + k, c);
    return r;
  }

  LaurentPoly pow(long e) const {
    require(e >= 0, "pow with negative exponent");
    LaurentPoly r = one(ctx_);
    LaurentPoly base = *this;
    while (e > 0) {
      if (e & 1) r *= base;
      base *= base;
      e >>= 1;
    }
    return r;
  }

  LaurentPoly extend(const FieldContext& bigger) const {
    if (bigger == ctx_) return *this;
    LaurentPoly r(bigger);
    for (const auto& [e, c] : terms_) r.terms_.emplace(e, c.extend(bigger));
    return r;
  }

  bool conj_invariant_coeffs() const {
    for (const auto& [e, c] : terms_)
      if (!c.is_conj_fixed()) return false;
    return true;
  }

private:
  FieldContext ctx_;
  std::map<long, FieldElement> terms_;
};

// the involution #
inline LaurentPoly sharp(const LaurentPoly& p) {
  LaurentPoly r(p.ctx());
  for (const auto& [e, c] : p.terms()) r.set(-e, c.conj());
  return r;
}

inline bool is_symmetric(const LaurentPoly& p) { return sharp(p) == p; }

// evaluation at a root of unity (exact, no field inversions)
inline FieldElement eval_at_root(const LaurentPoly& p, const RootOfUnity& r) {
  FieldElement acc = FieldElement::zero(p.ctx());
  for (const auto& [e, c] : p.terms()) acc += c * embed_root(p.ctx(), r.pow(e));
  return acc;
}

// evaluation at a general field element (inverse computed once if needed)
inline FieldElement eval_at(const LaurentPoly& p, const FieldElement& x) {
  FieldElement acc = FieldElement::zero(p.ctx());
  if (p.is_zero()) return acc;
  std::optional<FieldElement> xinv;
  std::map<long, FieldElement> pows;
  auto power_of = [&](long e) -> FieldElement {
    auto it = pows.find(e);
    if (it != pows.end()) return it->second;
    FieldElement v = FieldElement::one(p.ctx());
    if (e > 0)
      v = x.pow(e);
    else if (e < 0) {
      if (!xinv) xinv = x.inverse();
      v = xinv->pow(-e);
    }
    pows.emplace(e, v);
    return v;
  };
  for (const auto& [e, c] : p.terms()) acc += c * power_of(e);
  return acc;
}

// p as a plain polynomial with nonzero constant term: p = t^shift * poly
struct FPoly {
  std::vector<FieldElement> c; // c[0] != 0 unless empty
  long shift = 0;
};

inline FPoly to_fpoly(const LaurentPoly& p) {
  FPoly f;
  if (p.is_zero()) return f;
  f.shift = p.min_exp();
  f.c.assign(static_cast<std::size_t>(p.span() + 1), FieldElement::zero(p.ctx()));
  for (const auto& [e, coef] : p.terms()) f.c[static_cast<std::size_t>(e - f.shift)] = coef;
  return f;
}

inline LaurentPoly from_fpoly(const FieldContext& ctx, const FPoly& f) {
  LaurentPoly p(ctx);
  for (std::size_t i = 0; i < f.c.size(); ++i) p.set(f.shift + static_cast<long>(i), f.c[i]);
  return p;
}

// canonical representative: monic polynomial with nonzero constant term.
// p = unit * canonical, where unit = c t^k.
struct UnitSplit {
  LaurentPoly canonical;
  FieldElement lead;
  long shift = 0;
};

inline UnitSplit unit_split(const LaurentPoly& p) {
  require(!p.is_zero(), "unit_split of zero");
  UnitSplit s;
  s.shift = p.min_exp();
  s.lead = p.coeff(p.max_exp());
  FieldElement inv = s.lead.inverse();
  LaurentPoly c(p.ctx());
  for (const auto& [e, coef] : p.terms()) c.set(e - s.shift, coef * inv);
  s.canonical = std::move(c);
  return s;
}

inline LaurentPoly canonical(const LaurentPoly& p) {
  if (p.is_zero()) return p;
  return unit_split(p).canonical;
}

// equality up to units c t^k
inline bool associates(const LaurentPoly& a, const LaurentPoly& b) {
  if (a.is_zero() || b.is_zero()) return a.is_zero() && b.is_zero();
  return canonical(a) == canonical(b);
}

inline bool is_unit(const LaurentPoly& p) { return !p.is_zero() && p.span() == 0; }

// division with remainder in F[t] after clearing t-powers:
// a = q b + r with span(r) < span(b).
inline std::pair<LaurentPoly, LaurentPoly> divmod_field(const LaurentPoly& a,
                                                        const LaurentPoly& b) {
  if (b.is_zero()) fail_pre("DivisionByZero", "divmod by zero polynomial");
  const FieldContext& ctx = a.ctx();
  if (a.is_zero()) return {LaurentPoly::zero(ctx), LaurentPoly::zero(ctx)};
  FPoly fa = to_fpoly(a), fb = to_fpoly(b);
  long db = static_cast<long>(fb.c.size()) - 1;
  FieldElement lead_inv = fb.c.back().inverse();
  std::vector<FieldElement> rem = fa.c;
  std::vector<FieldElement> quot;
  long dq = static_cast<long>(rem.size()) - 1 - db;
  if (dq >= 0) quot.assign(static_cast<std::size_t>(dq + 1), FieldElement::zero(ctx));
  for (long i = dq; i >= 0; --i) {
    FieldElement top = rem[static_cast<std::size_t>(i + db)];
    if (top.is_zero()) continue;
    FieldElement q = top * lead_inv;
    quot[static_cast<std::size_t>(i)] = q;
    for (long j = 0; j <= db; ++j)
      rem[static_cast<std::size_t>(i + j)] -= q * fb.c[static_cast<std::size_t>(j)];
  }
  LaurentPoly qp(ctx), rp(ctx);
  for (std::size_t i = 0; i < quot.size(); ++i)
    qp.set(static_cast<long>(i) + fa.shift - fb.shift, quot[i]);
  for (long j = 0; j < db && j < static_cast<long>(rem.size()); ++j)
    rp.set(static_cast<long>(j) + fa.shift, rem[static_cast<std::size_t>(j)]);
  return {qp, rp};
}

inline LaurentPoly poly_mod(const LaurentPoly& a, const LaurentPoly& b) {
  return divmod_field(a, b).second;
}

// Canonical representative of a modulo b * Lambda: the unique element
// with exponents in [0, span(b)). Unlike the F[t]-style remainder this
// is a class invariant (t is invertible modulo b).
inline LaurentPoly mod_window(const LaurentPoly& a, const LaurentPoly& b) {
  if (b.is_zero()) fail_pre("DivisionByZero", "mod_window by zero polynomial");
  LaurentPoly den = canonical(b);
  long d = den.span();
  if (d == 0) return LaurentPoly::zero(a.ctx());
  LaurentPoly r = a;
  FieldElement c0inv = den.coeff(0).inverse();
  while (!r.is_zero() && r.max_exp() >= d) {
    long top = r.max_exp();
    // den is monic at exponent d
    r -= den.shifted(top - d) * r.coeff(top);
  }
  while (!r.is_zero() && r.min_exp() < 0) {
    long bot = r.min_exp();
    r -= den.shifted(bot) * (r.coeff(bot) * c0inv);
  }
  return r;
}

inline LaurentPoly exact_div(const LaurentPoly& a, const LaurentPoly& b) {
  auto [q, r] = divmod_field(a, b);
  require(r.is_zero(), "exact_div with nonzero remainder");
  return q;
}

inline bool divides(const LaurentPoly& b, const LaurentPoly& a) {
  if (a.is_zero()) return true;
  if (b.is_zero()) return false;
  return divmod_field(a, b).second.is_zero();
}

// monic gcd
inline LaurentPoly poly_gcd(LaurentPoly a, LaurentPoly b) {
  while (!b.is_zero()) {
    LaurentPoly r = divmod_field(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  if (a.is_zero()) return a;
  return canonical(a);
}

// extended gcd: returns (g, s, t) with s a + t b = g, g monic (or zero)
struct ExtGcd {
  LaurentPoly g, s, t;
};

inline ExtGcd ext_gcd(const LaurentPoly& a, const LaurentPoly& b) {
  const FieldContext& ctx = a.ctx();
  LaurentPoly r0 = a, r1 = b;
  LaurentPoly s0 = LaurentPoly::one(ctx), s1 = LaurentPoly::zero(ctx);
  LaurentPoly t0 = LaurentPoly::zero(ctx), t1 = LaurentPoly::one(ctx);
  while (!r1.is_zero()) {
    // keep remainders canonical; this tames coefficient growth
    UnitSplit u = unit_split(r1);
    if (u.shift != 0 || !(u.lead == FieldElement::one(ctx))) {
      LaurentPoly uinv = LaurentPoly::t_power(ctx, -u.shift, u.lead.inverse());
      r1 = u.canonical;
      s1 = s1 * uinv;
      t1 = t1 * uinv;
    }
    auto [q, r2] = divmod_field(r0, r1);
    LaurentPoly s2 = s0 - q * s1;
    LaurentPoly t2 = t0 - q * t1;
    r0 = std::move(r1);
    r1 = std::move(r2);
    s0 = std::move(s1);
    s1 = std::move(s2);
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  ExtGcd out;
  if (r0.is_zero()) {
    out.g = r0;
    out.s = s0;
    out.t = t0;
    return out;
  }
  UnitSplit u = unit_split(r0);
  FieldElement inv = u.lead.inverse();
  LaurentPoly unit_inv = LaurentPoly::t_power(ctx, -u.shift, inv);
  out.g = u.canonical;
  out.s = s0 * unit_inv;
  out.t = t0 * unit_inv;
  return out;
}

inline LaurentPoly poly_lcm(const LaurentPoly& a, const LaurentPoly& b) {
  if (a.is_zero() || b.is_zero()) return LaurentPoly::zero(a.ctx());
  return canonical(exact_div(a * b, poly_gcd(a, b)));
}

// multiplicity of (t - xi) in p, together with the cofactor p0 with
// p0(xi) != 0. xi is given as an embedded field element.
struct OrderAt {
  long order = 0;
  LaurentPoly cofactor;
};

inline OrderAt order_at_value(const LaurentPoly& p, const FieldElement& xi) {
  if (p.is_zero()) fail_pre("ZeroPolynomial", "order_at of zero polynomial");
  const FieldContext& ctx = p.ctx();
  OrderAt res;
  FPoly f = to_fpoly(p);
  // synthetic division by (t - xi) while the value vanishes
  while (true) {
    FieldElement val = FieldElement::zero(ctx);
    for (std::size_t i = f.c.size(); i-- > 0;) val = val * xi + f.c[i];
    if (!val.is_zero()) break;
    std::vector<FieldElement> q(f.c.size() - 1, FieldElement::zero(ctx));
    FieldElement carry = FieldElement::zero(ctx);
    for (std::size_t i = f.c.size(); i-- > 1;) {
      carry = f.c[i] + carry * xi;
      q[i - 1] = carry;
    }
    f.c = std::move(q);
    ++res.order;
    require(!f.c.empty(), "order_at: polynomial exhausted");
  }
  LaurentPoly cof(ctx);
  for (std::size_t i = 0; i < f.c.size(); ++i) cof.set(f.shift + static_cast<long>(i), f.c[i]);
  res.cofactor = std::move(cof);
  return res;
}

inline OrderAt order_at(const LaurentPoly& p, const RootOfUnity& xi) {
  return order_at_value(p, embed_root(p.ctx(), xi));
}

// p(eta t^w); ring homomorphism commuting with # for |eta| = 1.
inline LaurentPoly substitute(const LaurentPoly& p, const RootOfUnity& eta, long w) {
  if (w == 0) fail_pre("ZeroWinding", "substitute with w = 0");
  if (p.ctx().N() % eta.den != 0)
    fail_pre("ConductorMismatch", "substitution root not in coefficient field");
  LaurentPoly r(p.ctx());
  for (const auto& [e, c] : p.terms())
    r.add_term(w * e, c * embed_root(p.ctx(), eta.pow(e)));
  return r;
}

// Basic polynomials. Real mode: t -+ 1 at xi = +-1 and
// (t - xi)(1 - conj(xi) t^{-1}) = t - 2 Re(xi) + t^{-1} otherwise
// (xi must be in the closed upper half circle). Complex mode: t - xi.
inline LaurentPoly basic_poly(const FieldContext& ctx, Mode mode, const RootOfUnity& xi) {
  LaurentPoly t = LaurentPoly::variable(ctx);
  if (mode == Mode::Complex)
    return t - LaurentPoly::constant(ctx, embed_root(ctx, xi));
  if (xi.is_real())
    return t - LaurentPoly::constant(ctx, FieldElement::from_rational(ctx, xi.num == 0 ? 1 : -1));
  if (!xi.upper_half())
    fail_pre("RealModeHalfPlane", "real basic polynomial requires Im(xi) >= 0");
  FieldElement trace = embed_root(ctx, xi) + embed_root(ctx, xi.conj());
  LaurentPoly r = t - LaurentPoly::constant(ctx, trace);
  r.add_term(-1, FieldElement::one(ctx));
  return r;
}

// weak symmetry: p# = u p for a unit u = c t^k; returns u if it exists
inline std::optional<LaurentPoly> weakly_symmetric_unit(const LaurentPoly& p) {
  if (p.is_zero()) return LaurentPoly::zero(p.ctx());
  LaurentPoly ps = sharp(p);
  if (ps.span() != p.span()) return std::nullopt;
  long k = ps.min_exp() - p.min_exp();
  FieldElement c = ps.coeff(ps.min_exp()) / p.coeff(p.min_exp());
  LaurentPoly u = LaurentPoly::t_power(p.ctx(), k, c);
  if (u * p == ps) return u;
  return std::nullopt;
}

} // namespace linkform
