// Exact arithmetic in cyclotomic fields Q(zeta_N) with certified sign
// determination of real and imaginary parts.
//
// Elements are stored as rational coordinate vectors in the power basis
// 1, zeta, ..., zeta^{phi(N)-1} reduced modulo the N-th cyclotomic
// polynomial, so equality (and in particular the zero test behind every
// sign decision) is exact. Signs of nonzero values are decided by
// refining interval enclosures of the embedding zeta_N -> e^{2 pi i/N}.
#pragma once

#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include <mpfr.h>

#include "numeric.hpp"

namespace linkform {

// exp(2 pi i num/den), stored reduced with den >= 1 and 0 <= num < den.
struct RootOfUnity {
  long num = 0;
  long den = 1;

  RootOfUnity() = default;
  RootOfUnity(long n, long d) {
    if (d == 0) fail_input("BadRoot", "zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    n %= d;
    if (n < 0) n += d;
    long g = std::gcd(n, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    if (n == 0) d = 1;
    num = n;
    den = d;
  }

  bool is_one() const { return num == 0; }
  long order() const { return den; }
  RootOfUnity inverse() const { return RootOfUnity(-num, den); }
  RootOfUnity conj() const { return inverse(); }
  RootOfUnity operator*(const RootOfUnity& o) const {
    long d = lcm_long(den, o.den);
    return RootOfUnity(num * (d / den) + o.num * (d / o.den), d);
  }
  RootOfUnity pow(long e) const {
    long n = ((num % den) * (e % den)) % den;
    return RootOfUnity(n, den);
  }
  // angle as a fraction of a full turn, in [0,1)
  mpq_class angle() const { return mpq_class(num, den); }
  bool upper_half() const { return 2 * num < den && num != 0; } // Im > 0
  bool is_real() const { return num == 0 || 2 * num == den; }   // +-1

  friend bool operator==(const RootOfUnity& a, const RootOfUnity& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend bool operator!=(const RootOfUnity& a, const RootOfUnity& b) { return !(a == b); }
  friend bool operator<(const RootOfUnity& a, const RootOfUnity& b) {
    // order by angle; exact fraction comparison
    return a.num * b.den < b.num * a.den;
  }
};

namespace detail {

// One endpoint pair [lo,hi] of an interval with directed rounding.
struct Interval {
  mpfr_t lo, hi;
  explicit Interval(mpfr_prec_t prec) {
    mpfr_init2(lo, prec);
    mpfr_init2(hi, prec);
    mpfr_set_zero(lo, 1);
    mpfr_set_zero(hi, 1);
  }
  Interval(const Interval& o) {
    mpfr_init2(lo, mpfr_get_prec(o.lo));
    mpfr_init2(hi, mpfr_get_prec(o.hi));
    mpfr_set(lo, o.lo, MPFR_RNDD);
    mpfr_set(hi, o.hi, MPFR_RNDU);
  }
  Interval& operator=(const Interval& o) {
    if (this != &o) {
      mpfr_set_prec(lo, mpfr_get_prec(o.lo));
      mpfr_set_prec(hi, mpfr_get_prec(o.hi));
      mpfr_set(lo, o.lo, MPFR_RNDD);
      mpfr_set(hi, o.hi, MPFR_RNDU);
    }
    return *this;
  }
  ~Interval() {
    mpfr_clear(lo);
    mpfr_clear(hi);
  }

  void add(const Interval& o) {
    mpfr_add(lo, lo, o.lo, MPFR_RNDD);
    mpfr_add(hi, hi, o.hi, MPFR_RNDU);
  }
  // this += q * o for rational q
  void add_scaled(const mpq_class& q, const Interval& o, mpfr_prec_t prec) {
    if (q == 0) return;
    mpfr_t t1, t2;
    mpfr_init2(t1, prec);
    mpfr_init2(t2, prec);
    if (q > 0) {
      mpfr_mul_q(t1, o.lo, q.get_mpq_t(), MPFR_RNDD);
      mpfr_mul_q(t2, o.hi, q.get_mpq_t(), MPFR_RNDU);
    } else {
      mpfr_mul_q(t1, o.hi, q.get_mpq_t(), MPFR_RNDD);
      mpfr_mul_q(t2, o.lo, q.get_mpq_t(), MPFR_RNDU);
    }
    mpfr_add(lo, lo, t1, MPFR_RNDD);
    mpfr_add(hi, hi, t2, MPFR_RNDU);
    mpfr_clear(t1);
    mpfr_clear(t2);
  }
  int sign() const {
    if (mpfr_sgn(lo) > 0) return 1;
    if (mpfr_sgn(hi) < 0) return -1;
    return 0; // undecided
  }
  bool contains_zero() const { return mpfr_sgn(lo) <= 0 && mpfr_sgn(hi) >= 0; }
};

// cos/sin of 2 pi j/N enclosed rigorously: evaluate at the rounded-down
// angle and widen by the angle width plus rounding slack (|f'| <= 1).
inline void trig_enclosure(long j, long n, mpfr_prec_t prec, Interval& re, Interval& im) {
  mpfr_t pi_lo, pi_hi, a_lo, a_hi, mid, w, val, slack;
  mpfr_init2(pi_lo, prec);
  mpfr_init2(pi_hi, prec);
  mpfr_init2(a_lo, prec);
  mpfr_init2(a_hi, prec);
  mpfr_init2(mid, prec);
  mpfr_init2(w, prec);
  mpfr_init2(val, prec);
  mpfr_init2(slack, prec);

  mpfr_const_pi(pi_lo, MPFR_RNDD);
  mpfr_const_pi(pi_hi, MPFR_RNDU);
  mpq_class frac(2 * j, n);
  frac.canonicalize();
  mpfr_mul_q(a_lo, pi_lo, frac.get_mpq_t(), MPFR_RNDD);
  mpfr_mul_q(a_hi, pi_hi, frac.get_mpq_t(), MPFR_RNDU);
  mpfr_sub(w, a_hi, a_lo, MPFR_RNDU); // interval width

  // slack = w + 4 ulps of magnitude ~1
  mpfr_set_ui_2exp(slack, 4, -static_cast<long>(prec) + 2, MPFR_RNDU);
  mpfr_add(slack, slack, w, MPFR_RNDU);

  mpfr_cos(val, a_lo, MPFR_RNDN);
  mpfr_sub(re.lo, val, slack, MPFR_RNDD);
  mpfr_add(re.hi, val, slack, MPFR_RNDU);
  mpfr_sin(val, a_lo, MPFR_RNDN);
  mpfr_sub(im.lo, val, slack, MPFR_RNDD);
  mpfr_add(im.hi, val, slack, MPFR_RNDU);

  mpfr_clear(pi_lo);
  mpfr_clear(pi_hi);
  mpfr_clear(a_lo);
  mpfr_clear(a_hi);
  mpfr_clear(mid);
  mpfr_clear(w);
  mpfr_clear(val);
  mpfr_clear(slack);
}

struct CtxData {
  long N = 0;
  long D = 0;                                // phi(N)
  std::vector<mpz_class> phi_poly;           // Phi_N, degree D
  std::vector<std::vector<mpz_class>> power; // power[m] = zeta^m in basis, m in [0, N)

  // Interval enclosures of Re/Im(zeta^m) per precision, built on demand.
  struct TrigTable {
    std::vector<Interval> re, im;
  };
  mutable std::map<mpfr_prec_t, std::shared_ptr<const TrigTable>> trig_cache;
  mutable std::mutex trig_mutex;

  std::shared_ptr<const TrigTable> trig(mpfr_prec_t prec) const {
    {
      std::lock_guard<std::mutex> lock(trig_mutex);
      auto it = trig_cache.find(prec);
      if (it != trig_cache.end()) return it->second;
    }
    auto table = std::make_shared<TrigTable>();
    table->re.reserve(D);
    table->im.reserve(D);
    for (long m = 0; m < D; ++m) {
      Interval re(prec), im(prec);
      trig_enclosure(m, N, prec, re, im);
      table->re.push_back(re);
      table->im.push_back(im);
    }
    std::lock_guard<std::mutex> lock(trig_mutex);
    trig_cache[prec] = table;
    return table;
  }
};

inline long conductor_cap_from_env() {
  static long cap = [] {
    const char* s = std::getenv("LINKFORM_CONDUCTOR_CAP");
    if (!s) return -1L;
    return std::atol(s);
  }();
  return cap;
}

} // namespace detail

// Ambient field Q(zeta_N). N is always a multiple of 4 so that
// i = zeta^{N/4} is available for imaginary-part extraction.
class FieldContext {
public:
  FieldContext() = default;

  static FieldContext make(long n) {
    if (n <= 0 || n % 4 != 0) fail_input("InvalidConductor", "conductor must be a positive multiple of 4");
    long d = euler_phi(n);
    long cap = detail::conductor_cap_from_env();
    if (cap >= 0 && d > cap)
      fail_pre("ConductorCap", "phi(" + std::to_string(n) + ") = " + std::to_string(d) +
                                   " exceeds LINKFORM_CONDUCTOR_CAP");
    auto data = std::make_shared<detail::CtxData>();
    data->N = n;
    data->D = d;
    data->phi_poly = cyclotomic_polynomial(n);
    require(static_cast<long>(data->phi_poly.size()) == d + 1, "cyclotomic degree mismatch");
    // power rows: zeta^m reduced, m in [0, N)
    data->power.assign(static_cast<std::size_t>(n), {});
    std::vector<mpz_class> cur(static_cast<std::size_t>(d), 0);
    cur[0] = 1;
    for (long m = 0; m < n; ++m) {
      data->power[static_cast<std::size_t>(m)] = cur;
      // multiply by zeta: shift up, reduce the overflow coefficient
      mpz_class top = cur[static_cast<std::size_t>(d - 1)];
      for (long j = d - 1; j > 0; --j) cur[static_cast<std::size_t>(j)] = cur[static_cast<std::size_t>(j - 1)];
      cur[0] = 0;
      if (top != 0)
        for (long j = 0; j < d; ++j)
          cur[static_cast<std::size_t>(j)] -= top * data->phi_poly[static_cast<std::size_t>(j)];
    }
    FieldContext ctx;
    ctx.data_ = std::move(data);
    return ctx;
  }

  // smallest valid context containing all listed root orders
  static FieldContext for_orders(const std::vector<long>& orders) {
    long n = 4;
    for (long o : orders) n = lcm_long(n, o);
    return make(n);
  }

  bool valid() const { return static_cast<bool>(data_); }
  long N() const { return data_->N; }
  long degree() const { return data_->D; }
  const detail::CtxData& data() const { return *data_; }

  friend bool operator==(const FieldContext& a, const FieldContext& b) {
    return a.data_ == b.data_ || (a.valid() && b.valid() && a.N() == b.N());
  }
  friend bool operator!=(const FieldContext& a, const FieldContext& b) { return !(a == b); }

private:
  std::shared_ptr<const detail::CtxData> data_;
};

class FieldElement {
public:
  FieldElement() = default;
  FieldElement(FieldContext ctx, std::vector<mpq_class> coeffs)
      : ctx_(std::move(ctx)), c_(std::move(coeffs)) {
    require(static_cast<long>(c_.size()) == ctx_.degree(), "coefficient vector length");
  }

  static FieldElement zero(const FieldContext& ctx) {
    return FieldElement(ctx, std::vector<mpq_class>(static_cast<std::size_t>(ctx.degree())));
  }
  static FieldElement one(const FieldContext& ctx) { return from_rational(ctx, 1); }
  static FieldElement from_rational(const FieldContext& ctx, const mpq_class& q) {
    auto x = zero(ctx);
    x.c_[0] = q;
    return x;
  }

  const FieldContext& ctx() const { return ctx_; }
  const std::vector<mpq_class>& coeffs() const { return c_; }

  bool is_zero() const {
    for (const auto& q : c_)
      if (q != 0) return false;
    return true;
  }
  bool is_rational() const {
    for (std::size_t j = 1; j < c_.size(); ++j)
      if (c_[j] != 0) return false;
    return true;
  }
  // rational value when is_rational(); the constant coordinate otherwise
  const mpq_class& rational_part() const { return c_[0]; }

  friend bool operator==(const FieldElement& a, const FieldElement& b) {
    a.check_ctx(b);
    return a.c_ == b.c_;
  }
  friend bool operator!=(const FieldElement& a, const FieldElement& b) { return !(a == b); }

  FieldElement operator-() const {
    FieldElement r = *this;
    for (auto& q : r.c_) q = -q;
    return r;
  }
  FieldElement& operator+=(const FieldElement& o) {
    check_ctx(o);
    for (std::size_t j = 0; j < c_.size(); ++j) c_[j] += o.c_[j];
    return *this;
  }
  FieldElement& operator-=(const FieldElement& o) {
    check_ctx(o);
    for (std::size_t j = 0; j < c_.size(); ++j) c_[j] -= o.c_[j];
    return *this;
  }
  friend FieldElement operator+(FieldElement a, const FieldElement& b) { return a += b; }
  friend FieldElement operator-(FieldElement a, const FieldElement& b) { return a -= b; }

  FieldElement& operator*=(const mpq_class& q) {
    for (auto& x : c_) x *= q;
    return *this;
  }
  friend FieldElement operator*(FieldElement a, const mpq_class& q) { return a *= q; }
  friend FieldElement operator*(const mpq_class& q, FieldElement a) { return a *= q; }

  friend FieldElement operator*(const FieldElement& a, const FieldElement& b) {
    a.check_ctx(b);
    const auto& ctx = a.ctx_.data();
    long d = ctx.D;
    std::vector<mpq_class> conv(static_cast<std::size_t>(2 * d - 1));
    for (long i = 0; i < d; ++i) {
      if (a.c_[static_cast<std::size_t>(i)] == 0) continue;
      for (long j = 0; j < d; ++j) {
        if (b.c_[static_cast<std::size_t>(j)] == 0) continue;
        conv[static_cast<std::size_t>(i + j)] +=
            a.c_[static_cast<std::size_t>(i)] * b.c_[static_cast<std::size_t>(j)];
      }
    }
    std::vector<mpq_class> out(conv.begin(), conv.begin() + d);
    for (long m = d; m < 2 * d - 1; ++m) {
      const mpq_class& q = conv[static_cast<std::size_t>(m)];
      if (q == 0) continue;
      const auto& row = ctx.power[static_cast<std::size_t>(m % ctx.N)];
      for (long j = 0; j < d; ++j)
        if (row[static_cast<std::size_t>(j)] != 0) out[static_cast<std::size_t>(j)] += q * row[static_cast<std::size_t>(j)];
    }
    return FieldElement(a.ctx_, std::move(out));
  }
  FieldElement& operator*=(const FieldElement& o) { return *this = *this * o; }

  // ring automorphism zeta -> zeta^{-1}
  FieldElement conj() const {
    const auto& ctx = ctx_.data();
    auto out = std::vector<mpq_class>(static_cast<std::size_t>(ctx.D));
    for (long j = 0; j < ctx.D; ++j) {
      const mpq_class& q = c_[static_cast<std::size_t>(j)];
      if (q == 0) continue;
      const auto& row = ctx.power[static_cast<std::size_t>((ctx.N - j) % ctx.N)];
      for (long m = 0; m < ctx.D; ++m)
        if (row[static_cast<std::size_t>(m)] != 0) out[static_cast<std::size_t>(m)] += q * row[static_cast<std::size_t>(m)];
    }
    return FieldElement(ctx_, std::move(out));
  }

  bool is_conj_fixed() const { return conj() == *this; }

  FieldElement pow(long e) const {
    if (e < 0) return inverse().pow(-e);
    FieldElement r = one(ctx_);
    FieldElement base = *this;
    while (e > 0) {
      if (e & 1) r *= base;
      base *= base;
      e >>= 1;
    }
    return r;
  }

  // Multiplicative inverse via the extended Euclidean algorithm on the
  // polynomial representative and Phi_N over Q. Remainders are kept monic
  // to tame coefficient growth.
  FieldElement inverse() const {
    if (is_zero()) fail_pre("DivisionByZero", "inverse of zero field element");
    const auto& ctx = ctx_.data();
    using Poly = std::vector<mpq_class>;
    auto deg = [](const Poly& p) -> long {
      for (std::size_t i = p.size(); i-- > 0;)
        if (p[i] != 0) return static_cast<long>(i);
      return -1;
    };
    auto trim = [&](Poly& p) {
      while (!p.empty() && p.back() == 0) p.pop_back();
    };
    Poly r0(ctx.phi_poly.size());
    for (std::size_t i = 0; i < ctx.phi_poly.size(); ++i) r0[i] = mpq_class(ctx.phi_poly[i]);
    Poly r1(c_.begin(), c_.end());
    trim(r1);
    Poly s0, s1{mpq_class(1)};
    while (deg(r1) > 0) {
      // divmod r0 by r1 (r1 made monic first, tracked in s1)
      mpq_class lead = r1[static_cast<std::size_t>(deg(r1))];
      if (lead != 1) {
        mpq_class inv_lead = 1 / lead;
        for (auto& q : r1) q *= inv_lead;
        for (auto& q : s1) q *= inv_lead;
      }
      long d1 = deg(r1);
      Poly rem = r0, srem = s0;
      long dr;
      while ((dr = deg(rem)) >= d1) {
        mpq_class q = rem[static_cast<std::size_t>(dr)];
        long shift = dr - d1;
        for (long j = 0; j <= d1; ++j)
          rem[static_cast<std::size_t>(j + shift)] -= q * r1[static_cast<std::size_t>(j)];
        if (static_cast<long>(srem.size()) < shift + static_cast<long>(s1.size()))
          srem.resize(static_cast<std::size_t>(shift + static_cast<long>(s1.size())));
        for (std::size_t j = 0; j < s1.size(); ++j)
          srem[static_cast<std::size_t>(shift) + j] -= q * s1[j];
      }
      trim(rem);
      trim(srem);
      r0.swap(r1);
      s0.swap(s1);
      r1 = std::move(rem);
      s1 = std::move(srem);
    }
    require(deg(r1) == 0, "gcd with Phi_N should be constant");
    mpq_class c = r1[0];
    std::vector<mpq_class> out(static_cast<std::size_t>(ctx.D));
    for (std::size_t i = 0; i < s1.size() && i < out.size(); ++i) out[i] = s1[i] / c;
    require(s1.size() <= out.size(), "inverse degree overflow");
    return FieldElement(ctx_, std::move(out));
  }

  friend FieldElement operator/(const FieldElement& a, const FieldElement& b) {
    return a * b.inverse();
  }

  // re-embed into a larger conductor (N | N')
  FieldElement extend(const FieldContext& bigger) const {
    if (bigger == ctx_) return *this;
    long n = ctx_.N(), m = bigger.N();
    if (m % n != 0) fail_pre("ConductorMismatch", "target conductor not a multiple");
    long step = m / n;
    FieldElement out = zero(bigger);
    const auto& big = bigger.data();
    for (long j = 0; j < ctx_.degree(); ++j) {
      const mpq_class& q = c_[static_cast<std::size_t>(j)];
      if (q == 0) continue;
      const auto& row = big.power[static_cast<std::size_t>((j * step) % m)];
      for (long t = 0; t < big.D; ++t)
        if (row[static_cast<std::size_t>(t)] != 0) out.c_[static_cast<std::size_t>(t)] += q * row[static_cast<std::size_t>(t)];
    }
    return out;
  }

  void check_ctx(const FieldElement& o) const {
    if (!(ctx_ == o.ctx_)) fail_pre("ConductorMismatch", "mixed field contexts");
  }

private:
  FieldContext ctx_;
  std::vector<mpq_class> c_;
};

inline FieldElement embed_root(const FieldContext& ctx, const RootOfUnity& r) {
  if (ctx.N() % r.den != 0)
    fail_pre("ConductorMismatch",
             "root of order " + std::to_string(r.den) + " not in Q(zeta_" + std::to_string(ctx.N()) + ")");
  long m = (ctx.N() / r.den) * r.num % ctx.N();
  const auto& row = ctx.data().power[static_cast<std::size_t>(m)];
  std::vector<mpq_class> coeffs(static_cast<std::size_t>(ctx.degree()));
  for (long j = 0; j < ctx.degree(); ++j) coeffs[static_cast<std::size_t>(j)] = mpq_class(row[static_cast<std::size_t>(j)]);
  return FieldElement(ctx, std::move(coeffs));
}

inline FieldElement imaginary_unit(const FieldContext& ctx) {
  return embed_root(ctx, RootOfUnity(1, 4));
}

namespace detail {

// Enclose Re(x) and Im(x) at the given precision.
inline void enclose(const FieldElement& x, mpfr_prec_t prec, Interval& re, Interval& im) {
  const auto& ctx = x.ctx().data();
  auto table = ctx.trig(prec);
  for (long j = 0; j < ctx.D; ++j) {
    const mpq_class& q = x.coeffs()[static_cast<std::size_t>(j)];
    if (q == 0) continue;
    re.add_scaled(q, table->re[static_cast<std::size_t>(j)], prec);
    im.add_scaled(q, table->im[static_cast<std::size_t>(j)], prec);
  }
}

} // namespace detail

// Exact sign of a real (conj-fixed) element under zeta_N -> e^{2 pi i/N}.
// Zero is decided symbolically; otherwise interval refinement terminates
// because the embedding of a nonzero element is nonzero.
inline int real_sign(const FieldElement& x) {
  if (!x.is_conj_fixed()) fail_pre("NotReal", "real_sign of a non-real element");
  if (x.is_zero()) return 0;
  if (x.is_rational()) return sgn(x.rational_part());
  for (mpfr_prec_t prec = 64; prec <= (1 << 22); prec *= 2) {
    detail::Interval re(prec), im(prec);
    detail::enclose(x, prec, re, im);
    require(im.contains_zero(), "real element with nonzero imaginary enclosure");
    int s = re.sign();
    if (s != 0) return s;
  }
  fail_internal("real_sign failed to converge");
}

inline int imag_sign(const FieldElement& x) {
  FieldElement diff = x - x.conj();
  if (diff.is_zero()) return 0;
  // (x - conj x) / (2i) = (x - conj x) * (-i/2)
  FieldElement v = diff * imaginary_unit(x.ctx()) * mpq_class(-1, 2);
  return real_sign(v);
}

} // namespace linkform
