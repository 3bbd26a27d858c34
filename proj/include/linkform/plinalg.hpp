// Linear algebra over the Laurent ring and over the scalar field:
// Smith normal form with invertible transformations, Hermitian congruence
// diagonalization, exact signatures at (and next to) roots of unity.
#pragma once

#include <algorithm>
#include <functional>

#include "laurent.hpp"

namespace linkform {

class LaurentMatrix {
public:
  LaurentMatrix() = default;
  LaurentMatrix(FieldContext ctx, long rows, long cols)
      : ctx_(std::move(ctx)), rows_(rows), cols_(cols),
        e_(static_cast<std::size_t>(rows * cols), LaurentPoly::zero(ctx_)) {}

  static LaurentMatrix identity(const FieldContext& ctx, long n) {
    LaurentMatrix m(ctx, n, n);
    for (long i = 0; i < n; ++i) m.at(i, i) = LaurentPoly::one(ctx);
    return m;
  }

  long rows() const { return rows_; }
  long cols() const { return cols_; }
  const FieldContext& ctx() const { return ctx_; }

  LaurentPoly& at(long i, long j) { return e_[static_cast<std::size_t>(i * cols_ + j)]; }
  const LaurentPoly& at(long i, long j) const { return e_[static_cast<std::size_t>(i * cols_ + j)]; }

  friend bool operator==(const LaurentMatrix& a, const LaurentMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.e_ == b.e_;
  }

  friend LaurentMatrix operator*(const LaurentMatrix& a, const LaurentMatrix& b) {
    require(a.cols_ == b.rows_, "matrix product shape");
    LaurentMatrix r(a.ctx_, a.rows_, b.cols_);
    for (long i = 0; i < a.rows_; ++i)
      for (long k = 0; k < a.cols_; ++k) {
        if (a.at(i, k).is_zero()) continue;
        for (long j = 0; j < b.cols_; ++j) {
          if (b.at(k, j).is_zero()) continue;
          r.at(i, j) += a.at(i, k) * b.at(k, j);
        }
      }
    return r;
  }
  friend LaurentMatrix operator+(const LaurentMatrix& a, const LaurentMatrix& b) {
    require(a.rows_ == b.rows_ && a.cols_ == b.cols_, "matrix sum shape");
    LaurentMatrix r = a;
    for (std::size_t i = 0; i < r.e_.size(); ++i) r.e_[i] += b.e_[i];
    return r;
  }
  friend LaurentMatrix operator-(const LaurentMatrix& a, const LaurentMatrix& b) {
    require(a.rows_ == b.rows_ && a.cols_ == b.cols_, "matrix diff shape");
    LaurentMatrix r = a;
    for (std::size_t i = 0; i < r.e_.size(); ++i) r.e_[i] -= b.e_[i];
    return r;
  }
  friend LaurentMatrix operator*(const LaurentPoly& p, const LaurentMatrix& a) {
    LaurentMatrix r = a;
    for (auto& x : r.e_) x = p * x;
    return r;
  }

  LaurentMatrix transpose() const {
    LaurentMatrix r(ctx_, cols_, rows_);
    for (long i = 0; i < rows_; ++i)
      for (long j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
    return r;
  }
  // # applied entrywise, then transpose (the adjoint for row-vector actions)
  LaurentMatrix sharp_transpose() const {
    LaurentMatrix r(ctx_, cols_, rows_);
    for (long i = 0; i < rows_; ++i)
      for (long j = 0; j < cols_; ++j) r.at(j, i) = sharp(at(i, j));
    return r;
  }
  bool is_zero() const {
    for (const auto& x : e_)
      if (!x.is_zero()) return false;
    return true;
  }
  LaurentMatrix extend(const FieldContext& bigger) const {
    LaurentMatrix r(bigger, rows_, cols_);
    for (std::size_t i = 0; i < e_.size(); ++i) r.e_[i] = e_[i].extend(bigger);
    return r;
  }

private:
  FieldContext ctx_;
  long rows_ = 0, cols_ = 0;
  std::vector<LaurentPoly> e_;
};

inline bool hermitian_check(const LaurentMatrix& a) {
  if (a.rows() != a.cols()) return false;
  return a.sharp_transpose() == a;
}

// determinant by cofactor expansion; matrices here stay small
inline LaurentPoly det(const LaurentMatrix& a) {
  require(a.rows() == a.cols(), "det of non-square matrix");
  long n = a.rows();
  if (n == 0) return LaurentPoly::one(a.ctx());
  if (n == 1) return a.at(0, 0);
  LaurentPoly acc = LaurentPoly::zero(a.ctx());
  for (long j = 0; j < n; ++j) {
    if (a.at(0, j).is_zero()) continue;
    LaurentMatrix minor(a.ctx(), n - 1, n - 1);
    for (long i = 1; i < n; ++i) {
      long cc = 0;
      for (long c = 0; c < n; ++c) {
        if (c == j) continue;
        minor.at(i - 1, cc++) = a.at(i, c);
      }
    }
    LaurentPoly term = a.at(0, j) * det(minor);
    if (j % 2 == 0)
      acc += term;
    else
      acc -= term;
  }
  return acc;
}

// A = U D V with U, V invertible over the Laurent ring, D diagonal with
// d_1 | d_2 | ..., zeros last, nonzero entries canonical (monic, nonzero
// constant term). Uinv and Vinv are maintained alongside.
struct SNFResult {
  LaurentMatrix U, Uinv, D, V, Vinv;
  LaurentPoly det_u_unit, det_v_unit;

  std::vector<LaurentPoly> diagonal() const {
    std::vector<LaurentPoly> d;
    long n = std::min(D.rows(), D.cols());
    d.reserve(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) d.push_back(D.at(i, i));
    return d;
  }
  long rank() const {
    long r = 0;
    for (const auto& d : diagonal())
      if (!d.is_zero()) ++r;
    return r;
  }
};

namespace detail {

struct SNFWork {
  LaurentMatrix D, U, Uinv, V, Vinv;
  LaurentPoly det_u, det_v;

  explicit SNFWork(const LaurentMatrix& a)
      : D(a), U(LaurentMatrix::identity(a.ctx(), a.rows())),
        Uinv(LaurentMatrix::identity(a.ctx(), a.rows())),
        V(LaurentMatrix::identity(a.ctx(), a.cols())),
        Vinv(LaurentMatrix::identity(a.ctx(), a.cols())),
        det_u(LaurentPoly::one(a.ctx())), det_v(LaurentPoly::one(a.ctx())) {}

  // D <- L D with L = swap(i,j): U <- U L^{-1}, Uinv <- L Uinv
  void row_swap(long i, long j) {
    if (i == j) return;
    for (long c = 0; c < D.cols(); ++c) std::swap(D.at(i, c), D.at(j, c));
    for (long r = 0; r < U.rows(); ++r) std::swap(U.at(r, i), U.at(r, j));
    for (long c = 0; c < Uinv.cols(); ++c) std::swap(Uinv.at(i, c), Uinv.at(j, c));
    det_u = -det_u;
  }
  void col_swap(long i, long j) {
    if (i == j) return;
    for (long r = 0; r < D.rows(); ++r) std::swap(D.at(r, i), D.at(r, j));
    for (long c = 0; c < V.cols(); ++c) std::swap(V.at(i, c), V.at(j, c));
    for (long r = 0; r < Vinv.rows(); ++r) std::swap(Vinv.at(r, i), Vinv.at(r, j));
    det_v = -det_v;
  }
  // row i += q * row j
  void row_addmul(long i, long j, const LaurentPoly& q) {
    if (q.is_zero()) return;
    for (long c = 0; c < D.cols(); ++c) D.at(i, c) += q * D.at(j, c);
    for (long r = 0; r < U.rows(); ++r) U.at(r, j) -= q * U.at(r, i);
    for (long c = 0; c < Uinv.cols(); ++c) Uinv.at(i, c) += q * Uinv.at(j, c);
  }
  // col i += col j * q
  void col_addmul(long i, long j, const LaurentPoly& q) {
    if (q.is_zero()) return;
    for (long r = 0; r < D.rows(); ++r) D.at(r, i) += D.at(r, j) * q;
    for (long c = 0; c < V.cols(); ++c) V.at(j, c) -= q * V.at(i, c);
    for (long r = 0; r < Vinv.rows(); ++r) Vinv.at(r, i) += Vinv.at(r, j) * q;
  }
  // scale row i by a unit (c t^k)
  void row_scale(long i, const LaurentPoly& u) {
    require(is_unit(u), "row_scale by non-unit");
    UnitSplit s = unit_split(u);
    LaurentPoly uinv = LaurentPoly::t_power(u.ctx(), -s.shift, s.lead.inverse());
    for (long c = 0; c < D.cols(); ++c) D.at(i, c) = u * D.at(i, c);
    for (long r = 0; r < U.rows(); ++r) U.at(r, i) = uinv * U.at(r, i);
    for (long c = 0; c < Uinv.cols(); ++c) Uinv.at(i, c) = u * Uinv.at(i, c);
    det_u = uinv * det_u;
  }

  // unimodular 2-row transform with determinant 1:
  //   (R_i, R_j) <- (a11 R_i + a12 R_j, a21 R_i + a22 R_j)
  void row_transform2(long i, long j, const LaurentPoly& a11, const LaurentPoly& a12,
                      const LaurentPoly& a21, const LaurentPoly& a22) {
    for (long c = 0; c < D.cols(); ++c) {
      LaurentPoly x = D.at(i, c), y = D.at(j, c);
      D.at(i, c) = a11 * x + a12 * y;
      D.at(j, c) = a21 * x + a22 * y;
    }
    // U <- U T^{-1}; for det T = 1, T^{-1} = [[a22, -a12], [-a21, a11]]
    for (long r = 0; r < U.rows(); ++r) {
      LaurentPoly x = U.at(r, i), y = U.at(r, j);
      U.at(r, i) = x * a22 - y * a21;
      U.at(r, j) = -(x * a12) + y * a11;
    }
    for (long c = 0; c < Uinv.cols(); ++c) {
      LaurentPoly x = Uinv.at(i, c), y = Uinv.at(j, c);
      Uinv.at(i, c) = a11 * x + a12 * y;
      Uinv.at(j, c) = a21 * x + a22 * y;
    }
  }

  // unimodular 2-column transform with determinant 1:
  //   (C_i, C_j) <- (a11 C_i + a12 C_j, a21 C_i + a22 C_j)
  void col_transform2(long i, long j, const LaurentPoly& a11, const LaurentPoly& a12,
                      const LaurentPoly& a21, const LaurentPoly& a22) {
    for (long r = 0; r < D.rows(); ++r) {
      LaurentPoly x = D.at(r, i), y = D.at(r, j);
      D.at(r, i) = x * a11 + y * a12;
      D.at(r, j) = x * a21 + y * a22;
    }
    for (long c = 0; c < V.cols(); ++c) {
      LaurentPoly x = V.at(i, c), y = V.at(j, c);
      V.at(i, c) = a22 * x - a21 * y;
      V.at(j, c) = -(a12 * x) + a11 * y;
    }
    for (long r = 0; r < Vinv.rows(); ++r) {
      LaurentPoly x = Vinv.at(r, i), y = Vinv.at(r, j);
      Vinv.at(r, i) = x * a11 + y * a12;
      Vinv.at(r, j) = x * a21 + y * a22;
    }
  }
};

} // namespace detail

// Deterministic Smith normal form. Pivot choice: the nonzero entry of
// minimal span (degree after unit normalization), ties broken by
// position; this keeps intermediate degrees small in practice.
inline SNFResult smith_normal_form(const LaurentMatrix& a) {
  detail::SNFWork w(a);
  long m = a.rows(), n = a.cols();
  long s = 0;
  auto find_pivot = [&](long start) -> std::pair<long, long> {
    long bi = -1, bj = -1, best = -1;
    for (long i = start; i < m; ++i)
      for (long j = start; j < n; ++j) {
        const LaurentPoly& p = w.D.at(i, j);
        if (p.is_zero()) continue;
        long sp = p.span();
        if (best < 0 || sp < best) {
          best = sp;
          bi = i;
          bj = j;
        }
      }
    return {bi, bj};
  };
  // Keeping the pivot canonical (monic, nonzero constant term) via unit
  // row scalings bounds the division quotients and prevents the rational
  // coefficient blowup of a naive fraction Euclid cascade.
  auto normalize_pivot = [&](long i) {
    const LaurentPoly& p = w.D.at(i, i);
    if (p.is_zero()) return;
    UnitSplit u = unit_split(p);
    if (u.shift == 0 && u.lead == FieldElement::one(a.ctx())) return;
    w.row_scale(i, LaurentPoly::t_power(a.ctx(), -u.shift, u.lead.inverse()));
  };
  for (; s < std::min(m, n); ++s) {
    auto [pi, pj] = find_pivot(s);
    if (pi < 0) break; // rest is zero
    w.row_swap(s, pi);
    w.col_swap(s, pj);
    bool stable = false;
    while (!stable) {
      stable = true;
      normalize_pivot(s);
      // Clear the column: exact quotients where possible, otherwise one
      // unimodular gcd transform per entry (confining the Euclidean
      // cascade to ext_gcd keeps coefficients small).
      for (long i = s + 1; i < m; ++i) {
        const LaurentPoly& e = w.D.at(i, s);
        if (e.is_zero()) continue;
        const LaurentPoly& p = w.D.at(s, s);
        auto [q, r] = divmod_field(e, p);
        if (r.is_zero()) {
          w.row_addmul(i, s, -q);
        } else {
          ExtGcd g = ext_gcd(p, e);
          w.row_transform2(s, i, g.s, g.t, -exact_div(e, g.g), exact_div(p, g.g));
          normalize_pivot(s);
          stable = false;
        }
      }
      for (long j = s + 1; j < n; ++j) {
        const LaurentPoly& e = w.D.at(s, j);
        if (e.is_zero()) continue;
        const LaurentPoly& p = w.D.at(s, s);
        auto [q, r] = divmod_field(e, p);
        if (r.is_zero()) {
          w.col_addmul(j, s, -q);
        } else {
          ExtGcd g = ext_gcd(p, e);
          w.col_transform2(s, j, g.s, g.t, -exact_div(e, g.g), exact_div(p, g.g));
          normalize_pivot(s);
          stable = false;
        }
      }
      if (!stable) continue;
      // the column may have been dirtied by the row pass
      for (long i = s + 1; i < m && stable; ++i) stable = w.D.at(i, s).is_zero();
      if (!stable) continue;
      // pivot must divide the whole remaining block
      for (long i = s + 1; i < m && stable; ++i)
        for (long j = s + 1; j < n && stable; ++j) {
          if (w.D.at(i, j).is_zero()) continue;
          if (!divides(w.D.at(s, s), w.D.at(i, j))) {
            w.row_addmul(s, i, LaurentPoly::one(a.ctx()));
            stable = false;
          }
        }
    }
  }
  // normalize nonzero diagonal entries to canonical form
  for (long i = 0; i < std::min(m, n); ++i) {
    const LaurentPoly& d = w.D.at(i, i);
    if (d.is_zero()) continue;
    UnitSplit u = unit_split(d);
    w.row_scale(i, LaurentPoly::t_power(a.ctx(), -u.shift, u.lead.inverse()));
  }
  SNFResult res;
  res.U = std::move(w.U);
  res.Uinv = std::move(w.Uinv);
  res.D = std::move(w.D);
  res.V = std::move(w.V);
  res.Vinv = std::move(w.Vinv);
  res.det_u_unit = std::move(w.det_u);
  res.det_v_unit = std::move(w.det_v);
  return res;
}

// ---------------------------------------------------------------------
// Constant Hermitian matrices over the field.

class FieldMatrix {
public:
  FieldMatrix() = default;
  FieldMatrix(FieldContext ctx, long n)
      : ctx_(std::move(ctx)), n_(n), e_(static_cast<std::size_t>(n * n), FieldElement::zero(ctx_)) {}

  long size() const { return n_; }
  const FieldContext& ctx() const { return ctx_; }
  FieldElement& at(long i, long j) { return e_[static_cast<std::size_t>(i * n_ + j)]; }
  const FieldElement& at(long i, long j) const { return e_[static_cast<std::size_t>(i * n_ + j)]; }

  bool is_hermitian() const {
    for (long i = 0; i < n_; ++i)
      for (long j = 0; j < n_; ++j)
        if (at(i, j) != at(j, i).conj()) return false;
    return true;
  }

private:
  FieldContext ctx_;
  long n_ = 0;
  std::vector<FieldElement> e_;
};

struct Inertia {
  long pos = 0, neg = 0, null = 0;
  long signature() const { return pos - neg; }
  friend bool operator==(const Inertia& a, const Inertia& b) {
    return a.pos == b.pos && a.neg == b.neg && a.null == b.null;
  }
};

// Exact inertia by congruence diagonalization with symmetric pivoting.
// When every diagonal entry vanishes but h_kl != 0, one of the basis
// changes e_k +- e_l, e_k + i e_l produces a nonzero diagonal.
inline Inertia const_signature(FieldMatrix h) {
  if (!h.is_hermitian()) fail_pre("NotHermitian", "const_signature of non-Hermitian matrix");
  long n = h.size();
  const FieldContext& ctx = h.ctx();
  Inertia res;
  std::vector<bool> done(static_cast<std::size_t>(n), false);
  auto add_row_col = [&](long k, long l, const FieldElement& delta) {
    // e_k <- e_k + delta e_l : row k += delta row l, col k += conj(delta) col l
    for (long j = 0; j < n; ++j) h.at(k, j) += delta * h.at(l, j);
    for (long i = 0; i < n; ++i) h.at(i, k) += delta.conj() * h.at(i, l);
  };
  for (long step = 0; step < n; ++step) {
    long p = -1;
    for (long i = 0; i < n && p < 0; ++i)
      if (!done[static_cast<std::size_t>(i)] && !h.at(i, i).is_zero()) p = i;
    if (p < 0) {
      long k = -1, l = -1;
      for (long i = 0; i < n && k < 0; ++i) {
        if (done[static_cast<std::size_t>(i)]) continue;
        for (long j = i + 1; j < n && k < 0; ++j) {
          if (done[static_cast<std::size_t>(j)]) continue;
          if (!h.at(i, j).is_zero()) {
            k = i;
            l = j;
          }
        }
      }
      if (k < 0) {
        for (long i = 0; i < n; ++i)
          if (!done[static_cast<std::size_t>(i)]) ++res.null;
        return res;
      }
      const FieldElement one = FieldElement::one(ctx);
      for (const FieldElement& delta :
           {one, -one, imaginary_unit(ctx)}) {
        FieldMatrix trial = h;
        // apply on a copy to test the diagonal
        for (long j = 0; j < n; ++j) trial.at(k, j) += delta * trial.at(l, j);
        for (long i = 0; i < n; ++i) trial.at(i, k) += delta.conj() * trial.at(i, l);
        if (!trial.at(k, k).is_zero()) {
          h = std::move(trial);
          break;
        }
      }
      require(!h.at(k, k).is_zero(), "zero-diagonal pivot fallback failed");
      p = k;
    }
    // eliminate row/column p
    FieldElement pivot = h.at(p, p);
    require(pivot.is_conj_fixed(), "Hermitian diagonal must be real");
    int sign = real_sign(pivot);
    if (sign > 0)
      ++res.pos;
    else
      ++res.neg;
    FieldElement pinv = pivot.inverse();
    for (long i = 0; i < n; ++i) {
      if (i == p || done[static_cast<std::size_t>(i)]) continue;
      if (h.at(i, p).is_zero()) continue;
      FieldElement c = -(h.at(i, p) * pinv);
      add_row_col(i, p, c);
    }
    done[static_cast<std::size_t>(p)] = true;
  }
  return res;
}

// Evaluate a Hermitian Laurent matrix at a root of unity, extending the
// field if the root does not live in the coefficient field.
inline FieldMatrix evaluate_at_root(const LaurentMatrix& a, const RootOfUnity& omega) {
  const LaurentMatrix* m = &a;
  LaurentMatrix extended;
  FieldContext ctx = a.ctx();
  if (ctx.N() % omega.den != 0) {
    ctx = FieldContext::make(lcm_long(ctx.N(), lcm_long(omega.den, 4)));
    extended = a.extend(ctx);
    m = &extended;
  }
  FieldMatrix h(ctx, a.rows());
  for (long i = 0; i < a.rows(); ++i)
    for (long j = 0; j < a.cols(); ++j) h.at(i, j) = eval_at_root(m->at(i, j), omega);
  return h;
}

inline Inertia signature_at(const LaurentMatrix& a, const RootOfUnity& omega) {
  if (!hermitian_check(a)) fail_pre("NotHermitian", "signature_at of non-Hermitian matrix");
  return const_signature(evaluate_at_root(a, omega));
}

// All zeros of p on S^1 that are roots of unity, under the convention
// that the context conductor is a multiple of every root order present
// (orders in {1,2,3,4,6} are additionally always detected since only
// their cosines can hide in a subfield). Returns angle fractions.
inline std::vector<RootOfUnity> s1_root_zeros(const LaurentPoly& p) {
  require(!p.is_zero(), "s1_root_zeros of zero polynomial");
  long L = lcm_long(p.ctx().N(), 12);
  // gcd with t^L - 1 isolates the root-of-unity zeros cheaply
  LaurentPoly c = canonical(p);
  LaurentPoly tl = LaurentPoly::t_power(p.ctx(), L, FieldElement::one(p.ctx())) -
                   LaurentPoly::one(p.ctx());
  LaurentPoly g = poly_gcd(c, tl);
  std::vector<RootOfUnity> zeros;
  if (is_unit(g)) return zeros;
  FieldContext big = FieldContext::make(lcm_long(p.ctx().N(), L));
  LaurentPoly gb = g.extend(big);
  long found = 0, total = g.span();
  for (long m : divisors(L)) {
    for (long j = 0; j < m && found < total; ++j) {
      if (std::gcd(j, m) != 1) continue;
      RootOfUnity r(j, m);
      if (r.den != m) continue;
      auto ord = order_at_value(gb, embed_root(big, r));
      if (ord.order > 0) {
        zeros.push_back(r);
        found += ord.order;
      }
    }
  }
  require(found == total, "uncertified zeros of the determinant on S^1");
  std::sort(zeros.begin(), zeros.end());
  return zeros;
}

// One-sided limit of sign A(e^{i theta} omega) as theta -> 0+ (side > 0)
// or 0- (side < 0), computed at an exact root-of-unity sample strictly
// between omega and the nearest S^1-zero of det A.
inline Inertia signature_one_sided(const LaurentMatrix& a, const RootOfUnity& omega, int side) {
  if (!hermitian_check(a)) fail_pre("NotHermitian", "signature_one_sided of non-Hermitian matrix");
  LaurentPoly d = det(a);
  if (d.is_zero()) fail_pre("SingularEverywhere", "matrix has identically zero determinant");
  std::vector<RootOfUnity> zeros = s1_root_zeros(d);
  mpq_class base = omega.angle();
  mpq_class target = base + mpq_class(side > 0 ? 1 : -1); // full turn away
  for (const auto& z : zeros) {
    for (long wrap = -1; wrap <= 1; ++wrap) {
      mpq_class ang = z.angle() + wrap;
      if (side > 0 && ang > base && ang < target) target = ang;
      if (side < 0 && ang < base && ang > target) target = ang;
    }
  }
  mpq_class mid = (base + target) / 2; // RootOfUnity normalizes mod 1
  RootOfUnity sample(mid.get_num().get_si(), mid.get_den().get_si());
  return signature_at(a, sample);
}

} // namespace linkform
