// Signature jumps, the signature function, averaged signatures, Witt
// classification, and the matrix cross-checks for representable forms.
#pragma once

#include "forms.hpp"

namespace linkform {

// Finite tables of signature jumps and local corrections. In real mode
// only the upper half circle is stored; the lower half is synthesized by
// the antisymmetry delta sigma(conj xi) = -delta sigma(xi).
struct JumpTable {
  Mode mode = Mode::Complex;
  std::map<RootOfUnity, long> jumps; // delta sigma
  std::map<RootOfUnity, long> local; // sigma^loc

  long jump_at(const RootOfUnity& xi) const {
    if (mode == Mode::Real && !xi.upper_half() && !xi.is_real()) {
      auto it = jumps.find(xi.conj());
      return it == jumps.end() ? 0 : -it->second;
    }
    auto it = jumps.find(xi);
    return it == jumps.end() ? 0 : it->second;
  }
  long local_at(const RootOfUnity& xi) const {
    RootOfUnity key = xi;
    if (mode == Mode::Real && !xi.upper_half() && !xi.is_real()) key = xi.conj();
    auto it = local.find(key);
    return it == local.end() ? 0 : it->second;
  }
  // all points with a nonzero jump, materialized over the full circle
  std::vector<std::pair<RootOfUnity, long>> support() const {
    std::vector<std::pair<RootOfUnity, long>> out;
    for (const auto& [xi, v] : jumps) {
      if (v == 0) continue;
      out.emplace_back(xi, v);
      if (mode == Mode::Real && xi.upper_half()) out.emplace_back(xi.conj(), -v);
    }
    std::sort(out.begin(), out.end());
    return out;
  }
  bool all_zero() const {
    for (const auto& [xi, v] : jumps)
      if (v != 0) return false;
    return true;
  }
  friend bool operator==(const JumpTable& a, const JumpTable& b) {
    auto clean = [](const std::map<RootOfUnity, long>& m) {
      std::map<RootOfUnity, long> r;
      for (const auto& [k, v] : m)
        if (v != 0) r.emplace(k, v);
      return r;
    };
    return a.mode == b.mode && clean(a.jumps) == clean(b.jumps);
  }
};

using WittClass = JumpTable;

// delta sigma and sigma^loc of a non-singular decomposition.
// Real mode: delta sigma(xi) = sum of eps over odd n at xi in the upper
// half circle. Complex mode: the sum enters with a minus sign.
inline JumpTable jumps(const Decomposition& d) {
  if (!is_nonsingular(d)) fail_pre("SingularForm", "jump table of a singular form");
  JumpTable t;
  t.mode = d.mode;
  for (const auto& p : d.parts) {
    if (p.kind != BasicForm::Kind::E) continue;
    if (d.mode == Mode::Real) {
      require(p.xi.upper_half() || p.xi.is_real(), "real decomposition with lower-half root");
      if (p.n % 2 != 0) {
        require(!p.xi.is_real(), "odd-n real basic form at +-1 cannot exist");
        t.jumps[p.xi] += p.eps;
      } else {
        t.local[p.xi] -= p.eps;
      }
    } else {
      if (p.n % 2 != 0)
        t.jumps[p.xi] -= p.eps;
      else
        t.local[p.xi] -= p.eps;
    }
  }
  return t;
}

// The signature function evaluated by its defining finite sum:
//   sigma(xi1) = sum_{0 < tau < theta1} 2 delta sigma(e^{2 pi i tau})
//              + sigma^loc(xi1) + delta sigma(xi1) + delta sigma(1),
// with theta1 = 1 for xi1 = 1 (a full turn). Angles compare exactly.
inline long signature_function(const JumpTable& t, const RootOfUnity& omega) {
  mpq_class theta1 = omega.is_one() ? mpq_class(1) : omega.angle();
  long acc = 0;
  for (const auto& [xi, v] : t.support()) {
    if (xi.is_one()) continue;
    if (xi.angle() < theta1) acc += 2 * v;
  }
  acc += t.local_at(omega);
  acc += t.jump_at(omega);
  acc += t.jump_at(RootOfUnity(0, 1));
  return acc;
}

inline long signature_function(const Decomposition& d, const RootOfUnity& omega) {
  return signature_function(jumps(d), omega);
}

// averaged signature: sigma - sigma^loc away from 1, total jump at 1
inline mpq_class averaged_signature(const JumpTable& t, const RootOfUnity& omega) {
  if (omega.is_one()) {
    long acc = 0;
    for (const auto& [xi, v] : t.support()) acc += v;
    return mpq_class(acc);
  }
  return mpq_class(signature_function(t, omega) - t.local_at(omega));
}

inline mpq_class averaged_signature(const Decomposition& d, const RootOfUnity& omega) {
  return averaged_signature(jumps(d), omega);
}

// Witt reduction drops even-n E-forms and all f-forms; what remains is
// exactly the jump table, which is a complete Witt invariant.
inline WittClass witt_normal_form(const Decomposition& d) {
  JumpTable t = jumps(d);
  t.local.clear();
  return t;
}

inline bool is_metabolic(const Decomposition& d) { return witt_normal_form(d).all_zero(); }

inline bool witt_equivalent(const Decomposition& a, const Decomposition& b) {
  if (a.mode != b.mode) fail_pre("ModeMismatch", "Witt comparison of mixed-mode forms");
  return witt_normal_form(a) == witt_normal_form(b);
}

inline long total_jump(const JumpTable& t) {
  long acc = 0;
  for (const auto& [xi, v] : t.support()) acc += v;
  return acc;
}

// over C[t^{+-1}]: representable iff the total signature jump vanishes
inline bool is_representable_complex(const Decomposition& d) {
  if (d.mode != Mode::Complex) fail_pre("ModeMismatch", "representability test is complex-mode");
  return total_jump(jumps(d)) == 0;
}

// ---------------------------------------------------------------------
// Cross-checks of the matrix identities
//   sigma(xi0)      = sign A(xi0) - lim_{th->0+} sign A(e^{i th}) + dsigma(1)
//   sigma^av(xi)    = sign^av A(xi) - sign^av A(1)
// These hold in the complex-mode conventions; real forms are classified
// in complex mode before checking.

struct CrosscheckSample {
  RootOfUnity omega;
  long sigma_form = 0, sigma_matrix = 0;
  mpq_class sigma_av_form, sigma_av_matrix;
  bool ok = false;
};

struct CrosscheckReport {
  std::vector<CrosscheckSample> samples;
  bool ok = true;
};

inline mpq_class averaged_matrix_signature(const LaurentMatrix& a, const RootOfUnity& omega) {
  Inertia p = signature_one_sided(a, omega, +1);
  Inertia m = signature_one_sided(a, omega, -1);
  return mpq_class(p.signature() + m.signature(), 2);
}

inline CrosscheckReport crosscheck_matrix(const Decomposition& d, const LaurentMatrix& a,
                                          const std::vector<RootOfUnity>& samples) {
  Decomposition dc = d;
  if (d.mode == Mode::Real) {
    // complexify: each e(n,k,eps,xi,R) with xi != +-1 splits into a
    // conjugate pair; rebuild via reference pairings and reclassify
    LinkingForm lf;
    lf.mode = Mode::Complex;
    lf.ctx = a.ctx();
    for (const auto& p : d.parts) {
      lf.summands.push_back(make_basic(a.ctx(), Mode::Real, p));
      lf.summands.back().mode = Mode::Complex;
      if (p.kind == BasicForm::Kind::E) {
        lf.roots.add_circle(p.xi);
        lf.roots.add_circle(p.xi.conj());
      } else {
        lf.roots.add_off(p.xi_off);
      }
    }
    dc = classify(lf);
  }
  JumpTable t = jumps(dc);
  long dsigma1 = t.jump_at(RootOfUnity(0, 1));
  Inertia base_plus = signature_one_sided(a, RootOfUnity(0, 1), +1);
  mpq_class av1 = averaged_matrix_signature(a, RootOfUnity(0, 1));
  CrosscheckReport rep;
  for (const auto& omega : samples) {
    CrosscheckSample s;
    s.omega = omega;
    s.sigma_form = signature_function(t, omega);
    s.sigma_matrix = signature_at(a, omega).signature() - base_plus.signature() + dsigma1;
    s.sigma_av_form = averaged_signature(t, omega);
    s.sigma_av_matrix = averaged_matrix_signature(a, omega) - av1;
    s.ok = (s.sigma_form == s.sigma_matrix) && (s.sigma_av_form == s.sigma_av_matrix);
    rep.ok = rep.ok && s.ok;
    rep.samples.push_back(std::move(s));
  }
  return rep;
}

} // namespace linkform
