// Free-group words in two generators, the integral group ring, and Fox
// derivatives; just enough machinery for the torus-knot chain complexes.
#pragma once

#include <compare>
#include <map>

#include "numeric.hpp"

namespace linkform {

enum class Gen : int { a = 0, b = 1 };

// freely reduced word in a, b
struct GroupWord {
  std::vector<std::pair<Gen, long>> syl; // syllables (gen, exponent != 0)

  static GroupWord one() { return {}; }
  static GroupWord gen(Gen g, long e = 1) {
    GroupWord w;
    if (e != 0) w.syl.emplace_back(g, e);
    return w;
  }

  bool is_one() const { return syl.empty(); }

  GroupWord& operator*=(const GroupWord& o) {
    for (const auto& [g, e] : o.syl) {
      if (!syl.empty() && syl.back().first == g) {
        syl.back().second += e;
        if (syl.back().second == 0) syl.pop_back();
      } else if (e != 0) {
        syl.emplace_back(g, e);
      }
    }
    return *this;
  }
  friend GroupWord operator*(GroupWord x, const GroupWord& y) { return x *= y; }

  GroupWord inverse() const {
    GroupWord w;
    for (auto it = syl.rbegin(); it != syl.rend(); ++it) w.syl.emplace_back(it->first, -it->second);
    return w;
  }
  GroupWord pow(long n) const {
    if (n < 0) return inverse().pow(-n);
    GroupWord r;
    for (long i = 0; i < n; ++i) r *= *this;
    return r;
  }

  auto operator<=>(const GroupWord&) const = default;
};

// element of Z[F_2]
struct GroupRingElem {
  std::map<GroupWord, long> terms;

  static GroupRingElem zero() { return {}; }
  static GroupRingElem one() { return of(GroupWord::one()); }
  static GroupRingElem of(const GroupWord& w, long c = 1) {
    GroupRingElem e;
    if (c != 0) e.terms.emplace(w, c);
    return e;
  }

  bool is_zero() const { return terms.empty(); }

  void add(const GroupWord& w, long c) {
    auto it = terms.find(w);
    if (it == terms.end()) {
      if (c != 0) terms.emplace(w, c);
    } else {
      it->second += c;
      if (it->second == 0) terms.erase(it);
    }
  }

  friend GroupRingElem operator+(const GroupRingElem& x, const GroupRingElem& y) {
    GroupRingElem r = x;
    for (const auto& [w, c] : y.terms) r.add(w, c);
    return r;
  }
  friend GroupRingElem operator-(const GroupRingElem& x, const GroupRingElem& y) {
    GroupRingElem r = x;
    for (const auto& [w, c] : y.terms) r.add(w, -c);
    return r;
  }
  GroupRingElem operator-() const {
    GroupRingElem r;
    for (const auto& [w, c] : terms) r.terms.emplace(w, -c);
    return r;
  }
  friend GroupRingElem operator*(const GroupRingElem& x, const GroupRingElem& y) {
    GroupRingElem r;
    for (const auto& [wx, cx] : x.terms)
      for (const auto& [wy, cy] : y.terms) r.add(wx * wy, cx * cy);
    return r;
  }
  friend GroupRingElem operator*(const GroupWord& w, const GroupRingElem& y) {
    return of(w) * y;
  }
  friend bool operator==(const GroupRingElem& x, const GroupRingElem& y) {
    return x.terms == y.terms;
  }
};

// Fox derivative with respect to g: d(uv) = du + u dv, d(x)/dx = 1,
// d(x^{-1})/dx = -x^{-1}.
inline GroupRingElem fox_derivative(const GroupWord& w, Gen g) {
  GroupRingElem acc;
  GroupWord prefix;
  for (const auto& [x, e] : w.syl) {
    if (x == g) {
      // d(x^e)/dx = sum_{i=0}^{e-1} x^i  (e > 0)
      //           = -sum_{i=1}^{-e} x^{-i} (e < 0)
      if (e > 0) {
        for (long i = 0; i < e; ++i) acc.add(prefix * GroupWord::gen(x, i), 1);
      } else {
        for (long i = 1; i <= -e; ++i) acc.add(prefix * GroupWord::gen(x, -i), -1);
      }
    }
    prefix *= GroupWord::gen(x, e);
  }
  return acc;
}

inline GroupRingElem fox_derivative(const GroupRingElem& e, Gen g) {
  GroupRingElem acc;
  for (const auto& [w, c] : e.terms) {
    GroupRingElem d = fox_derivative(w, g);
    for (const auto& [dw, dc] : d.terms) acc.add(dw, c * dc);
  }
  return acc;
}

} // namespace linkform
