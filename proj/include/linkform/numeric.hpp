// Integer and rational utilities shared across the library.
#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace linkform {

// Error taxonomy. `reason` carries a stable error name
// (e.g. "ConductorMismatch", "NotReal") so callers and the CLI can
// map failures to exit codes without string-matching messages.
enum class ErrorKind { InvalidInput, Precondition, Internal };

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, std::string reason, const std::string& msg)
      : std::runtime_error(reason + ": " + msg), kind_(kind), reason_(std::move(reason)) {}
  ErrorKind kind() const { return kind_; }
  const std::string& reason() const { return reason_; }

private:
  ErrorKind kind_;
  std::string reason_;
};

[[noreturn]] inline void fail_input(const std::string& reason, const std::string& msg) {
  throw Error(ErrorKind::InvalidInput, reason, msg);
}
[[noreturn]] inline void fail_pre(const std::string& reason, const std::string& msg) {
  throw Error(ErrorKind::Precondition, reason, msg);
}
[[noreturn]] inline void fail_internal(const std::string& msg) {
  throw Error(ErrorKind::Internal, "Internal", msg);
}

inline void require(bool cond, const char* what) {
  if (!cond) fail_internal(what);
}

inline long gcd_long(long a, long b) { return std::gcd(a, b); }

inline long lcm_long(long a, long b) {
  if (a == 0 || b == 0) return 0;
  return a / std::gcd(a, b) * b;
}

// Euler totient by trial factorization; inputs stay small (conductors).
inline long euler_phi(long n) {
  if (n <= 0) fail_input("InvalidConductor", "phi of nonpositive integer");
  long result = n;
  long m = n;
  for (long p = 2; p * p <= m; ++p) {
    if (m % p == 0) {
      while (m % p == 0) m /= p;
      result -= result / p;
    }
  }
  if (m > 1) result -= result / m;
  return result;
}

inline std::vector<long> divisors(long n) {
  std::vector<long> small, large;
  for (long d = 1; d * d <= n; ++d) {
    if (n % d == 0) {
      small.push_back(d);
      if (d != n / d) large.push_back(n / d);
    }
  }
  for (auto it = large.rbegin(); it != large.rend(); ++it) small.push_back(*it);
  return small;
}

namespace detail {

// Exact division of integer polynomials, used when building cyclotomic
// polynomials from x^n - 1.
inline std::vector<mpz_class> zpoly_exact_div(const std::vector<mpz_class>& a,
                                              const std::vector<mpz_class>& b) {
  require(!b.empty() && b.back() != 0, "zpoly division by zero");
  std::vector<mpz_class> rem = a;
  if (rem.size() < b.size()) {
    for (const auto& c : rem) require(c == 0, "zpoly division not exact");
    return {};
  }
  std::vector<mpz_class> quot(rem.size() - b.size() + 1);
  for (std::size_t i = quot.size(); i-- > 0;) {
    mpz_class q = rem[i + b.size() - 1] / b.back();
    require(rem[i + b.size() - 1] == q * b.back(), "zpoly division not exact");
    quot[i] = q;
    if (q != 0)
      for (std::size_t j = 0; j < b.size(); ++j) rem[i + j] -= q * b[j];
  }
  for (const auto& c : rem) require(c == 0, "zpoly division not exact");
  while (!quot.empty() && quot.back() == 0) quot.pop_back();
  return quot;
}

} // namespace detail

// N-th cyclotomic polynomial with integer coefficients, degree phi(N).
// Built bottom-up over the divisor lattice from x^d - 1.
inline std::vector<mpz_class> cyclotomic_polynomial(long n) {
  std::vector<long> divs = divisors(n);
  std::vector<std::vector<mpz_class>> phi_of(divs.size());
  for (std::size_t i = 0; i < divs.size(); ++i) {
    long d = divs[i];
    std::vector<mpz_class> poly(static_cast<std::size_t>(d) + 1);
    poly[0] = -1;
    poly[static_cast<std::size_t>(d)] = 1; // x^d - 1
    for (std::size_t j = 0; j < i; ++j)
      if (d % divs[j] == 0) poly = detail::zpoly_exact_div(poly, phi_of[j]);
    phi_of[i] = std::move(poly);
  }
  return phi_of.back();
}

inline mpq_class parse_rational(const std::string& s) {
  mpq_class q;
  if (q.set_str(s, 10) != 0) fail_input("BadRational", "cannot parse '" + s + "'");
  q.canonicalize();
  return q;
}

inline std::string format_rational(const mpq_class& q) { return q.get_str(); }

} // namespace linkform
