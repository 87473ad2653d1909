#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cctype>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dioph/error.hpp"

namespace dioph {

using Int = mpz_class;

inline std::size_t bit_length(const Int& v) {
  return v == 0 ? 0 : mpz_sizeinbase(v.get_mpz_t(), 2);
}

inline Int pow_int(const Int& base, unsigned long e) {
  Int r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

inline Int shift_left(const Int& v, unsigned long k) {
  Int r;
  mpz_mul_2exp(r.get_mpz_t(), v.get_mpz_t(), k);
  return r;
}

inline Int floor_div(const Int& a, const Int& b) {
  Int r;
  mpz_fdiv_q(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

inline Int ceil_div(const Int& a, const Int& b) {
  Int r;
  mpz_cdiv_q(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

// Floor of the n-th root of x >= 0; `exact` reports whether the root is exact.
inline Int iroot(const Int& x, unsigned long n, bool* exact = nullptr) {
  if (x < 0) throw DomainError("iroot of a negative integer");
  Int r;
  int e = mpz_root(r.get_mpz_t(), x.get_mpz_t(), n);
  if (exact) *exact = e != 0;
  return r;
}

inline Int isqrt(const Int& x) { return iroot(x, 2); }

inline bool is_perfect_square(const Int& x) {
  return x >= 0 && mpz_perfect_square_p(x.get_mpz_t()) != 0;
}

inline Int gcd(const Int& a, const Int& b) {
  Int r;
  mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

inline Int lcm(const Int& a, const Int& b) {
  Int r;
  mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

inline int sign(const Int& v) { return sgn(v); }

// Exact rational in canonical form: den > 0, gcd(|num|, den) = 1.
class Rat {
 public:
  Rat() = default;
  Rat(int v) : v_(v) {}
  Rat(long v) : v_(v) {}
  Rat(unsigned long v) : v_(v) {}
  Rat(const Int& v) : v_(v) {}
  Rat(const Int& num, const Int& den) {
    if (den == 0) throw DomainError("rational with zero denominator");
    v_ = mpq_class(num, den);
    v_.canonicalize();
  }
  // Unevaluated GMP integer expressions (a * b, a + 1, ...).
  template <class U>
  Rat(const __gmp_expr<mpz_t, U>& e) : v_(Int(e)) {}
  template <class U>
  explicit Rat(const __gmp_expr<mpq_t, U>& e) : v_(e) { v_.canonicalize(); }

  Int num() const { return v_.get_num(); }
  Int den() const { return v_.get_den(); }
  const mpq_class& raw() const { return v_; }

  bool is_integer() const { return v_.get_den() == 1; }
  int sign() const { return sgn(v_); }

  // "n" for integers, "n/d" otherwise.
  std::string str() const {
    if (is_integer()) return v_.get_num().get_str();
    return v_.get_num().get_str() + "/" + v_.get_den().get_str();
  }

  double to_double() const { return v_.get_d(); }

  // Accepts "n", "n/d", and decimals with optional exponent ("0.1", "-2.5e-3").
  // Decimals are converted exactly: "0.1" is 1/10.
  static Rat parse(std::string_view text);

  friend Rat operator+(const Rat& a, const Rat& b) { return Rat(Raw{}, a.v_ + b.v_); }
  friend Rat operator-(const Rat& a, const Rat& b) { return Rat(Raw{}, a.v_ - b.v_); }
  friend Rat operator*(const Rat& a, const Rat& b) { return Rat(Raw{}, a.v_ * b.v_); }
  friend Rat operator/(const Rat& a, const Rat& b) {
    if (b.sign() == 0) throw DomainError("division by zero");
    return Rat(Raw{}, a.v_ / b.v_);
  }
  Rat operator-() const { return Rat(Raw{}, -v_); }
  Rat& operator+=(const Rat& o) { v_ += o.v_; return *this; }
  Rat& operator-=(const Rat& o) { v_ -= o.v_; return *this; }
  Rat& operator*=(const Rat& o) { v_ *= o.v_; return *this; }
  Rat& operator/=(const Rat& o) { *this = *this / o; return *this; }

  friend bool operator==(const Rat& a, const Rat& b) { return cmp(a.v_, b.v_) == 0; }
  friend std::strong_ordering operator<=>(const Rat& a, const Rat& b) {
    int c = cmp(a.v_, b.v_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

 private:
  struct Raw {};
  // GMP arithmetic already returns canonical values.
  Rat(Raw, mpq_class v) : v_(std::move(v)) {}

  mpq_class v_;
};

inline Rat abs(const Rat& x) { return x.sign() < 0 ? -x : x; }

inline Int floor(const Rat& x) { return floor_div(x.num(), x.den()); }
inline Int ceil(const Rat& x) { return ceil_div(x.num(), x.den()); }

inline Rat pow(const Rat& x, long e) {
  if (e >= 0) return Rat(pow_int(x.num(), e), pow_int(x.den(), e));
  if (x.sign() == 0) throw DomainError("zero to a negative power");
  return Rat(pow_int(x.den(), -e), pow_int(x.num(), -e));
}

inline const Rat& min(const Rat& a, const Rat& b) { return b < a ? b : a; }
inline const Rat& max(const Rat& a, const Rat& b) { return a < b ? b : a; }

// m * 2^(-k); k may be negative.
inline Rat dyadic(const Int& m, long k) {
  if (k >= 0) return Rat(m, shift_left(Int(1), k));
  return Rat(shift_left(m, -k));
}

// floor(log2 |x|) for x != 0.
inline long floor_log2(const Rat& x) {
  long e = static_cast<long>(bit_length(abs(x.num()))) - static_cast<long>(bit_length(x.den()));
  // 2^(e-1) < |x| < 2^(e+1); settle which side of 2^e.
  Rat a = abs(x);
  return a >= dyadic(1, -e) ? e : e - 1;
}

// Smallest dyadic with `bits` significant bits that is >= x.
inline Rat round_up(const Rat& x, unsigned bits) {
  if (x.sign() == 0) return x;
  long k = static_cast<long>(bits) - 1 - floor_log2(x);
  Rat scaled = k >= 0 ? x * Rat(shift_left(Int(1), k)) : x / Rat(shift_left(Int(1), -k));
  return dyadic(ceil(scaled), k);
}

// Largest dyadic with `bits` significant bits that is <= x.
inline Rat round_down(const Rat& x, unsigned bits) { return -round_up(-x, bits); }

// Truncated decimal rendering with `digits` fractional digits (rounded toward
// minus infinity), for human-readable reports only.
inline std::string to_decimal(const Rat& x, unsigned digits) {
  Int scale = pow_int(Int(10), digits);
  Int v = floor(x * Rat(scale));
  bool neg = v < 0;
  Int a = neg ? Int(-v) : v;
  std::string s = a.get_str();
  if (s.size() <= digits) s.insert(0, digits + 1 - s.size(), '0');
  if (digits > 0) s.insert(s.size() - digits, ".");
  return neg ? "-" + s : s;
}

inline Rat Rat::parse(std::string_view text) {
  auto fail = [&]() -> Rat {
    throw UsageError("malformed rational '" + std::string(text) + "'");
  };
  auto is_digits = [](std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(),
                                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
  };
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) return fail();
  bool neg = false;
  if (s.front() == '+' || s.front() == '-') {
    neg = s.front() == '-';
    s.remove_prefix(1);
  }
  Rat out;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    auto n = s.substr(0, slash), d = s.substr(slash + 1);
    if (!is_digits(n) || !is_digits(d)) return fail();
    Int dn(std::string(d), 10);
    if (dn == 0) throw UsageError("zero denominator in '" + std::string(text) + "'");
    out = Rat(Int(std::string(n), 10), dn);
  } else {
    long exp10 = 0;
    if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
      auto es = s.substr(e + 1);
      bool eneg = false;
      if (!es.empty() && (es.front() == '+' || es.front() == '-')) {
        eneg = es.front() == '-';
        es.remove_prefix(1);
      }
      if (!is_digits(es) || es.size() > 6) return fail();
      exp10 = std::stol(std::string(es));
      if (eneg) exp10 = -exp10;
      s = s.substr(0, e);
    }
    std::string digits;
    if (auto dot = s.find('.'); dot != std::string_view::npos) {
      auto ip = s.substr(0, dot), fp = s.substr(dot + 1);
      if (ip.empty() && fp.empty()) return fail();
      if ((!ip.empty() && !is_digits(ip)) || (!fp.empty() && !is_digits(fp))) return fail();
      digits = std::string(ip) + std::string(fp);
      exp10 -= static_cast<long>(fp.size());
    } else {
      if (!is_digits(s)) return fail();
      digits = std::string(s);
    }
    Int m(digits, 10);  // base 0 would read a leading zero as octal
    out = exp10 >= 0 ? Rat(m * pow_int(Int(10), exp10)) : Rat(m, pow_int(Int(10), -exp10));
  }
  return neg ? -out : out;
}

// Sum with balanced pairwise reduction; keeps operand sizes even when the
// terms have many distinct denominators.
inline Rat exact_sum(std::vector<Rat> terms) {
  if (terms.empty()) return Rat(0);
  while (terms.size() > 1) {
    std::size_t half = terms.size() / 2;
    for (std::size_t i = 0; i < half; ++i) terms[i] = terms[2 * i] + terms[2 * i + 1];
    if (terms.size() % 2) {
      terms[half] = terms.back();
      terms.resize(half + 1);
    } else {
      terms.resize(half);
    }
  }
  return terms.front();
}

}  // namespace dioph
