#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "dioph/error.hpp"
#include "dioph/rat.hpp"

namespace dioph {

struct Fraction {
  std::int64_t p, q;
  Rat value() const { return Rat(Int(static_cast<long>(p)), Int(static_cast<long>(q))); }
  friend bool operator==(const Fraction&, const Fraction&) = default;
};

namespace detail {

// Sign of p/q - x.
inline int cmp_frac(std::int64_t p, std::int64_t q, const Rat& x) {
  Int lhs = Int(static_cast<long>(p)) * x.den(), rhs = x.num() * Int(static_cast<long>(q));
  return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
}

}  // namespace detail

// Reduced fractions p/q in the window with 1 <= q <= qmax, ascending. The
// window must lie in [0, 1]. Stern-Brocot descent to the window's left end,
// then the Farey next-term recurrence.
inline std::vector<Fraction> farey_window(const Rat& lo, const Rat& hi, std::int64_t qmax, bool include_lo,
                                          bool include_hi) {
  if (qmax < 1) throw UsageError("denominator cutoff must be >= 1");
  if (lo.sign() < 0 || hi > Rat(1)) throw UsageError("Farey window must lie in [0, 1]");
  std::vector<Fraction> out;
  if (hi < lo) return out;
  // Consecutive Farey neighbours a/b <= lo < c/d in F_qmax.
  std::int64_t a = 0, b = 1, c = 1, d = 1;
  if (lo == Rat(1)) {
    a = 1, b = 1, c = 2, d = 1;  // sentinel successor
  } else {
    for (;;) {
      // Batch left moves: largest k with (a + k c)/(b + k d) <= lo.
      Rat num = lo * Rat(Int(static_cast<long>(b))) - Rat(Int(static_cast<long>(a)));
      Rat den = Rat(Int(static_cast<long>(c))) - lo * Rat(Int(static_cast<long>(d)));
      std::int64_t kmax = (qmax - b) / d;
      std::int64_t k = kmax;
      Rat lim = num / den;
      if (lim < Rat(Int(static_cast<long>(kmax)))) k = floor(lim).get_si();
      if (k > 0) {
        a += k * c;
        b += k * d;
      }
      // Batch right moves: largest k with (c + k a)/(d + k b) > lo.
      num = Rat(Int(static_cast<long>(c))) - lo * Rat(Int(static_cast<long>(d)));
      den = lo * Rat(Int(static_cast<long>(b))) - Rat(Int(static_cast<long>(a)));
      kmax = (qmax - d) / b;
      k = kmax;
      if (den.sign() > 0) {
        Rat lim2 = num / den;
        std::int64_t kk = ceil(lim2).get_si() - 1;
        if (kk < k) k = kk;
      }
      if (k > 0) {
        c += k * a;
        d += k * b;
      }
      if (b + d > qmax) break;
      // Neither batch moved, so the mediant decides one step.
      std::int64_t mp = a + c, mq = b + d;
      if (detail::cmp_frac(mp, mq, lo) <= 0) {
        a = mp, b = mq;
      } else {
        c = mp, d = mq;
      }
    }
  }
  // Walk from a/b.
  std::int64_t p = a, q = b, np = c, nq = d;
  if (detail::cmp_frac(p, q, lo) < 0 || (!include_lo && detail::cmp_frac(p, q, lo) == 0)) {
    p = c, q = d;
    std::int64_t k = (qmax + b) / d;
    np = k * c - a;
    nq = k * d - b;
  }
  while (q <= qmax && p <= q) {
    int ch = detail::cmp_frac(p, q, hi);
    if (ch > 0 || (ch == 0 && !include_hi)) break;
    int cl = detail::cmp_frac(p, q, lo);
    if (cl > 0 || (cl == 0 && include_lo)) out.push_back({p, q});
    if (p == q) break;
    std::int64_t k = (qmax + q) / nq;
    std::int64_t pp = k * np - p, qq = k * nq - q;
    p = np, q = nq, np = pp, nq = qq;
  }
  return out;
}

// Oracle: the same list by scanning every q.
inline std::vector<Fraction> farey_window_bruteforce(const Rat& lo, const Rat& hi, std::int64_t qmax, bool include_lo,
                                                     bool include_hi) {
  std::vector<std::pair<Rat, Fraction>> v;
  for (std::int64_t q = 1; q <= qmax; ++q)
    for (std::int64_t p = 0; p <= q; ++p) {
      if (std::gcd(p, q) != 1) continue;
      Rat x = Fraction{p, q}.value();
      bool ok_lo = include_lo ? lo <= x : lo < x;
      bool ok_hi = include_hi ? x <= hi : x < hi;
      if (ok_lo && ok_hi) v.push_back({x, {p, q}});
    }
  std::sort(v.begin(), v.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<Fraction> out;
  for (auto& e : v) out.push_back(e.second);
  return out;
}

}  // namespace dioph
