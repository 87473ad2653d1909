#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <utility>

#include "dioph/error.hpp"
#include "dioph/rat.hpp"

namespace dioph {

inline constexpr int kDefaultPrecision = 256;
inline constexpr int kDefaultPrecisionCap = 4096;
inline constexpr int kLadderStart = 64;

// Certified interval lo <= v <= hi around an exact real v. hi == nullopt means
// the enclosure is unbounded above.
struct RealEnclosure {
  Rat lo;
  std::optional<Rat> hi;
  int bits = kDefaultPrecision;

  static RealEnclosure exact(const Rat& v, int bits = kDefaultPrecision) { return {v, v, bits}; }
  static RealEnclosure between(const Rat& lo, const Rat& hi, int bits = kDefaultPrecision) {
    if (hi < lo) throw ConsistencyError("enclosure with lo > hi");
    return {lo, hi, bits};
  }
  static RealEnclosure at_least(const Rat& lo, int bits = kDefaultPrecision) {
    return {lo, std::nullopt, bits};
  }

  bool bounded() const { return hi.has_value(); }
  bool is_point() const { return hi && *hi == lo; }
  const Rat& upper() const {
    if (!hi) throw DomainError("enclosure is unbounded above");
    return *hi;
  }
  Rat width() const { return upper() - lo; }
  Rat midpoint() const { return (lo + upper()) / Rat(2); }

  bool contains(const Rat& v) const { return lo <= v && (!hi || v <= *hi); }
  bool contains(const RealEnclosure& o) const {
    if (o.lo < lo) return false;
    if (!hi) return true;
    return o.hi && *o.hi <= *hi;
  }
  bool overlaps(const RealEnclosure& o) const {
    if (hi && *hi < o.lo) return false;
    if (o.hi && *o.hi < lo) return false;
    return true;
  }
};

// Tightest enclosure contained in both; they must overlap.
inline RealEnclosure intersect(const RealEnclosure& a, const RealEnclosure& b) {
  if (!a.overlaps(b)) throw ConsistencyError("disjoint enclosures for one value");
  RealEnclosure r{max(a.lo, b.lo), std::nullopt, std::max(a.bits, b.bits)};
  if (a.hi && b.hi) r.hi = min(*a.hi, *b.hi);
  else if (a.hi) r.hi = a.hi;
  else r.hi = b.hi;
  return r;
}

// Smallest enclosure containing both.
inline RealEnclosure hull(const RealEnclosure& a, const RealEnclosure& b) {
  RealEnclosure r{min(a.lo, b.lo), std::nullopt, std::min(a.bits, b.bits)};
  if (a.hi && b.hi) r.hi = max(*a.hi, *b.hi);
  return r;
}

inline RealEnclosure operator+(const RealEnclosure& a, const RealEnclosure& b) {
  RealEnclosure r{a.lo + b.lo, std::nullopt, std::min(a.bits, b.bits)};
  if (a.hi && b.hi) r.hi = *a.hi + *b.hi;
  return r;
}

inline RealEnclosure operator-(const RealEnclosure& a) {
  if (!a.hi) throw DomainError("negating an enclosure unbounded above");
  return {-*a.hi, -a.lo, a.bits};
}

inline RealEnclosure operator-(const RealEnclosure& a, const RealEnclosure& b) { return a + (-b); }

inline RealEnclosure operator*(const RealEnclosure& a, const RealEnclosure& b) {
  int bits = std::min(a.bits, b.bits);
  if (a.bounded() && b.bounded()) {
    Rat c[4] = {a.lo * b.lo, a.lo * *b.hi, *a.hi * b.lo, *a.hi * *b.hi};
    return {*std::min_element(c, c + 4), *std::max_element(c, c + 4), bits};
  }
  if (a.lo.sign() < 0 || b.lo.sign() < 0)
    throw DomainError("product with an unbounded enclosure needs non-negative factors");
  if (a.is_point() && a.lo.sign() == 0) return RealEnclosure::exact(0, bits);
  if (b.is_point() && b.lo.sign() == 0) return RealEnclosure::exact(0, bits);
  return {a.lo * b.lo, std::nullopt, bits};
}

inline RealEnclosure reciprocal(const RealEnclosure& a) {
  if (a.lo.sign() > 0) {
    if (!a.hi) return {Rat(0), Rat(1) / a.lo, a.bits};
    return {Rat(1) / *a.hi, Rat(1) / a.lo, a.bits};
  }
  if (a.hi && a.hi->sign() < 0) return {Rat(1) / *a.hi, Rat(1) / a.lo, a.bits};
  throw DomainError("reciprocal of an enclosure containing zero");
}

inline RealEnclosure operator/(const RealEnclosure& a, const RealEnclosure& b) {
  return a * reciprocal(b);
}

inline RealEnclosure abs(const RealEnclosure& a) {
  if (a.lo.sign() >= 0) return a;
  if (a.hi && a.hi->sign() <= 0) return -a;
  if (!a.hi) return {Rat(0), std::nullopt, a.bits};
  return {Rat(0), max(-a.lo, *a.hi), a.bits};
}

// Outward rounding of both ends to dyadics; keeps operand sizes bounded.
inline RealEnclosure round_outward(const RealEnclosure& a, unsigned bits) {
  RealEnclosure r{round_down(a.lo, bits), std::nullopt, a.bits};
  if (a.hi) r.hi = round_up(*a.hi, bits);
  return r;
}

inline RealEnclosure operator+(const RealEnclosure& a, const Rat& b) { return a + RealEnclosure::exact(b, a.bits); }
inline RealEnclosure operator*(const RealEnclosure& a, const Rat& b) { return a * RealEnclosure::exact(b, a.bits); }
inline RealEnclosure operator*(const Rat& a, const RealEnclosure& b) { return RealEnclosure::exact(a, b.bits) * b; }
inline RealEnclosure operator/(const Rat& a, const RealEnclosure& b) { return RealEnclosure::exact(a, b.bits) / b; }
inline RealEnclosure operator/(const RealEnclosure& a, const Rat& b) { return a * (Rat(1) / b); }

// Enclosure of base^exponent. Exact when the exponent is an integer or the
// root is exact; otherwise width <= 2^(1-bits) * hi.
inline RealEnclosure pow_real(const Rat& base, const Rat& exponent, int bits) {
  if (base.sign() <= 0) throw DomainError("pow_real needs a positive base, got " + base.str());
  if (bits < 8) throw UsageError("pow_real needs at least 8 bits of precision");
  if (base == Rat(1)) return RealEnclosure::exact(1, bits);
  Int m = exponent.num(), n = exponent.den();
  if (!m.fits_slong_p() || !n.fits_ulong_p()) throw DomainError("exponent too large: " + exponent.str());
  Rat x = pow(base, m.get_si());
  if (n == 1) return RealEnclosure::exact(x, bits);
  unsigned long nn = n.get_ui();
  bool en = false, ed = false;
  Int rn = iroot(x.num() < 0 ? Int(-x.num()) : x.num(), nn, &en);
  Int rd = iroot(x.den(), nn, &ed);
  if (en && ed) return RealEnclosure::exact(Rat(rn, rd), bits);

  // With L <= floor(log2 root), a grid of 2^-k, k = bits + 1 - L, meets the
  // width contract.
  long fx = floor_log2(x);
  long L = fx >= 0 ? fx / static_cast<long>(nn) : -((-fx + static_cast<long>(nn) - 1) / static_cast<long>(nn));
  long k = bits + 1 - L;
  Int scaled;
  if (k >= 0) {
    scaled = floor_div(shift_left(x.num(), static_cast<unsigned long>(k) * nn), x.den());
  } else {
    scaled = floor_div(x.num(), shift_left(x.den(), static_cast<unsigned long>(-k) * nn));
  }
  Int r = iroot(scaled, nn);
  return {dyadic(r, k), dyadic(Int(r + 1), k), bits};
}

// Natural logarithm of y > 0, via ln y = e ln 2 + 2 atanh((z-1)/(z+1)).
inline RealEnclosure ln_enclosure(const Rat& y, int bits) {
  if (y.sign() <= 0) throw DomainError("ln of a non-positive number");
  auto atanh_enc = [bits](const Rat& t) {
    // sum_{j<J} t^(2j+1)/(2j+1), remainder < t^(2J+1) / ((2J+1)(1-t^2)).
    Rat t2 = t * t, term = t, sum = 0;
    Rat eps = dyadic(1, bits + 4);
    long j = 0;
    for (;; ++j) {
      sum += term / Rat(2 * j + 1);
      term *= t2;
      Rat rem = abs(term) / (Rat(2 * j + 3) * (Rat(1) - t2));
      if (rem <= eps) {
        sum = round_down(sum, bits + 16);
        return t.sign() >= 0 ? RealEnclosure{sum - dyadic(1, bits + 10), sum + rem + dyadic(1, bits + 10), bits}
                             : RealEnclosure{sum - rem - dyadic(1, bits + 10), sum + dyadic(1, bits + 10), bits};
      }
    }
  };
  long e = floor_log2(y);
  Rat z = y / dyadic(1, -e);  // z in [1, 2)
  RealEnclosure lnz = atanh_enc((z - Rat(1)) / (z + Rat(1))) * Rat(2);
  if (e == 0) return lnz;
  RealEnclosure ln2 = atanh_enc(Rat(1, 3)) * Rat(2);
  return ln2 * Rat(e) + lnz;
}

// Result of a certified comparison.
struct CmpVerdict {
  enum class Kind { Less, Greater, ProvenEqual, Unresolved };
  Kind kind;
  int precision_reached = 0;

  bool less() const { return kind == Kind::Less; }
  bool greater() const { return kind == Kind::Greater; }
  bool equal() const { return kind == Kind::ProvenEqual; }
  bool unresolved() const { return kind == Kind::Unresolved; }
};

inline std::string to_string(CmpVerdict::Kind k) {
  switch (k) {
    case CmpVerdict::Kind::Less: return "less";
    case CmpVerdict::Kind::Greater: return "greater";
    case CmpVerdict::Kind::ProvenEqual: return "equal";
    case CmpVerdict::Kind::Unresolved: return "unresolved";
  }
  return "unresolved";
}

// Compare two enclosures once, without refinement.
inline std::optional<CmpVerdict::Kind> compare_once(const RealEnclosure& a, const RealEnclosure& b) {
  if (a.hi && *a.hi < b.lo) return CmpVerdict::Kind::Less;
  if (b.hi && *b.hi < a.lo) return CmpVerdict::Kind::Greater;
  // Point enclosures are exact representations.
  if (a.is_point() && b.is_point() && a.lo == b.lo) return CmpVerdict::Kind::ProvenEqual;
  return std::nullopt;
}

// Ladder comparison: producers are called with 64, 128, ... bits up to the
// cap, stopping at the first decisive answer.
template <class ProducerA, class ProducerB>
CmpVerdict cmp_certified(ProducerA&& a, ProducerB&& b, int max_precision_bits = kDefaultPrecisionCap) {
  int bits = std::min(kLadderStart, max_precision_bits);
  for (;;) {
    if (auto k = compare_once(a(bits), b(bits))) return {*k, bits};
    if (bits >= max_precision_bits) return {CmpVerdict::Kind::Unresolved, bits};
    bits = std::min(bits * 2, max_precision_bits);
  }
}

inline auto constant(const Rat& v) {
  return [v](int bits) { return RealEnclosure::exact(v, bits); };
}

enum class Ternary { Holds, Fails, Unresolved };

inline std::string to_string(Ternary t) {
  switch (t) {
    case Ternary::Holds: return "holds";
    case Ternary::Fails: return "fails";
    case Ternary::Unresolved: return "unresolved";
  }
  return "unresolved";
}

// Ternary for the strict claim a < b.
inline Ternary strictly_less(const CmpVerdict& v) {
  if (v.less()) return Ternary::Holds;
  if (v.unresolved()) return Ternary::Unresolved;
  return Ternary::Fails;
}

}  // namespace dioph
