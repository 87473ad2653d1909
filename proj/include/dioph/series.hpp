#pragma once

#include "dioph/enclosure.hpp"
#include "dioph/error.hpp"
#include "dioph/rat.hpp"

namespace dioph {

inline Rat pow_upper(const Rat& base, const Rat& e, int bits) { return pow_real(base, e, bits).upper(); }
inline Rat pow_lower(const Rat& base, const Rat& e, int bits) { return pow_real(base, e, bits).lo; }

// Upper bound on sum_{q>Q} q^-e for e > 1 (integral comparison).
inline Rat power_tail_upper(const Rat& e, const Int& Q, int bits = kDefaultPrecision) {
  if (e <= Rat(1)) throw DivergenceError("sum of q^-" + e.str() + " diverges");
  if (Q < 1) throw UsageError("power tail needs Q >= 1");
  return round_up(pow_upper(Rat(Q), Rat(1) - e, bits) / (e - Rat(1)), bits);
}

// Upper bound U >= sum_{q>Q} (q+1)/q^(tau+1) = sum q^-tau + sum q^-(tau+1).
inline Rat rat_sum_tail_bound(const Rat& tau, const Int& Q, int bits = kDefaultPrecision) {
  if (tau <= Rat(2)) throw DivergenceError("tail bound needs tau > 2, got " + tau.str());
  if (Q < 1) throw UsageError("tail bound needs Q >= 1");
  return round_up(power_tail_upper(tau, Q, bits) + power_tail_upper(tau + Rat(1), Q, bits), bits);
}

// Upper bound on sum_{p=a}^{b} p^-s for 1 <= a <= b and any rational s.
inline Rat power_sum_upper(const Rat& s, const Int& a, const Int& b, int bits = kDefaultPrecision) {
  if (a < 1) throw UsageError("power sum needs a >= 1");
  if (b < a) return Rat(0);
  if (s.sign() == 0) return Rat(Int(b - a + 1));
  // Monotone terms: largest term plus the integral over [a, b].
  Rat largest = s.sign() > 0 ? pow_upper(Rat(a), -s, bits) : pow_upper(Rat(b), -s, bits);
  Rat integral;
  if (s == Rat(1)) {
    integral = ln_enclosure(Rat(b, a), bits).upper();
  } else {
    Rat one_minus = Rat(1) - s;
    // (b^(1-s) - a^(1-s)) / (1-s), sign-safe in both cases.
    if (one_minus.sign() > 0) {
      integral = (pow_upper(Rat(b), one_minus, bits) - pow_lower(Rat(a), one_minus, bits)) / one_minus;
    } else {
      integral = (pow_lower(Rat(b), one_minus, bits) - pow_upper(Rat(a), one_minus, bits)) / one_minus;
    }
  }
  return round_up(largest + integral, bits);
}

}  // namespace dioph
