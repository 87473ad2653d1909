#pragma once

#include <numeric>
#include <utility>
#include <vector>

#include "dioph/enclosure.hpp"
#include "dioph/error.hpp"
#include "dioph/interval_set.hpp"
#include "dioph/rat.hpp"
#include "dioph/series.hpp"

namespace dioph {

inline constexpr int kSetPrecision = 128;

// Exclusion radius gamma / q^(tau+1). For non-integer tau, `inner` <= true
// radius <= `outer`, both dyadic.
struct Radius {
  Rat inner, outer;
  bool exact() const { return inner == outer; }
};

inline Radius exclusion_radius(const Int& q, const Rat& gamma, const Rat& tau, int bits = kSetPrecision) {
  if (tau.is_integer()) {
    Rat r = gamma / Rat(pow_int(q, tau.num().get_ui() + 1));
    return {r, r};
  }
  RealEnclosure qp = pow_real(Rat(q), tau + Rat(1), bits);
  return {round_down(gamma / *qp.hi, bits), round_up(gamma / qp.lo, bits)};
}

// (p/q - r, p/q + r) with r = gamma/q^(tau+1); for non-integer tau both the
// inner-rounded (smaller) and outer-rounded (larger) intervals.
struct ExcludedInterval {
  Rat center;
  Radius radius;
  OpenInterval inner() const { return {center - radius.inner, center + radius.inner}; }
  OpenInterval outer() const { return {center - radius.outer, center + radius.outer}; }
  bool exact() const { return radius.exact(); }
};

inline ExcludedInterval excluded_interval(const Int& p, const Int& q, const Rat& gamma, const Rat& tau,
                                          int bits = kSetPrecision) {
  if (q < 1) throw UsageError("excluded interval needs q >= 1");
  if (p < 0 || p > q) throw UsageError("excluded interval needs 0 <= p <= q");
  if (gcd(p, q) != 1) throw UsageError(p.get_str() + "/" + q.get_str() + " is not reduced");
  if (gamma.sign() <= 0) throw DomainError("gamma must be positive");
  return {Rat(p, q), exclusion_radius(q, gamma, tau, bits)};
}

namespace detail {

inline void check_set_args(const Rat& gamma, const Rat& tau, const Int& Qmax) {
  if (gamma.sign() <= 0) throw DomainError("gamma must be positive");
  if (tau < Rat(1)) throw DomainError("tau must be >= 1");
  if (Qmax < 1) throw UsageError("Qmax must be >= 1");
}

// Every excluded interval for reduced p/q in [0,1] with q <= Qmax.
inline void all_exclusions(const Rat& gamma, const Rat& tau, long Qmax, int bits, std::vector<OpenInterval>& inner,
                           std::vector<OpenInterval>* outer) {
  for (long q = 1; q <= Qmax; ++q) {
    Radius r = exclusion_radius(Int(q), gamma, tau, bits);
    Rat rq{Int(q)};
    for (long p = 0; p <= q; ++p) {
      if (std::gcd(p, q) != 1) continue;
      Rat c = Rat{Int(p)} / rq;
      inner.push_back({c - r.inner, c + r.inner});
      if (outer) outer->push_back({c - r.outer, c + r.outer});
    }
  }
}

}  // namespace detail

// D^(Q) = {x in (0,1): ||q x|| >= gamma/q^tau for all q <= Qmax}.
inline IntervalSet truncated_set(const Rat& gamma, const Rat& tau, const Int& Qmax, int bits = kSetPrecision) {
  detail::check_set_args(gamma, tau, Qmax);
  if (!Qmax.fits_slong_p()) throw UsageError("Qmax too large");
  if (gamma >= Rat(1, 2)) return IntervalSet({}, tau.is_integer());
  long Q = Qmax.get_si();
  if (tau.is_integer()) {
    std::vector<OpenInterval> ex;
    detail::all_exclusions(gamma, tau, Q, bits, ex, nullptr);
    return IntervalSet(complement_of_union(std::move(ex), Rat(0), Rat(1)));
  }
  std::vector<OpenInterval> small, large;
  detail::all_exclusions(gamma, tau, Q, bits, small, &large);
  return IntervalSet::with_inner(complement_of_union(std::move(small), Rat(0), Rat(1)),
                                 complement_of_union(std::move(large), Rat(0), Rat(1)));
}

inline Rat measure(const IntervalSet& s) {
  if (!s.exact()) throw DomainError("enclosure-path set has no exact measure; use measure_bracket");
  return IntervalSet::measure_of(s.intervals());
}

// [inner measure, outer measure]; a point on the exact path.
inline std::pair<Rat, Rat> measure_bracket(const IntervalSet& s) {
  Rat outer = IntervalSet::measure_of(s.intervals());
  if (s.exact()) return {outer, outer};
  return {IntervalSet::measure_of(s.inner().value_or(std::vector<ClosedInterval>{})), outer};
}

inline IntervalSet restrict(const IntervalSet& s, const Rat& lo, const Rat& hi) {
  if (s.exact()) return IntervalSet(intersect_window(s.intervals(), lo, hi));
  return IntervalSet::with_inner(intersect_window(s.intervals(), lo, hi),
                                 intersect_window(s.inner().value_or(std::vector<ClosedInterval>{}), lo, hi));
}

// Image under x -> 1 - x.
inline IntervalSet reflect(const IntervalSet& s) {
  auto flip = [](const std::vector<ClosedInterval>& v) {
    std::vector<ClosedInterval> out;
    out.reserve(v.size());
    for (auto it = v.rbegin(); it != v.rend(); ++it) out.push_back({Rat(1) - it->hi, Rat(1) - it->lo});
    return out;
  };
  if (s.exact()) return IntervalSet(flip(s.intervals()));
  return IntervalSet::with_inner(flip(s.intervals()), flip(s.inner().value_or(std::vector<ClosedInterval>{})));
}

// a subset of b, interval-wise.
inline bool is_subset(const IntervalSet& a, const IntervalSet& b) {
  const auto& B = b.intervals();
  std::size_t j = 0;
  for (const auto& iv : a.intervals()) {
    while (j < B.size() && B[j].hi < iv.lo) ++j;
    if (j == B.size() || iv.lo < B[j].lo || B[j].hi < iv.hi) return false;
  }
  return true;
}

struct SetBracket {
  IntervalSet outer;             // contains D_{gamma,tau}
  Rat tail_measure_bound;        // mu(outer \ D) <= this
  Rat certified_lower_measure;   // <= mu(D)
};

inline SetBracket set_bracket(const Rat& gamma, const Rat& tau, const Int& Qmax, int bits = kSetPrecision) {
  detail::check_set_args(gamma, tau, Qmax);
  if (tau <= Rat(2)) throw DivergenceError("set bracket needs tau > 2, got " + tau.str());
  SetBracket b{truncated_set(gamma, tau, Qmax, bits), Rat(0), Rat(0)};
  // At most q+1 centres per denominator, each removing 2 gamma / q^(tau+1).
  b.tail_measure_bound = Rat(2) * gamma * rat_sum_tail_bound(tau, Qmax, bits);
  b.certified_lower_measure = measure_bracket(b.outer).first - b.tail_measure_bound;
  return b;
}

// Direct check of ||q x|| >= gamma/q^tau for all q <= Qmax (integer tau).
inline bool satisfies_truncated(const Rat& x, const Rat& gamma, const Rat& tau, const Int& Qmax) {
  if (!tau.is_integer()) throw UsageError("direct check needs integer tau");
  if (!(Rat(0) < x && x < Rat(1))) return false;
  for (Int q = 1; q <= Qmax; ++q) {
    Rat qx = Rat(q) * x;
    Rat f = qx - Rat(floor(qx));
    Rat d = min(f, Rat(1) - f);
    if (d * pow(Rat(q), tau.num().get_si()) < gamma) return false;
  }
  return true;
}

}  // namespace dioph
