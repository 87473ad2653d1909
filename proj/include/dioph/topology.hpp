#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "dioph/contfrac.hpp"
#include "dioph/dioset.hpp"
#include "dioph/enclosure.hpp"
#include "dioph/error.hpp"
#include "dioph/farey.hpp"
#include "dioph/interval_set.hpp"
#include "dioph/quality.hpp"
#include "dioph/rat.hpp"
#include "dioph/series.hpp"

namespace dioph {

namespace detail {

// gamma * q^e as a producer-friendly enclosure (exact for integer e).
inline RealEnclosure gamma_times_pow(const Rat& gamma, const Int& q, const Rat& e, int bits) {
  return RealEnclosure::exact(gamma, bits) * pow_real(Rat(q), e, std::max(bits, 8));
}

// gamma / q^(tau+1).
inline RealEnclosure radius_enc(const Rat& gamma, const Int& q, const Rat& tau, int bits) {
  return gamma_times_pow(gamma, q, -(tau + Rat(1)), bits);
}

// 2 gamma / q^(tau-1).
inline RealEnclosure margin_enc(const Rat& gamma, const Int& q, const Rat& tau, int bits) {
  return gamma_times_pow(Rat(2) * gamma, q, Rat(1) - tau, bits);
}

inline void need_rows(const ContinuedFraction& cf, std::size_t upto) {
  if (!cf.has_quotient(upto)) {
    if (cf.is_rational()) throw UndefinedTailError("rational expansion has no convergent " + std::to_string(upto));
    throw InsufficientDataError("no convergent " + std::to_string(upto));
  }
}

}  // namespace detail

// Gap condition between the exclusion intervals at convergents n and n+2:
// r_n + r_{n+2} (+ 2 gamma/q_{n+2}^(tau-1) when strict) < |p_{n+2}/q_{n+2} - p_n/q_n|.
inline Ternary check_star_rows(const ConvergentRow& rn, const ConvergentRow& rn2, const Rat& gamma, const Rat& tau,
                               bool strict, int cap = kDefaultPrecisionCap) {
  Rat gap = abs(Rat(rn2.p, rn2.q) - Rat(rn.p, rn.q));
  auto rhs = [&](int b) {
    RealEnclosure v = detail::radius_enc(gamma, rn.q, tau, b) + detail::radius_enc(gamma, rn2.q, tau, b);
    if (strict) v = v + detail::margin_enc(gamma, rn2.q, tau, b);
    return v;
  };
  return strictly_less(cmp_certified(rhs, constant(gap), std::max(cap, kLadderStart)));
}

inline Ternary check_star(const AlphaSpec& alpha, const Rat& gamma, const Rat& tau, std::size_t n,
                          int cap = kDefaultPrecisionCap) {
  ContinuedFraction cf(alpha);
  detail::need_rows(cf, n + 2);
  auto t = cf.convergent_rows(n + 3);
  return check_star_rows(t[n], t[n + 2], gamma, tau, false, cap);
}

inline Ternary check_star_strict(const AlphaSpec& alpha, const Rat& gamma, const Rat& tau, std::size_t n,
                                 int cap = kDefaultPrecisionCap) {
  ContinuedFraction cf(alpha);
  detail::need_rows(cf, n + 2);
  auto t = cf.convergent_rows(n + 3);
  return check_star_rows(t[n], t[n + 2], gamma, tau, true, cap);
}

namespace detail {

inline RealEnclosure threshold_at(const Int& qn, const Int& qn1, const Int& qn2, const Rat& gamma, const Rat& tau,
                                  bool strict, int bits) {
  Rat one(1);
  RealEnclosure B = RealEnclosure::exact(one / gamma, bits) - Rat(qn1) * pow_real(Rat(qn), -tau, bits) -
                    Rat(qn * qn1) * pow_real(Rat(qn2), -(tau + one), bits);
  if (strict) B = B - Rat(2 * qn * qn1) * pow_real(Rat(qn2), one - tau, bits);
  if (B.upper().sign() <= 0)
    throw PreconditionError("threshold bracket is not positive: the gap condition fails for every a_{n+2}");
  if (B.lo.sign() <= 0) throw PreconditionError("threshold bracket sign unresolved at " + std::to_string(bits) + " bits");
  return (Rat(qn) / (gamma * Rat(qn1))) / B - RealEnclosure::exact(Rat(qn, qn1), bits);
}

inline RealEnclosure threshold(const Int& qn, const Int& qn1, const Int& qn2, const Rat& gamma, const Rat& tau,
                               bool strict, int bits, int cap) {
  if (qn < 1 || qn1 < 1 || qn2 < 1) throw UsageError("threshold needs positive denominators");
  if (gamma.sign() <= 0) throw DomainError("gamma must be positive");
  if (tau.is_integer()) return threshold_at(qn, qn1, qn2, gamma, tau, strict, bits);
  for (int b = std::max(bits, kLadderStart);; b *= 2) {
    try {
      return threshold_at(qn, qn1, qn2, gamma, tau, strict, b);
    } catch (const PreconditionError&) {
      if (b >= cap) throw;
    }
  }
}

}  // namespace detail

// The gap condition holds iff a_{n+2} exceeds this, given the bracket
// 1/gamma - q_{n+1}/q_n^tau - q_n q_{n+1}/q_{n+2}^(tau+1) is positive.
inline RealEnclosure a_threshold_star(const Int& qn, const Int& qn1, const Int& qn2, const Rat& gamma, const Rat& tau,
                                      int bits = kDefaultPrecision, int cap = kDefaultPrecisionCap) {
  return detail::threshold(qn, qn1, qn2, gamma, tau, false, bits, cap);
}

// As above with the extra 2 q_n q_{n+1}/q_{n+2}^(tau-1) inside the bracket.
inline RealEnclosure a_threshold_strict(const Int& qn, const Int& qn1, const Int& qn2, const Rat& gamma,
                                        const Rat& tau, int bits = kDefaultPrecision, int cap = kDefaultPrecisionCap) {
  return detail::threshold(qn, qn1, qn2, gamma, tau, true, bits, cap);
}

// a > threshold, where a missing threshold means the bracket was not positive.
inline Ternary exceeds_threshold(const Int& a, const std::optional<RealEnclosure>& t) {
  if (!t) return Ternary::Fails;
  if (t->upper() < Rat(a)) return Ternary::Holds;
  if (Rat(a) <= t->lo) return Ternary::Fails;
  return Ternary::Unresolved;
}

struct GapReport {
  std::size_t n = 0;
  Ternary star = Ternary::Unresolved, star_strict = Ternary::Unresolved;
  std::optional<RealEnclosure> a_threshold_star, a_threshold_strict;  // nullopt: bracket not positive
  Int a_actual;
  Int q_n, q_n1, q_n2;
  bool threshold_agrees = true;  // gap verdicts match the threshold comparisons
};

inline GapReport gap_report_rows(const ConvergentTable& t, std::size_t n, const Rat& gamma, const Rat& tau,
                                 int bits = kDefaultPrecision, int cap = kDefaultPrecisionCap) {
  GapReport g;
  g.n = n;
  g.q_n = t[n].q;
  g.q_n1 = t[n + 1].q;
  g.q_n2 = t[n + 2].q;
  g.a_actual = t[n + 2].a;
  g.star = check_star_rows(t[n], t[n + 2], gamma, tau, false, cap);
  g.star_strict = check_star_rows(t[n], t[n + 2], gamma, tau, true, cap);
  auto thr = [&](bool strict) -> std::optional<RealEnclosure> {
    try {
      return detail::threshold(g.q_n, g.q_n1, g.q_n2, gamma, tau, strict, bits, cap);
    } catch (const PreconditionError&) {
      return std::nullopt;
    }
  };
  g.a_threshold_star = thr(false);
  g.a_threshold_strict = thr(true);
  auto agrees = [](Ternary gap, Ternary th) {
    return gap == Ternary::Unresolved || th == Ternary::Unresolved || gap == th;
  };
  g.threshold_agrees = agrees(g.star, exceeds_threshold(g.a_actual, g.a_threshold_star)) &&
                       agrees(g.star_strict, exceeds_threshold(g.a_actual, g.a_threshold_strict));
  return g;
}

inline GapReport gap_report(const AlphaSpec& alpha, const Rat& gamma, const Rat& tau, std::size_t n,
                            int bits = kDefaultPrecision, int cap = kDefaultPrecisionCap) {
  ContinuedFraction cf(alpha);
  detail::need_rows(cf, n + 2);
  return gap_report_rows(cf.convergent_rows(n + 3), n, gamma, tau, bits, cap);
}

enum class GammaRelation { Equal, Below, Above, Undetermined };

inline std::string to_string(GammaRelation r) {
  switch (r) {
    case GammaRelation::Equal: return "equal";
    case GammaRelation::Below: return "below";
    case GammaRelation::Above: return "above";
    case GammaRelation::Undetermined: return "undetermined";
  }
  return "undetermined";
}

struct IsolationReport {
  bool in_set_possible = true;  // false for rational alpha
  GammaRelation gamma_relation = GammaRelation::Equal;
  std::vector<std::pair<std::size_t, std::size_t>> type1_ties;
  std::vector<std::size_t> type2_hits;
  std::vector<std::size_t> boundary_flags;
  std::vector<std::size_t> unresolved_candidates;
  GammaResult gamma;
};

// Tie structure of the minimal quality. With gamma omitted the analysis is at
// gamma = gamma(alpha, tau) itself.
inline IsolationReport detect_isolation(const AlphaSpec& alpha, const std::optional<Rat>& gamma, const Rat& tau,
                                        std::size_t depth, int bits = kDefaultPrecision) {
  IsolationReport rep;
  ContinuedFraction cf(alpha);
  if (cf.is_rational()) {
    rep.in_set_possible = false;
    return rep;
  }
  rep.gamma = gamma_of(alpha, tau, depth, bits);
  const GammaResult& g = rep.gamma;
  if (gamma) {
    if (g.exact) {
      int s = (QuadNum(*gamma) - *g.exact).sign();
      rep.gamma_relation = s == 0 ? GammaRelation::Equal : (s < 0 ? GammaRelation::Below : GammaRelation::Above);
    } else if (*gamma < g.lower) {
      rep.gamma_relation = GammaRelation::Below;
    } else if (g.upper < *gamma) {
      rep.gamma_relation = GammaRelation::Above;
    } else {
      rep.gamma_relation = GammaRelation::Undetermined;
    }
    for (const auto& r : g.rows)
      if (r.exact && *r.exact == QuadNum(*gamma)) rep.boundary_flags.push_back(r.n);
  }
  bool proven = g.certified && (g.exact || g.argmin_candidates.size() == 1);
  if (!proven) {
    rep.unresolved_candidates = g.argmin_candidates;
    return rep;
  }
  std::vector<std::size_t> even, odd;
  for (auto n : g.argmin_candidates) (n % 2 ? odd : even).push_back(n);
  if (!even.empty() && !odd.empty()) {
    for (auto a : g.argmin_candidates)
      for (auto b : g.argmin_candidates)
        if (a < b && (a % 2) != (b % 2)) rep.type1_ties.push_back({a, b});
  } else {
    rep.type2_hits = g.argmin_candidates;
  }
  return rep;
}

struct CensusRecord {
  std::size_t n = 0;
  Int p_n, q_n, p_n2, q_n2, q_n1;
  Rat window_lo, window_hi;  // I_n with ordered endpoints
  Rat window_measure;
  Rat complement_measure_in_window;  // exact for integer tau, an upper bound otherwise
  bool complement_exact = true;
  Rat tail_bound;
  Rat residual_lower;  // window - complement - tail
  bool verdict = false;
  RealEnclosure c_n;
  Ternary c_n_margin = Ternary::Unresolved;
  std::size_t fractions_considered = 0;
  std::size_t interior_fractions = 0;
  std::optional<std::int64_t> min_interior_denominator;
  Int qmax;
};

namespace detail {

// Open excluded intervals (outer radius) of reduced p/q, q <= Qmax, meeting
// the open window (lo, hi) inside [0, 1].
inline std::vector<OpenInterval> window_exclusions(const Rat& lo, const Rat& hi, const Rat& gamma, const Rat& tau,
                                                   std::int64_t Qmax, std::size_t* interior, std::size_t* considered,
                                                   std::optional<std::int64_t>* min_q, int bits = kSetPrecision) {
  std::vector<OpenInterval> ex;
  std::vector<Radius> radius(static_cast<std::size_t>(Qmax) + 1);
  for (std::int64_t q = 1; q <= Qmax; ++q) radius[q] = exclusion_radius(Int(static_cast<long>(q)), gamma, tau, bits);
  auto add = [&](std::int64_t p, std::int64_t q) {
    Rat c = Fraction{p, q}.value();
    const Rat& r = radius[q].outer;
    ex.push_back({c - r, c + r});
  };
  auto inside = farey_window(lo, hi, Qmax, false, false);
  if (interior) *interior = inside.size();
  for (const auto& f : inside) {
    add(f.p, f.q);
    if (min_q && (!*min_q || f.q < **min_q)) *min_q = f.q;
  }
  // Endpoints and the nearest fractions just outside, whose intervals may
  // reach in (r_q < 1/q, so one candidate per side and q).
  for (std::int64_t q = 1; q <= Qmax; ++q) {
    Int Q(static_cast<long>(q));
    Int left = ceil(lo * Rat(Q)) - 1, right = floor(hi * Rat(Q)) + 1;
    Int at_lo = floor(lo * Rat(Q)), at_hi = floor(hi * Rat(Q));
    const Rat& r = radius[q].outer;
    auto consider = [&](const Int& p, bool left_side) {
      if (p < 0 || p > Q || gcd(p, Q) != 1) return;
      Rat c(p, Q);
      bool reaches = left_side ? lo < c + r : c - r < hi;
      if (reaches) add(p.get_si(), q);
    };
    consider(left, true);
    consider(right, false);
    if (Rat(at_lo, Q) == lo) consider(at_lo, true);
    if (Rat(at_hi, Q) == hi && hi != lo) consider(at_hi, false);
  }
  if (considered) *considered = ex.size();
  return ex;
}

}  // namespace detail

// Positive-measure evidence for D_{gamma,tau} inside I_n = (p_n/q_n, p_{n+2}/q_{n+2}).
inline CensusRecord census(const AlphaSpec& alpha, const Rat& gamma, const Rat& tau, std::size_t n, const Int& Qmax,
                           int bits = kSetPrecision) {
  if (gamma.sign() <= 0) throw DomainError("gamma must be positive");
  if (tau <= Rat(1)) throw DivergenceError("census tail bound needs tau > 1");
  ContinuedFraction cf(alpha);
  detail::need_rows(cf, n + 2);
  auto t = cf.convergent_rows(n + 3);
  CensusRecord c;
  c.n = n;
  c.p_n = t[n].p;
  c.q_n = t[n].q;
  c.q_n1 = t[n + 1].q;
  c.p_n2 = t[n + 2].p;
  c.q_n2 = t[n + 2].q;
  c.qmax = Qmax;
  if (Qmax < c.q_n2) throw InsufficientDataError("census cutoff Qmax must be >= q_{n+2} = " + c.q_n2.get_str());
  if (!Qmax.fits_slong_p() || Qmax > 100000000) throw UsageError("census cutoff too large");
  Rat a(c.p_n, c.q_n), b(c.p_n2, c.q_n2);
  if (a < Rat(0) || Rat(1) < b || Rat(1) < a || b < Rat(0)) throw DomainError("census needs alpha in (0,1)");
  bool even = a < b;
  c.window_lo = even ? a : b;
  c.window_hi = even ? b : a;
  c.window_measure = c.window_hi - c.window_lo;
  c.complement_exact = tau.is_integer();

  auto ex = detail::window_exclusions(c.window_lo, c.window_hi, gamma, tau, Qmax.get_si(), &c.interior_fractions,
                                      &c.fractions_considered, &c.min_interior_denominator, bits);
  std::vector<Rat> lens;
  for (const auto& u : union_of(std::move(ex))) {
    Rat lo = max(u.lo, c.window_lo), hi = min(u.hi, c.window_hi);
    if (lo < hi) lens.push_back(hi - lo);
  }
  c.complement_measure_in_window = exact_sum(std::move(lens));

  // q > Qmax: at most q w + 2 centres per q reach the window, each removing
  // at most 2 gamma / q^(tau+1).
  c.tail_bound = round_up(Rat(2) * gamma *
                              (c.window_measure * power_tail_upper(tau, Qmax, bits) +
                               Rat(2) * power_tail_upper(tau + Rat(1), Qmax, bits)),
                          bits);
  c.residual_lower = c.window_measure - c.complement_measure_in_window - c.tail_bound;
  c.verdict = c.residual_lower.sign() > 0;

  // c_n over the half-open window with q < q_{n+2}.
  std::int64_t qcut = c.q_n2.get_si() - 1;
  std::optional<RealEnclosure> cn;
  auto fr = farey_window(c.window_lo, c.window_hi, qcut, even, !even);
  for (const auto& f : fr) {
    Radius r = exclusion_radius(Int(static_cast<long>(f.q)), gamma, tau, bits);
    Rat x = f.value();
    RealEnclosure e = even ? RealEnclosure{x + r.inner, x + r.outer, bits} : RealEnclosure{x - r.outer, x - r.inner, bits};
    if (!cn) cn = e;
    else if (even) cn = RealEnclosure{max(cn->lo, e.lo), max(cn->upper(), e.upper()), bits};
    else cn = RealEnclosure{min(cn->lo, e.lo), min(cn->upper(), e.upper()), bits};
  }
  if (cn) {
    c.c_n = *cn;
    auto target = [&](int bb) {
      RealEnclosure m = detail::radius_enc(gamma, c.q_n2, tau, bb) + detail::margin_enc(gamma, c.q_n2, tau, bb);
      return even ? RealEnclosure::exact(b, bb) - m : RealEnclosure::exact(b, bb) + m;
    };
    RealEnclosure tg = target(bits);
    if (even) c.c_n_margin = cn->upper() < tg.lo ? Ternary::Holds : (tg.upper() <= cn->lo ? Ternary::Fails : Ternary::Unresolved);
    else c.c_n_margin = tg.upper() < cn->lo ? Ternary::Holds : (cn->upper() <= tg.lo ? Ternary::Fails : Ternary::Unresolved);
  }
  return c;
}

struct SlackRow {
  std::int64_t p, q;
  RealEnclosure slack;  // exact point for integer tau; negative = exception
};

// Slack of p/q + r_q < p_{n+2}/q_{n+2} - r_{n+2} - 2 gamma/q_{n+2}^(tau-1)
// (mirrored for odd n) over p/q in I_n with q < q_{n+2}.
inline std::vector<SlackRow> lemma2_margin(const AlphaSpec& alpha, const Rat& gamma, const Rat& tau, std::size_t n,
                                           int bits = kSetPrecision) {
  ContinuedFraction cf(alpha);
  detail::need_rows(cf, n + 2);
  auto t = cf.convergent_rows(n + 3);
  Rat a(t[n].p, t[n].q), b(t[n + 2].p, t[n + 2].q);
  bool even = a < b;
  RealEnclosure edge = detail::radius_enc(gamma, t[n + 2].q, tau, bits) + detail::margin_enc(gamma, t[n + 2].q, tau, bits);
  std::vector<SlackRow> out;
  std::int64_t qcut = t[n + 2].q.get_si() - 1;
  if (qcut < 1) return out;
  for (const auto& f : farey_window(even ? a : b, even ? b : a, qcut, false, false)) {
    RealEnclosure r = detail::radius_enc(gamma, Int(static_cast<long>(f.q)), tau, bits);
    Rat x = f.value();
    RealEnclosure s = even ? (RealEnclosure::exact(b, bits) - edge) - (RealEnclosure::exact(x, bits) + r)
                           : (RealEnclosure::exact(x, bits) - r) - (RealEnclosure::exact(b, bits) + edge);
    out.push_back({f.p, f.q, s});
  }
  return out;
}

struct Lemma8Row {
  std::size_t n;
  Int a_n2;
  RealEnclosure bound;  // C q_n^(2+eps)
  Ternary ok;           // a_{n+2} <= bound
};

// Rows where the gap condition fails, checked against a_{n+2} <= C q_n^(2+eps).
inline std::vector<Lemma8Row> lemma8_bound_check(const AlphaSpec& alpha, const Rat& gamma, const Rat& tau,
                                                 std::size_t depth, const Rat& eps, const Rat& C,
                                                 int bits = kDefaultPrecision) {
  if (C.sign() <= 0) throw UsageError("bound constant C must be positive");
  ContinuedFraction cf(alpha);
  auto t = cf.convergent_rows(depth);
  std::vector<Lemma8Row> out;
  for (std::size_t n = 0; n + 2 < t.size(); ++n) {
    if (check_star_rows(t[n], t[n + 2], gamma, tau, false) != Ternary::Fails) continue;
    RealEnclosure bound = RealEnclosure::exact(C, bits) * pow_real(Rat(t[n].q), Rat(2) + eps, bits);
    Rat a(t[n + 2].a);
    Ternary ok = a <= bound.lo ? Ternary::Holds : (bound.upper() < a ? Ternary::Fails : Ternary::Unresolved);
    out.push_back({n, t[n + 2].a, bound, ok});
  }
  return out;
}

struct Lemma10Row {
  std::size_t m;
  Ternary reached;                  // some earlier same-parity n reaches m's strict edge
  std::optional<std::size_t> witness;
};

// For each m >= 2: is there n < m of the same parity whose exclusion interval
// reaches past p_m/q_m -+ (r_m + 2 gamma/q_m^(tau-1))? A finite scan only.
inline std::vector<Lemma10Row> lemma10_scan(const AlphaSpec& alpha, const Rat& gamma, const Rat& tau,
                                            std::size_t depth, int bits = kDefaultPrecision) {
  ContinuedFraction cf(alpha);
  auto t = cf.convergent_rows(depth);
  std::vector<Lemma10Row> out;
  for (std::size_t m = 2; m < t.size(); ++m) {
    Lemma10Row row{m, Ternary::Fails, std::nullopt};
    Rat xm(t[m].p, t[m].q);
    RealEnclosure em = detail::radius_enc(gamma, t[m].q, tau, bits) + detail::margin_enc(gamma, t[m].q, tau, bits);
    bool any_unresolved = false;
    for (std::size_t n = m % 2; n < m; n += 2) {
      Rat xn(t[n].p, t[n].q);
      RealEnclosure rn = detail::radius_enc(gamma, t[n].q, tau, bits);
      // even: xn + rn >= xm - em ; odd: xn - rn <= xm + em
      RealEnclosure lhs = m % 2 == 0 ? RealEnclosure::exact(xn, bits) + rn + em : RealEnclosure::exact(xm, bits) + em + rn;
      Rat rhs = m % 2 == 0 ? xm : xn;
      if (rhs <= lhs.lo) {
        row.reached = Ternary::Holds;
        row.witness = n;
        break;
      }
      if (rhs <= lhs.upper()) any_unresolved = true;
    }
    if (row.reached != Ternary::Holds && any_unresolved) row.reached = Ternary::Unresolved;
    out.push_back(row);
  }
  return out;
}

struct LegendreViolation {
  Int p, q;
  Ternary violated;  // Holds: proven |alpha - p/q| <= 1/(2q^2) for a non-convergent
};

// Non-convergent reduced p/q with q <= qmax that come within 1/(2q^2) of alpha.
inline std::vector<LegendreViolation> legendre_check(const AlphaSpec& alpha, const Int& qmax,
                                                     int bits = kDefaultPrecision) {
  ContinuedFraction cf(alpha);
  auto conv = cf.convergent_rows_upto(qmax);
  auto is_convergent = [&](const Int& p, const Int& q) {
    for (const auto& r : conv)
      if (r.p == p && r.q == q) return true;
    return false;
  };
  auto exact = cf.exact_value();
  RealEnclosure av = cf.value(bits);
  std::vector<LegendreViolation> out;
  for (Int q = 1; q <= qmax; ++q) {
    Int base = floor(av.lo * Rat(q));
    for (Int p = base - 1; p <= base + 2; ++p) {
      if (gcd(p, q) != 1 || is_convergent(p, q)) continue;
      Rat lim(Int(1), Int(2 * q * q));
      Ternary v;
      if (exact) {
        QuadNum d = abs(*exact - QuadNum(Rat(p, q)));
        v = d <= QuadNum(lim) ? Ternary::Holds : Ternary::Fails;
      } else {
        RealEnclosure d = abs(av - RealEnclosure::exact(Rat(p, q)));
        v = d.upper() <= lim ? Ternary::Holds : (lim < d.lo ? Ternary::Fails : Ternary::Unresolved);
      }
      if (v != Ternary::Fails) out.push_back({p, q, v});
    }
  }
  return out;
}

}  // namespace dioph
