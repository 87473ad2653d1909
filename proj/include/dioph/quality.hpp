#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "dioph/contfrac.hpp"
#include "dioph/enclosure.hpp"
#include "dioph/error.hpp"
#include "dioph/quadratic_field.hpp"
#include "dioph/rat.hpp"

namespace dioph {

// q^tau as an enclosure; exact for integer tau.
inline RealEnclosure q_pow(const Int& q, const Rat& tau, int bits) {
  return pow_real(Rat(q), tau, std::max(bits, 8));
}

inline bool exact_path(const ContinuedFraction& cf, const Rat& tau) {
  return tau.is_integer() && !cf.is_prefix();
}

struct QualityRow {
  std::size_t n = 0;
  Int p, q;
  RealEnclosure gamma;
  std::optional<QuadNum> exact;  // set on the exact path
};

// Quotient-list position n with its predecessor denominator.
struct RowContext {
  ConvergentRow row;
  Int q_prev;  // q_{n-1}, 0 for n = 0
};

namespace detail {

inline void check_tau(const Rat& tau) {
  if (tau < Rat(1)) throw DomainError("tau must be >= 1, got " + tau.str());
}

inline bool is_final_rational_row(const ContinuedFraction& cf, std::size_t n) {
  return cf.is_rational() && n + 1 == *cf.known_terms();
}

}  // namespace detail

// gamma_n by the direct definition and by q^tau/(alpha_{n+1} q_n + q_{n-1});
// the result is the intersection and the two must agree.
inline QualityRow gamma_row(const ContinuedFraction& cf, const Rat& tau, const RowContext& ctx, int bits) {
  detail::check_tau(tau);
  const auto& r = ctx.row;
  QualityRow out{r.n, r.p, r.q, {}, std::nullopt};
  bool final_row = detail::is_final_rational_row(cf, r.n);
  if (exact_path(cf, tau)) {
    QuadNum alpha = *cf.exact_value();
    QuadNum qt(pow(Rat(r.q), tau.num().get_si()));
    QuadNum direct = qt * abs(QuadNum(Rat(r.q)) * alpha - QuadNum(Rat(r.p)));
    QuadNum fond(0);
    if (!final_row) {
      QuadNum tail = *cf.exact_tail(r.n + 1);
      fond = qt / (tail * QuadNum(Rat(r.q)) + QuadNum(Rat(ctx.q_prev)));
    }
    if (!(direct == fond))
      throw ConsistencyError("gamma_n routes disagree at n=" + std::to_string(r.n) + ": " + direct.str() + " vs " + fond.str());
    out.exact = direct;
    out.gamma = direct.enclose(bits);
    return out;
  }
  RealEnclosure qt = q_pow(r.q, tau, bits);
  RealEnclosure dist;
  if (auto a = cf.exact_value()) {
    dist = abs(QuadNum(Rat(r.q)) * *a - QuadNum(Rat(r.p))).enclose(bits + 8);
  } else {
    dist = abs(cf.value(bits + 8) * Rat(r.q) - RealEnclosure::exact(Rat(r.p)));
  }
  RealEnclosure direct = qt * dist;
  RealEnclosure fond = RealEnclosure::exact(0, bits);
  if (!final_row) {
    RealEnclosure denom = cf.tail(r.n + 1, bits + 8) * Rat(r.q) + Rat(ctx.q_prev);
    fond = qt / denom;
  }
  out.gamma = intersect(direct, fond);
  out.gamma.bits = bits;
  return out;
}

inline std::vector<RowContext> row_contexts(const ConvergentTable& t) {
  std::vector<RowContext> out;
  out.reserve(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) out.push_back({t[i], i == 0 ? Int(0) : t[i - 1].q});
  return out;
}

inline QualityRow gamma_n(const AlphaSpec& alpha, const Rat& tau, std::size_t n, int bits = kDefaultPrecision) {
  ContinuedFraction cf(alpha);
  auto t = cf.convergent_rows(n + 1);
  if (t.size() <= n) {
    if (cf.is_rational()) throw UndefinedTailError("rational expansion has no convergent " + std::to_string(n));
    throw InsufficientDataError("no convergent " + std::to_string(n));
  }
  return gamma_row(cf, tau, {t[n], n == 0 ? Int(0) : t[n - 1].q}, bits);
}

enum class Parity { All, Even, Odd };

inline bool parity_matches(Parity p, std::size_t n) {
  return p == Parity::All || (p == Parity::Even) == (n % 2 == 0);
}

struct GammaOptions {
  std::size_t depth = 40;
  int bits = kDefaultPrecision;
  std::optional<Int> max_denominator;  // restrict to convergents with q_n <= this
  Parity parity = Parity::All;
};

struct GammaResult {
  Rat lower, upper;
  std::vector<std::size_t> argmin_candidates;
  std::vector<Int> argmin_q;
  bool certified = false;
  std::size_t depth_used = 0;
  bool restricted = false;             // infimum over q_n <= max_denominator only
  std::optional<Rat> deep_bound;       // proven lower bound on all uncomputed rows
  std::optional<QuadNum> exact;        // exact minimum when certified on the exact path
  std::vector<QualityRow> rows;
};

// Lower bound on gamma_m for every m > last with m of the requested parity,
// from gamma_m = q_m^(tau-1) / (alpha_{m+1} + q_{m-1}/q_m).
inline std::optional<Rat> deep_lower_bound(const ContinuedFraction& cf, const Rat& tau, std::size_t last,
                                           const Int& q_next_lower, Parity parity, int bits) {
  Rat qfac = q_pow(q_next_lower, tau - Rat(1), bits).lo;
  std::optional<Rat> best;
  if (auto sup = cf.tail_sup_from(last + 2, bits)) best = qfac / (*sup + Rat(1));
  if (cf.is_quadratic()) {
    std::size_t s = std::max<std::size_t>(cf.preperiod(), 1), L = cf.period();
    if (last + 2 > s) {
      std::size_t k = std::min<std::size_t>(32, last + 2 - s);
      std::optional<Rat> worst;
      for (std::size_t m = last + 1; m <= last + 2 * L; ++m) {
        if (!parity_matches(parity, m)) continue;
        // q_{m-1}/q_m = [0; a_m, ..., a_1] lies in the image of [0,1] under
        // the last k maps x -> 1/(a + x).
        Rat lo = 0, hi = 1;
        for (std::size_t i = m + 1 - k; i <= m; ++i) {
          Rat a(cf.quotient(i));
          Rat nlo = Rat(1) / (a + hi), nhi = Rat(1) / (a + lo);
          lo = nlo;
          hi = nhi;
        }
        Rat b = Rat(1) / (*cf.tail(m + 1, bits).hi + hi);
        worst = worst ? min(*worst, b) : b;
      }
      if (worst) {
        Rat refined = qfac * *worst;
        best = best ? max(*best, refined) : refined;
      }
    }
  }
  return best;
}

inline GammaResult gamma_of(const AlphaSpec& alpha, const Rat& tau, const GammaOptions& opt) {
  detail::check_tau(tau);
  if (opt.depth < 1) throw UsageError("depth must be >= 1");
  ContinuedFraction cf(alpha);
  ConvergentTable table = opt.max_denominator ? cf.convergent_rows_upto(*opt.max_denominator, opt.depth)
                                              : cf.convergent_rows(opt.depth);
  GammaResult res;
  res.depth_used = table.size();
  auto ctxs = row_contexts(table);
  for (const auto& c : ctxs)
    if (parity_matches(opt.parity, c.row.n)) res.rows.push_back(gamma_row(cf, tau, c, opt.bits));
  if (res.rows.empty()) throw UsageError("no convergent of the requested parity within the depth");

  const std::size_t last = table.back().n;
  bool finished = false;  // no further rows exist in the problem
  if (cf.is_rational() && last + 1 == *cf.known_terms()) finished = true;
  if (opt.max_denominator && cf.has_quotient(last + 1)) {
    Int q_next = cf.quotient(last + 1) * table.back().q + (table.size() > 1 ? table[table.size() - 2].q : Int(0));
    if (q_next > *opt.max_denominator) {
      finished = true;
      res.restricted = true;
    }
  }

  if (exact_path(cf, tau)) {
    QuadNum m = *res.rows.front().exact;
    for (const auto& r : res.rows)
      if (*r.exact < m) m = *r.exact;
    for (const auto& r : res.rows)
      if (*r.exact == m) res.argmin_candidates.push_back(r.n);
    res.exact = m;
    RealEnclosure e = m.enclose(opt.bits);
    res.lower = e.lo;
    res.upper = *e.hi;
  } else {
    Rat U = res.rows.front().gamma.upper(), lowest = res.rows.front().gamma.lo;
    for (const auto& r : res.rows) {
      U = min(U, r.gamma.upper());
      lowest = min(lowest, r.gamma.lo);
    }
    for (const auto& r : res.rows)
      if (r.gamma.lo <= U) res.argmin_candidates.push_back(r.n);
    res.lower = lowest;
    res.upper = U;
  }

  if (finished) {
    res.certified = true;
  } else {
    Int q_next_lower = table.back().q;
    if (cf.has_quotient(last + 1))
      q_next_lower = cf.quotient(last + 1) * table.back().q + (table.size() > 1 ? table[table.size() - 2].q : Int(0));
    res.deep_bound = deep_lower_bound(cf, tau, last, q_next_lower, opt.parity, opt.bits);
    if (res.deep_bound && *res.deep_bound > res.upper) {
      res.certified = true;
    } else {
      res.lower = min(res.lower, res.deep_bound ? *res.deep_bound : Rat(0));
    }
  }
  for (auto n : res.argmin_candidates)
    for (const auto& r : res.rows)
      if (r.n == n) res.argmin_q.push_back(r.q);
  if (!res.certified) res.exact.reset();
  return res;
}

inline GammaResult gamma_of(const AlphaSpec& alpha, const Rat& tau, std::size_t depth, int bits = kDefaultPrecision) {
  GammaOptions opt;
  opt.depth = depth;
  opt.bits = bits;
  return gamma_of(alpha, tau, opt);
}

// (gamma_minus over even n, gamma_plus over odd n).
inline std::pair<GammaResult, GammaResult> gamma_parity(const AlphaSpec& alpha, const Rat& tau, std::size_t depth,
                                                        int bits = kDefaultPrecision) {
  GammaOptions opt;
  opt.depth = depth;
  opt.bits = bits;
  opt.parity = Parity::Even;
  GammaResult minus = gamma_of(alpha, tau, opt);
  opt.parity = Parity::Odd;
  return {std::move(minus), gamma_of(alpha, tau, opt)};
}

struct BruteForceResult {
  RealEnclosure value;
  Int argmin_q;
  std::optional<QuadNum> exact;
};

namespace detail {

// Sign of x + y sqrt(D), D > 0 non-square.
inline int sign_surd(const Int& x, const Int& y, const Int& D) {
  int sx = sgn(x), sy = sgn(y);
  if (sy == 0) return sx;
  if (sx == 0 || sx == sy) return sy;
  Int x2 = x * x, y2d = y * y * D;
  return x2 > y2d ? sx : sy;
}

}  // namespace detail

// min over q = 1..Qmax of q^tau ||q alpha||, without convergents.
inline BruteForceResult brute_force_gamma(const AlphaSpec& alpha, const Rat& tau, const Int& Qmax,
                                          int bits = kDefaultPrecision) {
  detail::check_tau(tau);
  if (Qmax < 1) throw UsageError("Qmax must be >= 1");
  ContinuedFraction cf(alpha);
  BruteForceResult best{RealEnclosure::exact(0), Int(0), std::nullopt};

  if (cf.is_quadratic() && tau.is_integer()) {
    const auto& qa = cf.normalized_quadratic();
    const Int &P = qa.P, &D = qa.D, &Q0 = qa.Q;
    unsigned long t = tau.num().get_ui();
    Int bestX, bestY;
    for (Int q = 1; q <= Qmax; ++q) {
      // p = floor(q alpha + 1/2) = floor((2qP + Q0 + sqrt(4 q^2 D)) / (2 Q0)).
      Int num = 2 * q * P + Q0, r = isqrt(Int(4 * q * q * D)), k = 2 * Q0;
      Int p = k > 0 ? floor_div(Int(num + r), k) : floor_div(Int(num + r + 1), k);
      Int A = q * P - p * Q0;
      int s = detail::sign_surd(A, q, D);
      Int qt = pow_int(q, t);
      Int X = s * qt * A, Y = s * qt * q;
      if (best.argmin_q == 0 || detail::sign_surd(Int(X - bestX), Int(Y - bestY), D) < 0) {
        bestX = X;
        bestY = Y;
        best.argmin_q = q;
      }
    }
    Int aq = Q0 < 0 ? Int(-Q0) : Q0;
    QuadNum v(Rat(bestX, aq), Rat(bestY, aq), D);
    best.exact = v;
    best.value = v.enclose(bits);
    return best;
  }

  if (cf.is_rational() && tau.is_integer()) {
    Rat v = std::get<RationalAlpha>(alpha).value;
    std::optional<Rat> m;
    for (Int q = 1; q <= Qmax; ++q) {
      Rat x = Rat(q) * v;
      Rat f = x - Rat(floor(x));
      Rat d = min(f, Rat(1) - f);
      Rat val = pow(Rat(q), tau.num().get_si()) * d;
      if (!m || val < *m) {
        m = val;
        best.argmin_q = q;
      }
    }
    best.exact = QuadNum(*m);
    best.value = RealEnclosure::exact(*m, bits);
    return best;
  }

  // Enclosure path: non-integer tau or PrefixCF input.
  auto value_at = [&](const Int& q, int b) {
    RealEnclosure qa;
    if (auto a = cf.exact_value()) qa = (QuadNum(Rat(q)) * *a).enclose(b + 16);
    else qa = cf.value(b + 16) * Rat(q);
    Int p = floor(qa.lo + Rat(1, 2));
    std::optional<RealEnclosure> m;
    for (Int pp = p - 1; pp <= p + 1; ++pp) {
      RealEnclosure d = abs(qa - RealEnclosure::exact(Rat(pp)));
      m = m ? RealEnclosure{min(m->lo, d.lo), min(m->upper(), d.upper()), b} : d;
    }
    return q_pow(q, tau, b) * *m;
  };
  std::optional<RealEnclosure> m;
  for (Int q = 1; q <= Qmax; ++q) {
    if (!m) {
      m = value_at(q, bits);
      best.argmin_q = q;
      continue;
    }
    Int qq = q, bq = best.argmin_q;
    CmpVerdict v = cmp_certified([&](int b) { return value_at(qq, b); }, [&](int b) { return value_at(bq, b); },
                                 std::max(bits, kLadderStart));
    if (v.less()) {
      m = value_at(q, bits);
      best.argmin_q = q;
    }
  }
  best.value = *m;
  return best;
}

struct MembershipIn {
  bool certified;
};
struct MembershipOut {
  std::size_t n;
  Int witness_q, witness_p;
};
struct MembershipUnknown {
  std::size_t budget_spent;
  Rat lower, upper;
  bool unresolved;  // some comparison hit the precision cap
};
using MembershipVerdict = std::variant<MembershipIn, MembershipOut, MembershipUnknown>;

namespace detail {

inline void check_unit_interval(const ContinuedFraction& cf) {
  if (auto a = cf.exact_value()) {
    if (!(QuadNum(0) < *a && *a < QuadNum(1))) throw DomainError("alpha must lie in (0,1)");
    return;
  }
  if (cf.quotient(0) != 0) throw DomainError("alpha must lie in (0,1): a_0 must be 0");
}

}  // namespace detail

inline MembershipVerdict membership(const AlphaSpec& alpha, const Rat& gamma, const Rat& tau, std::size_t depth_budget,
                                    int bits = kDefaultPrecision, int cap = kDefaultPrecisionCap) {
  detail::check_tau(tau);
  if (gamma.sign() <= 0) throw DomainError("gamma must be positive");
  if (depth_budget < 1) throw UsageError("depth budget must be >= 1");
  ContinuedFraction cf(alpha);
  detail::check_unit_interval(cf);
  auto table = cf.convergent_rows(depth_budget);
  auto ctxs = row_contexts(table);
  bool unresolved = false;
  std::optional<Rat> lowest, U;
  for (const auto& c : ctxs) {
    QualityRow row = gamma_row(cf, tau, c, bits);
    CmpVerdict v;
    if (row.exact) {
      int s = (*row.exact - QuadNum(gamma)).sign();
      v = {s < 0 ? CmpVerdict::Kind::Less : (s > 0 ? CmpVerdict::Kind::Greater : CmpVerdict::Kind::ProvenEqual), bits};
    } else {
      v = cmp_certified([&](int b) { return gamma_row(cf, tau, c, b).gamma; }, constant(gamma), std::max(cap, kLadderStart));
    }
    if (v.less()) return MembershipOut{c.row.n, c.row.q, c.row.p};
    if (v.unresolved()) unresolved = true;
    lowest = lowest ? min(*lowest, row.gamma.lo) : row.gamma.lo;
    U = U ? min(*U, row.gamma.upper()) : row.gamma.upper();
  }
  const std::size_t last = table.back().n;
  Int q_next_lower = table.back().q;
  if (cf.has_quotient(last + 1))
    q_next_lower = cf.quotient(last + 1) * table.back().q + (table.size() > 1 ? table[table.size() - 2].q : Int(0));
  auto deep = deep_lower_bound(cf, tau, last, q_next_lower, Parity::All, bits);
  if (!unresolved && deep && *deep >= gamma) return MembershipIn{true};
  bool exhausted = cf.is_prefix() && table.size() == *cf.known_terms();
  if (!unresolved && exhausted && !deep) return MembershipIn{false};
  Rat lo = min(*lowest, deep ? *deep : Rat(0));
  return MembershipUnknown{table.size(), lo, *U, unresolved};
}

struct TauBounds {
  Rat lower;
  std::optional<Rat> upper;  // nullopt = infinity
};

// Observed exponent bracket from log q_{n+1} / log q_n.
inline TauBounds tau_bounds(const AlphaSpec& alpha, std::size_t depth, int bits = 128) {
  if (depth < 2) throw UsageError("tau_bounds needs depth >= 2");
  ContinuedFraction cf(alpha);
  if (cf.is_quadratic()) return {Rat(1), Rat(1)};
  if (cf.is_prefix() && std::get<PrefixAlpha>(alpha).tail_high) return {Rat(1), Rat(1)};
  if (cf.is_rational()) return {Rat(1), std::nullopt};
  auto t = cf.convergent_rows(depth);
  // Certified r_n <= log q_{n+1} / log q_n on a 1/1024 grid. Rounding q_n up
  // and q_{n+1} down keeps the logarithms cheap for huge denominators.
  std::vector<Rat> rs;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const Int &q = t[i].q, &qn = t[i + 1].q;
    if (q <= 1) continue;
    Rat ratio = ln_enclosure(round_down(Rat(qn), bits), bits).lo / ln_enclosure(round_up(Rat(q), bits), bits).upper();
    rs.push_back(max(Rat(floor(ratio * Rat(1024)), Int(1024)), Rat(1)));
  }
  if (rs.empty()) return {Rat(1), std::nullopt};
  Rat lo = rs[rs.size() / 2];
  for (std::size_t i = rs.size() / 2; i < rs.size(); ++i) lo = min(lo, rs[i]);
  return {lo, std::nullopt};
}

}  // namespace dioph
