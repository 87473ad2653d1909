#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dioph/enclosure.hpp"
#include "dioph/error.hpp"
#include "dioph/quadratic_field.hpp"
#include "dioph/rat.hpp"
#include "dioph/series.hpp"

namespace dioph {

inline constexpr int kBandPrecision = 128;

// Exceptional-gamma band for (q_n, q_{n+1}, a_{n+2}) = (q, p, N), x = Np + q:
//   lo = (1 - q/x) / (p/q^tau + qp/x^(tau+1) + 2qp/x^(tau-1))
//   hi = (1 - q/x) / (p/q^tau + qp/x^(tau+1))
struct BandRecord {
  Int q, p, N;
  RealEnclosure lo, hi;  // points for integer tau
  Rat width_bound;       // 2 q C2^2 / (N^(tau-1) p^(tau-2))
};

inline BandRecord gamma_band(const Int& q, const Int& p, const Int& N, const Rat& tau,
                             const std::optional<Rat>& C2 = std::nullopt, int bits = kBandPrecision) {
  if (q < 1 || p < 1 || N < 1) throw UsageError("gamma_band needs q, p, N >= 1");
  if (tau <= Rat(1)) throw DomainError("gamma_band needs tau > 1");
  Rat one(1);
  Int x = N * p + q;
  Rat u = one - Rat(q, x);
  RealEnclosure D = Rat(p) * pow_real(Rat(q), -tau, bits) + Rat(q * p) * pow_real(Rat(x), -(tau + one), bits);
  RealEnclosure extra = Rat(2 * q * p) * pow_real(Rat(x), one - tau, bits);
  BandRecord b{q, p, N, u / (D + extra), u / D, Rat(0)};
  Rat c2 = C2 ? *C2 : pow_upper(Rat(q), tau, bits) / Rat(p);
  RealEnclosure den = pow_real(Rat(N), tau - one, bits) * pow_real(Rat(p), tau - Rat(2), bits);
  b.width_bound = round_up(Rat(2) * Rat(q) * c2 * c2 / den.lo, bits);
  return b;
}

// Exponents of the two band series: tau^2 - 3 tau - 1 and 2 tau^2 - 2 tau - 3.
template <class T>
struct SeriesExponents {
  T tau, lemma7, theorem;
  bool lemma7_converges = false, theorem_converges = false;
};

namespace detail {
inline bool exceeds_one(const Rat& v) { return Rat(1) < v; }
inline bool exceeds_one(const QuadNum& v) { return (v - QuadNum(1)).sign() > 0; }
inline bool below_one(const Rat& v) { return v < Rat(1); }
inline bool below_one(const QuadNum& v) { return (v - QuadNum(1)).sign() < 0; }
}  // namespace detail

template <class T>
SeriesExponents<T> exponents(const T& tau) {
  if (detail::below_one(tau)) throw DomainError("exponents need tau >= 1");
  SeriesExponents<T> s{tau, tau * tau - T(3) * tau - T(1), T(2) * tau * tau - T(2) * tau - T(3)};
  s.lemma7_converges = detail::exceeds_one(s.lemma7);
  s.theorem_converges = detail::exceeds_one(s.theorem);
  return s;
}

// The boundary value (3 + sqrt 17)/2.
inline QuadNum threshold_tau() { return QuadNum(Rat(3, 2), Rat(1, 2), Int(17)); }

// Partial sums sum_{q=M0}^{M} q^-e at each checkpoint M (ascending), as
// enclosures.
inline std::vector<std::pair<Int, RealEnclosure>> series_partial_sums(const Rat& e, const Int& M0,
                                                                      const std::vector<Int>& checkpoints,
                                                                      int bits = kBandPrecision) {
  if (M0 < 1) throw UsageError("partial sums start at q >= 1");
  std::vector<std::pair<Int, RealEnclosure>> out;
  std::vector<Rat> lo_terms, hi_terms;
  Rat lo(0), hi(0);
  Int q = M0;
  for (const auto& M : checkpoints) {
    if (!out.empty() && M < out.back().first) throw UsageError("checkpoints must ascend");
    for (; q <= M; ++q) {
      RealEnclosure t = pow_real(Rat(q), -e, bits);
      lo_terms.push_back(round_down(t.lo, bits));
      hi_terms.push_back(round_up(t.upper(), bits));
    }
    lo += exact_sum(std::move(lo_terms));
    hi += exact_sum(std::move(hi_terms));
    lo_terms.clear();
    hi_terms.clear();
    out.push_back({M, RealEnclosure{lo, hi, bits}});
  }
  return out;
}

struct UnionMeasureReport {
  Rat tau, C1, C2;
  Int M, q_max, N_max;
  Rat finite_sum;               // sum over q in (M, q_max] of the band width bounds
  std::optional<Rat> q_tail;    // bound for q > q_max; nullopt when the series diverges
  std::optional<Rat> total;     // finite_sum + q_tail
  std::size_t nonempty_q = 0;
};

// Upper bound on the gamma-measure covered by bands with q in (M, q_max],
// q^tau/C2 < p < q^tau/C1 and every N >= 1 (N > N_max via the closed-form tail).
inline UnionMeasureReport bands_union_measure(const Rat& tau, const Rat& C1, const Rat& C2, const Int& M,
                                              const Int& q_max, const Int& N_max, int bits = kBandPrecision) {
  if (!(Rat(0) < C1 && C1 < C2 && C2 < Rat(1, 2))) throw UsageError("need 0 < C1 < C2 < 1/2");
  if (tau <= Rat(2)) throw DivergenceError("the N-sum of band widths needs tau > 2");
  if (M < 0 || q_max < 1 || N_max < 1) throw UsageError("need M >= 0, q_max >= 1, N_max >= 1");
  Rat one(1), two(2), s = tau - two;
  UnionMeasureReport r{tau, C1, C2, M, q_max, N_max, Rat(0), std::nullopt, std::nullopt, 0};

  // Z >= sum_{N>=1} N^(1-tau).
  Rat Z = series_partial_sums(tau - one, Int(1), {N_max}, bits).back().second.upper() +
          round_up(pow_upper(Rat(N_max), two - tau, bits) / s, bits);

  std::vector<Rat> terms;
  for (Int q = M + 1; q <= q_max; ++q) {
    RealEnclosure qt = pow_real(Rat(q), tau, bits);
    // A superset of the integers strictly between q^tau/C2 and q^tau/C1.
    Int a = floor(qt.lo / C2) + 1, b = ceil(qt.upper() / C1) - 1;
    if (b < a) continue;
    ++r.nonempty_q;
    Rat P = power_sum_upper(s, a, b, bits);
    terms.push_back(round_up(two * Rat(q) * C2 * C2 * P * Z, bits));
  }
  r.finite_sum = exact_sum(std::move(terms));

  // q > q_max: with a > q^tau/C2, P(q) <= (C2/q^tau)^s + (C2/q^tau)^(s-1)/(s-1).
  Rat e1 = tau * s - one, e2 = tau * (s - one) - one;
  if (one < s && one < e2) {
    Rat Zall = one + one / s;
    Rat t1 = pow_upper(C2, s, bits) * power_tail_upper(e1, q_max, bits);
    Rat t2 = pow_upper(C2, s - one, bits) / (s - one) * power_tail_upper(e2, q_max, bits);
    r.q_tail = round_up(two * C2 * C2 * Zall * (t1 + t2), bits);
    r.total = r.finite_sum + *r.q_tail;
  }
  return r;
}

// Upper endpoint of the second band family: q^tau/(p + N/q) as derived, or
// the printed q^tau/(q + N/q).
enum class BandVariant { P, Q };

inline std::string to_string(BandVariant v) { return v == BandVariant::P ? "p" : "q"; }

struct TheoremBand {
  RealEnclosure lo, hi;  // band is (lo, hi]
  Rat width_bound;       // C / q^(2 tau^2 - tau - 1)
  BandVariant variant;
};

inline TheoremBand theorem_band(const Int& q, const Int& p, const Int& N, const Rat& tau, const Rat& C,
                                BandVariant variant = BandVariant::P, int bits = kBandPrecision) {
  if (N < 1) throw PreconditionError("theorem_band needs N >= 1");
  if (q < 1 || p < 1) throw UsageError("theorem_band needs q, p >= 1");
  if (C.sign() <= 0) throw UsageError("theorem_band needs C > 0");
  if (tau <= Rat(1)) throw DomainError("theorem_band needs tau > 1");
  RealEnclosure qt = pow_real(Rat(q), tau, bits);
  Rat Nq(N, q);
  RealEnclosure centre = qt / (Rat(p) + Nq);
  RealEnclosure w = C * pow_real(Rat(q), -(Rat(2) * tau * tau - tau - Rat(1)), bits);
  RealEnclosure hi = variant == BandVariant::P ? centre : qt / (Rat(q) + Nq);
  return {centre - w, hi, w.upper(), variant};
}

struct BckMargin {
  RealEnclosure margin;  // min over q <= Qmax, p of |1/gamma - p/q^tau| q^k
  Int argmin_q, argmin_p;
  bool argmin_certified = true;  // the reported pair is strictly below all others
};

namespace detail {
inline RealEnclosure bck_value(const Rat& inv, const Int& p, const Int& q, const Rat& tau, const Rat& k, int bits) {
  return abs(RealEnclosure::exact(inv, bits) - Rat(p) * pow_real(Rat(q), -tau, bits)) * pow_real(Rat(q), k, bits);
}
}  // namespace detail

// Largest C with 1/gamma in B_{C,k} restricted to q <= Qmax. Only the two
// integers nearest q^tau/gamma can minimise |1/gamma - p/q^tau| for each q.
inline BckMargin bck_margin(const Rat& gamma, const Rat& tau, const Rat& k, const Int& Qmax, int bits = kBandPrecision) {
  if (!(Rat(0) < gamma && gamma < Rat(1, 2))) throw DomainError("bck_margin needs gamma in (0, 1/2)");
  if (k <= tau + Rat(1)) throw UsageError("bck_margin needs k > tau + 1");
  if (Qmax < 1) throw UsageError("Qmax must be >= 1");
  Rat inv = Rat(1) / gamma;
  struct Cand {
    RealEnclosure v;
    Int q, p;
  };
  std::vector<Cand> all;
  for (Int q = 1; q <= Qmax; ++q) {
    RealEnclosure target = pow_real(Rat(q), tau, bits) * inv;
    for (Int p = floor(target.lo); p <= ceil(target.upper()); ++p)
      if (p >= 0) all.push_back({detail::bck_value(inv, p, q, tau, k, bits), q, p});
  }
  // Smallest upper end wins; ties keep the smaller q.
  std::size_t best = 0;
  for (std::size_t i = 1; i < all.size(); ++i)
    if (all[i].v.upper() < all[best].v.upper()) best = i;
  BckMargin m{all[best].v, all[best].q, all[best].p, true};
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (i == best) continue;
    m.margin.lo = min(m.margin.lo, all[i].v.lo);
    if (!(all[best].v.upper() < all[i].v.lo) && !(all[i].v.is_point() && all[best].v.is_point() && all[i].q > all[best].q))
      m.argmin_certified = false;
  }
  return m;
}

// Oracle: every p in [0, ceil(q^tau/gamma) + 1] for integer tau and k.
inline std::pair<Rat, std::pair<Int, Int>> bck_margin_bruteforce(const Rat& gamma, long tau, long k, long Qmax) {
  Rat inv = Rat(1) / gamma;
  std::optional<std::pair<Rat, std::pair<Int, Int>>> best;
  for (long q = 1; q <= Qmax; ++q) {
    Rat qt = pow(Rat(q), tau);
    Int top = ceil(qt * inv) + 1;
    for (Int p = 0; p <= top; ++p) {
      Rat v = abs(inv - Rat(p) / qt) * pow(Rat(q), k);
      if (!best || v < best->first) best = {{v, {Int(q), p}}};
    }
  }
  return *best;
}

}  // namespace dioph
