#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "dioph/enclosure.hpp"
#include "dioph/error.hpp"
#include "dioph/quadratic_field.hpp"
#include "dioph/rat.hpp"

namespace dioph {

struct RationalAlpha {
  Rat value;
};

// (P + sqrt(D)) / Q.
struct QuadraticAlpha {
  Int P, D, Q;
};

// [a_0; a_1, ..., a_k] followed by tails alpha_m in [tail_low, tail_high] for
// every m > k. tail_high == nullopt means unbounded.
struct PrefixAlpha {
  std::vector<Int> quotients;
  Rat tail_low = 1;
  std::optional<Rat> tail_high;
};

using AlphaSpec = std::variant<RationalAlpha, QuadraticAlpha, PrefixAlpha>;

// Rewrites (P, D, Q) so that Q divides D - P^2.
inline QuadraticAlpha normalize(QuadraticAlpha a) {
  if (a.Q == 0) throw DomainError("quadratic with Q = 0");
  if (a.D <= 0) throw DomainError("quadratic with non-positive D");
  if (is_perfect_square(a.D)) throw DomainError("quadratic with square D = " + a.D.get_str());
  Int r = a.D - a.P * a.P;
  if (r % a.Q != 0) {
    Int aq = a.Q < 0 ? Int(-a.Q) : a.Q;
    a.P *= aq;
    a.D *= a.Q * a.Q;
    a.Q *= aq;
  }
  return a;
}

inline QuadNum to_quadnum(const QuadraticAlpha& a) {
  return QuadNum(Rat(a.P, a.Q), Rat(Int(1), a.Q), a.D);
}

inline std::vector<Int> parse_int_list(std::string_view s, char sep, std::string_view what) {
  std::vector<Int> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t end = s.find(sep, start);
    if (end == std::string_view::npos) end = s.size();
    Rat v = Rat::parse(s.substr(start, end - start));
    if (!v.is_integer()) throw UsageError("non-integer entry in " + std::string(what));
    out.push_back(v.num());
    start = end + 1;
  }
  return out;
}

// Grammar: "rat:7/10", "quad:P,D,Q", "cf:[a0;a1,...,ak]" with optional
// "@lo,hi" tail bounds ("inf" for an unbounded hi).
inline AlphaSpec parse_alpha(std::string_view text) {
  auto bad = [&](const std::string& why) -> AlphaSpec {
    throw UsageError("malformed alpha '" + std::string(text) + "': " + why);
  };
  auto colon = text.find(':');
  if (colon == std::string_view::npos) return bad("missing kind prefix");
  std::string_view kind = text.substr(0, colon), body = text.substr(colon + 1);
  if (kind == "rat") return RationalAlpha{Rat::parse(body)};
  if (kind == "quad") {
    auto v = parse_int_list(body, ',', "quad");
    if (v.size() != 3) return bad("expected P,D,Q");
    if (v[2] == 0) return bad("Q must be nonzero");
    if (v[1] <= 0 || is_perfect_square(v[1])) return bad("D must be a positive non-square");
    return QuadraticAlpha{v[0], v[1], v[2]};
  }
  if (kind == "cf") {
    PrefixAlpha pa;
    std::string_view list = body, bounds;
    if (auto at = body.find('@'); at != std::string_view::npos) {
      list = body.substr(0, at);
      bounds = body.substr(at + 1);
    }
    if (list.size() < 2 || list.front() != '[' || list.back() != ']') return bad("expected [a0;a1,...]");
    list = list.substr(1, list.size() - 2);
    auto semi = list.find(';');
    pa.quotients.push_back(parse_int_list(list.substr(0, semi), ',', "cf").at(0));
    if (semi != std::string_view::npos && semi + 1 < list.size()) {
      for (auto& a : parse_int_list(list.substr(semi + 1), ',', "cf")) pa.quotients.push_back(a);
    }
    if (semi == std::string_view::npos && list.find(',') != std::string_view::npos)
      return bad("separate a0 from the rest with ';'");
    for (std::size_t i = 1; i < pa.quotients.size(); ++i)
      if (pa.quotients[i] < 1) return bad("partial quotients after a0 must be >= 1");
    if (!bounds.empty()) {
      auto comma = bounds.find(',');
      if (comma == std::string_view::npos) return bad("tail bounds need lo,hi");
      pa.tail_low = Rat::parse(bounds.substr(0, comma));
      auto hi = bounds.substr(comma + 1);
      if (hi != "inf") pa.tail_high = Rat::parse(hi);
    }
    if (pa.tail_low < Rat(1)) return bad("tail_low must be >= 1");
    if (pa.tail_high && *pa.tail_high < pa.tail_low) return bad("tail_high < tail_low");
    return pa;
  }
  return bad("unknown kind '" + std::string(kind) + "'");
}

inline std::string format_alpha(const AlphaSpec& a) {
  struct V {
    std::string operator()(const RationalAlpha& r) const { return "rat:" + r.value.str(); }
    std::string operator()(const QuadraticAlpha& q) const {
      return "quad:" + q.P.get_str() + "," + q.D.get_str() + "," + q.Q.get_str();
    }
    std::string operator()(const PrefixAlpha& p) const {
      std::string s = "cf:[" + p.quotients.at(0).get_str();
      for (std::size_t i = 1; i < p.quotients.size(); ++i) s += (i == 1 ? ";" : ",") + p.quotients[i].get_str();
      s += "]";
      if (p.tail_low != Rat(1) || p.tail_high) s += "@" + p.tail_low.str() + "," + (p.tail_high ? p.tail_high->str() : "inf");
      return s;
    }
  };
  return std::visit(V{}, a);
}

struct ConvergentRow {
  std::size_t n;
  Int a, p, q;
  bool odd() const { return n % 2 == 1; }
};

using ConvergentTable = std::vector<ConvergentRow>;

inline ConvergentTable convergents(std::span<const Int> quotients) {
  if (quotients.empty()) throw UsageError("convergents of an empty quotient list");
  ConvergentTable t;
  t.reserve(quotients.size());
  Int p2 = 0, q2 = 1, p1 = 1, q1 = 0;  // seeds p_-2, q_-2, p_-1, q_-1
  for (std::size_t n = 0; n < quotients.size(); ++n) {
    const Int& a = quotients[n];
    Int p = a * p1 + p2, q = a * q1 + q2;
    t.push_back({n, a, p, q});
    p2 = p1; q2 = q1; p1 = p; q1 = q;
  }
  return t;
}

inline Rat value_of(std::span<const Int> quotients) {
  if (quotients.empty()) throw UsageError("value of an empty quotient list");
  Rat x(quotients.back());
  for (std::size_t i = quotients.size() - 1; i-- > 0;) x = Rat(quotients[i]) + Rat(1) / x;
  return x;
}

// Expansion engine for one AlphaSpec. Immutable after construction.
class ContinuedFraction {
 public:
  enum class Kind { Rational, Quadratic, Prefix };

  explicit ContinuedFraction(AlphaSpec spec) : spec_(std::move(spec)) {
    if (auto* r = std::get_if<RationalAlpha>(&spec_)) {
      kind_ = Kind::Rational;
      Int n = r->value.num(), d = r->value.den();
      while (true) {
        Int a = floor_div(n, d);
        quotients_.push_back(a);
        Int rem = n - a * d;
        if (rem == 0) break;
        n = d;
        d = rem;
      }
    } else if (auto* q = std::get_if<QuadraticAlpha>(&spec_)) {
      kind_ = Kind::Quadratic;
      quad_ = normalize(*q);
      expand_quadratic();
    } else {
      kind_ = Kind::Prefix;
      const auto& p = std::get<PrefixAlpha>(spec_);
      if (p.quotients.empty()) throw UsageError("PrefixCF needs at least a_0");
      for (std::size_t i = 1; i < p.quotients.size(); ++i)
        if (p.quotients[i] < 1) throw UsageError("PrefixCF partial quotients must be >= 1");
      if (p.tail_low < Rat(1)) throw UsageError("PrefixCF tail_low must be >= 1");
      quotients_ = p.quotients;
    }
  }

  const AlphaSpec& spec() const { return spec_; }
  Kind kind() const { return kind_; }
  bool is_rational() const { return kind_ == Kind::Rational; }
  bool is_quadratic() const { return kind_ == Kind::Quadratic; }
  bool is_prefix() const { return kind_ == Kind::Prefix; }

  // Number of known quotients; nullopt for an infinite (quadratic) expansion.
  std::optional<std::size_t> known_terms() const {
    if (kind_ == Kind::Quadratic) return std::nullopt;
    return quotients_.size();
  }
  bool has_quotient(std::size_t i) const { return kind_ == Kind::Quadratic || i < quotients_.size(); }

  const Int& quotient(std::size_t i) const {
    if (kind_ == Kind::Quadratic) {
      if (i < preperiod_) return quotients_[i];
      return quotients_[preperiod_ + (i - preperiod_) % period_];
    }
    if (i >= quotients_.size()) {
      if (kind_ == Kind::Rational) throw UndefinedTailError("rational expansion ends at index " + std::to_string(quotients_.size() - 1));
      throw InsufficientDataError("PrefixCF stores " + std::to_string(quotients_.size()) + " quotients, index " + std::to_string(i) + " requested");
    }
    return quotients_[i];
  }

  std::size_t preperiod() const { return preperiod_; }
  std::size_t period() const { return period_; }
  const QuadraticAlpha& normalized_quadratic() const { return quad_; }

  // cf_expand semantics: rationals stop at their final quotient, PrefixCF
  // raises past its prefix.
  std::vector<Int> expand(std::size_t depth) const {
    if (depth < 1) throw UsageError("depth must be >= 1");
    std::size_t count = depth;
    if (kind_ == Kind::Rational) count = std::min(depth, quotients_.size());
    if (kind_ == Kind::Prefix && depth > quotients_.size())
      throw InsufficientDataError("PrefixCF stores " + std::to_string(quotients_.size()) + " quotients, depth " + std::to_string(depth) + " requested");
    std::vector<Int> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(quotient(i));
    return out;
  }

  // Rows n = 0 .. count-1, truncated to the known quotients.
  ConvergentTable convergent_rows(std::size_t count) const {
    if (auto k = known_terms()) count = std::min(count, *k);
    std::vector<Int> qs;
    qs.reserve(count);
    for (std::size_t i = 0; i < count; ++i) qs.push_back(quotient(i));
    if (qs.empty()) return {};
    return convergents(qs);
  }

  // Rows while q_n <= qmax (at least the first row).
  ConvergentTable convergent_rows_upto(const Int& qmax, std::size_t hard_limit = 100000) const {
    ConvergentTable t;
    Int p2 = 0, q2 = 1, p1 = 1, q1 = 0;
    for (std::size_t n = 0; n < hard_limit && has_quotient(n); ++n) {
      const Int& a = quotient(n);
      Int p = a * p1 + p2, q = a * q1 + q2;
      if (q > qmax && !t.empty()) break;
      t.push_back({n, a, p, q});
      p2 = p1; q2 = q1; p1 = p; q1 = q;
    }
    return t;
  }

  std::optional<QuadNum> exact_tail(std::size_t n) const {
    switch (kind_) {
      case Kind::Rational:
        if (n >= quotients_.size()) throw UndefinedTailError("rational expansion ends before tail index " + std::to_string(n));
        return QuadNum(value_of(std::span<const Int>(quotients_).subspan(n)));
      case Kind::Quadratic: {
        const auto& [P, Q] = state(n);
        return QuadNum(Rat(P, Q), Rat(Int(1), Q), quad_.D);
      }
      case Kind::Prefix:
        return std::nullopt;
    }
    return std::nullopt;
  }

  std::optional<QuadNum> exact_value() const {
    if (kind_ == Kind::Prefix) return std::nullopt;
    if (kind_ == Kind::Rational) return QuadNum(std::get<RationalAlpha>(spec_).value);
    return to_quadnum(quad_);
  }

  // Enclosure of alpha_n = [a_n; a_{n+1}, ...].
  RealEnclosure tail(std::size_t n, int bits) const {
    if (auto e = exact_tail(n)) return e->enclose(bits);
    const auto& p = std::get<PrefixAlpha>(spec_);
    RealEnclosure t{p.tail_low, p.tail_high, bits};
    std::size_t k = quotients_.size();
    if (n >= k) return t;
    for (std::size_t i = k; i-- > n;) t = RealEnclosure::exact(Rat(quotients_[i]), bits) + reciprocal(t);
    return t;
  }

  RealEnclosure value(int bits) const { return tail(0, bits); }

  // Upper bound on alpha_m for every m >= from; nullopt if unbounded.
  std::optional<Rat> tail_sup_from(std::size_t from, int bits) const {
    std::optional<Rat> best;
    auto take = [&](const RealEnclosure& e) -> bool {
      if (!e.hi) return false;
      best = best ? max(*best, *e.hi) : *e.hi;
      return true;
    };
    switch (kind_) {
      case Kind::Rational:
        for (std::size_t m = from; m < quotients_.size(); ++m) take(tail(m, bits));
        return best ? best : std::optional<Rat>(Rat(1));
      case Kind::Quadratic: {
        std::size_t end = std::max(from, preperiod_) + period_;
        for (std::size_t m = from; m < end; ++m) take(tail(m, bits));
        return best;
      }
      case Kind::Prefix: {
        const auto& p = std::get<PrefixAlpha>(spec_);
        if (!p.tail_high) return std::nullopt;
        best = *p.tail_high;
        for (std::size_t m = from; m < quotients_.size(); ++m)
          if (!take(tail(m, bits))) return std::nullopt;
        return best;
      }
    }
    return best;
  }

 private:
  // alpha_i = (P_i + sqrt D) / Q_i.
  const std::pair<Int, Int>& state(std::size_t i) const {
    if (i < preperiod_) return states_[i];
    return states_[preperiod_ + (i - preperiod_) % period_];
  }

  void expand_quadratic() {
    const Int& D = quad_.D;
    Int s = isqrt(D);
    Int P = quad_.P, Q = quad_.Q;
    std::map<std::pair<Int, Int>, std::size_t> seen;
    for (std::size_t i = 0;; ++i) {
      auto key = std::make_pair(P, Q);
      if (auto it = seen.find(key); it != seen.end()) {
        preperiod_ = it->second;
        period_ = i - it->second;
        break;
      }
      seen.emplace(key, i);
      states_.push_back(key);
      // floor((P + sqrt D)/Q) via the integer square root.
      Int a = Q > 0 ? floor_div(P + s, Q) : floor_div(Int(P + s + 1), Q);
      quotients_.push_back(a);
      P = a * Q - P;
      Int num = D - P * P;
      if (num % Q != 0) throw ConsistencyError("quadratic expansion lost the divisibility invariant");
      Q = num / Q;
    }
    quotients_.resize(preperiod_ + period_);
    states_.resize(preperiod_ + period_);
  }

  AlphaSpec spec_;
  Kind kind_ = Kind::Rational;
  std::vector<Int> quotients_;
  QuadraticAlpha quad_{};
  std::vector<std::pair<Int, Int>> states_;
  std::size_t preperiod_ = 0, period_ = 0;
};

inline std::vector<Int> cf_expand(const AlphaSpec& alpha, std::size_t depth) {
  return ContinuedFraction(alpha).expand(depth);
}

inline RealEnclosure tail(const AlphaSpec& alpha, std::size_t n, int bits) {
  return ContinuedFraction(alpha).tail(n, bits);
}

// (P + sqrt D)/Q form of an exact irrational quadratic.
inline QuadraticAlpha quadratic_from_quadnum(const QuadNum& x) {
  if (x.is_rational()) throw DomainError("not an irrational quadratic: " + x.str());
  const Rat& a = x.rational_part();
  const Rat& b = x.surd_coefficient();
  Int L = lcm(a.den(), b.den());
  Int A = a.num() * (L / a.den()), B = b.num() * (L / b.den());
  if (B > 0) return normalize({A, B * B * x.radicand(), L});
  return normalize({Int(-A), B * B * x.radicand(), Int(-L)});
}

// The number [prefix; period, period, ...].
inline QuadraticAlpha quadratic_from_cf(const std::vector<Int>& prefix, const std::vector<Int>& period) {
  if (period.empty()) throw UsageError("period must be nonempty");
  for (const auto& a : period)
    if (a < 1) throw UsageError("period quotients must be >= 1");
  // y = [period; y] = (A y + B) / (C y + D).
  Int A = 1, B = 0, C = 0, Dm = 1;
  for (const auto& a : period) {
    Int nA = A * a + B, nC = C * a + Dm;
    B = A; Dm = C; A = nA; C = nC;
  }
  // C y^2 + (D - A) y - B = 0, positive root.
  Int disc = (Dm - A) * (Dm - A) + 4 * B * C;
  QuadNum y = (QuadNum(Rat(Int(A - Dm))) + QuadNum::sqrt(disc)) / QuadNum(Rat(Int(2 * C)));
  if (prefix.empty()) return quadratic_from_quadnum(y);
  // alpha = (p_k y + p_{k-1}) / (q_k y + q_{k-1}).
  auto t = convergents(prefix);
  Int pk = t.back().p, qk = t.back().q;
  Int pk1 = t.size() > 1 ? t[t.size() - 2].p : Int(1);
  Int qk1 = t.size() > 1 ? t[t.size() - 2].q : Int(0);
  QuadNum alpha = (QuadNum(Rat(pk)) * y + QuadNum(Rat(pk1))) / (QuadNum(Rat(qk)) * y + QuadNum(Rat(qk1)));
  return quadratic_from_quadnum(alpha);
}

// 1 - alpha as an AlphaSpec of the same kind.
inline AlphaSpec reflect(const AlphaSpec& alpha) {
  if (auto* r = std::get_if<RationalAlpha>(&alpha)) return RationalAlpha{Rat(1) - r->value};
  if (auto* q = std::get_if<QuadraticAlpha>(&alpha)) return normalize({q->P - q->Q, q->D, Int(-q->Q)});
  const auto& p = std::get<PrefixAlpha>(alpha);
  if (p.quotients.empty() || p.quotients[0] != 0) throw DomainError("reflection of a PrefixCF needs a_0 = 0");
  if (p.quotients.size() < 2) throw InsufficientDataError("reflection needs a_1");
  PrefixAlpha out{{Int(0)}, p.tail_low, p.tail_high};
  if (p.quotients[1] > 1) {
    out.quotients.push_back(1);
    out.quotients.push_back(p.quotients[1] - 1);
    out.quotients.insert(out.quotients.end(), p.quotients.begin() + 2, p.quotients.end());
  } else {
    if (p.quotients.size() < 3) throw InsufficientDataError("reflection with a_1 = 1 needs a_2");
    out.quotients.push_back(p.quotients[2] + 1);
    out.quotients.insert(out.quotients.end(), p.quotients.begin() + 3, p.quotients.end());
  }
  return out;
}

}  // namespace dioph
