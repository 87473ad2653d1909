#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "dioph/quality.hpp"
#include "test_util.hpp"

using namespace dioph;

namespace {

const QuadraticAlpha kGolden{Int(-1), Int(5), Int(2)};  // (sqrt5 - 1)/2
const QuadraticAlpha kSilver{Int(-1), Int(2), Int(1)};  // sqrt2 - 1

// Independent oracle: q^tau * ||q x|| in exact field arithmetic, no convergents.
QuadNum exact_quality(const QuadNum& x, long q, unsigned long tau) {
  QuadNum y = x * QuadNum(Rat(q));
  QuadNum f = y - QuadNum(Rat(y.floor()));
  QuadNum g = QuadNum(1) - f;
  return (f < g ? f : g) * QuadNum(pow(Rat(q), static_cast<long>(tau)));
}

// Minimum of the oracle over q = 1..Qmax with the smallest argmin.
std::pair<QuadNum, long> oracle_min(const QuadNum& x, long Qmax, unsigned long tau) {
  QuadNum best = exact_quality(x, 1, tau);
  long arg = 1;
  for (long q = 2; q <= Qmax; ++q) {
    QuadNum v = exact_quality(x, q, tau);
    if (v < best) {
      best = v;
      arg = q;
    }
  }
  return {best, arg};
}

QuadraticAlpha random_quadratic(std::mt19937_64& rng) {
  std::vector<Int> pre{Int(0)}, per;
  for (int k = 0, m = static_cast<int>(rng() % 3); k < m; ++k) pre.push_back(Int(static_cast<long>(rng() % 6 + 1)));
  for (int k = 0, m = static_cast<int>(rng() % 3 + 1); k < m; ++k) per.push_back(Int(static_cast<long>(rng() % 6 + 1)));
  return quadratic_from_cf(pre, per);
}

QuadNum value(const AlphaSpec& a) { return *ContinuedFraction(a).exact_value(); }

}  // namespace

TEST(GammaN, GoldenRowsAreExact) {
  QualityRow r3 = gamma_n(kGolden, Rat(1), 3);
  EXPECT_EQ(r3.q, Int(3));
  ASSERT_TRUE(r3.exact);
  EXPECT_EQ(*r3.exact, QuadNum(Rat(21, 2), Rat(-9, 2), Int(5)));
  EXPECT_EQ(*r3.exact, exact_quality(value(kGolden), 3, 1));
  EXPECT_TRUE(r3.gamma.overlaps(RealEnclosure::between(Rat::parse("0.437694101250946"), Rat::parse("0.437694101250947"))));
}

TEST(GammaN, RowZeroIsFractionalPart) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 20; ++i) {
    auto a = random_quadratic(rng);
    for (long tau : {1L, 2L, 5L}) EXPECT_EQ(*gamma_n(a, Rat(tau), 0).exact, value(a));
  }
  EXPECT_TRUE(gamma_n(RationalAlpha{Rat(7, 10)}, Rat(3, 2), 0, 64).gamma.contains(Rat(7, 10)));
}

TEST(GammaN, GoldenApproachesHurwitzConstant) {
  RealEnclosure g = gamma_n(kGolden, Rat(1), 40, 128).gamma;
  double target = 1 / std::sqrt(5.0);
  EXPECT_NEAR(g.lo.to_double(), target, 1e-12);
}

// Rows on the exact path against the oracle, at several integer tau.
TEST(GammaN, MatchesDirectOracleAtIntegerTau) {
  std::mt19937_64 rng(37);
  for (int i = 0; i < 30; ++i) {
    auto a = random_quadratic(rng);
    QuadNum x = value(a);
    auto t = ContinuedFraction(a).convergent_rows(8);
    for (std::size_t n = 1; n < t.size(); ++n)
      for (unsigned long tau : {1UL, 2UL, 4UL}) {
        auto row = gamma_n(a, Rat(static_cast<long>(tau)), n);
        EXPECT_EQ(*row.exact, exact_quality(x, t[n].q.get_si(), tau)) << format_alpha(a) << " n=" << n;
      }
  }
}

// Non-integer tau: the exact distance |q x - p| times a libm power.
TEST(GammaN, NonIntegerTauAgainstFloatingOracle) {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 20; ++i) {
    auto a = random_quadratic(rng);
    QuadNum x = value(a);
    auto t = ContinuedFraction(a).convergent_rows(6);
    for (std::size_t n = 1; n < t.size(); ++n) {
      QuadNum dist = abs(x * QuadNum(Rat(t[n].q)) - QuadNum(Rat(t[n].p)));
      double direct = std::pow(t[n].q.get_d(), 2.5) * dist.to_double();
      RealEnclosure e = gamma_n(a, Rat(5, 2), n, 128).gamma;
      EXPECT_NEAR(direct, e.lo.to_double(), 1e-13 * direct);
      EXPECT_LT(e.width(), Rat(1, 1000000000));
    }
  }
}

// 1/gamma_n = q_{n+1}/q_n^tau + 1/(alpha_{n+2} q_n^(tau-1)).
TEST(GammaN, ReciprocalIdentity) {
  std::mt19937_64 rng(43);
  for (int i = 0; i < 20; ++i) {
    auto a = random_quadratic(rng);
    ContinuedFraction cf(a);
    auto t = cf.convergent_rows(10);
    for (std::size_t n = 1; n + 1 < t.size(); ++n)
      for (long tau : {1L, 3L}) {
        QuadNum g = *gamma_n(a, Rat(tau), n).exact;
        QuadNum qn(Rat(t[n].q)), qn1(Rat(t[n + 1].q));
        QuadNum rhs = qn1 / QuadNum(pow(Rat(t[n].q), tau)) +
                      QuadNum(1) / (*cf.exact_tail(n + 2) * QuadNum(pow(Rat(t[n].q), tau - 1)));
        EXPECT_EQ(QuadNum(1) / g, rhs);
      }
  }
}

TEST(GammaN, NondecreasingInTau) {
  std::mt19937_64 rng(47);
  for (int i = 0; i < 20; ++i) {
    auto a = random_quadratic(rng);
    for (std::size_t n = 0; n < 6; ++n) {
      QuadNum g1 = *gamma_n(a, Rat(1), n).exact, g2 = *gamma_n(a, Rat(2), n).exact, g3 = *gamma_n(a, Rat(3), n).exact;
      EXPECT_FALSE(g2 < g1);
      EXPECT_FALSE(g3 < g2);
    }
  }
}

TEST(GammaN, RejectsSmallTau) { EXPECT_THROW(gamma_n(kGolden, Rat(1, 2), 1), DomainError); }

// The infimum for the golden number sits at q = 1, where ||alpha|| = (3 - sqrt5)/2.
TEST(GammaOf, GoldenCertifiedAtFirstRow) {
  GammaResult g = gamma_of(kGolden, Rat(1), 30);
  EXPECT_TRUE(g.certified);
  ASSERT_TRUE(g.exact);
  EXPECT_EQ(*g.exact, QuadNum(Rat(3, 2), Rat(-1, 2), Int(5)));
  EXPECT_EQ(g.argmin_candidates, std::vector<std::size_t>{1});
  auto [v, q] = oracle_min(value(kGolden), 2000, 1);
  EXPECT_EQ(v, *g.exact);
  EXPECT_EQ(q, 1);
}

TEST(GammaOf, SilverMatchesBruteForce) {
  GammaResult g = gamma_of(kSilver, Rat(1), 30);
  EXPECT_TRUE(g.certified);
  BruteForceResult b = brute_force_gamma(kSilver, Rat(1), Int(10000));
  ASSERT_TRUE(b.exact);
  EXPECT_EQ(*g.exact, *b.exact);
  EXPECT_LE(g.lower, b.value.lo);
  EXPECT_GE(g.upper, b.value.upper());
}

TEST(GammaOf, RationalIsZero) {
  GammaResult g = gamma_of(RationalAlpha{Rat(7, 10)}, Rat(2), 30);
  EXPECT_TRUE(g.certified);
  EXPECT_EQ(g.lower, Rat(0));
  EXPECT_EQ(g.upper, Rat(0));
  EXPECT_EQ(g.argmin_q, std::vector<Int>{Int(10)});
  EXPECT_EQ(g.argmin_candidates, std::vector<std::size_t>{3});
}

// Oracle agreement on random quadratics, restricted to q_n <= Qmax.
TEST(GammaOf, RestrictedAgreesWithOracle) {
  std::mt19937_64 rng(53);
  for (int i = 0; i < 50; ++i) {
    auto a = random_quadratic(rng);
    for (unsigned long tau : {1UL, 2UL}) {
      GammaOptions opt;
      opt.max_denominator = Int(300);
      GammaResult g = gamma_of(a, Rat(static_cast<long>(tau)), opt);
      auto [v, q] = oracle_min(value(a), 300, tau);
      ASSERT_TRUE(g.certified) << format_alpha(a);
      EXPECT_EQ(*g.exact, v) << format_alpha(a) << " tau=" << tau;
      EXPECT_EQ(g.argmin_q.front(), Int(q));
    }
  }
}

TEST(GammaOf, BracketBelowDistanceToIntegers) {
  std::mt19937_64 rng(59);
  for (int i = 0; i < 30; ++i) {
    auto a = random_quadratic(rng);
    QuadNum x = value(a);
    GammaResult g = gamma_of(a, Rat(3, 2), 20, 96);
    QuadNum m = x < QuadNum(1) - x ? x : QuadNum(1) - x;
    EXPECT_LE(g.upper, m.enclose(96).upper() + (g.upper - g.lower));
    EXPECT_LE(g.lower, g.upper);
  }
}

TEST(GammaOf, PrefixWithoutTailBoundIsUncertified) {
  GammaResult g = gamma_of(PrefixAlpha{{Int(0), Int(2), Int(3), Int(1)}}, Rat(1), 10);
  EXPECT_FALSE(g.certified);
  EXPECT_EQ(g.lower, Rat(0));
  EXPECT_GT(g.upper, Rat(0));
}

TEST(GammaParity, GoldenSplit) {
  auto [minus, plus] = gamma_parity(kGolden, Rat(1), 30);
  // Even rows fall to 1/sqrt5 from above, so their infimum is never attained;
  // odd rows rise to it from below and the first one is the minimum.
  QuadNum hurwitz = QuadNum(1) / QuadNum::sqrt(Int(5));
  EXPECT_FALSE(minus.certified);
  EXPECT_LE(minus.lower, hurwitz.enclose(128).lo);
  for (const auto& r : minus.rows) {
    EXPECT_EQ(r.n % 2, 0u);
    EXPECT_TRUE(hurwitz < *r.exact);
  }
  for (std::size_t k = 1; k < minus.rows.size(); ++k) EXPECT_TRUE(*minus.rows[k].exact < *minus.rows[k - 1].exact);
  ASSERT_TRUE(plus.certified);
  EXPECT_EQ(*plus.exact, QuadNum(Rat(3, 2), Rat(-1, 2), Int(5)));
  for (const auto& r : plus.rows) EXPECT_TRUE(*r.exact < hurwitz);
}

// ||q(1 - x)|| = ||q x||, so reflection leaves the infimum unchanged.
TEST(GammaParity, ReflectionAgreesWithOracle) {
  std::mt19937_64 rng(61);
  for (int i = 0; i < 20; ++i) {
    auto a = random_quadratic(rng);
    auto r = std::get<QuadraticAlpha>(reflect(a));
    EXPECT_EQ(value(r), QuadNum(1) - value(a));
    GammaResult ga = gamma_of(a, Rat(1), 30), gr = gamma_of(r, Rat(1), 30);
    EXPECT_LE(ga.lower, gr.upper) << format_alpha(a);
    EXPECT_LE(gr.lower, ga.upper) << format_alpha(a);
    if (ga.certified && gr.certified) {
      EXPECT_EQ(*ga.exact, *gr.exact) << format_alpha(a);
    }
  }
}

TEST(GammaParity, RationalReachesZero) {
  auto [minus, plus] = gamma_parity(RationalAlpha{Rat(7, 10)}, Rat(1), 10);
  EXPECT_EQ(minus.lower.sign() == 0 || plus.lower.sign() == 0, true);
  EXPECT_TRUE(minus.certified);
  EXPECT_TRUE(plus.certified);
}

TEST(BruteForce, SmallCases) {
  BruteForceResult b = brute_force_gamma(kGolden, Rat(1), Int(100));
  EXPECT_EQ(b.argmin_q, Int(1));
  EXPECT_EQ(*b.exact, QuadNum(Rat(3, 2), Rat(-1, 2), Int(5)));
  BruteForceResult one = brute_force_gamma(RationalAlpha{Rat(7, 10)}, Rat(3), Int(1));
  EXPECT_TRUE(one.value.contains(Rat(3, 10)));
  EXPECT_THROW(brute_force_gamma(kGolden, Rat(1), Int(0)), UsageError);
}

// Nonincreasing in Qmax and never below the certified infimum; equal to it
// once the argmin row is covered.
TEST(BruteForce, StabilizesInQmax) {
  std::mt19937_64 rng(67);
  int attained = 0;
  for (int i = 0; i < 10; ++i) {
    auto a = random_quadratic(rng);
    BruteForceResult b1 = brute_force_gamma(a, Rat(1), Int(500)), b2 = brute_force_gamma(a, Rat(1), Int(3000));
    EXPECT_FALSE(*b1.exact < *b2.exact);
    GammaResult g = gamma_of(a, Rat(1), 40);
    EXPECT_LE(g.lower, b2.value.lo);
    if (g.certified && g.argmin_q.front() <= 3000) {
      ++attained;
      EXPECT_EQ(*b2.exact, *g.exact) << format_alpha(a);
    }
  }
  EXPECT_GT(attained, 5);
}

TEST(Membership, GoldenVerdicts) {
  EXPECT_TRUE(std::get<MembershipIn>(membership(kGolden, Rat(1, 3), Rat(1), 40)).certified);
  auto out = std::get<MembershipOut>(membership(kGolden, Rat(2, 5), Rat(1), 40));
  EXPECT_EQ(out.witness_q, Int(1));
  EXPECT_EQ(out.witness_p, Int(1));
  auto out2 = std::get<MembershipOut>(membership(kGolden, Rat(11, 25), Rat(1), 40));
  EXPECT_EQ(out2.witness_q, Int(1));
}

TEST(Membership, RationalWitness) {
  EXPECT_EQ(std::get<MembershipOut>(membership(RationalAlpha{Rat(1, 3)}, Rat(1, 10), Rat(1), 10)).witness_q, Int(3));
  // For gamma above ||1/3|| the first denominator already violates.
  EXPECT_EQ(std::get<MembershipOut>(membership(RationalAlpha{Rat(1, 3)}, Rat(1, 2), Rat(1), 10)).witness_q, Int(1));
}

// An Out witness really violates the bound, checked with the oracle.
TEST(Membership, WitnessesAreGenuine) {
  std::mt19937_64 rng(71);
  int outs = 0;
  for (int i = 0; i < 60; ++i) {
    auto a = random_quadratic(rng);
    Rat gamma(Int(static_cast<long>(rng() % 50 + 1)), Int(100));
    auto v = membership(a, gamma, Rat(1), 40);
    auto [g, q] = oracle_min(value(a), 500, 1);
    if (auto* o = std::get_if<MembershipOut>(&v)) {
      ++outs;
      EXPECT_TRUE(exact_quality(value(a), o->witness_q.get_si(), 1) < QuadNum(gamma));
    } else {
      EXPECT_TRUE(std::get<MembershipIn>(v).certified);
      EXPECT_FALSE(g < QuadNum(gamma));
    }
  }
  EXPECT_GT(outs, 0);
}

TEST(Membership, SymmetricUnderReflection) {
  std::mt19937_64 rng(73);
  for (int i = 0; i < 40; ++i) {
    auto a = random_quadratic(rng);
    auto r = reflect(a);
    Rat gamma(Int(static_cast<long>(rng() % 40 + 1)), Int(100));
    auto va = membership(a, gamma, Rat(1), 40), vr = membership(r, gamma, Rat(1), 40);
    EXPECT_EQ(va.index(), vr.index()) << format_alpha(a) << " gamma=" << gamma.str();
  }
}

TEST(Membership, UnknownWhenBudgetTooSmall) {
  PrefixAlpha p{{Int(0), Int(3), Int(2), Int(4)}};
  auto v = membership(p, Rat(1, 100), Rat(1), 10);
  const auto& u = std::get<MembershipUnknown>(v);
  EXPECT_LE(u.lower, Rat(1, 100));
  EXPECT_GE(u.upper, Rat(1, 100));
}

TEST(Membership, Errors) {
  EXPECT_THROW(membership(QuadraticAlpha{Int(1), Int(5), Int(2)}, Rat(1, 10), Rat(1), 10), DomainError);
  EXPECT_THROW(membership(kGolden, Rat(0), Rat(1), 10), DomainError);
  EXPECT_THROW(membership(kGolden, Rat(1, 10), Rat(1, 2), 10), DomainError);
}

TEST(TauBounds, Cases) {
  std::mt19937_64 rng(79);
  for (int i = 0; i < 10; ++i) {
    auto b = tau_bounds(random_quadratic(rng), 10);
    EXPECT_EQ(b.lower, Rat(1));
    EXPECT_EQ(b.upper, Rat(1));
  }
  auto open = tau_bounds(PrefixAlpha{{Int(0), Int(2)}}, 2);
  EXPECT_EQ(open.lower, Rat(1));
  EXPECT_FALSE(open.upper);
  EXPECT_THROW(tau_bounds(kGolden, 1), UsageError);
}

// a_{n+1} = ceil(q_n^2) gives q_{n+1} ~ q_n^3.
TEST(TauBounds, DesignedPrefixApproachesExponent) {
  std::vector<Int> qs{Int(0), Int(2)};
  Int q_prev(1), q(2);
  for (int k = 0; k < 7; ++k) {
    Int a = q * q;
    qs.push_back(a);
    Int next = a * q + q_prev;
    q_prev = q;
    q = next;
  }
  auto b = tau_bounds(PrefixAlpha{qs}, qs.size());
  EXPECT_GT(b.lower, Rat(29, 10));
  EXPECT_LE(b.lower, Rat(3));
  EXPECT_FALSE(b.upper);
}
