#include <random>

#include <gtest/gtest.h>

#include "dioph/contfrac.hpp"
#include "test_util.hpp"

using namespace dioph;

namespace {

std::vector<Int> ints(std::initializer_list<long> v) {
  std::vector<Int> out;
  for (long x : v) out.push_back(Int(x));
  return out;
}

// Independent oracle: Euclid on num/den.
std::vector<Int> euclid(Int n, Int d) {
  std::vector<Int> out;
  while (d != 0) {
    Int a = floor_div(n, d);
    out.push_back(a);
    Int r = n - a * d;
    n = d;
    d = r;
  }
  return out;
}

}  // namespace

TEST(CfExpand, Examples) {
  EXPECT_EQ(cf_expand(RationalAlpha{Rat(7, 10)}, 10), ints({0, 1, 2, 3}));
  EXPECT_EQ(cf_expand(QuadraticAlpha{Int(-1), Int(5), Int(2)}, 6), ints({0, 1, 1, 1, 1, 1}));
  EXPECT_EQ(cf_expand(QuadraticAlpha{Int(0), Int(2), Int(1)}, 5), ints({1, 2, 2, 2, 2}));
  EXPECT_THROW(cf_expand(PrefixAlpha{ints({0, 2, 2})}, 4), InsufficientDataError);
  EXPECT_THROW(cf_expand(RationalAlpha{Rat(1, 2)}, 0), UsageError);
}

TEST(CfExpand, RationalRoundTripAndUniqueForm) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 500; ++i) {
    long d = static_cast<long>(rng() % 5000 + 1);
    long n = static_cast<long>(rng() % d + 1);
    Rat r(n, d);
    auto q = cf_expand(RationalAlpha{r}, 1000);
    EXPECT_EQ(q, euclid(r.num(), r.den()));
    EXPECT_EQ(value_of(q), r);
    if (q.size() > 1) {
      EXPECT_GE(q.back(), 2);
    }
  }
}

TEST(Convergents, FibonacciAndSeeds) {
  auto t = convergents(ints({0, 1, 1, 1, 1, 1}));
  std::vector<long> qs;
  for (const auto& r : t) qs.push_back(r.q.get_si());
  EXPECT_EQ(qs, (std::vector<long>{1, 1, 2, 3, 5, 8}));
  auto one = convergents(ints({5}));
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].p, Int(5));
  EXPECT_EQ(one[0].q, Int(1));
  auto last = convergents(ints({0, 1, 2, 3})).back();
  EXPECT_EQ(Rat(last.p, last.q), Rat(7, 10));
  EXPECT_THROW(convergents({}), UsageError);
}

TEST(Convergents, DeterminantIdentity) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 100; ++i) {
    std::vector<Int> q{Int(static_cast<long>(rng() % 3))};
    for (int k = 0; k < 25; ++k) q.push_back(Int(static_cast<long>(rng() % 50 + 1)));
    auto t = convergents(q);
    for (std::size_t n = 1; n < t.size(); ++n) {
      Int det = t[n].p * t[n - 1].q - t[n - 1].p * t[n].q;
      EXPECT_EQ(det, n % 2 ? Int(1) : Int(-1));
      if (n >= 2) {
        EXPECT_GT(t[n].q, t[n - 1].q);
      }
    }
  }
}

TEST(ValueOf, Examples) {
  EXPECT_EQ(value_of(ints({0, 1, 2, 3})), Rat(7, 10));
  EXPECT_EQ(value_of(ints({5})), Rat(5));
  EXPECT_EQ(value_of(ints({0, 2})), Rat(1, 2));
}

TEST(Tail, Examples) {
  RealEnclosure g = tail(QuadraticAlpha{Int(-1), Int(5), Int(2)}, 1, 64);
  auto near = [](const char* v) {
    Rat x = Rat::parse(v), eps = Rat::parse("1e-15");
    return RealEnclosure::between(x - eps, x + eps);
  };
  EXPECT_TRUE(g.overlaps(near("1.6180339887498948")));
  EXPECT_LT(g.width(), dyadic(Int(1), 60));
  RealEnclosure s = tail(QuadraticAlpha{Int(0), Int(2), Int(1)}, 1, 64);
  EXPECT_TRUE(s.overlaps(near("2.4142135623730950")));
  RealEnclosure p = tail(PrefixAlpha{ints({0, 2, 2})}, 3, 64);
  EXPECT_EQ(p.lo, Rat(1));
  EXPECT_FALSE(p.bounded());
  EXPECT_THROW(tail(RationalAlpha{Rat(7, 10)}, 4, 64), UndefinedTailError);
}

TEST(Tail, QuadraticPeriodReproducesTail) {
  for (auto a : {QuadraticAlpha{Int(0), Int(7), Int(1)}, QuadraticAlpha{Int(1), Int(13), Int(3)},
                 QuadraticAlpha{Int(-2), Int(19), Int(5)}, QuadraticAlpha{Int(3), Int(2), Int(-4)}}) {
    ContinuedFraction cf(a);
    for (std::size_t n = cf.preperiod() + 1; n < cf.preperiod() + 6; ++n)
      EXPECT_EQ(*cf.exact_tail(n), *cf.exact_tail(n + cf.period())) << format_alpha(a) << " n=" << n;
    for (std::size_t n = 1; n < 10; ++n) EXPECT_GE(cf.tail(n, 64).lo, Rat(1));
  }
}

// 1/(q_n(q_{n+1}+q_n)) < |alpha - p_n/q_n| < 1/(q_n q_{n+1}).
TEST(Convergents, BestApproximationSandwich) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 40; ++i) {
    long D = static_cast<long>(rng() % 500 + 2);
    if (is_perfect_square(Int(D))) continue;
    QuadraticAlpha a{Int(static_cast<long>(rng() % 21) - 10), Int(D), Int(static_cast<long>(rng() % 9 + 1))};
    ContinuedFraction cf(a);
    QuadNum x = *cf.exact_value();
    auto t = cf.convergent_rows(20);
    for (std::size_t n = 1; n + 1 < t.size(); ++n) {
      QuadNum d = abs(x - QuadNum(Rat(t[n].p, t[n].q)));
      EXPECT_LT(QuadNum(Rat(Int(1), t[n].q * (t[n + 1].q + t[n].q))), d);
      EXPECT_LT(d, QuadNum(Rat(Int(1), t[n].q * t[n + 1].q)));
    }
  }
}

TEST(ParseAlpha, Grammar) {
  auto r = parse_alpha("rat:7/10");
  EXPECT_EQ(std::get<RationalAlpha>(r).value, Rat(7, 10));
  auto q = std::get<QuadraticAlpha>(parse_alpha("quad:-1,5,2"));
  EXPECT_EQ(q.P, Int(-1));
  EXPECT_EQ(q.D, Int(5));
  EXPECT_EQ(q.Q, Int(2));
  auto p = std::get<PrefixAlpha>(parse_alpha("cf:[0;1,2,3]"));
  EXPECT_EQ(p.quotients, ints({0, 1, 2, 3}));
  EXPECT_EQ(p.tail_low, Rat(1));
  EXPECT_FALSE(p.tail_high);
  auto b = std::get<PrefixAlpha>(parse_alpha("cf:[0;2,3]@2,5/2"));
  EXPECT_EQ(b.tail_low, Rat(2));
  EXPECT_EQ(*b.tail_high, Rat(5, 2));
  EXPECT_THROW(parse_alpha("quad:1,4,1"), UsageError);  // perfect square
  EXPECT_THROW(parse_alpha("quad:1,5,0"), UsageError);
  EXPECT_THROW(parse_alpha("cf:[0;0,1]"), UsageError);
  EXPECT_THROW(parse_alpha("7/10"), UsageError);
  for (const char* s : {"rat:7/10", "quad:-1,5,2", "cf:[0;1,2,3]@1,5"}) EXPECT_EQ(format_alpha(parse_alpha(s)), s);
}

TEST(QuadraticFromCf, RoundTrip) {
  QuadraticAlpha a = quadratic_from_cf(ints({0, 3}), ints({1, 2}));
  EXPECT_EQ(cf_expand(a, 8), ints({0, 3, 1, 2, 1, 2, 1, 2}));
  std::mt19937_64 rng(17);
  for (int i = 0; i < 30; ++i) {
    std::vector<Int> pre{Int(0)}, per;
    for (int k = 0; k < static_cast<int>(rng() % 4); ++k) pre.push_back(Int(static_cast<long>(rng() % 9 + 1)));
    for (int k = 0; k < static_cast<int>(rng() % 3 + 1); ++k) per.push_back(Int(static_cast<long>(rng() % 9 + 1)));
    auto got = cf_expand(quadratic_from_cf(pre, per), pre.size() + 3 * per.size());
    for (std::size_t k = 0; k < got.size(); ++k)
      EXPECT_EQ(got[k], k < pre.size() ? pre[k] : per[(k - pre.size()) % per.size()]);
  }
}

// x -> 1 - x: a_1 > 1 gives [0; 1, a_1 - 1, a_2, ...]; a_1 = 1 gives [0; a_2 + 1, a_3, ...].
TEST(Reflect, ContinuedFractionRules) {
  auto gold = QuadraticAlpha{Int(-1), Int(5), Int(2)};
  EXPECT_EQ(cf_expand(reflect(gold), 6), ints({0, 2, 1, 1, 1, 1}));
  std::mt19937_64 rng(21);
  for (int i = 0; i < 50; ++i) {
    long D = static_cast<long>(rng() % 300 + 2);
    if (is_perfect_square(Int(D))) continue;
    Int s = isqrt(Int(D));
    long Q = static_cast<long>(rng() % 30 + 2);
    long P = -s.get_si() + static_cast<long>(rng() % Q);  // (P + sqrt D)/Q in (0, 1)
    QuadraticAlpha a{Int(P), Int(D), Int(Q)};
    ContinuedFraction cf(a);
    QuadNum x = *cf.exact_value();
    if (x.sign() <= 0 || (x - QuadNum(1)).sign() >= 0) continue;
    ContinuedFraction rf(reflect(a));
    EXPECT_EQ(*rf.exact_value(), QuadNum(1) - x);
  }
  auto pre = std::get<PrefixAlpha>(reflect(PrefixAlpha{ints({0, 3, 4, 5})}));
  EXPECT_EQ(pre.quotients, ints({0, 1, 2, 4, 5}));
  auto pre1 = std::get<PrefixAlpha>(reflect(PrefixAlpha{ints({0, 1, 4, 5})}));
  EXPECT_EQ(pre1.quotients, ints({0, 5, 5}));
  EXPECT_THROW(reflect(PrefixAlpha{ints({0, 1})}), InsufficientDataError);
  EXPECT_EQ(std::get<RationalAlpha>(reflect(RationalAlpha{Rat(3, 10)})).value, Rat(7, 10));
}
