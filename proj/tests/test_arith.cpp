#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "dioph/enclosure.hpp"
#include "dioph/quadratic_field.hpp"
#include "dioph/rat.hpp"
#include "dioph/series.hpp"
#include "test_util.hpp"

using namespace dioph;

TEST(Rat, ParsesExactDecimalsAndFractions) {
  EXPECT_EQ(Rat::parse("0.1"), Rat(1, 10));
  EXPECT_EQ(Rat::parse("-3/6"), Rat(-1, 2));
  EXPECT_EQ(Rat::parse("1e-3"), Rat(1, 1000));
  EXPECT_EQ(Rat::parse("2.5E2"), Rat(250));
  EXPECT_EQ(Rat::parse("7"), Rat(7));
  // Leading zeros are decimal, never octal.
  EXPECT_EQ(Rat::parse("0.09"), Rat(9, 100));
  EXPECT_EQ(Rat::parse("010"), Rat(10));
  EXPECT_EQ(Rat::parse("08/09"), Rat(8, 9));
  EXPECT_THROW(Rat::parse("1/0"), UsageError);
  EXPECT_THROW(Rat::parse("abc"), UsageError);
  EXPECT_THROW(Rat::parse(""), UsageError);
}

TEST(Rat, StringFormIsNumSlashDen) {
  EXPECT_EQ(Rat(127, 160).str(), "127/160");
  EXPECT_EQ(Rat(4).str(), "4");
  EXPECT_EQ(Rat(6, -4).str(), "-3/2");
}

TEST(Rat, FloorCeilAndRounding) {
  EXPECT_EQ(floor(Rat(-7, 2)), Int(-4));
  EXPECT_EQ(ceil(Rat(-7, 2)), Int(-3));
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    Rat x(Int(static_cast<long>(rng() % 2000001) - 1000000), Int(static_cast<long>(rng() % 9999 + 1)));
    unsigned bits = 1 + rng() % 60;
    EXPECT_LE(round_down(x, bits), x);
    EXPECT_GE(round_up(x, bits), x);
    // Relative rounding: the two ends are at most two ulps apart.
    EXPECT_LE(round_up(x, bits) - round_down(x, bits), abs(x) * dyadic(Int(4), bits));
  }
}

TEST(Rat, ExactSumMatchesSequentialSum) {
  std::vector<Rat> v;
  Rat seq(0);
  for (int q = 1; q <= 300; ++q) {
    v.push_back(Rat(1, q));
    seq += Rat(1, q);
  }
  EXPECT_EQ(exact_sum(v), seq);
  EXPECT_EQ(exact_sum({}), Rat(0));
}

TEST(IntHelpers, IntegerRoots) {
  bool exact = false;
  EXPECT_EQ(iroot(Int(1000), 3, &exact), Int(10));
  EXPECT_TRUE(exact);
  EXPECT_EQ(iroot(Int(1001), 3, &exact), Int(10));
  EXPECT_FALSE(exact);
  EXPECT_TRUE(is_perfect_square(Int(144)));
  EXPECT_FALSE(is_perfect_square(Int(145)));
}

// Property: lo <= base^(m/n) <= hi, checked by raising to the n-th power.
TEST(PowReal, EnclosureBracketsTheRoot) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) {
    Rat base(Int(static_cast<long>(rng() % 5000 + 1)), Int(static_cast<long>(rng() % 97 + 1)));
    long m = static_cast<long>(rng() % 13) - 6;
    unsigned long n = rng() % 5 + 2;
    Rat e{Int(m), Int(n)};
    RealEnclosure r = pow_real(base, e, 96);
    if (e.is_integer()) {
      EXPECT_TRUE(r.is_point());
      continue;
    }
    long mm = e.num().get_si();
    unsigned long nn = e.den().get_ui();
    Rat target = pow(base, mm);
    auto pw = [&](const Rat& x) {
      Rat acc(1);
      for (unsigned long k = 0; k < nn; ++k) acc *= x;
      return acc;
    };
    EXPECT_LE(pw(r.lo), target);
    EXPECT_GE(pw(r.upper()), target);
    EXPECT_LE(r.width(), dyadic(Int(2), 95) * r.upper());
  }
}

TEST(PowReal, ExactRootsArePoints) {
  RealEnclosure r = pow_real(Rat(4), Rat(7, 2), 64);
  EXPECT_TRUE(r.is_point());
  EXPECT_EQ(r.lo, Rat(128));
  EXPECT_THROW(pow_real(Rat(0), Rat(1, 2), 64), DomainError);
}

TEST(LnEnclosure, ContainsLibmValue) {
  for (double y : {0.01, 0.5, 1.0, 1.7, 2.0, 10.0, 12345.0}) {
    RealEnclosure e = ln_enclosure(Rat::parse(std::to_string(y)), 80);
    double v = std::log(Rat::parse(std::to_string(y)).to_double());
    EXPECT_LE(e.lo.to_double(), v + 1e-12);
    EXPECT_GE(e.upper().to_double(), v - 1e-12);
    EXPECT_LT(e.width(), dyadic(Int(1), 70));
  }
}

TEST(Enclosure, ArithmeticContainsPointResults) {
  RealEnclosure a = RealEnclosure::between(Rat(1), Rat(2));
  RealEnclosure b = RealEnclosure::between(Rat(-3), Rat(5));
  RealEnclosure p = a * b;
  EXPECT_EQ(p.lo, Rat(-6));
  EXPECT_EQ(p.upper(), Rat(10));
  EXPECT_THROW(reciprocal(b), DomainError);
  EXPECT_THROW(intersect(a, RealEnclosure::exact(Rat(3))), ConsistencyError);
}

TEST(CmpCertified, RefinesUntilDecided) {
  auto sqrt2 = [](int bits) { return pow_real(Rat(2), Rat(1, 2), bits); };
  // sqrt(2) vs a rational 2^-100 above it: needs more than the first rung.
  Rat above = pow_real(Rat(2), Rat(1, 2), 300).upper() + dyadic(Int(1), 100);
  CmpVerdict v = cmp_certified(sqrt2, constant(above));
  EXPECT_TRUE(v.less());
  EXPECT_GT(v.precision_reached, 64);
  CmpVerdict eq = cmp_certified(constant(Rat(1, 3)), constant(Rat(1, 3)));
  EXPECT_TRUE(eq.equal());
  // Equal irrationals never separate.
  CmpVerdict u = cmp_certified(sqrt2, sqrt2, 256);
  EXPECT_TRUE(u.unresolved());
  EXPECT_EQ(u.precision_reached, 256);
}

TEST(QuadNum, FieldArithmetic) {
  QuadNum phi(Rat(1, 2), Rat(1, 2), Int(5));
  EXPECT_EQ(phi * phi, phi + QuadNum(1));
  EXPECT_EQ((phi - QuadNum(1)) * phi, QuadNum(1));
  EXPECT_EQ(QuadNum(Rat(0), Rat(1), Int(8)), QuadNum(Rat(0), Rat(2), Int(2)));
  EXPECT_EQ(phi.floor(), Int(1));
  EXPECT_EQ(QuadNum(Rat(21, 2), Rat(-9, 2), Int(5)).sign(), 1);
  EXPECT_THROW(QuadNum::sqrt(Int(2)) + QuadNum::sqrt(Int(3)), DomainError);
}

TEST(QuadNum, SignMatchesEnclosure) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 300; ++i) {
    Rat a(Int(static_cast<long>(rng() % 401) - 200), Int(static_cast<long>(rng() % 20 + 1)));
    Rat b(Int(static_cast<long>(rng() % 401) - 200), Int(static_cast<long>(rng() % 20 + 1)));
    QuadNum x(a, b, Int(static_cast<long>(rng() % 50 + 2)));
    RealEnclosure e = x.enclose(80);
    if (x.sign() > 0) {
      EXPECT_GT(e.upper(), Rat(0));
    }
    if (x.sign() < 0) {
      EXPECT_LT(e.lo, Rat(0));
    }
    EXPECT_TRUE(e.contains(e.midpoint()));
  }
}

TEST(Series, TailBoundsDominatePartialSums) {
  // sum_{q=Q+1}^{Q+20000} q^-3 stays below the analytic tail.
  Int Q(50);
  Rat tail = power_tail_upper(Rat(3), Q);
  Rat s(0);
  for (long q = 51; q <= 2000; ++q) s += Rat(1) / pow(Rat(q), 3);
  EXPECT_LT(s, tail);
  EXPECT_THROW(power_tail_upper(Rat(1), Q), DivergenceError);
  EXPECT_THROW(rat_sum_tail_bound(Rat(2), Q), DivergenceError);
}

TEST(Series, PowerSumUpperBound) {
  for (long a : {1L, 3L, 10L})
    for (long b : {a, a + 5, a + 100})
      for (Rat s : {Rat(0), Rat(1), Rat(2), Rat(1, 2), Rat(-1, 2), Rat(3, 2)}) {
        double direct = 0;
        for (long p = a; p <= b; ++p) direct += std::pow(static_cast<double>(p), -s.to_double());
        EXPECT_GE(power_sum_upper(s, Int(a), Int(b)).to_double(), direct * (1 - 1e-12)) << a << " " << b << " " << s.str();
      }
}
