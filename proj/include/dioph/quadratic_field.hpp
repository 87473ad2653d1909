#pragma once

#include <string>

#include "dioph/enclosure.hpp"
#include "dioph/error.hpp"
#include "dioph/rat.hpp"

namespace dioph {

// Exact element a + b*sqrt(d) of Q(sqrt d), d > 1 squarefree-ish (small
// square factors are pulled out so equal numbers compare structurally).
// b == 0 means a rational, and then d is irrelevant (stored as 0).
class QuadNum {
 public:
  QuadNum() = default;
  QuadNum(const Rat& a) : a_(a) {}
  QuadNum(int a) : a_(a) {}
  QuadNum(const Rat& a, const Rat& b, const Int& d) : a_(a), b_(b), d_(d) { normalize(); }

  static QuadNum sqrt(const Int& d) { return QuadNum(Rat(0), Rat(1), d); }

  const Rat& rational_part() const { return a_; }
  const Rat& surd_coefficient() const { return b_; }
  const Int& radicand() const { return d_; }
  bool is_rational() const { return b_.sign() == 0; }

  // Exact sign of a + b*sqrt(d).
  int sign() const {
    int sa = a_.sign(), sb = b_.sign();
    if (sb == 0) return sa;
    if (sa == 0 || sa == sb) return sb;
    // Opposite signs: compare a^2 with b^2 d.
    Rat a2 = a_ * a_, b2d = b_ * b_ * Rat(d_);
    if (a2 > b2d) return sa;
    return sb;  // a2 == b2d impossible for non-square d
  }

  QuadNum conjugate() const { return make(a_, -b_, d_); }
  Rat norm() const { return a_ * a_ - b_ * b_ * Rat(d_); }

  friend QuadNum operator+(const QuadNum& x, const QuadNum& y) {
    const Int& d = common(x, y);
    return make(x.a_ + y.a_, x.b_ + y.b_, d);
  }
  friend QuadNum operator-(const QuadNum& x, const QuadNum& y) {
    const Int& d = common(x, y);
    return make(x.a_ - y.a_, x.b_ - y.b_, d);
  }
  QuadNum operator-() const { return make(-a_, -b_, d_); }
  friend QuadNum operator*(const QuadNum& x, const QuadNum& y) {
    const Int& d = common(x, y);
    Rat dd(d);
    return make(x.a_ * y.a_ + x.b_ * y.b_ * dd, x.a_ * y.b_ + x.b_ * y.a_, d);
  }
  friend QuadNum operator/(const QuadNum& x, const QuadNum& y) {
    if (y.is_rational()) {
      if (y.a_.sign() == 0) throw DomainError("division by zero");
      return make(x.a_ / y.a_, x.b_ / y.a_, x.d_);
    }
    QuadNum c = y.conjugate();
    QuadNum num = x * c;
    Rat n = y.norm();
    return make(num.a_ / n, num.b_ / n, num.d_ == 0 ? y.d_ : num.d_);
  }

  friend bool operator==(const QuadNum& x, const QuadNum& y) {
    return x.a_ == y.a_ && x.b_ == y.b_ && (x.b_.sign() == 0 || x.d_ == y.d_);
  }
  friend bool operator<(const QuadNum& x, const QuadNum& y) { return (x - y).sign() < 0; }
  friend bool operator>(const QuadNum& x, const QuadNum& y) { return y < x; }
  friend bool operator<=(const QuadNum& x, const QuadNum& y) { return !(y < x); }
  friend bool operator>=(const QuadNum& x, const QuadNum& y) { return !(x < y); }

  // Relative width <= 2^-bits (exact point when rational).
  RealEnclosure enclose(int bits) const {
    if (is_rational()) return RealEnclosure::exact(a_, bits);
    // sqrt(d) in [s/2^k, (s+1)/2^k]; grow k until the result is tight enough
    // relative to its magnitude (cancellation between a and b*sqrt(d)).
    long k = bits + static_cast<long>(bit_length(abs(b_).num())) + static_cast<long>(bit_length(d_)) / 2 + 8;
    for (;;) {
      Int s = isqrt(shift_left(d_, 2 * static_cast<unsigned long>(k)));
      RealEnclosure root{dyadic(s, k), dyadic(Int(s + 1), k), bits};
      RealEnclosure v = RealEnclosure::exact(a_, bits) + RealEnclosure::exact(b_, bits) * root;
      Rat mag = max(abs(v.lo), abs(*v.hi));
      if (v.lo.sign() == v.hi->sign() && v.width() <= mag * dyadic(1, bits)) return v;
      k *= 2;
    }
  }

  Int floor() const {
    if (is_rational()) return dioph::floor(a_);
    for (int bits = 64;; bits *= 2) {
      RealEnclosure e = enclose(bits);
      Int lo = dioph::floor(e.lo), hi = dioph::floor(*e.hi);
      if (lo == hi) return lo;
    }
  }

  double to_double() const { return enclose(64).lo.to_double(); }

  // "a", "b*sqrt(d)" or "a+b*sqrt(d)" with rationals in n/d form.
  std::string str() const {
    if (is_rational()) return a_.str();
    std::string s;
    if (a_.sign() != 0) s = a_.str();
    std::string coef = abs(b_).str();
    std::string surd = (coef == "1" ? "" : coef + "*") + "sqrt(" + d_.get_str() + ")";
    if (b_.sign() < 0) s += "-" + surd;
    else s += (s.empty() ? "" : "+") + surd;
    return s;
  }

 private:
  static QuadNum make(const Rat& a, const Rat& b, const Int& d) {
    QuadNum r;
    r.a_ = a;
    r.b_ = b;
    r.d_ = b.sign() == 0 ? Int(0) : d;
    return r;
  }

  static const Int& common(const QuadNum& x, const QuadNum& y) {
    if (x.is_rational()) return y.d_;
    if (y.is_rational()) return x.d_;
    if (x.d_ != y.d_) throw DomainError("mixing different quadratic fields");
    return x.d_;
  }

  void normalize() {
    if (b_.sign() == 0) {
      d_ = 0;
      return;
    }
    if (d_ <= 0) throw DomainError("quadratic radicand must be positive");
    for (long p = 2; p < 1000; ++p) {
      Int pp = Int(p) * p;
      while (d_ % pp == 0) {
        d_ /= pp;
        b_ *= Rat(p);
      }
      if (pp > d_) break;
    }
    if (d_ == 1) {
      a_ += b_;
      b_ = 0;
      d_ = 0;
    } else if (is_perfect_square(d_)) {
      a_ += b_ * Rat(isqrt(d_));
      b_ = 0;
      d_ = 0;
    }
  }

  Rat a_ = 0, b_ = 0;
  Int d_ = 0;
};

inline QuadNum abs(const QuadNum& x) { return x.sign() < 0 ? -x : x; }

// x^e for integer e >= 0.
inline QuadNum pow(const QuadNum& x, unsigned long e) {
  QuadNum r(1), b = x;
  while (e) {
    if (e & 1) r = r * b;
    e >>= 1;
    if (e) b = b * b;
  }
  return r;
}

}  // namespace dioph
