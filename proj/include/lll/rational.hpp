#pragma once

#include <cstdint>
#include <cstdlib>
#include <string>
#include <string_view>

#include "lll/errors.hpp"

namespace lll {

// Exact rational arithmetic on 64-bit numerator/denominator with __int128
// intermediates. Values are always stored reduced with a positive
// denominator, so equality is bitwise and serialization is canonical.
// Anything that would not fit back into 64 bits after reduction throws
// OverflowError instead of silently wrapping.
class Rational {
 public:
  constexpr Rational() : num_(0), den_(1) {}
  Rational(std::int64_t value) : num_(value), den_(1) {}  // NOLINT(implicit)
  Rational(std::int64_t num, std::int64_t den) {
    *this = from_i128(I128(num), I128(den));
  }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  bool is_zero() const { return num_ == 0; }

  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  /// Canonical form "num/den", always with the slash, always reduced.
  std::string str() const {
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  /// Accepts "n/d" or a bare integer "n".
  static Rational parse(std::string_view text) {
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) {
      return Rational(parse_int(text, "rational"), 1);
    }
    const std::int64_t n = parse_int(text.substr(0, slash), "numerator");
    const std::int64_t d = parse_int(text.substr(slash + 1), "denominator");
    return Rational(n, d);
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    const I128 n = I128(a.num_) * b.den_ + I128(b.num_) * a.den_;
    const I128 d = I128(a.den_) * b.den_;
    return from_i128(n, d);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    const I128 n = I128(a.num_) * b.den_ - I128(b.num_) * a.den_;
    const I128 d = I128(a.den_) * b.den_;
    return from_i128(n, d);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return from_i128(I128(a.num_) * b.num_, I128(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw ValidationError("rational division by zero");
    return from_i128(I128(a.num_) * b.den_, I128(a.den_) * b.num_);
  }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) {
    return !(a == b);
  }
  friend bool operator<(const Rational& a, const Rational& b) {
    return I128(a.num_) * b.den_ < I128(b.num_) * a.den_;
  }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) {
    return !(b < a);
  }
  friend bool operator>=(const Rational& a, const Rational& b) {
    return !(a < b);
  }

  /// this * 2^k, checked.
  Rational times_pow2(int k) const {
    if (k < 0 || k > 62) throw RangeError("times_pow2 exponent out of range");
    return from_i128(I128(num_) << k, I128(den_));
  }

 private:
  using I128 = __int128;

  static I128 gcd128(I128 a, I128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
      const I128 t = a % b;
      a = b;
      b = t;
    }
    return a;
  }

  static std::int64_t narrow(I128 v) {
    if (v > I128(INT64_MAX) || v < I128(INT64_MIN)) {
      throw OverflowError("rational overflow past 64 bits");
    }
    return static_cast<std::int64_t>(v);
  }

  static Rational from_i128(I128 n, I128 d) {
    if (d == 0) throw ValidationError("rational with zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    const I128 g = n == 0 ? d : gcd128(n, d);
    Rational r;
    r.num_ = narrow(n / g);
    r.den_ = narrow(d / g);
    return r;
  }

  static std::int64_t parse_int(std::string_view s, const char* what) {
    if (s.empty()) throw ValidationError(std::string("empty ") + what);
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) throw ValidationError(std::string("bad ") + what);
    I128 v = 0;
    for (; i < s.size(); ++i) {
      if (s[i] < '0' || s[i] > '9') {
        throw ValidationError(std::string("bad character in ") + what + ": '" +
                              std::string(s) + "'");
      }
      v = v * 10 + (s[i] - '0');
      if (v > I128(INT64_MAX) + 1) {
        throw OverflowError(std::string(what) + " does not fit in 64 bits");
      }
    }
    if (s[0] == '-') v = -v;
    return narrow(v);
  }

  std::int64_t num_;
  std::int64_t den_;
};

}  // namespace lll
