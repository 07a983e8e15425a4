#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace arakel {

// Arbitrary-precision signed integer, base 2^32 magnitude, little-endian limbs.
// Only what the exact paths need: ring ops, division with remainder, gcd,
// decimal I/O, exact conversion to/from machine types.
class BigInt {
public:
  BigInt() = default;
  BigInt(std::int64_t v) {
    if (v < 0) {
      negative_ = true;
      // careful with INT64_MIN
      std::uint64_t m = static_cast<std::uint64_t>(-(v + 1)) + 1;
      set_u64(m);
    } else {
      set_u64(static_cast<std::uint64_t>(v));
    }
  }
  BigInt(int v) : BigInt(static_cast<std::int64_t>(v)) {}

  static BigInt from_u64(std::uint64_t m) {
    BigInt r;
    r.set_u64(m);
    return r;
  }

  static BigInt from_decimal(std::string_view s);

  bool is_zero() const { return limbs_.empty(); }
  bool is_negative() const { return negative_; }
  int sign() const { return is_zero() ? 0 : (negative_ ? -1 : 1); }

  BigInt operator-() const {
    BigInt r = *this;
    if (!r.is_zero()) r.negative_ = !r.negative_;
    return r;
  }
  BigInt abs() const {
    BigInt r = *this;
    r.negative_ = false;
    return r;
  }

  friend BigInt operator+(const BigInt& a, const BigInt& b);
  friend BigInt operator-(const BigInt& a, const BigInt& b);
  friend BigInt operator*(const BigInt& a, const BigInt& b);
  // Truncated division (quotient rounds toward zero).
  static void divmod(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r);
  friend BigInt operator/(const BigInt& a, const BigInt& b) {
    BigInt q, r;
    divmod(a, b, q, r);
    return q;
  }
  friend BigInt operator%(const BigInt& a, const BigInt& b) {
    BigInt q, r;
    divmod(a, b, q, r);
    return r;
  }

  BigInt& operator+=(const BigInt& o) { return *this = *this + o; }
  BigInt& operator-=(const BigInt& o) { return *this = *this - o; }
  BigInt& operator*=(const BigInt& o) { return *this = *this * o; }

  friend bool operator==(const BigInt& a, const BigInt& b) {
    return a.negative_ == b.negative_ && a.limbs_ == b.limbs_;
  }
  friend std::strong_ordering operator<=>(const BigInt& a, const BigInt& b) {
    if (a.sign() != b.sign()) return a.sign() <=> b.sign();
    int c = cmp_mag(a, b);
    if (a.negative_) c = -c;
    return c <=> 0;
  }

  static BigInt gcd(BigInt a, BigInt b);
  BigInt shl(std::size_t bits) const;
  BigInt shr(std::size_t bits) const;
  std::size_t trailing_zero_bits() const;
  static BigInt pow(const BigInt& base, std::uint64_t e);
  static BigInt factorial(std::uint64_t n);
  static BigInt binomial(std::uint64_t n, std::uint64_t k);

  // Exact value as double (may round); infinity on overflow.
  double to_double() const;
  std::size_t bit_length() const;
  // Fits in int64?
  bool fits_i64() const;
  std::int64_t to_i64() const;

  std::string to_string() const;

private:
  void set_u64(std::uint64_t m) {
    limbs_.clear();
    while (m) {
      limbs_.push_back(static_cast<std::uint32_t>(m & 0xffffffffu));
      m >>= 32;
    }
  }
  void trim() {
    while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
    if (limbs_.empty()) negative_ = false;
  }
  static int cmp_mag(const BigInt& a, const BigInt& b);
  static BigInt add_mag(const BigInt& a, const BigInt& b);
  static BigInt sub_mag(const BigInt& a, const BigInt& b);  // |a| >= |b|
  // Divide magnitude by single limb, returns remainder.
  static std::uint32_t divmod_small(std::vector<std::uint32_t>& n, std::uint32_t d);

  bool negative_ = false;
  std::vector<std::uint32_t> limbs_;
};

std::ostream& operator<<(std::ostream& os, const BigInt& v);

// Exact rational with BigInt numerator/denominator, always normalized:
// denominator > 0, gcd(num, den) = 1, zero is 0/1.
class Rational {
public:
  Rational() : num_(0), den_(1) {}
  Rational(std::int64_t n) : num_(n), den_(1) {}
  Rational(int n) : num_(n), den_(1) {}
  Rational(BigInt n) : num_(std::move(n)), den_(1) {}
  Rational(std::int64_t n, std::int64_t d) : num_(n), den_(d) { normalize(); }
  Rational(BigInt n, BigInt d) : num_(std::move(n)), den_(std::move(d)) { normalize(); }

  // Exact dyadic conversion: every finite double is p/2^k.
  static Rational from_double(double x);
  // Parses "p/q", "p", or decimal "1.25".
  static Rational parse(std::string_view s);

  const BigInt& num() const { return num_; }
  const BigInt& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_integer() const { return den_ == BigInt(1); }
  int sign() const { return num_.sign(); }

  Rational operator-() const {
    Rational r = *this;
    r.num_ = -r.num_;
    return r;
  }
  Rational abs() const { return sign() < 0 ? -*this : *this; }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return Rational(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.is_zero()) throw std::domain_error("Rational: division by zero");
    return Rational(a.num_ * b.den_, a.den_ * b.num_);
  }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    return (a.num_ * b.den_) <=> (b.num_ * a.den_);
  }

  double to_double() const;

  // "p/q" when q != 1, else "p".
  std::string to_string() const;

private:
  void normalize();
  BigInt num_, den_;
};

std::ostream& operator<<(std::ostream& os, const Rational& v);

inline Rational min(const Rational& a, const Rational& b) { return a < b ? a : b; }
inline Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

}  // namespace arakel
