#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "arakel/rational.hpp"

namespace arakel {

// Exact scalar of the form  c + sum_p q_p log p  over primes p. Values of
// heights and intersection numbers on model data live here; log p for
// distinct primes are linearly independent over Q, so zero tests are exact.
class LogLin {
public:
  LogLin() = default;
  LogLin(Rational c) : c_(std::move(c)) {}
  LogLin(std::int64_t c) : c_(Rational(c)) {}

  // log of a positive rational, decomposed over its prime factors.
  static LogLin log_of(const Rational& x);
  static LogLin log_prime(std::int64_t p, Rational coeff = Rational(1));

  const Rational& rational_part() const { return c_; }
  const std::map<std::int64_t, Rational>& log_coeffs() const { return logs_; }

  bool is_zero() const;
  bool is_rational() const { return logs_.empty(); }
  int sign() const;  // exact zero test, numeric sign otherwise

  LogLin operator-() const;
  friend LogLin operator+(const LogLin& a, const LogLin& b);
  friend LogLin operator-(const LogLin& a, const LogLin& b);
  friend LogLin operator*(const Rational& c, const LogLin& a);
  LogLin& operator+=(const LogLin& o) { return *this = *this + o; }
  LogLin& operator-=(const LogLin& o) { return *this = *this - o; }

  friend bool operator==(const LogLin& a, const LogLin& b) {
    return (a - b).is_zero();
  }
  friend bool operator<(const LogLin& a, const LogLin& b) { return (a - b).sign() < 0; }
  friend bool operator<=(const LogLin& a, const LogLin& b) { return (a - b).sign() <= 0; }

  double to_double() const;
  std::string to_string() const;

private:
  void trim();
  Rational c_;
  std::map<std::int64_t, Rational> logs_;
};

// Prime factorization by trial division; throws on composite cofactors that
// survive the trial bound (inputs here are desk-scale).
std::map<std::int64_t, std::int64_t> factor_integer(BigInt n);

// All primes dividing numerator or denominator.
std::map<std::int64_t, std::int64_t> factor_rational(const Rational& x);

}  // namespace arakel
