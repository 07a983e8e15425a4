#include "arakel/rational.hpp"

#include <random>

#include "doctest.h"

using namespace arakel;

TEST_CASE("bigint ring ops against int64") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::int64_t> d(-1000000, 1000000);
  for (int i = 0; i < 500; ++i) {
    std::int64_t a = d(rng), b = d(rng);
    CHECK((BigInt(a) + BigInt(b)).to_i64() == a + b);
    CHECK((BigInt(a) - BigInt(b)).to_i64() == a - b);
    CHECK((BigInt(a) * BigInt(b)).to_i64() == a * b);
    if (b != 0) {
      CHECK((BigInt(a) / BigInt(b)).to_i64() == a / b);
      CHECK((BigInt(a) % BigInt(b)).to_i64() == a % b);
    }
  }
}

TEST_CASE("bigint factorial and binomial") {
  CHECK(BigInt::factorial(10).to_string() == "3628800");
  CHECK(BigInt::factorial(25).to_string() == "15511210043330985984000000");
  CHECK(BigInt::binomial(45, 8).to_string() == "215553195");
  CHECK(BigInt::binomial(6, 2) == BigInt(15));
}

TEST_CASE("bigint decimal round trip") {
  const char* cases[] = {"0", "-1", "123456789012345678901234567890", "-987654321987654321"};
  for (const char* s : cases) CHECK(BigInt::from_decimal(s).to_string() == s);
}

TEST_CASE("rational normalization and ordering") {
  CHECK(Rational(2, 4) == Rational(1, 2));
  CHECK(Rational(-2, -4) == Rational(1, 2));
  CHECK(Rational(2, -4) == Rational(-1, 2));
  CHECK(Rational(1, 3) < Rational(1, 2));
  CHECK(Rational(0).to_string() == "0");
  CHECK(Rational(5, 3).to_string() == "5/3");
  CHECK((Rational(1, 3) + Rational(1, 6)) == Rational(1, 2));
  CHECK((Rational(1, 3) * Rational(3, 5)) == Rational(1, 5));
  CHECK((Rational(1, 3) / Rational(2, 3)) == Rational(1, 2));
}

TEST_CASE("rational field axioms on random values") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> d(-30, 30), e(1, 12);
  for (int i = 0; i < 300; ++i) {
    Rational a(d(rng), e(rng)), b(d(rng), e(rng)), c(d(rng), e(rng));
    CHECK(a + b == b + a);
    CHECK((a + b) + c == a + (b + c));
    CHECK(a * (b + c) == a * b + a * c);
    if (!b.is_zero()) CHECK((a / b) * b == a);
  }
}

TEST_CASE("dyadic double conversion is exact") {
  CHECK(Rational::from_double(0.5) == Rational(1, 2));
  CHECK(Rational::from_double(-0.75) == Rational(-3, 4));
  CHECK(Rational::from_double(3.0) == Rational(3));
  double x = 0.1;
  CHECK(Rational::from_double(x).to_double() == x);
}

TEST_CASE("rational parsing") {
  CHECK(Rational::parse("3/4") == Rational(3, 4));
  CHECK(Rational::parse("-7") == Rational(-7));
  CHECK(Rational::parse("1.25") == Rational(5, 4));
}
