#pragma once

#include <Eigen/Core>

#include "arakel/rational.hpp"

namespace Eigen {

// Minimal NumTraits so dense Eigen containers can carry exact rationals.
template <>
struct NumTraits<arakel::Rational> {
  using Real = arakel::Rational;
  using NonInteger = arakel::Rational;
  using Literal = arakel::Rational;
  using Nested = arakel::Rational;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 8,
    AddCost = 32,
    MulCost = 32
  };
  static inline Real epsilon() { return arakel::Rational(0); }
  static inline Real dummy_precision() { return arakel::Rational(0); }
  static inline int digits10() { return 0; }
};

}  // namespace Eigen

namespace arakel {

inline Rational abs2(const Rational& x) { return x * x; }
inline const Rational& conj(const Rational& x) { return x; }
inline const Rational& real(const Rational& x) { return x; }
inline Rational imag(const Rational&) { return Rational(0); }
inline Rational abs(const Rational& x) { return x.abs(); }

using RationalMatrix = Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic>;
using RationalVector = Eigen::Matrix<Rational, Eigen::Dynamic, 1>;
using RationalRowVector = Eigen::Matrix<Rational, 1, Eigen::Dynamic>;

// Exact linear solve by Gaussian elimination with nonzero pivoting.
RationalMatrix rational_solve(RationalMatrix A, RationalMatrix B);

}  // namespace arakel
