#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "arakel/rational.hpp"

namespace arakel {

// Formal monomial c * k^{k_exp} m^{m_exp} * D10^{e10} D01^{e01}; D10 is the
// pulled-back base divisor symbol, D01 the fiberwise one, total degree d+1.
struct DegreeMonomial {
  Rational coeff;
  std::uint64_t k_exp = 0, m_exp = 0;
  std::uint64_t e10 = 0, e01 = 0;
};

// Exact multilinear expansion with a replayable derivation log.
struct IntersectionExpr {
  std::uint64_t g = 1;
  std::uint64_t dprime = 1;  // g(g+1)/2
  std::uint64_t d = 2;       // dprime + g
  bool reduced = false;      // true once rewritten to the base symbol E^{d'+1}
  std::vector<DegreeMonomial> terms;
  std::vector<std::string> log;
};

// (k D10 + m D01)^{d+1} fully expanded.
IntersectionExpr expand(std::uint64_t g);

// Derives D10^{d+1-j} D01^j = 0 for j != g by evaluating the multiplication-
// by-two pullback in the two ways of the proof (isogeny degree 2^{2g} against
// the fiberwise scaling 2^{2j}); records both evaluations per term.
void apply_vanishing(IntersectionExpr& expr);

// Fiber degree 2^g g! and the projection formula: rewrites the surviving
// monomial into the base symbol; the final coefficient is asserted equal to
// (d+1)!/(d'+1)! k^{d'+1} m^g 2^g, exactly.
void reduce_to_base(IntersectionExpr& expr);

// Coefficient of the reduced expression (the k^{d'+1} m^g prefactor).
Rational reduced_coefficient(const IntersectionExpr& expr);

struct DegreeCoefficients {
  Rational geometric;   // 2^g d!/d'!
  Rational arithmetic;  // 2^g (d+1)!/(d'+1)!
};
DegreeCoefficients geometric_coefficient(std::uint64_t g);

// Full replay at numeric k, m: expand, apply vanishing, reduce, then
// evaluate the coefficient.
Rational degree_formula_replay(std::uint64_t g, const Rational& k, const Rational& m,
                               std::vector<std::string>* log = nullptr);

}  // namespace arakel
