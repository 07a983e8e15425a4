#include "arakel/degree.hpp"

#include <sstream>
#include <stdexcept>

namespace arakel {

IntersectionExpr expand(std::uint64_t g) {
  if (g < 1) throw std::invalid_argument("expand: need g >= 1");
  IntersectionExpr e;
  e.g = g;
  e.dprime = g * (g + 1) / 2;
  e.d = e.dprime + g;
  const std::uint64_t n = e.d + 1;
  for (std::uint64_t j = 0; j <= n; ++j) {
    DegreeMonomial t;
    t.coeff = Rational(BigInt::binomial(n, j));
    t.k_exp = n - j;
    t.m_exp = j;
    t.e10 = n - j;
    t.e01 = j;
    e.terms.push_back(t);
  }
  std::ostringstream os;
  os << "expand: (k D10 + m D01)^" << n << " -> " << e.terms.size() << " terms";
  e.log.push_back(os.str());
  return e;
}

void apply_vanishing(IntersectionExpr& expr) {
  std::vector<DegreeMonomial> kept;
  for (const DegreeMonomial& t : expr.terms) {
    const std::uint64_t j = t.e01;
    // two evaluations of [2]^* (D10^{d+1-j} D01^j)
    BigInt fiberwise = BigInt::pow(BigInt(2), 2 * j);        // [2]^* D01 ~ 4 D01
    BigInt isogeny = BigInt::pow(BigInt(2), 2 * expr.g);     // deg [2] = 2^{2g}
    std::ostringstream os;
    os << "vanishing j=" << j << ": [2]^* evaluates to 2^" << 2 * j << " X and 2^"
       << 2 * expr.g << " X";
    if (fiberwise == isogeny) {
      os << " -> consistent, term survives";
      kept.push_back(t);
    } else {
      os << " -> forces X = 0";
    }
    expr.log.push_back(os.str());
  }
  expr.terms = std::move(kept);
}

void reduce_to_base(IntersectionExpr& expr) {
  if (expr.reduced) return;
  if (expr.terms.empty()) {
    expr.log.push_back("reduce: expression is 0");
    expr.reduced = true;
    return;
  }
  if (expr.terms.size() != 1)
    throw std::logic_error("reduce_to_base: expression must be post-vanishing");
  DegreeMonomial t = expr.terms.front();
  if (t.e01 != expr.g || t.e10 != expr.dprime + 1)
    throw std::logic_error("reduce_to_base: unexpected surviving monomial");
  // fiber degree: D01^g restricted to a fiber has degree 2^g g!
  Rational fiber = Rational(BigInt::pow(BigInt(2), expr.g)) * Rational(BigInt::factorial(expr.g));
  t.coeff *= fiber;
  t.e01 = 0;
  std::ostringstream os;
  os << "fiber degree: D01^" << expr.g << "|_F = 2^" << expr.g << " " << expr.g
     << "! ; projection formula onto the base";
  expr.log.push_back(os.str());
  // closed form check: binom(d+1, g) 2^g g! = (d+1)!/(d'+1)! 2^g
  Rational closed = Rational(BigInt::factorial(expr.d + 1)) /
                    Rational(BigInt::factorial(expr.dprime + 1)) *
                    Rational(BigInt::pow(BigInt(2), expr.g));
  if (t.coeff != closed)
    throw std::logic_error("reduce_to_base: coefficient mismatch against the closed form");
  expr.log.push_back("coefficient equals (d+1)!/(d'+1)! 2^g, exactly");
  expr.terms = {t};
  expr.reduced = true;
}

Rational reduced_coefficient(const IntersectionExpr& expr) {
  if (!expr.reduced) throw std::logic_error("reduced_coefficient: reduce first");
  return expr.terms.empty() ? Rational(0) : expr.terms.front().coeff;
}

DegreeCoefficients geometric_coefficient(std::uint64_t g) {
  if (g < 1) throw std::invalid_argument("geometric_coefficient: need g >= 1");
  const std::uint64_t dprime = g * (g + 1) / 2;
  const std::uint64_t d = dprime + g;
  Rational twog(BigInt::pow(BigInt(2), g));
  DegreeCoefficients c;
  c.geometric = twog * Rational(BigInt::factorial(d)) / Rational(BigInt::factorial(dprime));
  c.arithmetic =
      twog * Rational(BigInt::factorial(d + 1)) / Rational(BigInt::factorial(dprime + 1));
  return c;
}

Rational degree_formula_replay(std::uint64_t g, const Rational& k, const Rational& m,
                               std::vector<std::string>* log) {
  IntersectionExpr e = expand(g);
  apply_vanishing(e);
  reduce_to_base(e);
  Rational out = reduced_coefficient(e);
  if (!e.terms.empty()) {
    // evaluate k^{d'+1} m^g
    for (std::uint64_t i = 0; i < e.terms.front().k_exp; ++i) out *= k;
    for (std::uint64_t i = 0; i < e.terms.front().m_exp; ++i) out *= m;
  }
  if (log) *log = e.log;
  return out;
}

}  // namespace arakel
