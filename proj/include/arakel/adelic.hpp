#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "arakel/loglinear.hpp"
#include "arakel/profile.hpp"
#include "arakel/tree.hpp"

namespace arakel {

// One finite-place deviation bump: coeff * min(branch_depth(x, center), depth).
// Vanishes at the Gauss point and is flat toward every type-I point, so it
// never changes the divisor; its Laplacian measure puts +coeff at the Gauss
// point and -coeff at the type-II point (center, depth).
struct DeviationBump {
  ProjPoint center;
  Rational depth;  // > 0
  Rational coeff;
};
using FiniteDeviation = std::vector<DeviationBump>;

// Principal function h = z^{z_exponent} prod_i (z - c_i)^{e_i}; div-hat(h)
// carries the pointwise Green -log|h|^2 at the archimedean place and v_p(h)
// at finite places.
struct PrincipalPart {
  Rational z_exponent;
  std::vector<std::pair<Rational, Rational>> roots;  // (c_i != 0, e_i)
};

// Model arithmetic divisor on P^1 over Q with S^1-invariant archimedean data:
// horizontal points with real multiplicities, vertical fibers, an archimedean
// Green potential in the coordinate t = log|z|^2, and finite-place deviations
// from the canonical (Zariski-closure) Green functions.
//
// Interior points x (not 0 or infinity) enter the archimedean Green function
// through the forced kinks -m * max(t - log x^2, 0); the stored potential is
// the kink-healed convex part, so its slope budget is exactly the degree.
struct ModelArithDivisor {
  std::vector<std::pair<ProjPoint, Rational>> points;
  std::vector<std::pair<std::int64_t, Rational>> vertical;
  ConvexProfile potential;
  std::map<std::int64_t, FiniteDeviation> deviations;

  Rational degree() const;
  Rational mult_at(const ProjPoint& x) const;
  Rational vertical_at(std::int64_t p) const;
  bool toric() const;  // horizontal support inside {0, infinity}
  void validate() const;
};

struct BoundaryDivisor {
  ModelArithDivisor div;  // effective; green > eta on the complement
  Rational eta;

  void validate() const;
  // Fubini-Study-surrogate boundary ([0] + [inf], |t| + eta margin).
  static BoundaryDivisor standard(const Rational& eta);
};

// Difference of two model divisors; the Green part is a general PL function.
struct ArithDelta {
  std::vector<std::pair<ProjPoint, Rational>> points;
  std::vector<std::pair<std::int64_t, Rational>> vertical;
  PiecewiseLinear green;
  std::map<std::int64_t, FiniteDeviation> deviations;
};

ArithDelta sub(const ModelArithDivisor& a, const ModelArithDivisor& b);
ModelArithDivisor add_scaled(const ModelArithDivisor& a, const Rational& c,
                             const ModelArithDivisor& b);

struct PoleAtPoint : std::runtime_error {
  PoleAtPoint() : std::runtime_error("evaluation at a point of the divisor support") {}
};
struct SupportsNotDisjoint : std::runtime_error {
  SupportsNotDisjoint()
      : std::runtime_error("horizontal supports overlap; move one divisor first") {}
};
struct RamificationUnsupported : std::runtime_error {
  RamificationUnsupported()
      : std::runtime_error("pullback needs toric support with the toric flag set") {}
};
struct SandwichUnverifiable : std::runtime_error {
  SandwichUnverifiable()
      : std::runtime_error("prefix cannot be re-indexed to satisfy the 1/2^n sandwich") {}
};
struct ToleranceNotReached : std::runtime_error {
  ToleranceNotReached() : std::runtime_error("requested tolerance not reached on the prefix") {}
};
struct FullMassFails : std::runtime_error {
  FullMassFails() : std::runtime_error("relative full mass condition fails") {}
};

// Archimedean Green value of D at a rational point (pointwise for toric
// support; interior points contribute their circle kinks). Regularized
// limits at 0/infinity require vanishing multiplicity there.
LogLin arch_green_at(const ModelArithDivisor& D, const ProjPoint& y);

// v-adic Green value (units of log p): canonical part from branch depths,
// plus vertical constant and deviation.
Rational finite_green_at(const ModelArithDivisor& D, std::int64_t p, const ProjPoint& y);

// Arakelov height h(y) = g_inf(y)/2 + sum_p g_p(y) log p; exact.
LogLin height(const ModelArithDivisor& D, const ProjPoint& y);
struct AdelicArithDivisor;

// Height with respect to D + div-hat(h); equals height(D, y) exactly by the
// product formula whenever y avoids the supports.
LogLin height_shifted(const ModelArithDivisor& D, const PrincipalPart& h, const ProjPoint& y);

// Pairing of A against B + div-hat(h).
LogLin pair_model_shifted(const ModelArithDivisor& A, const ModelArithDivisor& B,
                          const PrincipalPart& h);

// Sampled necessary nef check: degree, convexity, heights at probes.
bool is_nef(const ModelArithDivisor& D, const std::vector<ProjPoint>& probes);

// B-adic norm of a difference; nullopt encodes infinity (empty feasible set).
std::optional<Rational> b_adic_norm(const ArithDelta& delta, const BoundaryDivisor& B);
std::optional<Rational> b_adic_norm(const ModelArithDivisor& D, const BoundaryDivisor& B);

// Exact model intersection pairing at relative dimension 1. Disjoint
// horizontal supports pair directly; a self-pairing (same object) is moved by
// a deterministic principal divisor internally. Distinct divisors with
// overlapping horizontal supports are refused.
LogLin pair_model(const ModelArithDivisor& A, const ModelArithDivisor& B);

// Cauchy sequence of model divisors with a declared geometric modulus:
// ||D_{n+1} - D_n|| <= base * ratio^n, verified on the materialized prefix.
struct CauchySequence {
  std::vector<ModelArithDivisor> terms;
  Rational modulus_base = Rational(1);
  Rational modulus_ratio = Rational(1, 2);

  bool verify(const BoundaryDivisor& B) const;
  // Tail norm bound past index n: base * ratio^n / (1 - ratio).
  Rational tail_bound(std::size_t n) const;
};

struct AdelicArithDivisor {
  CauchySequence seq;

  const ModelArithDivisor& last() const { return seq.terms.back(); }
};

// Height of a rational point with respect to an adelic divisor: evaluated on
// the deepest materialized term (exact there; the B-adic tail controls the
// distance to the limit).
inline LogLin height(const AdelicArithDivisor& D, const ProjPoint& y) {
  return height(D.last(), y);
}

// Monotone nef approximation: re-index so that consecutive tails satisfy the
// 1/2^n sandwich, then add (4/2^n) B; the result decreases componentwise.
CauchySequence monotone_nef_approximation(const AdelicArithDivisor& D,
                                          const BoundaryDivisor& B);

// componentwise comparison E <= D (multiplicities, verticals, greens,
// deviations evaluated on their joint vertex set)
bool divisor_leq(const ModelArithDivisor& E, const ModelArithDivisor& D);

struct PairingResult {
  double value;
  double tail_bound;
  std::size_t terms_used;
};

// Limit pairing along the diagonal with a reported Cauchy tail bound.
PairingResult intersect(const AdelicArithDivisor& A, const AdelicArithDivisor& B,
                        const BoundaryDivisor& bnd, double tol);

// Energy-difference identity at d = 1: lhs = P(D,D) - P(D',D'), rhs = mixed relative
// energy of the Green profiles; returns (lhs, rhs, residual), exact.
struct EnergyDifference {
  LogLin lhs;
  Rational rhs;
  LogLin residual;
};
EnergyDifference energy_difference_check(const ModelArithDivisor& D,
                                         const ModelArithDivisor& Dprime);

// Generalized product: anchor self-pairing plus mixed relative energy of the
// metric change; nullopt encodes -infinity (diverging energy).
std::optional<LogLin> generalized_product(const ModelArithDivisor& D,
                                          const ModelArithDivisor& anchor);

// Pullback along z -> z^n (toric supports only).
ModelArithDivisor pullback_power(const ModelArithDivisor& D, std::int64_t n, bool toric_ok);

// Non-integrability demonstration: truncations g_n = max(g, -n) of
// g = -log(-(1/2pi) log|q|) near the cusp.
struct NonIntRow {
  int n;
  double value_at_cusp;      // g_n(0) = -n
  double subharm_margin;     // min discrete second difference in s = log r
  double analytic_mismatch;  // worst |second difference - 1/s^2| relative
  double circle_max;         // max of g_n on |q| = epsilon
};
std::vector<NonIntRow> non_integrability_demo(int n_max, std::size_t grid,
                                              double epsilon = 1e-3);

}  // namespace arakel
