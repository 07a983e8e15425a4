#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "arakel/rational.hpp"

namespace arakel {

// Piecewise-linear function of one real variable, not necessarily convex.
// Encoded by strictly increasing breakpoints, one slope per piece
// (slopes.size() == breakpoints.size() + 1), and the value at t = 0.
// Beyond the outermost breakpoints the function continues linearly.
struct PiecewiseLinear {
  std::vector<Rational> breakpoints;
  std::vector<Rational> slopes;
  Rational anchor_value;  // value at t = 0

  Rational eval(const Rational& t) const;
  Rational slope_at_minus_inf() const { return slopes.front(); }
  Rational slope_at_plus_inf() const { return slopes.back(); }

  // Supremum over the whole line; nullopt means +infinity.
  std::optional<Rational> sup() const;
  // Infimum over the whole line; nullopt means -infinity.
  std::optional<Rational> inf() const;

  void validate() const;
};

PiecewiseLinear pl_add(const PiecewiseLinear& a, const PiecewiseLinear& b);
PiecewiseLinear pl_sub(const PiecewiseLinear& a, const PiecewiseLinear& b);
PiecewiseLinear pl_scale(const PiecewiseLinear& a, const Rational& c);
PiecewiseLinear pl_shift(const PiecewiseLinear& a, const Rational& c);  // a + c
// Drops breakpoints where adjacent slopes coincide.
PiecewiseLinear pl_simplify(const PiecewiseLinear& a);

enum class ProfileKind { piecewise_linear, smooth_sampled };

// Convex profile: the one-variable avatar of an S^1-invariant semipositive
// metric on P^1 in the coordinate t = log|z|^2. The exact path is
// piecewise-linear; smooth profiles are carried as uniform samples with
// exact asymptotic slopes.
class ConvexProfile {
public:
  ConvexProfile() : pl_{{}, {Rational(0)}, Rational(0)} {}

  // Piecewise-linear constructor; throws std::invalid_argument when the
  // slopes fail to be nondecreasing or breakpoints are not increasing.
  ConvexProfile(std::vector<Rational> breakpoints, std::vector<Rational> slopes,
                Rational anchor_value);

  // Smooth profile sampled on the uniform grid [lo, hi] (values.size() nodes).
  static ConvexProfile sampled(double lo, double hi, std::vector<double> values,
                               Rational sigma_minus, Rational sigma_plus);

  ProfileKind kind() const { return kind_; }
  const PiecewiseLinear& pl() const { return pl_; }

  Rational eval(const Rational& t) const;
  double eval_d(double t) const;

  Rational slope_minus() const;  // sigma^-
  Rational slope_plus() const;   // sigma^+

  // Exact piecewise-linear view; for sampled profiles this is the chord
  // interpolant through the grid nodes (dyadic rationals).
  PiecewiseLinear linearized() const;

  // grid data (sampled kind only)
  double grid_lo() const { return lo_; }
  double grid_hi() const { return hi_; }
  const std::vector<double>& samples() const { return samples_; }

private:
  ProfileKind kind_ = ProfileKind::piecewise_linear;
  PiecewiseLinear pl_;
  double lo_ = 0, hi_ = 0;
  std::vector<double> samples_;
  Rational sm_, sp_;  // asymptotic slopes for sampled kind
};

// Reference data (E, g_E): a degree together with a convex profile whose
// slopes run from 0 to the degree.
struct ReferenceProfile {
  Rational degree;
  ConvexProfile profile;

  // max(0, n t): the piecewise-linear surrogate of n log(1+e^t).
  static ReferenceProfile pl_model(const Rational& n);
  // n log(1+e^t) sampled on [lo, hi]; the default grid has 4096 cells so that
  // t = 0 falls on a node.
  static ReferenceProfile smooth_model(const Rational& n, double lo = -40, double hi = 40,
                                       std::size_t nodes = 4097);
};

// Finite positive measure on the line: atoms plus a piecewise-constant
// density (zero outside its breakpoint range), with an optional sampled
// fallback. `unbounded_tail` marks measures whose tail mass is not
// representable; integration against unbounded integrands then refuses.
struct LineMeasure {
  std::vector<std::pair<Rational, Rational>> atoms;  // (position, mass >= 0)
  std::vector<Rational> density_breaks;              // size k
  std::vector<Rational> density_values;              // size k-1, value on [b_i, b_{i+1}]
  // sampled fallback: cell masses on a uniform grid
  double grid_lo = 0, grid_hi = 0;
  std::vector<double> cell_mass;
  bool unbounded_tail = false;

  Rational total_mass() const;
  double total_mass_d() const;
  void validate() const;
};

struct UnboundedDifference : std::runtime_error {
  UnboundedDifference() : std::runtime_error("integrand difference unbounded on measure support") {}
};

// --- psh1d operations -------------------------------------------------------

// Non-pluripolar Monge-Ampere measure of a convex profile: slope jumps become
// atoms; the sampled path produces a second-difference density. Mass escaping
// to t = +-infinity is discarded.
LineMeasure ma_measure(const ConvexProfile& u);

// Total non-pluripolar mass: sigma^+ - sigma^-, exactly.
Rational npp_mass(const ConvexProfile& u);

// Pointwise maximum of convex profiles (sampled inputs are linearized on a
// merged grid first); crossings become exact breakpoints.
ConvexProfile profile_max(const ConvexProfile& u, const ConvexProfile& v);

ConvexProfile profile_add(const ConvexProfile& u, const ConvexProfile& v);
ConvexProfile profile_scale(const ConvexProfile& u, const Rational& c);  // c >= 0
ConvexProfile profile_shift(const ConvexProfile& u, const Rational& c);  // u + c

// Integral of (f - g) against mu, exact on piecewise-linear data.
Rational integrate_against(const ConvexProfile& f, const ConvexProfile& g,
                           const LineMeasure& mu);
Rational integrate_pl_against(const PiecewiseLinear& h, const LineMeasure& mu);

enum class SingularityClass { bounded, algebraic, almost_asymptotically_algebraic, other };

std::string to_string(SingularityClass c);

// Witness for almost asymptotically algebraic singularities: profiles psi_k
// (k = 1..K), a nonpositive correction f, and a constant C with
// psi_k + f/k - C <= u <= psi_k + C for every supplied k.
struct AlmostAlgebraicWitness {
  std::vector<ConvexProfile> psi;
  PiecewiseLinear f;
  Rational C;
};

SingularityClass singularity_class(const ConvexProfile& u, const ReferenceProfile& ref,
                                   const AlmostAlgebraicWitness* witness = nullptr);

// u more singular than v up to O(1): asymptotic slope ranges nested.
bool more_singular_or_equal(const ConvexProfile& u, const ConvexProfile& v);

// sup(v - u) over the line when finite (requires equal asymptotic slopes).
std::optional<Rational> bounded_gap(const ConvexProfile& u, const ConvexProfile& v);

}  // namespace arakel
