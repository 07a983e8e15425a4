#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "arakel/rational.hpp"

namespace arakel {

// A rational point of P^1(Q); infinity gets its own flag.
struct ProjPoint {
  bool is_infinity = false;
  Rational value;

  static ProjPoint infinity() { return {true, Rational(0)}; }
  static ProjPoint at(Rational v) { return {false, std::move(v)}; }

  friend bool operator==(const ProjPoint& a, const ProjPoint& b) {
    return a.is_infinity == b.is_infinity && (a.is_infinity || a.value == b.value);
  }
  std::string to_string() const { return is_infinity ? "inf" : value.to_string(); }
};

// p-adic valuation of a rational (v_p(0) undefined; guarded by callers).
std::int64_t padic_valuation(std::int64_t p, const Rational& x);

// Depth below the Gauss point at which the rays toward a and b separate in
// the Berkovich tree of the standard model; 0 when they branch at the Gauss
// point itself. Infinity attaches through the |x| > 1 direction.
Rational branch_depth(std::int64_t p, const ProjPoint& a, const ProjPoint& b);

// Finite skeleton of the Berkovich projective line over Q_p spanned by the
// Gauss point and a list of type-I points. Type-I points sit at infinite
// distance; leaves carry finite stubs at the depth of their last branching.
struct BerkTree {
  struct Vertex {
    Rational depth;                   // distance from the root in log p units
    std::optional<ProjPoint> leaf;    // set for leaf stubs
    std::size_t parent;               // root points to itself
    std::vector<std::size_t> children;
  };

  std::int64_t p = 2;
  std::vector<Vertex> vertices;  // vertices[0] is the Gauss point

  std::size_t root() const { return 0; }
  bool is_leaf(std::size_t v) const { return vertices[v].leaf.has_value(); }
  std::size_t find_leaf(const ProjPoint& x) const;
  std::vector<std::size_t> path_from_root(std::size_t v) const;
};

BerkTree build_skeleton(std::int64_t p, const std::vector<ProjPoint>& points);

// Divisor supported on leaves.
struct TreeDivisor {
  std::vector<std::pair<ProjPoint, Rational>> support;

  Rational degree() const {
    Rational d(0);
    for (const auto& [pt, m] : support) {
      (void)pt;
      d += m;
    }
    return d;
  }
  Rational multiplicity_at(const ProjPoint& x) const {
    for (const auto& [pt, m] : support)
      if (pt == x) return m;
    return Rational(0);
  }
};

// Piecewise-linear function on the tree: value at the root plus a slope on
// each downward edge (indexed by the child vertex). Values are multiples of
// log p carried as exact rationals.
struct TreeGreen {
  Rational root_value;
  std::vector<Rational> edge_slope;  // edge_slope[v] = slope on edge parent(v) -> v

  Rational value_at(const BerkTree& tree, std::size_t v) const;
};

struct EvaluationAtPole : std::runtime_error {
  EvaluationAtPole() : std::runtime_error("green function evaluated at a support point") {}
};

struct NotSubharmonic : std::runtime_error {
  explicit NotSubharmonic(const std::string& which)
      : std::runtime_error("function is not subharmonic at vertices " + which) {}
};

// Canonical Green function of D: vanishes at the Gauss point, harmonic off
// the support and the root, slope toward a direction = sum of multiplicities
// behind it.
TreeGreen canonical_green(const BerkTree& tree, const TreeDivisor& D);

// Sum of outgoing slopes at a vertex. Canonical Green functions give 0 at
// internal vertices off the support and deg(D) at the root; subharmonic off
// the poles means >= 0 here.
Rational laplacian_at(const BerkTree& tree, const TreeGreen& g, std::size_t vertex);

// Worst violation max over vertices of g - g^can; requires g(root) = 0 and
// subharmonicity off the support and root, else NotSubharmonic.
Rational model_green_compare(const BerkTree& tree, const TreeGreen& g, const TreeDivisor& D);

// Value of the canonical Green function of D at a rational point x not in
// |D|, in units of log p, computed from pairwise branch depths.
Rational canonical_green_value(std::int64_t p, const TreeDivisor& D, const ProjPoint& x);

}  // namespace arakel
