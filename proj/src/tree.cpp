#include "arakel/tree.hpp"

#include <algorithm>
#include <sstream>

namespace arakel {

std::int64_t padic_valuation(std::int64_t p, const Rational& x) {
  if (x.is_zero()) throw std::domain_error("padic_valuation: zero has no finite valuation");
  std::int64_t v = 0;
  BigInt n = x.num().abs(), d = x.den();
  const BigInt bp(p);
  BigInt q, r;
  while (true) {
    BigInt::divmod(n, bp, q, r);
    if (!r.is_zero()) break;
    n = q;
    ++v;
  }
  while (true) {
    BigInt::divmod(d, bp, q, r);
    if (!r.is_zero()) break;
    d = q;
    --v;
  }
  return v;
}

namespace {

// Is |x|_p <= 1?
bool integral_at(std::int64_t p, const ProjPoint& x) {
  if (x.is_infinity) return false;
  if (x.value.is_zero()) return true;
  return padic_valuation(p, x.value) >= 0;
}

// 1/x with infinity <-> 0.
ProjPoint invert(const ProjPoint& x) {
  if (x.is_infinity) return ProjPoint::at(Rational(0));
  if (x.value.is_zero()) return ProjPoint::infinity();
  return ProjPoint::at(Rational(1) / x.value);
}

}  // namespace

Rational branch_depth(std::int64_t p, const ProjPoint& a, const ProjPoint& b) {
  if (a == b) throw std::domain_error("branch_depth: points must be distinct");
  const bool ia = integral_at(p, a), ib = integral_at(p, b);
  if (ia != ib) return Rational(0);
  if (ia) {
    Rational diff = a.value - b.value;
    std::int64_t v = padic_valuation(p, diff);
    return Rational(std::max<std::int64_t>(0, v));
  }
  // both in the |x| > 1 direction: work in the coordinate w = 1/x
  ProjPoint wa = invert(a), wb = invert(b);
  Rational diff = wa.value - wb.value;
  std::int64_t v = padic_valuation(p, diff);
  return Rational(std::max<std::int64_t>(0, v));
}

std::size_t BerkTree::find_leaf(const ProjPoint& x) const {
  for (std::size_t v = 0; v < vertices.size(); ++v)
    if (vertices[v].leaf && *vertices[v].leaf == x) return v;
  throw std::out_of_range("BerkTree: point is not a leaf of the skeleton");
}

std::vector<std::size_t> BerkTree::path_from_root(std::size_t v) const {
  std::vector<std::size_t> path{v};
  while (v != root()) {
    v = vertices[v].parent;
    path.push_back(v);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

BerkTree build_skeleton(std::int64_t p, const std::vector<ProjPoint>& points) {
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      if (points[i] == points[j])
        throw std::invalid_argument("build_skeleton: points must be pairwise distinct");
  BerkTree tree;
  tree.p = p;
  tree.vertices.push_back({Rational(0), std::nullopt, 0, {}});

  // Insert one leaf at a time along its path of branch depths with the
  // already-present leaves.
  for (const ProjPoint& x : points) {
    std::size_t best_leaf = tree.vertices.size();
    Rational best_depth(0);
    bool have = false;
    for (std::size_t v = 0; v < tree.vertices.size(); ++v) {
      if (!tree.is_leaf(v)) continue;
      Rational d = branch_depth(p, x, *tree.vertices[v].leaf);
      if (!have || d > best_depth) {
        have = true;
        best_depth = d;
        best_leaf = v;
      }
    }
    if (!have) {
      tree.vertices.push_back({Rational(0), x, tree.root(), {}});
      tree.vertices[tree.root()].children.push_back(tree.vertices.size() - 1);
      continue;
    }
    // walk from the root toward best_leaf while interior depth stays <= best_depth
    std::vector<std::size_t> path = tree.path_from_root(best_leaf);
    std::size_t attach = tree.root();
    std::size_t below = path.size();
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
      const std::size_t nxt = path[k + 1];
      if (!tree.is_leaf(nxt) && tree.vertices[nxt].depth <= best_depth) {
        attach = nxt;
        continue;
      }
      below = k + 1;
      break;
    }
    if (tree.vertices[attach].depth == best_depth) {
      tree.vertices.push_back({best_depth, x, attach, {}});
      tree.vertices[attach].children.push_back(tree.vertices.size() - 1);
      continue;
    }
    // split the edge attach -> path[below] at best_depth
    std::size_t old_child = path[below];
    std::size_t mid = tree.vertices.size();
    tree.vertices.push_back({best_depth, std::nullopt, attach, {old_child}});
    auto& ch = tree.vertices[attach].children;
    ch.erase(std::remove(ch.begin(), ch.end(), old_child), ch.end());
    ch.push_back(mid);
    tree.vertices[old_child].parent = mid;
    if (tree.is_leaf(old_child) && tree.vertices[old_child].depth < best_depth)
      tree.vertices[old_child].depth = best_depth;  // stub hangs at the new branch point
    std::size_t nu = tree.vertices.size();
    tree.vertices.push_back({best_depth, x, mid, {}});
    tree.vertices[mid].children.push_back(nu);
  }
  return tree;
}

Rational TreeGreen::value_at(const BerkTree& tree, std::size_t v) const {
  Rational val = root_value;
  for (std::size_t w : tree.path_from_root(v)) {
    if (w == tree.root()) continue;
    const Rational len = tree.vertices[w].depth - tree.vertices[tree.vertices[w].parent].depth;
    val += edge_slope[w] * len;
  }
  return val;
}

TreeGreen canonical_green(const BerkTree& tree, const TreeDivisor& D) {
  std::vector<std::size_t> support_leaves;
  for (const auto& [pt, m] : D.support) {
    (void)m;
    support_leaves.push_back(tree.find_leaf(pt));
  }
  TreeGreen g;
  g.root_value = Rational(0);
  g.edge_slope.assign(tree.vertices.size(), Rational(0));
  // slope on edge parent->v = total multiplicity carried by leaves below v
  for (std::size_t i = 0; i < D.support.size(); ++i) {
    const Rational& m = D.support[i].second;
    std::size_t w = support_leaves[i];
    while (w != tree.root()) {
      g.edge_slope[w] += m;
      w = tree.vertices[w].parent;
    }
  }
  return g;
}

Rational laplacian_at(const BerkTree& tree, const TreeGreen& g, std::size_t vertex) {
  Rational total(0);
  for (std::size_t c : tree.vertices[vertex].children) total += g.edge_slope[c];
  if (vertex != tree.root()) total -= g.edge_slope[vertex];
  return total;
}

Rational model_green_compare(const BerkTree& tree, const TreeGreen& g, const TreeDivisor& D) {
  if (!g.root_value.is_zero())
    throw std::invalid_argument("model_green_compare: g must vanish at the Gauss point");
  std::vector<std::size_t> bad;
  for (std::size_t v = 1; v < tree.vertices.size(); ++v) {
    if (tree.is_leaf(v)) continue;  // leaf stubs carry no interior vertex condition
    if (laplacian_at(tree, g, v).sign() < 0) bad.push_back(v);
  }
  if (!bad.empty()) {
    std::ostringstream os;
    for (std::size_t v : bad) os << v << " ";
    throw NotSubharmonic(os.str());
  }
  TreeGreen can = canonical_green(tree, D);
  Rational worst = g.root_value - can.root_value;  // = 0 at the root
  for (std::size_t v = 1; v < tree.vertices.size(); ++v) {
    Rational diff = g.value_at(tree, v) - can.value_at(tree, v);
    worst = max(worst, diff);
  }
  return worst;
}

Rational canonical_green_value(std::int64_t p, const TreeDivisor& D, const ProjPoint& x) {
  Rational val(0);
  for (const auto& [pt, m] : D.support) {
    if (pt == x) throw EvaluationAtPole();
    val += m * branch_depth(p, x, pt);
  }
  return val;
}

}  // namespace arakel
