#include "arakel/profile.hpp"

#include <algorithm>
#include <cmath>

namespace arakel {

void PiecewiseLinear::validate() const {
  if (slopes.size() != breakpoints.size() + 1)
    throw std::invalid_argument("PiecewiseLinear: slopes.size() must be breakpoints.size()+1");
  for (std::size_t i = 1; i < breakpoints.size(); ++i)
    if (!(breakpoints[i - 1] < breakpoints[i]))
      throw std::invalid_argument("PiecewiseLinear: breakpoints must be strictly increasing");
}

Rational PiecewiseLinear::eval(const Rational& t) const {
  // Integrate slopes from 0 to t starting at anchor_value.
  Rational v = anchor_value;
  const Rational zero(0);
  if (t == zero) return v;
  if (t > zero) {
    Rational cur = zero;
    // index of piece containing 0: first breakpoint > 0 bounds piece
    std::size_t i = 0;
    while (i < breakpoints.size() && breakpoints[i] <= cur) ++i;
    while (i < breakpoints.size() && breakpoints[i] < t) {
      v += slopes[i] * (breakpoints[i] - cur);
      cur = breakpoints[i];
      ++i;
    }
    v += slopes[i] * (t - cur);
    return v;
  }
  Rational cur = zero;
  std::size_t i = breakpoints.size();
  while (i > 0 && breakpoints[i - 1] >= cur) --i;
  while (i > 0 && breakpoints[i - 1] > t) {
    v -= slopes[i] * (cur - breakpoints[i - 1]);
    cur = breakpoints[i - 1];
    --i;
  }
  v -= slopes[i] * (cur - t);
  return v;
}

std::optional<Rational> PiecewiseLinear::sup() const {
  if (slopes.front().sign() < 0 || slopes.back().sign() > 0) return std::nullopt;
  Rational best = anchor_value;
  bool have = false;
  if (breakpoints.empty()) {
    // single line: bounded above only if slope 0
    return slopes.front().is_zero() ? std::optional<Rational>(anchor_value) : std::nullopt;
  }
  for (const auto& b : breakpoints) {
    Rational v = eval(b);
    if (!have || v > best) {
      best = v;
      have = true;
    }
  }
  return best;
}

std::optional<Rational> PiecewiseLinear::inf() const {
  if (slopes.front().sign() > 0 || slopes.back().sign() < 0) return std::nullopt;
  if (breakpoints.empty())
    return slopes.front().is_zero() ? std::optional<Rational>(anchor_value) : std::nullopt;
  Rational best = eval(breakpoints.front());
  for (const auto& b : breakpoints) best = min(best, eval(b));
  return best;
}

PiecewiseLinear pl_add(const PiecewiseLinear& a, const PiecewiseLinear& b) {
  PiecewiseLinear r;
  r.anchor_value = a.anchor_value + b.anchor_value;
  r.slopes.push_back(a.slopes.front() + b.slopes.front());
  std::size_t ia = 0, ib = 0;  // pieces consumed so far
  while (ia < a.breakpoints.size() || ib < b.breakpoints.size()) {
    bool take_a;
    if (ia == a.breakpoints.size())
      take_a = false;
    else if (ib == b.breakpoints.size())
      take_a = true;
    else if (a.breakpoints[ia] < b.breakpoints[ib])
      take_a = true;
    else if (b.breakpoints[ib] < a.breakpoints[ia])
      take_a = false;
    else {  // equal breakpoint: advance both
      r.breakpoints.push_back(a.breakpoints[ia]);
      ++ia;
      ++ib;
      r.slopes.push_back(a.slopes[ia] + b.slopes[ib]);
      continue;
    }
    if (take_a) {
      r.breakpoints.push_back(a.breakpoints[ia]);
      ++ia;
    } else {
      r.breakpoints.push_back(b.breakpoints[ib]);
      ++ib;
    }
    r.slopes.push_back(a.slopes[ia] + b.slopes[ib]);
  }
  return pl_simplify(r);
}

PiecewiseLinear pl_scale(const PiecewiseLinear& a, const Rational& c) {
  PiecewiseLinear r = a;
  for (auto& s : r.slopes) s *= c;
  r.anchor_value *= c;
  if (c.is_zero()) return pl_simplify(r);
  return r;
}

PiecewiseLinear pl_sub(const PiecewiseLinear& a, const PiecewiseLinear& b) {
  return pl_add(a, pl_scale(b, Rational(-1)));
}

PiecewiseLinear pl_shift(const PiecewiseLinear& a, const Rational& c) {
  PiecewiseLinear r = a;
  r.anchor_value += c;
  return r;
}

PiecewiseLinear pl_simplify(const PiecewiseLinear& a) {
  PiecewiseLinear r;
  r.anchor_value = a.anchor_value;
  r.slopes.push_back(a.slopes.front());
  for (std::size_t i = 0; i < a.breakpoints.size(); ++i) {
    if (a.slopes[i + 1] == r.slopes.back()) continue;
    r.breakpoints.push_back(a.breakpoints[i]);
    r.slopes.push_back(a.slopes[i + 1]);
  }
  return r;
}

ConvexProfile::ConvexProfile(std::vector<Rational> breakpoints, std::vector<Rational> slopes,
                             Rational anchor_value) {
  pl_.breakpoints = std::move(breakpoints);
  pl_.slopes = std::move(slopes);
  pl_.anchor_value = std::move(anchor_value);
  pl_.validate();
  for (std::size_t i = 1; i < pl_.slopes.size(); ++i)
    if (pl_.slopes[i] < pl_.slopes[i - 1])
      throw std::invalid_argument("ConvexProfile: slopes must be nondecreasing");
  pl_ = pl_simplify(pl_);
}

ConvexProfile ConvexProfile::sampled(double lo, double hi, std::vector<double> values,
                                     Rational sigma_minus, Rational sigma_plus) {
  if (values.size() < 2 || !(lo < hi))
    throw std::invalid_argument("ConvexProfile::sampled: need two or more nodes");
  if (sigma_plus < sigma_minus)
    throw std::invalid_argument("ConvexProfile::sampled: asymptotic slopes out of order");
  ConvexProfile p;
  p.kind_ = ProfileKind::smooth_sampled;
  p.lo_ = lo;
  p.hi_ = hi;
  p.samples_ = std::move(values);
  p.sm_ = std::move(sigma_minus);
  p.sp_ = std::move(sigma_plus);
  return p;
}

Rational ConvexProfile::eval(const Rational& t) const {
  if (kind_ == ProfileKind::piecewise_linear) return pl_.eval(t);
  return linearized().eval(t);
}

double ConvexProfile::eval_d(double t) const {
  if (kind_ == ProfileKind::piecewise_linear) return pl_.eval(Rational::from_double(t)).to_double();
  const double h = (hi_ - lo_) / static_cast<double>(samples_.size() - 1);
  if (t <= lo_) return samples_.front() + sm_.to_double() * (t - lo_);
  if (t >= hi_) return samples_.back() + sp_.to_double() * (t - hi_);
  double x = (t - lo_) / h;
  auto i = static_cast<std::size_t>(x);
  if (i >= samples_.size() - 1) i = samples_.size() - 2;
  double w = x - static_cast<double>(i);
  return samples_[i] * (1 - w) + samples_[i + 1] * w;
}

Rational ConvexProfile::slope_minus() const {
  return kind_ == ProfileKind::piecewise_linear ? pl_.slopes.front() : sm_;
}
Rational ConvexProfile::slope_plus() const {
  return kind_ == ProfileKind::piecewise_linear ? pl_.slopes.back() : sp_;
}

PiecewiseLinear ConvexProfile::linearized() const {
  if (kind_ == ProfileKind::piecewise_linear) return pl_;
  PiecewiseLinear r;
  const std::size_t n = samples_.size();
  const Rational lo = Rational::from_double(lo_);
  const Rational hi = Rational::from_double(hi_);
  const Rational h = (hi - lo) / Rational(static_cast<std::int64_t>(n - 1));
  r.slopes.push_back(sm_);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    Rational rise = Rational::from_double(samples_[i + 1]) - Rational::from_double(samples_[i]);
    r.breakpoints.push_back(lo + h * Rational(static_cast<std::int64_t>(i)));
    r.slopes.push_back(rise / h);
  }
  r.breakpoints.push_back(hi);
  r.slopes.push_back(sp_);
  // anchor: value at 0 by linear interpolation of the chain
  // first compute value at lo by declaring samples_[0] there, then re-anchor.
  PiecewiseLinear tmp = r;
  tmp.anchor_value = Rational(0);
  Rational at_lo = tmp.eval(lo);
  r.anchor_value = Rational::from_double(samples_.front()) - at_lo;
  return pl_simplify(r);
}

ReferenceProfile ReferenceProfile::pl_model(const Rational& n) {
  if (n.sign() < 0) throw std::invalid_argument("ReferenceProfile: degree must be >= 0");
  if (n.is_zero()) return {n, ConvexProfile({}, {Rational(0)}, Rational(0))};
  return {n, ConvexProfile({Rational(0)}, {Rational(0), n}, Rational(0))};
}

ReferenceProfile ReferenceProfile::smooth_model(const Rational& n, double lo, double hi,
                                                std::size_t nodes) {
  const double nd = n.to_double();
  std::vector<double> vals(nodes);
  const double h = (hi - lo) / static_cast<double>(nodes - 1);
  for (std::size_t i = 0; i < nodes; ++i) {
    double t = lo + h * static_cast<double>(i);
    vals[i] = nd * (t > 30 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)));
  }
  return {n, ConvexProfile::sampled(lo, hi, std::move(vals), Rational(0), n)};
}

Rational LineMeasure::total_mass() const {
  Rational m(0);
  for (const auto& [p, w] : atoms) {
    (void)p;
    m += w;
  }
  for (std::size_t i = 0; i + 1 < density_breaks.size(); ++i)
    m += density_values[i] * (density_breaks[i + 1] - density_breaks[i]);
  double c = 0;
  for (double x : cell_mass) c += x;
  if (c != 0) m += Rational::from_double(c);
  return m;
}

double LineMeasure::total_mass_d() const {
  double m = 0;
  for (const auto& [p, w] : atoms) {
    (void)p;
    m += w.to_double();
  }
  for (std::size_t i = 0; i + 1 < density_breaks.size(); ++i)
    m += (density_values[i] * (density_breaks[i + 1] - density_breaks[i])).to_double();
  for (double c : cell_mass) m += c;
  return m;
}

void LineMeasure::validate() const {
  for (const auto& [p, w] : atoms) {
    (void)p;
    if (w.sign() < 0) throw std::invalid_argument("LineMeasure: negative atom mass");
  }
  for (const auto& v : density_values)
    if (v.sign() < 0) throw std::invalid_argument("LineMeasure: negative density");
  if (!density_breaks.empty() && density_values.size() + 1 != density_breaks.size())
    throw std::invalid_argument("LineMeasure: density shape mismatch");
}

LineMeasure ma_measure(const ConvexProfile& u) {
  LineMeasure m;
  if (u.kind() == ProfileKind::piecewise_linear) {
    const auto& pl = u.pl();
    for (std::size_t i = 0; i < pl.breakpoints.size(); ++i) {
      Rational jump = pl.slopes[i + 1] - pl.slopes[i];
      if (!jump.is_zero()) m.atoms.emplace_back(pl.breakpoints[i], jump);
    }
    return m;
  }
  // Sampled path: cell masses from slope increments of the chord interpolant;
  // end cells absorb the difference to the exact asymptotic slopes.
  const auto& v = u.samples();
  const std::size_t n = v.size();
  const double h = (u.grid_hi() - u.grid_lo()) / static_cast<double>(n - 1);
  m.grid_lo = u.grid_lo();
  m.grid_hi = u.grid_hi();
  m.cell_mass.assign(n - 1, 0.0);
  std::vector<double> chord(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) chord[i] = (v[i + 1] - v[i]) / h;
  // mass located at interior node i = jump of chord slope
  m.cell_mass.front() += chord.front() - u.slope_minus().to_double();
  for (std::size_t i = 1; i + 1 < n; ++i) m.cell_mass[i] += chord[i] - chord[i - 1];
  m.cell_mass.back() += u.slope_plus().to_double() - chord.back();
  return m;
}

Rational npp_mass(const ConvexProfile& u) { return u.slope_plus() - u.slope_minus(); }

ConvexProfile profile_max(const ConvexProfile& uu, const ConvexProfile& vv) {
  const PiecewiseLinear u = uu.linearized();
  const PiecewiseLinear v = vv.linearized();

  std::vector<Rational> pts = u.breakpoints;
  pts.insert(pts.end(), v.breakpoints.begin(), v.breakpoints.end());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  // Slope of f just right of t (or leftmost slope for t = nullopt).
  auto slope_right = [](const PiecewiseLinear& f, const Rational& t) {
    std::size_t k = 0;
    while (k < f.breakpoints.size() && f.breakpoints[k] <= t) ++k;
    return f.slopes[k];
  };

  // Collect crossings piece by piece (including the two unbounded rays).
  std::vector<Rational> all = pts;
  auto add_crossing = [&](const Rational& a_t0, const Rational& a_v0, const Rational& a_s,
                          const Rational& b_s, const std::optional<Rational>& lo,
                          const std::optional<Rational>& hi) {
    // lines: a_v0 + a_s (t - a_t0) vs 0-referenced difference already folded in
    // crossing of difference d(t) = a_v0 + (a_s - b_s)(t - a_t0) with 0
    Rational ds = a_s - b_s;
    if (ds.is_zero()) return;
    Rational tc = a_t0 - a_v0 / ds;
    if (lo && !(tc > *lo)) return;
    if (hi && !(tc < *hi)) return;
    all.push_back(tc);
  };
  {
    // Build interval list: (-inf, p0), (p0, p1), ..., (pk-1, +inf)
    std::optional<Rational> prev;
    for (std::size_t i = 0; i <= pts.size(); ++i) {
      std::optional<Rational> next =
          i < pts.size() ? std::optional<Rational>(pts[i]) : std::nullopt;
      // representative point inside the interval to read slopes/values
      Rational t0;
      if (prev)
        t0 = *prev;
      else if (next)
        t0 = *next - Rational(1);
      else
        t0 = Rational(0);
      Rational du = u.eval(t0) - v.eval(t0);
      Rational su = prev ? slope_right(u, *prev) : u.slopes.front();
      Rational sv = prev ? slope_right(v, *prev) : v.slopes.front();
      add_crossing(t0, du, su, sv, prev, next);
      prev = next;
    }
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());

  PiecewiseLinear r;
  // Left ray: the winner as t -> -inf has the smaller sigma^-; ties by value.
  Rational left_slope;
  if (u.slopes.front() == v.slopes.front()) {
    left_slope = u.slopes.front();
  } else {
    left_slope = min(u.slopes.front(), v.slopes.front());
  }
  // Right ray symmetric.
  Rational right_slope = max(u.slopes.back(), v.slopes.back());

  if (all.empty()) {
    // Both functions are single lines with equal slope.
    return ConvexProfile({}, {left_slope}, max(u.eval(Rational(0)), v.eval(Rational(0))));
  }

  std::vector<Rational> vals(all.size());
  for (std::size_t i = 0; i < all.size(); ++i) vals[i] = max(u.eval(all[i]), v.eval(all[i]));

  r.breakpoints = all;
  r.slopes.resize(all.size() + 1);
  r.slopes.front() = left_slope;
  r.slopes.back() = right_slope;
  for (std::size_t i = 0; i + 1 < all.size(); ++i)
    r.slopes[i + 1] = (vals[i + 1] - vals[i]) / (all[i + 1] - all[i]);
  // anchor from value at first breakpoint
  r.anchor_value = Rational(0);
  Rational cur = r.eval(all.front());
  r.anchor_value = vals.front() - cur;
  r = pl_simplify(r);
  return ConvexProfile(r.breakpoints, r.slopes, r.anchor_value);
}

ConvexProfile profile_add(const ConvexProfile& u, const ConvexProfile& v) {
  PiecewiseLinear s = pl_add(u.linearized(), v.linearized());
  return ConvexProfile(s.breakpoints, s.slopes, s.anchor_value);
}

ConvexProfile profile_scale(const ConvexProfile& u, const Rational& c) {
  if (c.sign() < 0) throw std::invalid_argument("profile_scale: negative scalar");
  PiecewiseLinear s = pl_scale(u.linearized(), c);
  return ConvexProfile(s.breakpoints, s.slopes, s.anchor_value);
}

ConvexProfile profile_shift(const ConvexProfile& u, const Rational& c) {
  if (u.kind() == ProfileKind::piecewise_linear) {
    PiecewiseLinear s = pl_shift(u.pl(), c);
    return ConvexProfile(s.breakpoints, s.slopes, s.anchor_value);
  }
  std::vector<double> vals = u.samples();
  const double cd = c.to_double();
  for (auto& x : vals) x += cd;
  return ConvexProfile::sampled(u.grid_lo(), u.grid_hi(), std::move(vals), u.slope_minus(),
                                u.slope_plus());
}

Rational integrate_pl_against(const PiecewiseLinear& h, const LineMeasure& mu) {
  if (mu.unbounded_tail &&
      (!h.slope_at_minus_inf().is_zero() || !h.slope_at_plus_inf().is_zero()))
    throw UnboundedDifference();
  Rational total(0);
  for (const auto& [pos, mass] : mu.atoms) total += mass * h.eval(pos);
  // densities: h is linear between consecutive cut points, trapezoid is exact
  for (std::size_t i = 0; i + 1 < mu.density_breaks.size(); ++i) {
    if (mu.density_values[i].is_zero()) continue;
    std::vector<Rational> cuts{mu.density_breaks[i], mu.density_breaks[i + 1]};
    for (const auto& b : h.breakpoints)
      if (b > cuts.front() && b < cuts.back()) cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      Rational w = cuts[k + 1] - cuts[k];
      total += mu.density_values[i] * w * (h.eval(cuts[k]) + h.eval(cuts[k + 1])) / Rational(2);
    }
  }
  if (!mu.cell_mass.empty()) {
    // sampled fallback: midpoint rule on cells, evaluated in doubles with a
    // single exact pass over the integrand's breakpoints
    const std::size_t n = mu.cell_mass.size();
    const double hd = (mu.grid_hi - mu.grid_lo) / static_cast<double>(n);
    std::vector<double> bp(h.breakpoints.size()), bv(h.breakpoints.size());
    if (!h.breakpoints.empty()) {
      Rational acc_v = h.eval(h.breakpoints.front());
      bp[0] = h.breakpoints.front().to_double();
      bv[0] = acc_v.to_double();
      for (std::size_t i = 1; i < h.breakpoints.size(); ++i) {
        acc_v += h.slopes[i] * (h.breakpoints[i] - h.breakpoints[i - 1]);
        bp[i] = h.breakpoints[i].to_double();
        bv[i] = acc_v.to_double();
      }
    }
    const double s_lo = h.slopes.front().to_double();
    const double s_hi = h.slopes.back().to_double();
    auto h_at = [&](double t) {
      if (bp.empty()) return h.anchor_value.to_double() + s_lo * t;
      if (t <= bp.front()) return bv.front() + s_lo * (t - bp.front());
      if (t >= bp.back()) return bv.back() + s_hi * (t - bp.back());
      auto it = std::upper_bound(bp.begin(), bp.end(), t);
      std::size_t i = static_cast<std::size_t>(it - bp.begin());
      double w = (t - bp[i - 1]) / (bp[i] - bp[i - 1]);
      return bv[i - 1] * (1 - w) + bv[i] * w;
    };
    double acc = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double mid = mu.grid_lo + hd * (static_cast<double>(i) + 0.5);
      acc += mu.cell_mass[i] * h_at(mid);
    }
    total += Rational::from_double(acc);
  }
  return total;
}

Rational integrate_against(const ConvexProfile& f, const ConvexProfile& g,
                           const LineMeasure& mu) {
  PiecewiseLinear diff = pl_sub(f.linearized(), g.linearized());
  return integrate_pl_against(diff, mu);
}

std::string to_string(SingularityClass c) {
  switch (c) {
    case SingularityClass::bounded: return "bounded";
    case SingularityClass::algebraic: return "algebraic";
    case SingularityClass::almost_asymptotically_algebraic:
      return "almost_asymptotically_algebraic";
    default: return "other";
  }
}

bool more_singular_or_equal(const ConvexProfile& u, const ConvexProfile& v) {
  return u.slope_minus() >= v.slope_minus() && u.slope_plus() <= v.slope_plus();
}

std::optional<Rational> bounded_gap(const ConvexProfile& u, const ConvexProfile& v) {
  PiecewiseLinear diff = pl_sub(v.linearized(), u.linearized());
  return diff.sup();
}

SingularityClass singularity_class(const ConvexProfile& u, const ReferenceProfile& ref,
                                   const AlmostAlgebraicWitness* witness) {
  if (!more_singular_or_equal(u, ref.profile))
    throw std::invalid_argument("singularity_class: u must be more singular than the reference");
  const bool same_slopes =
      u.slope_minus() == ref.profile.slope_minus() && u.slope_plus() == ref.profile.slope_plus();
  if (same_slopes) return SingularityClass::bounded;
  if (witness && !witness->psi.empty()) {
    bool ok = true;
    const PiecewiseLinear up = u.linearized();
    const PiecewiseLinear& fp = witness->f;
    for (std::size_t k = 1; k <= witness->psi.size() && ok; ++k) {
      const PiecewiseLinear pk = witness->psi[k - 1].linearized();
      // psi_k + f/k - C <= u
      PiecewiseLinear lowerdiff = pl_sub(
          pl_shift(pl_add(pk, pl_scale(fp, Rational(1, static_cast<std::int64_t>(k)))),
                   -witness->C),
          up);
      auto s1 = lowerdiff.sup();
      if (!s1 || s1->sign() > 0) ok = false;
      // u <= psi_k + C
      PiecewiseLinear upperdiff = pl_sub(up, pl_shift(pk, witness->C));
      auto s2 = upperdiff.sup();
      if (!s2 || s2->sign() > 0) ok = false;
    }
    if (ok) return SingularityClass::almost_asymptotically_algebraic;
  }
  // Slope deficits of a piecewise-linear profile are rational by construction.
  if (u.kind() == ProfileKind::piecewise_linear) return SingularityClass::algebraic;
  return SingularityClass::other;
}

}  // namespace arakel
