#include "arakel/adelic.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "arakel/energy.hpp"

namespace arakel {

namespace {

const ProjPoint kZero = ProjPoint::at(Rational(0));
const ProjPoint kInf = ProjPoint::infinity();

// Kink position of an interior point x: t = log x^2.
LogLin kink_position(const ProjPoint& x) { return LogLin::log_of(x.value * x.value); }

// Evaluate a PL profile at an exact log-linear abscissa.
LogLin eval_pl_at(const PiecewiseLinear& u, const LogLin& t) {
  // locate the piece: first breakpoint with t < b
  std::size_t i = 0;
  while (i < u.breakpoints.size() && (t - LogLin(u.breakpoints[i])).sign() >= 0) ++i;
  // value at the left reference point
  if (u.breakpoints.empty()) return LogLin(u.anchor_value) + u.slopes[0] * t;
  if (i == 0) {
    const Rational& b = u.breakpoints.front();
    return LogLin(u.eval(b)) + u.slopes[0] * (t - LogLin(b));
  }
  const Rational& b = u.breakpoints[i - 1];
  return LogLin(u.eval(b)) + u.slopes[i] * (t - LogLin(b));
}

// Branch depth allowing equal points: nullopt encodes +infinity.
std::optional<Rational> branch_depth_opt(std::int64_t p, const ProjPoint& a, const ProjPoint& b) {
  if (a == b) return std::nullopt;
  return branch_depth(p, a, b);
}

Rational min_with_inf(const std::optional<Rational>& a, const Rational& b) {
  if (!a) return b;
  return min(*a, b);
}

// Principal function h = z^{e0} prod_i (z - c_i)^{e_i} with c_i != 0.
struct Principal {
  Rational e0;
  std::vector<std::pair<Rational, Rational>> roots;  // (c_i, e_i)

  Principal() = default;
  explicit Principal(const PrincipalPart& p) : e0(p.z_exponent), roots(p.roots) {}

  bool trivial() const { return e0.is_zero() && roots.empty(); }

  Rational coeff_inf() const {
    Rational s = e0;
    for (const auto& [c, e] : roots) {
      (void)c;
      s += e;
    }
    return -s;
  }

  // geometric divisor of h as point list
  std::vector<std::pair<ProjPoint, Rational>> divisor_points() const {
    std::vector<std::pair<ProjPoint, Rational>> out;
    if (!e0.is_zero()) out.push_back({kZero, e0});
    for (const auto& [c, e] : roots) out.push_back({ProjPoint::at(c), e});
    Rational ci = coeff_inf();
    if (!ci.is_zero()) out.push_back({kInf, ci});
    return out;
  }

  // pointwise archimedean Green -log|h|^2 at a rational point y (y != c_i);
  // at 0 or infinity the pole power is dropped (regularized limit).
  LogLin arch_value(const ProjPoint& y) const {
    LogLin v;
    if (y.is_infinity) return v;  // lim (g_h + deg-slope * t) = 0
    for (const auto& [c, e] : roots) {
      Rational diff = y.value - c;
      if (diff.is_zero()) throw PoleAtPoint();
      v -= e * LogLin::log_of(diff * diff);
    }
    if (!y.value.is_zero() && !e0.is_zero()) v -= e0 * LogLin::log_of(y.value * y.value);
    return v;
  }

  // circle average of -log|h|^2 on |z|^2 = e^{t0}
  LogLin circle_value(const Rational& t0) const {
    LogLin v = (-e0) * LogLin(t0);
    for (const auto& [c, e] : roots) {
      LogLin tau = LogLin::log_of(c * c);
      // max(t0, tau)
      LogLin m = (LogLin(t0) - tau).sign() >= 0 ? LogLin(t0) : tau;
      v -= e * m;
    }
    return v;
  }

  // v_p(h(y)), regularized at 0/infinity as in arch_value
  Rational vp_value(std::int64_t p, const ProjPoint& y) const {
    if (y.is_infinity) return Rational(0);
    Rational v(0);
    for (const auto& [c, e] : roots) {
      Rational diff = y.value - c;
      if (diff.is_zero()) throw PoleAtPoint();
      v += e * Rational(padic_valuation(p, diff));
    }
    if (!y.value.is_zero() && !e0.is_zero())
      v += e0 * Rational(padic_valuation(p, y.value));
    return v;
  }

  // ord of h along the fiber over p (content of the factors)
  Rational vertical_ord(std::int64_t p) const {
    Rational v(0);
    for (const auto& [c, e] : roots) {
      std::int64_t val = padic_valuation(p, c);
      if (val < 0) v += e * Rational(val);
    }
    return v;
  }
};

// Principal move taking the horizontal support of D to deg(D) * [c].
Principal clearing_principal(const ModelArithDivisor& D, const Rational& c) {
  Principal h;
  Rational K(0);
  for (const auto& [x, m] : D.points) {
    K += m;
    if (x.is_infinity) continue;
    if (x.value.is_zero())
      h.e0 -= m;
    else
      h.roots.push_back({x.value, -m});
  }
  if (!K.is_zero()) h.roots.push_back({c, K});
  return h;
}

struct VirtualDivisor {
  const ModelArithDivisor* base;
  Principal shift;

  std::vector<std::pair<ProjPoint, Rational>> merged_points() const {
    std::vector<std::pair<ProjPoint, Rational>> out = base->points;
    for (const auto& [x, m] : shift.divisor_points()) {
      bool found = false;
      for (auto& [y, my] : out) {
        if (y == x) {
          my += m;
          found = true;
          break;
        }
      }
      if (!found) out.push_back({x, m});
    }
    out.erase(std::remove_if(out.begin(), out.end(),
                             [](const auto& pm) { return pm.second.is_zero(); }),
              out.end());
    return out;
  }
};

// Interior kinks of a stored divisor: (position, multiplicity).
std::vector<std::pair<LogLin, Rational>> interior_kinks(const ModelArithDivisor& D) {
  std::vector<std::pair<LogLin, Rational>> out;
  for (const auto& [x, m] : D.points) {
    if (x.is_infinity || x.value.is_zero()) continue;
    out.push_back({kink_position(x), m});
  }
  return out;
}

// Archimedean Green value of a virtual divisor at a rational point or at a
// circle |z|^2 = e^{t0}; poles at 0/infinity must cancel against the shift.
LogLin arch_value_virtual(const VirtualDivisor& V, const ProjPoint& y) {
  const ModelArithDivisor& D = *V.base;
  const PiecewiseLinear u = D.potential.linearized();
  LogLin val;
  if (y.is_infinity) {
    Rational kink_sum(0);
    LogLin kink_offset;
    for (const auto& [tau, m] : interior_kinks(D)) {
      kink_sum += m;
      kink_offset += m * tau;
    }
    // green(t) = u(t) - kink_sum t + kink_offset + m_inf t near +inf; the
    // shift contributes coeff_inf t + o(1), so m_inf + coeff_inf must vanish
    Rational m_inf = u.slopes.back() - kink_sum;
    if (!(m_inf + V.shift.coeff_inf()).is_zero()) throw PoleAtPoint();
    Rational b = u.breakpoints.empty() ? Rational(0) : u.breakpoints.back();
    val = LogLin(u.eval(b) - u.slopes.back() * b) + kink_offset;
    return val + V.shift.arch_value(y);  // reg part of the shift at inf is 0
  }
  if (y.value.is_zero()) {
    // green slope toward -inf: sigma^- for the base, -e0 for the shift
    if (!(u.slopes.front() - V.shift.e0).is_zero()) throw PoleAtPoint();
    Rational b = u.breakpoints.empty() ? Rational(0) : u.breakpoints.front();
    val = LogLin(u.eval(b) - V.shift.e0 * b);
    // regular part of the shift at 0: -sum e_i log c_i^2
    LogLin reg;
    for (const auto& [c, e] : V.shift.roots) reg -= e * LogLin::log_of(c * c);
    return val + reg;
  }
  LogLin t = kink_position(y);
  val = eval_pl_at(u, t);
  for (const auto& [tau, m] : interior_kinks(D)) {
    LogLin excess = t - tau;
    if (excess.sign() > 0) val -= m * excess;
  }
  return val + V.shift.arch_value(y);
}

LogLin circle_value_virtual(const VirtualDivisor& V, const Rational& t0) {
  const ModelArithDivisor& D = *V.base;
  LogLin val = LogLin(D.potential.linearized().eval(t0));
  for (const auto& [tau, m] : interior_kinks(D)) {
    LogLin excess = LogLin(t0) - tau;
    if (excess.sign() > 0) val -= m * excess;
  }
  return val + V.shift.circle_value(t0);
}

// v-adic Green value of a virtual divisor at a point (v_p units).
Rational finite_value_virtual(const VirtualDivisor& V, std::int64_t p, const ProjPoint& y) {
  const ModelArithDivisor& D = *V.base;
  Rational v(0);
  for (const auto& [q, m] : V.merged_points()) {
    auto d = branch_depth_opt(p, y, q);
    if (!d) throw PoleAtPoint();
    v += m * *d;
  }
  // the canonical green of the shift differs from v_p(h) by its content
  v += V.shift.vertical_ord(p);
  v += D.vertical_at(p);
  auto it = D.deviations.find(p);
  if (it != D.deviations.end())
    for (const auto& bump : it->second)
      v += bump.coeff * min_with_inf(branch_depth_opt(p, y, bump.center), bump.depth);
  return v;
}

// v-adic Green value at a type-II point (center q, radius depth r).
Rational finite_value_typeII(const VirtualDivisor& V, std::int64_t p, const ProjPoint& q,
                             const Rational& r) {
  const ModelArithDivisor& D = *V.base;
  Rational v(0);
  for (const auto& [x, m] : V.merged_points())
    v += m * min_with_inf(branch_depth_opt(p, q, x), r);
  v += V.shift.vertical_ord(p);
  v += D.vertical_at(p);
  auto it = D.deviations.find(p);
  if (it != D.deviations.end())
    for (const auto& bump : it->second)
      v += bump.coeff *
           min_with_inf(branch_depth_opt(p, q, bump.center), min(r, bump.depth));
  return v;
}

void collect_primes_of(const Rational& x, std::set<std::int64_t>& out) {
  if (x.is_zero()) return;
  for (const auto& [p, e] : factor_rational(x)) {
    (void)e;
    out.insert(p);
  }
}

}  // namespace

Rational ModelArithDivisor::degree() const {
  Rational d(0);
  for (const auto& [x, m] : points) {
    (void)x;
    d += m;
  }
  return d;
}

Rational ModelArithDivisor::mult_at(const ProjPoint& x) const {
  for (const auto& [y, m] : points)
    if (y == x) return m;
  return Rational(0);
}

Rational ModelArithDivisor::vertical_at(std::int64_t p) const {
  for (const auto& [q, m] : vertical)
    if (q == p) return m;
  return Rational(0);
}

bool ModelArithDivisor::toric() const {
  for (const auto& [x, m] : points) {
    (void)m;
    if (!x.is_infinity && !x.value.is_zero()) return false;
  }
  return true;
}

void ModelArithDivisor::validate() const {
  // slope budget: sigma^- = -mult(0), sigma^+ = mult(inf) + interior mass
  Rational interior(0);
  for (const auto& [x, m] : points)
    if (!x.is_infinity && !x.value.is_zero()) interior += m;
  if (potential.slope_minus() != -mult_at(kZero))
    throw std::invalid_argument("ModelArithDivisor: sigma^- must equal -mult(0)");
  if (potential.slope_plus() != mult_at(kInf) + interior)
    throw std::invalid_argument(
        "ModelArithDivisor: sigma^+ must equal mult(inf) plus interior mass");
  for (const auto& [p, dev] : deviations) {
    (void)p;
    for (const auto& bump : dev)
      if (bump.depth.sign() <= 0)
        throw std::invalid_argument("ModelArithDivisor: deviation depth must be positive");
  }
}

void BoundaryDivisor::validate() const {
  div.validate();
  for (const auto& [x, m] : div.points) {
    (void)x;
    if (m.sign() <= 0) throw std::invalid_argument("BoundaryDivisor: must be effective");
  }
  if (eta.sign() <= 0) throw std::invalid_argument("BoundaryDivisor: eta must be positive");
  // green > eta: exact PL check
  auto inf = div.potential.linearized().inf();
  if (!inf || *inf < eta)
    throw std::invalid_argument("BoundaryDivisor: green must stay above eta");
}

BoundaryDivisor BoundaryDivisor::standard(const Rational& eta) {
  BoundaryDivisor b;
  b.eta = eta;
  b.div.points = {{kZero, Rational(1)}, {kInf, Rational(1)}};
  b.div.potential =
      ConvexProfile({Rational(0)}, {Rational(-1), Rational(1)}, eta + eta);  // |t| + 2 eta
  return b;
}

ArithDelta sub(const ModelArithDivisor& a, const ModelArithDivisor& b) {
  ArithDelta d;
  d.points = a.points;
  for (const auto& [x, m] : b.points) {
    bool found = false;
    for (auto& [y, my] : d.points)
      if (y == x) {
        my -= m;
        found = true;
        break;
      }
    if (!found) d.points.push_back({x, -m});
  }
  d.points.erase(std::remove_if(d.points.begin(), d.points.end(),
                                [](const auto& pm) { return pm.second.is_zero(); }),
                 d.points.end());
  d.vertical = a.vertical;
  for (const auto& [p, m] : b.vertical) {
    bool found = false;
    for (auto& [q, mq] : d.vertical)
      if (q == p) {
        mq -= m;
        found = true;
        break;
      }
    if (!found) d.vertical.push_back({p, -m});
  }
  d.vertical.erase(std::remove_if(d.vertical.begin(), d.vertical.end(),
                                  [](const auto& pm) { return pm.second.is_zero(); }),
                   d.vertical.end());
  d.green = pl_sub(a.potential.linearized(), b.potential.linearized());
  d.deviations = a.deviations;
  for (const auto& [p, dev] : b.deviations) {
    auto& mine = d.deviations[p];
    for (const auto& bump : dev) mine.push_back({bump.center, bump.depth, -bump.coeff});
  }
  return d;
}

ModelArithDivisor add_scaled(const ModelArithDivisor& a, const Rational& c,
                             const ModelArithDivisor& b) {
  ModelArithDivisor out = a;
  for (const auto& [x, m] : b.points) {
    bool found = false;
    for (auto& [y, my] : out.points)
      if (y == x) {
        my += c * m;
        found = true;
        break;
      }
    if (!found) out.points.push_back({x, c * m});
  }
  out.points.erase(std::remove_if(out.points.begin(), out.points.end(),
                                  [](const auto& pm) { return pm.second.is_zero(); }),
                   out.points.end());
  for (const auto& [p, m] : b.vertical) {
    bool found = false;
    for (auto& [q, mq] : out.vertical)
      if (q == p) {
        mq += c * m;
        found = true;
        break;
      }
    if (!found) out.vertical.push_back({p, c * m});
  }
  {
    // pl-level so that negative multiples work; the profile constructor
    // still enforces convexity of the result
    PiecewiseLinear s = pl_add(a.potential.linearized(), pl_scale(b.potential.linearized(), c));
    out.potential = ConvexProfile(s.breakpoints, s.slopes, s.anchor_value);
  }
  for (const auto& [p, dev] : b.deviations) {
    auto& mine = out.deviations[p];
    for (const auto& bump : dev) mine.push_back({bump.center, bump.depth, c * bump.coeff});
  }
  return out;
}

LogLin arch_green_at(const ModelArithDivisor& D, const ProjPoint& y) {
  if (!D.mult_at(y).is_zero()) throw PoleAtPoint();
  VirtualDivisor V{&D, Principal{}};
  return arch_value_virtual(V, y);
}

Rational finite_green_at(const ModelArithDivisor& D, std::int64_t p, const ProjPoint& y) {
  if (!D.mult_at(y).is_zero()) throw PoleAtPoint();
  VirtualDivisor V{&D, Principal{}};
  return finite_value_virtual(V, p, y);
}

LogLin height(const ModelArithDivisor& D, const ProjPoint& y) {
  LogLin h = Rational(1, 2) * arch_green_at(D, y);
  // relevant primes: everything dividing the coordinates and differences
  std::set<std::int64_t> primes;
  for (const auto& [p, m] : D.vertical) {
    (void)m;
    primes.insert(p);
  }
  for (const auto& [p, dev] : D.deviations) {
    (void)dev;
    primes.insert(p);
  }
  auto consider = [&](const ProjPoint& q) {
    if (q.is_infinity) return;
    collect_primes_of(q.value, primes);
    if (!y.is_infinity) collect_primes_of(y.value - q.value, primes);
    if (!y.is_infinity && !y.value.is_zero() && !q.value.is_zero())
      collect_primes_of(Rational(1) / y.value - Rational(1) / q.value, primes);
  };
  if (!y.is_infinity) collect_primes_of(y.value, primes);
  for (const auto& [q, m] : D.points) {
    (void)m;
    consider(q);
  }
  for (std::int64_t p : primes)
    h += LogLin::log_prime(p, finite_green_at(D, p, y));
  return h;
}

bool is_nef(const ModelArithDivisor& D, const std::vector<ProjPoint>& probes) {
  // Negative degree cannot even carry a convex Green profile; answer before
  // the shape validation so malformed witnesses still report "not nef".
  if (D.degree().sign() < 0) return false;
  D.validate();
  for (const ProjPoint& y : probes)
    if (height(D, y).sign() < 0) return false;
  return true;
}

LogLin height_shifted(const ModelArithDivisor& D, const PrincipalPart& hp,
                      const ProjPoint& y) {
  const Principal h(hp);
  LogLin out = height(D, y);
  out += Rational(1, 2) * h.arch_value(y);
  std::set<std::int64_t> primes;
  for (const auto& [c, e] : h.roots) {
    (void)e;
    collect_primes_of(c, primes);
    if (!y.is_infinity) collect_primes_of(y.value - c, primes);
  }
  if (!y.is_infinity) collect_primes_of(y.value, primes);
  for (std::int64_t p : primes) out += LogLin::log_prime(p, h.vp_value(p, y));
  return out;
}

namespace {

LogLin pair_model_core(const ModelArithDivisor& A, const ModelArithDivisor& B, Principal h) {
  A.validate();
  B.validate();
  VirtualDivisor VB{&B, h};
  for (const auto& [x, m] : VB.merged_points()) {
    (void)m;
    if (!A.mult_at(x).is_zero()) throw SupportsNotDisjoint();
  }

  // archimedean: sum over points of B~ of g_A, plus integral of g_B~ against
  // the measure of A's potential
  LogLin total;
  for (const auto& [x, m] : VB.merged_points()) {
    VirtualDivisor VA{&A, Principal{}};
    total += m * arch_value_virtual(VA, x);
  }
  LineMeasure omegaA = ma_measure(A.potential.kind() == ProfileKind::piecewise_linear
                                      ? A.potential
                                      : ConvexProfile(A.potential.linearized().breakpoints,
                                                      A.potential.linearized().slopes,
                                                      A.potential.linearized().anchor_value));
  if (!omegaA.density_breaks.empty() || !omegaA.cell_mass.empty())
    throw std::invalid_argument("pair_model: exact path needs piecewise-linear potentials");
  for (const auto& [t0, w] : omegaA.atoms) total += w * circle_value_virtual(VB, t0);

  // finite places
  std::set<std::int64_t> primes;
  for (const auto& D : {&A, &B}) {
    for (const auto& [p, m] : D->vertical) {
      (void)m;
      primes.insert(p);
    }
    for (const auto& [p, dev] : D->deviations) {
      (void)dev;
      primes.insert(p);
    }
  }
  std::vector<ProjPoint> evalpts;
  for (const auto& [x, m] : VB.merged_points()) {
    (void)m;
    evalpts.push_back(x);
  }
  std::vector<ProjPoint> apts;
  for (const auto& [x, m] : A.points) {
    (void)m;
    apts.push_back(x);
  }
  auto consider_pair = [&](const ProjPoint& a, const ProjPoint& b) {
    if (a == b) return;
    for (const ProjPoint* q : {&a, &b})
      if (!q->is_infinity) collect_primes_of(q->value, primes);
    if (!a.is_infinity && !b.is_infinity) collect_primes_of(a.value - b.value, primes);
    if (!a.is_infinity && !b.is_infinity && !a.value.is_zero() && !b.value.is_zero())
      collect_primes_of(Rational(1) / a.value - Rational(1) / b.value, primes);
  };
  for (const auto& x : evalpts) {
    for (const auto& y : apts) consider_pair(x, y);
    for (const auto& [p, dev] : A.deviations) {
      (void)p;
      for (const auto& bump : dev) consider_pair(x, bump.center);
    }
  }
  for (const auto& [p, dev] : B.deviations) {
    (void)p;
    for (const auto& bump : dev)
      for (const auto& y : apts) consider_pair(bump.center, y);
  }
  for (const auto& [c, e] : h.roots) {
    (void)e;
    collect_primes_of(c, primes);
  }

  const Rational degA = A.degree();
  for (std::int64_t p : primes) {
    Rational local(0);
    VirtualDivisor VA{&A, Principal{}};
    for (const auto& [x, m] : VB.merged_points())
      local += m * finite_value_virtual(VA, p, x);
    // measure of A at p: deg(A) at the Gauss point plus deviation bumps
    Rational gB_at_root = VB.base->vertical_at(p) + h.vertical_ord(p);
    local += degA * gB_at_root;
    // bump measure: +coeff at the Gauss point, -coeff at its type-II vertex
    auto it = A.deviations.find(p);
    if (it != A.deviations.end())
      for (const auto& bump : it->second) {
        Rational at_vertex = finite_value_typeII(VB, p, bump.center, bump.depth);
        local += bump.coeff * (gB_at_root - at_vertex);
      }
    total += LogLin::log_prime(p, Rational(2) * local);
  }
  return total;
}

LogLin pair_model_impl(const ModelArithDivisor& A, const ModelArithDivisor& B,
                       bool allow_move) {
  bool overlap = false;
  for (const auto& [x, m] : B.points) {
    (void)m;
    if (!A.mult_at(x).is_zero()) overlap = true;
  }
  Principal h;
  if (overlap) {
    if (!allow_move) throw SupportsNotDisjoint();
    // deterministic fresh point: smallest integer >= 2 off both supports
    Rational c(2);
    auto hits = [&](const Rational& v) {
      ProjPoint q = ProjPoint::at(v);
      return !A.mult_at(q).is_zero() || !B.mult_at(q).is_zero();
    };
    while (hits(c)) c += Rational(1);
    h = clearing_principal(B, c);
  }
  return pair_model_core(A, B, h);
}

bool same_divisor(const ModelArithDivisor& A, const ModelArithDivisor& B) {
  auto eqpl = [](const PiecewiseLinear& a, const PiecewiseLinear& b) {
    return a.breakpoints == b.breakpoints && a.slopes == b.slopes &&
           a.anchor_value == b.anchor_value;
  };
  if (!(A.points == B.points && A.vertical == B.vertical)) return false;
  if (!eqpl(A.potential.linearized(), B.potential.linearized())) return false;
  if (A.deviations.size() != B.deviations.size()) return false;
  for (const auto& [p, dev] : A.deviations) {
    auto it = B.deviations.find(p);
    if (it == B.deviations.end() || it->second.size() != dev.size()) return false;
    for (std::size_t i = 0; i < dev.size(); ++i) {
      if (!(dev[i].center == it->second[i].center) || dev[i].depth != it->second[i].depth ||
          dev[i].coeff != it->second[i].coeff)
        return false;
    }
  }
  return true;
}

}  // namespace

LogLin pair_model(const ModelArithDivisor& A, const ModelArithDivisor& B) {
  const bool self = &A == &B || same_divisor(A, B);
  return pair_model_impl(A, B, self);
}

LogLin pair_model_shifted(const ModelArithDivisor& A, const ModelArithDivisor& B,
                          const PrincipalPart& h) {
  return pair_model_core(A, B, Principal(h));
}

std::optional<Rational> b_adic_norm(const ArithDelta& delta, const BoundaryDivisor& B) {
  B.validate();
  Rational eps(0);
  // horizontal multiplicities
  for (const auto& [x, m] : delta.points) {
    if (m.is_zero()) continue;
    Rational b = B.div.mult_at(x);
    if (b.is_zero()) return std::nullopt;
    eps = max(eps, m.abs() / b);
  }
  // vertical parts
  for (const auto& [p, m] : delta.vertical) {
    if (m.is_zero()) continue;
    Rational b = B.div.vertical_at(p);
    if (b.is_zero()) return std::nullopt;
    eps = max(eps, m.abs() / b);
  }
  // archimedean: sup |g| / g_B over the line; PL ratio extrema sit at the
  // breakpoints of either function or in the asymptotic slope ratios
  {
    const PiecewiseLinear g = delta.green;
    const PiecewiseLinear gb = B.div.potential.linearized();
    std::vector<Rational> pts = g.breakpoints;
    pts.insert(pts.end(), gb.breakpoints.begin(), gb.breakpoints.end());
    if (pts.empty()) pts.push_back(Rational(0));
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    for (const auto& t : pts) {
      Rational denom = gb.eval(t);
      eps = max(eps, g.eval(t).abs() / denom);
    }
    // slope-ratio limits at both ends
    for (int side = 0; side < 2; ++side) {
      Rational sg = side == 0 ? g.slope_at_minus_inf() : g.slope_at_plus_inf();
      Rational sb = side == 0 ? gb.slope_at_minus_inf() : gb.slope_at_plus_inf();
      if (sb.is_zero()) {
        if (!sg.is_zero()) return std::nullopt;
      } else {
        eps = max(eps, sg.abs() / sb.abs());
      }
    }
  }
  // deviations: |dev| <= eps * g_B,p on the tree; the boundary's canonical
  // finite greens are the reference
  for (const auto& [p, dev] : delta.deviations) {
    // evaluate at each bump vertex
    for (const auto& bump : dev) {
      if (bump.coeff.is_zero()) continue;
      // dev value at the bump vertex
      Rational val(0);
      for (const auto& other : dev)
        val += other.coeff *
               min_with_inf(branch_depth_opt(p, bump.center, other.center),
                            min(bump.depth, other.depth));
      if (val.is_zero()) continue;
      // boundary green at the same type-II point
      Rational bg = B.div.vertical_at(p);
      for (const auto& [x, m] : B.div.points)
        bg += m * min_with_inf(branch_depth_opt(p, bump.center, x), bump.depth);
      if (bg.is_zero()) return std::nullopt;
      eps = max(eps, val.abs() / bg);
    }
  }
  return eps;
}

std::optional<Rational> b_adic_norm(const ModelArithDivisor& D, const BoundaryDivisor& B) {
  ModelArithDivisor zero;
  zero.potential = ConvexProfile({}, {Rational(0)}, Rational(0));
  return b_adic_norm(sub(D, zero), B);
}

bool CauchySequence::verify(const BoundaryDivisor& B) const {
  Rational bound = modulus_base;
  for (std::size_t n = 0; n + 1 < terms.size(); ++n) {
    auto nrm = b_adic_norm(sub(terms[n + 1], terms[n]), B);
    if (!nrm || *nrm > bound) return false;
    bound *= modulus_ratio;
  }
  return true;
}

Rational CauchySequence::tail_bound(std::size_t n) const {
  // sum_{k >= n} base * ratio^k = base * ratio^n / (1 - ratio)
  Rational r = modulus_base / (Rational(1) - modulus_ratio);
  for (std::size_t k = 0; k < n; ++k) r *= modulus_ratio;
  return r;
}

bool divisor_leq(const ModelArithDivisor& E, const ModelArithDivisor& D) {
  ArithDelta d = sub(D, E);
  for (const auto& [x, m] : d.points) {
    (void)x;
    if (m.sign() < 0) return false;
  }
  for (const auto& [p, m] : d.vertical) {
    (void)p;
    if (m.sign() < 0) return false;
  }
  auto lo = d.green.inf();
  if (!lo || lo->sign() < 0) return false;
  for (const auto& [p, dev] : d.deviations) {
    // difference of deviations must be >= 0 at every bump vertex
    for (const auto& bump : dev) {
      Rational val(0);
      for (const auto& other : dev)
        val += other.coeff *
               min_with_inf(branch_depth_opt(p, bump.center, other.center),
                            min(bump.depth, other.depth));
      if (val.sign() < 0) return false;
    }
  }
  return true;
}

CauchySequence monotone_nef_approximation(const AdelicArithDivisor& D,
                                          const BoundaryDivisor& B) {
  const CauchySequence& seq = D.seq;
  if (!seq.verify(B)) throw SandwichUnverifiable();
  CauchySequence out;
  out.modulus_base = Rational(8) * seq.modulus_base / (Rational(1) - seq.modulus_ratio);
  out.modulus_ratio = Rational(1, 2);
  // pick indices with tail bound <= 1/2^{k+1}
  std::size_t n = 0;
  for (std::size_t k = 0;; ++k) {
    Rational target(1, 2);
    for (std::size_t j = 0; j < k; ++j) target *= Rational(1, 2);
    while (n < seq.terms.size() && seq.tail_bound(n) > target) ++n;
    if (n >= seq.terms.size()) break;
    Rational coeff(4);
    for (std::size_t j = 0; j < k; ++j) coeff *= Rational(1, 2);
    out.terms.push_back(add_scaled(seq.terms[n], coeff, B.div));
  }
  if (out.terms.size() < 2) throw SandwichUnverifiable();
  for (std::size_t k = 0; k + 1 < out.terms.size(); ++k)
    if (!divisor_leq(out.terms[k + 1], out.terms[k])) throw SandwichUnverifiable();
  return out;
}

PairingResult intersect(const AdelicArithDivisor& A, const AdelicArithDivisor& B,
                        const BoundaryDivisor& bnd, double tol) {
  const std::size_t n = std::min(A.seq.terms.size(), B.seq.terms.size());
  if (n == 0) throw std::invalid_argument("intersect: empty sequences");
  for (std::size_t k = 0; k < n; ++k) {
    LogLin v = pair_model(A.seq.terms[k], B.seq.terms[k]);
    // scale constants for the Cauchy tail: |dX . Y| <= eps * |B . Y|
    double pbb = std::abs(pair_model_impl(bnd.div, bnd.div, true).to_double());
    double pab = std::abs(pair_model_impl(A.seq.terms[k], bnd.div, true).to_double());
    double pbbd = std::abs(pair_model_impl(bnd.div, B.seq.terms[k], true).to_double());
    double ea = A.seq.tail_bound(k).to_double();
    double eb = B.seq.tail_bound(k).to_double();
    double tail = ea * pbbd + eb * pab + ea * eb * pbb;
    if (tail <= tol || k + 1 == n) {
      if (tail > tol) throw ToleranceNotReached();
      return {v.to_double(), tail, k + 1};
    }
  }
  throw ToleranceNotReached();
}

namespace {

// Green profile of a toric divisor shifted to the energy engine's slope
// normalization [0, deg].
ConvexProfile energy_profile(const ModelArithDivisor& D) {
  PiecewiseLinear u = D.potential.linearized();
  const Rational a0 = -u.slopes.front();
  for (auto& s : u.slopes) s += a0;
  return ConvexProfile(u.breakpoints, u.slopes, u.anchor_value);
}

}  // namespace

EnergyDifference energy_difference_check(const ModelArithDivisor& D,
                                         const ModelArithDivisor& Dprime) {
  if (!(D.points == Dprime.points) || !(D.vertical == Dprime.vertical))
    throw std::invalid_argument("energy_difference_check: divisors must share geometric part");
  if (!D.toric() || !Dprime.toric())
    throw std::invalid_argument("energy_difference_check: toric supports required");
  LogLin lhs = pair_model_impl(D, D, true) - pair_model_impl(Dprime, Dprime, true);
  AdditivePshTuple t;
  t.d = 1;
  AdditiveEntry e;
  e.phi = {energy_profile(D)};
  e.psi = {energy_profile(Dprime)};
  t.entries = {e, e};
  const Rational deg = max(D.degree(), Rational(1));
  t.refs.assign(2, ReferenceProfile::pl_model(max(deg, npp_mass(e.phi[0]))));
  EnergyValue rhs = mixed_relative_energy(t);
  if (rhs.minus_infinity)
    return {lhs, Rational(0), lhs};
  LogLin residual = lhs - LogLin(rhs.value);
  return {lhs, rhs.value, residual};
}

std::optional<LogLin> generalized_product(const ModelArithDivisor& D,
                                          const ModelArithDivisor& anchor) {
  if (!(D.points == anchor.points))
    throw std::invalid_argument("generalized_product: divisors must share geometric part");
  ConvexProfile phi = energy_profile(D), psi = energy_profile(anchor);
  if (!more_singular_or_equal(phi, psi)) throw FullMassFails();
  AdditivePshTuple t;
  t.d = 1;
  AdditiveEntry e;
  e.phi = {phi};
  e.psi = {psi};
  t.entries = {e, e};
  t.refs.assign(2, ReferenceProfile::pl_model(max(npp_mass(psi), Rational(1))));
  EnergyValue en = mixed_relative_energy(t);
  if (en.minus_infinity) return std::nullopt;
  return pair_model_impl(anchor, anchor, true) + LogLin(en.value);
}

ModelArithDivisor pullback_power(const ModelArithDivisor& D, std::int64_t n, bool toric_ok) {
  if (n <= 0) throw std::invalid_argument("pullback_power: n must be positive");
  if (!D.toric() || !toric_ok) throw RamificationUnsupported();
  ModelArithDivisor out;
  const Rational nr(n);
  for (const auto& [x, m] : D.points) out.points.push_back({x, nr * m});
  out.vertical = D.vertical;
  {
    PiecewiseLinear u = D.potential.linearized();
    for (auto& b : u.breakpoints) b /= nr;
    for (auto& s : u.slopes) s *= nr;
    out.potential = ConvexProfile(u.breakpoints, u.slopes, u.anchor_value);
  }
  for (const auto& [p, dev] : D.deviations) {
    FiniteDeviation nd;
    for (const auto& bump : dev) {
      if (!bump.center.is_infinity && !bump.center.value.is_zero())
        throw RamificationUnsupported();
      nd.push_back({bump.center, bump.depth / nr, nr * bump.coeff});
    }
    out.deviations[p] = nd;
  }
  return out;
}

std::vector<NonIntRow> non_integrability_demo(int n_max, std::size_t grid, double epsilon) {
  // u(s) = -log(-s / 2pi) on s = log r < 0; second derivative 1/s^2
  const double s_lo = -30.0, s_hi = -0.5;
  const double h = (s_hi - s_lo) / static_cast<double>(grid - 1);
  auto u = [](double s) { return -std::log(-s / (2 * M_PI)); };
  double margin = 1e300, mismatch = 0;
  for (std::size_t i = 2; i + 2 < grid; ++i) {
    double s = s_lo + h * static_cast<double>(i);
    // five-point stencil for the second derivative
    double d2 = (-u(s - 2 * h) + 16 * u(s - h) - 30 * u(s) + 16 * u(s + h) - u(s + 2 * h)) /
                (12 * h * h);
    margin = std::min(margin, d2);
    double analytic = 1.0 / (s * s);
    mismatch = std::max(mismatch, std::abs(d2 - analytic) / analytic);
  }
  std::vector<NonIntRow> rows;
  const double s_eps = std::log(epsilon);
  for (int n = 1; n <= n_max; ++n) {
    NonIntRow row;
    row.n = n;
    row.value_at_cusp = -static_cast<double>(n);  // g(0) = -infinity, truncated at -n
    row.subharm_margin = margin;
    row.analytic_mismatch = mismatch;
    row.circle_max = std::max(u(s_eps), -static_cast<double>(n));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace arakel
