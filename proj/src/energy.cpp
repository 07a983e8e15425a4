#include "arakel/energy.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace arakel {

namespace {

// Sum over bijections (slots -> axes) of the product-measure integral of an
// additive integrand. Ival[s][a] = integral of the integrand's axis-a part
// against slot s's axis-a measure; Mass[s][a] the corresponding total mass.
Rational bijection_sum(const std::vector<std::vector<Rational>>& Ival,
                       const std::vector<std::vector<Rational>>& Mass) {
  const std::size_t d = Ival.empty() ? 0 : Ival[0].size();
  std::vector<std::size_t> perm(d);
  std::iota(perm.begin(), perm.end(), 0);  // axis a handled by slot perm[a]
  Rational total(0);
  do {
    // integral of sum_a h_a(t_a) against prod_a mu_{perm[a], a}
    for (std::size_t a = 0; a < d; ++a) {
      Rational term = Ival[perm[a]][a];
      if (term.is_zero()) continue;
      for (std::size_t b = 0; b < d; ++b) {
        if (b == a) continue;
        term *= Mass[perm[b]][b];
        if (term.is_zero()) break;
      }
      total += term;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

struct EntryMeasures {
  std::vector<LineMeasure> phi, psi;  // per axis
  std::vector<Rational> phi_mass, psi_mass;
};

EntryMeasures measures_of(const AdditiveEntry& e) {
  EntryMeasures m;
  for (const auto& p : e.phi) {
    m.phi.push_back(ma_measure(p));
    m.phi_mass.push_back(npp_mass(p));
  }
  for (const auto& p : e.psi) {
    m.psi.push_back(ma_measure(p));
    m.psi_mass.push_back(npp_mass(p));
  }
  return m;
}

bool bounded_pair(const ConvexProfile& phi, const ConvexProfile& psi) {
  return phi.slope_minus() == psi.slope_minus() && phi.slope_plus() == psi.slope_plus();
}

// Exact mixed relative energy, formula (sum over k, phi-factors before k,
// psi-factors after k); valid when every pair has bounded difference.
Rational mixed_exact(const AdditivePshTuple& tuple) {
  const std::size_t d = tuple.d;
  std::vector<EntryMeasures> M;
  M.reserve(tuple.entries.size());
  for (const auto& e : tuple.entries) M.push_back(measures_of(e));

  Rational total(0);
  for (std::size_t k = 0; k <= d; ++k) {
    // integrand: phi_k - psi_k, axiswise
    std::vector<PiecewiseLinear> h(d);
    for (std::size_t a = 0; a < d; ++a)
      h[a] = pl_sub(tuple.entries[k].phi[a].linearized(), tuple.entries[k].psi[a].linearized());
    // slots: entries j != k; side phi for j < k, psi for j > k
    std::vector<std::vector<Rational>> Ival, Mass;
    for (std::size_t j = 0; j <= d; ++j) {
      if (j == k) continue;
      const bool phi_side = j < k;
      std::vector<Rational> iv(d), mv(d);
      for (std::size_t a = 0; a < d; ++a) {
        const LineMeasure& mu = phi_side ? M[j].phi[a] : M[j].psi[a];
        iv[a] = integrate_pl_against(h[a], mu);
        mv[a] = phi_side ? M[j].phi_mass[a] : M[j].psi_mass[a];
      }
      Ival.push_back(std::move(iv));
      Mass.push_back(std::move(mv));
    }
    total += bijection_sum(Ival, Mass);
  }
  return total;
}

Rational single_exact(const std::vector<ConvexProfile>& phi,
                      const std::vector<ConvexProfile>& psi, std::size_t d) {
  std::vector<LineMeasure> Mphi, Mpsi;
  std::vector<Rational> mphi, mpsi;
  std::vector<PiecewiseLinear> h(d);
  for (std::size_t a = 0; a < d; ++a) {
    Mphi.push_back(ma_measure(phi[a]));
    Mpsi.push_back(ma_measure(psi[a]));
    mphi.push_back(npp_mass(phi[a]));
    mpsi.push_back(npp_mass(psi[a]));
    h[a] = pl_sub(phi[a].linearized(), psi[a].linearized());
  }
  std::vector<std::vector<Rational>> IvPhi(1, std::vector<Rational>(d)),
      IvPsi(1, std::vector<Rational>(d));
  for (std::size_t a = 0; a < d; ++a) {
    IvPhi[0][a] = integrate_pl_against(h[a], Mphi[a]);
    IvPsi[0][a] = integrate_pl_against(h[a], Mpsi[a]);
  }
  Rational total(0);
  for (std::size_t k = 0; k <= d; ++k) {
    // k phi-slots, d-k psi-slots
    std::vector<std::vector<Rational>> Ival, Mass;
    for (std::size_t s = 0; s < d; ++s) {
      const bool phi_side = s < k;
      std::vector<Rational> iv(d), mv(d);
      for (std::size_t a = 0; a < d; ++a) {
        iv[a] = phi_side ? IvPhi[0][a] : IvPsi[0][a];
        mv[a] = phi_side ? mphi[a] : mpsi[a];
      }
      Ival.push_back(std::move(iv));
      Mass.push_back(std::move(mv));
    }
    total += bijection_sum(Ival, Mass);
  }
  return total / Rational(static_cast<std::int64_t>(d + 1));
}

std::vector<ConvexProfile> approximant(const std::vector<ConvexProfile>& phi,
                                       const std::vector<ConvexProfile>& psi,
                                       const Rational& C) {
  std::vector<ConvexProfile> out;
  out.reserve(phi.size());
  for (std::size_t a = 0; a < phi.size(); ++a)
    out.push_back(profile_max(phi[a], profile_shift(psi[a], -C)));
  return out;
}

void require_more_singular(const std::vector<ConvexProfile>& phi,
                           const std::vector<ConvexProfile>& psi) {
  for (std::size_t a = 0; a < phi.size(); ++a)
    if (!more_singular_or_equal(phi[a], psi[a])) throw NotMoreSingular();
}

}  // namespace

void AdditivePshTuple::validate() const {
  if (entries.size() != d + 1 || refs.size() != d + 1)
    throw std::invalid_argument("AdditivePshTuple: need d+1 entries and references");
  for (std::size_t j = 0; j <= d; ++j) {
    const auto& e = entries[j];
    if (e.phi.size() != d || e.psi.size() != d)
      throw std::invalid_argument("AdditivePshTuple: entry must carry one profile per axis");
    for (std::size_t a = 0; a < d; ++a) {
      for (const ConvexProfile* p : {&e.phi[a], &e.psi[a]}) {
        if (p->slope_minus().sign() < 0 || p->slope_plus() > refs[j].degree)
          throw std::invalid_argument(
              "AdditivePshTuple: profile slopes must lie within [0, reference degree]");
      }
    }
  }
}

Rational MixedMAMeasure::total_mass() const {
  Rational m(0);
  for (const auto& t : terms) {
    Rational prod(1);
    for (const auto& mu : t.axis_measure) prod *= mu.total_mass();
    m += prod;
  }
  return m;
}

MixedMAMeasure mixed_ma(const AdditivePshTuple& tuple, const std::vector<std::size_t>& indices) {
  tuple.validate();
  const std::size_t d = tuple.d;
  if (indices.size() != d)
    throw std::invalid_argument("mixed_ma: need exactly d indices");
  MixedMAMeasure out;
  out.d = d;
  std::vector<std::size_t> perm = indices;
  std::sort(perm.begin(), perm.end());
  do {
    MixedMAMeasure::Term t;
    t.entry_for_axis = perm;
    for (std::size_t a = 0; a < d; ++a)
      t.axis_measure.push_back(ma_measure(tuple.entries[perm[a]].phi[a]));
    out.terms.push_back(std::move(t));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

std::vector<bool> full_mass_check(const AdditivePshTuple& tuple) {
  tuple.validate();
  std::vector<bool> ok;
  for (const auto& e : tuple.entries) {
    bool singular_ok = true;
    Rational pphi(1), ppsi(1);
    for (std::size_t a = 0; a < tuple.d; ++a) {
      singular_ok = singular_ok && more_singular_or_equal(e.phi[a], e.psi[a]);
      pphi *= npp_mass(e.phi[a]);
      ppsi *= npp_mass(e.psi[a]);
    }
    ok.push_back(singular_ok && pphi == ppsi);
  }
  return ok;
}

EnergyValue relative_energy(const std::vector<ConvexProfile>& phi,
                            const std::vector<ConvexProfile>& psi, std::size_t d,
                            const TraceConfig& cfg) {
  require_more_singular(phi, psi);
  bool bounded = true;
  for (std::size_t a = 0; a < d; ++a) bounded = bounded && bounded_pair(phi[a], psi[a]);
  if (bounded) return EnergyValue::finite(single_exact(phi, psi, d));
  TraceResult tr = approximant_limit_trace(phi, psi, d, cfg);
  if (tr.divergent) return EnergyValue::neg_inf();
  return EnergyValue::finite(tr.points.back().value);
}

EnergyValue mixed_relative_energy(const AdditivePshTuple& tuple, const TraceConfig& cfg) {
  tuple.validate();
  bool bounded = true;
  for (const auto& e : tuple.entries) {
    require_more_singular(e.phi, e.psi);
    for (std::size_t a = 0; a < tuple.d; ++a)
      bounded = bounded && bounded_pair(e.phi[a], e.psi[a]);
  }
  if (bounded) return EnergyValue::finite(mixed_exact(tuple));

  // Canonical-approximant limit, approximants taken axiswise.
  Rational prev;
  bool have_prev = false;
  int drops = 0;
  Rational last;
  for (std::int64_t C = 1; C <= cfg.C_max; C *= 2) {
    AdditivePshTuple t = tuple;
    for (auto& e : t.entries) e.phi = approximant(e.phi, e.psi, Rational(C));
    Rational v = mixed_exact(t);
    if (have_prev && C >= cfg.C_detect_start) {
      Rational thr = cfg.rel_drop * (prev.is_zero() ? Rational(1) : prev.abs());
      if (prev - v > thr)
        ++drops;
      else
        drops = 0;
      if (drops >= cfg.consecutive) return EnergyValue::neg_inf();
    }
    if (have_prev && v == prev) return EnergyValue::finite(v);
    prev = v;
    last = v;
    have_prev = true;
  }
  return EnergyValue::finite(last);
}

TraceResult approximant_limit_trace(const std::vector<ConvexProfile>& phi,
                                    const std::vector<ConvexProfile>& psi, std::size_t d,
                                    const TraceConfig& cfg) {
  require_more_singular(phi, psi);
  TraceResult out;
  // Finite once C dominates every axis gap sup(psi_a - phi_a).
  std::optional<Rational> bound = Rational(0);
  for (std::size_t a = 0; a < d; ++a) {
    auto g = bounded_gap(phi[a], psi[a]);
    if (!g) {
      bound = std::nullopt;
      break;
    }
    bound = max(*bound, *g);
  }
  int drops = 0;
  int stable = 0;
  for (std::int64_t C = 1; C <= cfg.C_max; C *= 2) {
    Rational v = single_exact(approximant(phi, psi, Rational(C)), psi, d);
    if (!out.points.empty() && C >= cfg.C_detect_start) {
      const Rational& prev = out.points.back().value;
      Rational thr = cfg.rel_drop * (prev.is_zero() ? Rational(1) : prev.abs());
      if (prev - v > thr)
        ++drops;
      else
        drops = 0;
    }
    if (!out.points.empty() && v == out.points.back().value)
      ++stable;
    else
      stable = 0;
    out.points.push_back({C, v});
    if (drops >= cfg.consecutive) {
      out.divergent = true;
      return out;
    }
    if (bound && Rational(C) >= *bound && stable >= 1) return out;
  }
  return out;
}

Rational polarization_check(const AdditivePshTuple& tuple) {
  tuple.validate();
  const std::size_t d = tuple.d;
  EnergyValue lhs_e = mixed_relative_energy(tuple);
  if (lhs_e.minus_infinity) throw SubsetEnergyDiverges("{0..d}");
  Rational lhs = Rational(BigInt::factorial(d + 1)) * lhs_e.value;

  Rational rhs(0);
  const std::size_t n = d + 1;
  for (std::size_t mask = 0; mask < (std::size_t(1) << n); ++mask) {
    // subset sum of entries in the mask, diagonal tuple
    std::vector<ConvexProfile> sphi(d, ConvexProfile{}), spsi(d, ConvexProfile{});
    Rational deg(0);
    std::size_t count = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (!(mask & (std::size_t(1) << j))) continue;
      ++count;
      deg += tuple.refs[j].degree;
      for (std::size_t a = 0; a < d; ++a) {
        sphi[a] = profile_add(sphi[a], tuple.entries[j].phi[a]);
        spsi[a] = profile_add(spsi[a], tuple.entries[j].psi[a]);
      }
    }
    AdditivePshTuple diag;
    diag.d = d;
    diag.entries.assign(n, AdditiveEntry{sphi, spsi});
    diag.refs.assign(n, ReferenceProfile::pl_model(deg));
    EnergyValue sub = mixed_relative_energy(diag);
    if (sub.minus_infinity) {
      std::ostringstream os;
      os << "{";
      for (std::size_t j = 0; j < n; ++j)
        if (mask & (std::size_t(1) << j)) os << j << ",";
      os << "}";
      throw SubsetEnergyDiverges(os.str());
    }
    const bool odd = ((n - count) % 2) == 1;
    rhs += odd ? -sub.value : sub.value;
  }
  return lhs - rhs;
}

Rational ibp_transposition_residual(const AdditivePshTuple& tuple, std::size_t j) {
  tuple.validate();
  const std::size_t d = tuple.d;
  if (j + 1 > d) throw std::invalid_argument("ibp: need j and j+1 within 0..d");

  // Theta: entries i < j on the phi side, i > j+1 on the psi side (d-1 slots).
  auto side_term = [&](std::size_t integrand_idx, std::size_t ddc_idx) {
    // integral of (phi-psi)[integrand_idx] against <ddc(phi-psi)[ddc_idx] ^ Theta>
    std::vector<PiecewiseLinear> h(d);
    for (std::size_t a = 0; a < d; ++a)
      h[a] = pl_sub(tuple.entries[integrand_idx].phi[a].linearized(),
                    tuple.entries[integrand_idx].psi[a].linearized());
    // two runs: ddc slot charged with MA(phi_ddc) then MA(psi_ddc), signed
    Rational total(0);
    for (int sign = 0; sign < 2; ++sign) {
      std::vector<std::vector<Rational>> Ival, Mass;
      // ddc slot first
      {
        std::vector<Rational> iv(d), mv(d);
        for (std::size_t a = 0; a < d; ++a) {
          const ConvexProfile& src = sign == 0 ? tuple.entries[ddc_idx].phi[a]
                                               : tuple.entries[ddc_idx].psi[a];
          LineMeasure mu = ma_measure(src);
          iv[a] = integrate_pl_against(h[a], mu);
          mv[a] = npp_mass(src);
        }
        Ival.push_back(std::move(iv));
        Mass.push_back(std::move(mv));
      }
      for (std::size_t i = 0; i <= d; ++i) {
        if (i == j || i == j + 1) continue;
        const bool phi_side = i < j;
        std::vector<Rational> iv(d), mv(d);
        for (std::size_t a = 0; a < d; ++a) {
          const ConvexProfile& src =
              phi_side ? tuple.entries[i].phi[a] : tuple.entries[i].psi[a];
          LineMeasure mu = ma_measure(src);
          iv[a] = integrate_pl_against(h[a], mu);
          mv[a] = npp_mass(src);
        }
        Ival.push_back(std::move(iv));
        Mass.push_back(std::move(mv));
      }
      Rational run = bijection_sum(Ival, Mass);
      total += sign == 0 ? run : -run;
    }
    return total;
  };

  return side_term(j, j + 1) - side_term(j + 1, j);
}

}  // namespace arakel
