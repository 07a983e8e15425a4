#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "arakel/profile.hpp"

namespace arakel {

// One slot of an additive tuple: the combined convex objects per axis for the
// function and for its reference companion. Slopes live in [0, ref degree];
// the Monge-Ampere data of the current is exactly the profile's own measure.
struct AdditiveEntry {
  std::vector<ConvexProfile> phi;  // one profile per axis
  std::vector<ConvexProfile> psi;  // companion, same shape
};

// (d+1)-tuple of additive functions on (P^1)^d with per-index references.
struct AdditivePshTuple {
  std::size_t d = 1;
  std::vector<AdditiveEntry> entries;   // size d+1
  std::vector<ReferenceProfile> refs;   // size d+1

  void validate() const;
};

// Mixed non-pluripolar measure of additive inputs: over injective axis
// assignments the product factorizes, so the measure is a sum of product
// measures, one per permutation.
struct MixedMAMeasure {
  struct Term {
    std::vector<std::size_t> entry_for_axis;  // axis a is charged by this entry
    std::vector<LineMeasure> axis_measure;    // size d
  };
  std::size_t d = 1;
  std::vector<Term> terms;

  Rational total_mass() const;
};

// Energy values live on the extended line [-inf, +rationals].
struct EnergyValue {
  bool minus_infinity = false;
  Rational value;

  static EnergyValue finite(Rational v) { return {false, std::move(v)}; }
  static EnergyValue neg_inf() { return {true, Rational(0)}; }
  std::string to_string() const { return minus_infinity ? "-inf" : value.to_string(); }
};

struct NotMoreSingular : std::runtime_error {
  NotMoreSingular() : std::runtime_error("phi is not more singular than psi") {}
};

struct SubsetEnergyDiverges : std::runtime_error {
  explicit SubsetEnergyDiverges(const std::string& subset)
      : std::runtime_error("subset energy diverges for I = " + subset) {}
};

// Geometric approximant schedule with the divergence heuristic: the trace is
// declared divergent when five consecutive doublings past C_detect_start each
// drop the value by more than rel_drop relative.
struct TraceConfig {
  std::int64_t C_max = 1 << 20;
  std::int64_t C_detect_start = 1 << 10;
  Rational rel_drop = Rational(1, 1000);
  int consecutive = 5;
};

// Mixed measure of the entries named by `indices` (|indices| == d).
MixedMAMeasure mixed_ma(const AdditivePshTuple& tuple, const std::vector<std::size_t>& indices);

// Relative full mass per index: componentwise singularity comparison plus
// equality of the product masses.
std::vector<bool> full_mass_check(const AdditivePshTuple& tuple);

// Single relative energy I_psi(phi) with the 1/(d+1) prefactor. phi/psi are
// additive over d axes. Unbounded differences go through the canonical
// approximant limit.
EnergyValue relative_energy(const std::vector<ConvexProfile>& phi,
                            const std::vector<ConvexProfile>& psi, std::size_t d,
                            const TraceConfig& cfg = {});

// Mixed relative energy (no prefactor), formula summed over k with phi-factors
// below and psi-factors above the integrand index.
EnergyValue mixed_relative_energy(const AdditivePshTuple& tuple, const TraceConfig& cfg = {});

// Left minus right side of (d+1)! I(tuple) = sum_I (-1)^{d+1-|I|} I_{psi_I}(phi_I),
// subset energies taken on the diagonal; exact 0 for piecewise-linear input.
Rational polarization_check(const AdditivePshTuple& tuple);

// Canonical-approximant trace: (C, I value) along the schedule; stops early
// once exactly stabilized in the bounded-difference case.
struct TracePoint {
  std::int64_t C;
  Rational value;
};
struct TraceResult {
  std::vector<TracePoint> points;
  bool divergent = false;
};
TraceResult approximant_limit_trace(const std::vector<ConvexProfile>& phi,
                                    const std::vector<ConvexProfile>& psi, std::size_t d,
                                    const TraceConfig& cfg = {});

// Transposition identity of the integration-by-parts step, evaluated on both
// sides; exact equality for piecewise-linear bounded-difference data.
// Returns lhs - rhs.
Rational ibp_transposition_residual(const AdditivePshTuple& tuple, std::size_t j);

}  // namespace arakel
