#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "qite/types.hpp"

namespace qite {

// Energy levels after canonicalization: strictly increasing, nondegenerate,
// shifted so the ground level sits at exactly zero.
class EnergySpectrum {
public:
  explicit EnergySpectrum(Vector energies);

  Index level_count() const { return energies_.size(); }
  const Vector& energies() const { return energies_; }
  Real energy(Index i) const { return energies_(i); }
  Real top_energy() const { return energies_(energies_.size() - 1); }

  // Smallest gap between adjacent levels; sets the slowest separation rate.
  Real min_gap() const;

private:
  Vector energies_;
};

// Probability weights over the energy levels: nonnegative, unit total mass.
class PopulationVector {
public:
  explicit PopulationVector(Vector populations);

  const Vector& values() const { return populations_; }
  Real operator[](Index i) const { return populations_(i); }
  Index size() const { return populations_.size(); }

  Real ground() const { return populations_(0); }
  Real excited_mass() const { return 1.0 - populations_(0); }

  Index lowest_occupied() const;
  Index highest_occupied() const;
  // Smallest occupied level above the ground level, if any.
  std::optional<Index> lowest_occupied_excited() const;

private:
  Vector populations_;
};

enum class DistanceKind { Infidelity, AverageEnergy, Custom };

// Level weights f(E_i) defining the distance to equilibrium
//   D_f(p) = sum_i p_i f(E_i),
// with f(E_0) = 0, f(E_1) > 0 and f nondecreasing. Infidelity weights every
// excited level 1; average energy weights each level by its energy.
class DistanceFunction {
public:
  explicit DistanceFunction(Vector weights, DistanceKind kind = DistanceKind::Custom);

  const Vector& weights() const { return weights_; }
  Real weight(Index i) const { return weights_(i); }
  DistanceKind kind() const { return kind_; }
  Index size() const { return weights_.size(); }

private:
  Vector weights_;
  DistanceKind kind_;
};

struct CanonicalSystem {
  EnergySpectrum spectrum;
  PopulationVector populations;
};

// Merge raw levels closer than merge_tolerance (populations add within a
// multiplet), sort ascending and shift the ground energy to zero. The input
// need not be sorted or normalized.
CanonicalSystem canonicalize_spectrum(const Vector& raw_energies,
                                      const Vector& raw_populations,
                                      Real merge_tolerance);

// Same merge plan applied to several population vectors over one raw
// spectrum, so the canonical levels of different states stay comparable.
std::pair<EnergySpectrum, std::vector<PopulationVector>>
canonicalize_shared(const Vector& raw_energies,
                    const std::vector<Vector>& raw_populations,
                    Real merge_tolerance);

DistanceFunction make_distance(const EnergySpectrum& spectrum, DistanceKind kind,
                               const std::optional<Vector>& custom_weights = std::nullopt);

}  // namespace qite
