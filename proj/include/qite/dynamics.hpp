#pragma once

#include <vector>

#include "qite/spectrum.hpp"

namespace qite {

// Populations after imaginary-time evolution for duration tau:
//   p_i(tau) = p_i(0) exp(-2 E_i tau) / Z(tau).
// Exponents are shifted by the dominant occupied level before exponentiation,
// so late times neither overflow nor collapse to 0/0. Negative tau undoes the
// evolution and is rejected unless allow_backward is set.
PopulationVector evolve(const PopulationVector& initial, const EnergySpectrum& spectrum,
                        Real tau, bool allow_backward = false);

// Z(tau) = sum_i p_i(0) exp(-2 E_i tau), the normalization shed by evolve.
// Evaluated unshifted; for tau >= 0 it lives in (p_0, 1].
Real partition_function(const PopulationVector& initial, const EnergySpectrum& spectrum,
                        Real tau);

// D_f(p) = sum_i p_i f(E_i). Values below kDistanceFloor report as zero.
Real distance(const PopulationVector& state, const DistanceFunction& df);

Real average_energy(const PopulationVector& state, const EnergySpectrum& spectrum);

// dp_i/dtau = -2 (E_i - Ebar) p_i: levels above the running mean drain into
// the levels below it, ground fastest.
Vector population_derivative(const PopulationVector& state, const EnergySpectrum& spectrum);

struct GridSpec {
  enum class Spacing { Linear, Geometric };

  Spacing spacing = Spacing::Geometric;
  int points = 400;
  // First positive grid point as a fraction of tau_max (geometric spacing).
  Real first_fraction = 1e-4;
};

// Sample times covering [0, tau_max]. Geometric grids lead with an exact
// zero, then `points - 1` logarithmically spaced values; crossings spread
// over decades of tau, so geometric is the default.
std::vector<Real> grid_points(const GridSpec& grid, Real tau_max);

struct Trajectory {
  std::vector<Real> taus;
  Matrix populations;  // row k holds the populations at taus[k]
  std::vector<Real> distances;
};

Trajectory sample_trajectory(const PopulationVector& initial, const EnergySpectrum& spectrum,
                             const DistanceFunction& df, Real tau_max,
                             const GridSpec& grid = {});

// First tau with D_f(tau) <= epsilon, located by bisection on the exact
// trajectory. Returns 0 when the initial state is already at or below the
// threshold.
Real time_to_threshold(const PopulationVector& initial, const EnergySpectrum& spectrum,
                       const DistanceFunction& df, Real epsilon);

}  // namespace qite
