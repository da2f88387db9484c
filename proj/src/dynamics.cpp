#include "qite/dynamics.hpp"

#include <cmath>
#include <sstream>

namespace qite {
namespace {

void require_same_levels(Index state, Index other, const char* what) {
  if (state != other) {
    std::ostringstream msg;
    msg << what << ": level count mismatch (" << state << " vs " << other << ")";
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

PopulationVector evolve(const PopulationVector& initial, const EnergySpectrum& spectrum,
                        Real tau, bool allow_backward) {
  require_same_levels(initial.size(), spectrum.level_count(), "evolve");
  if (!std::isfinite(tau)) {
    throw std::invalid_argument("evolve: tau must be finite");
  }
  if (tau < 0.0 && !allow_backward) {
    throw std::invalid_argument("evolve: negative tau rejected (pass allow_backward to undo evolution)");
  }
  if (tau == 0.0) {
    return initial;
  }

  // The dominant term is the occupied level with the largest -2*E*tau:
  // lowest occupied going forward, highest occupied going backward. Shifting
  // exponents by it pins the largest weight at p_k, so the normalizing sum
  // never overflows and never collapses entirely to zero.
  const Index shift_level = tau > 0.0 ? initial.lowest_occupied() : initial.highest_occupied();
  const Real shift_energy = spectrum.energy(shift_level);

  const Index n = initial.size();
  Vector weights = Vector::Zero(n);
  for (Index i = 0; i < n; ++i) {
    const Real p = initial[i];
    if (p <= 0.0) continue;  // never exponentiate for empty levels; 0 * exp(huge) is NaN
    Real w = p * std::exp(-2.0 * (spectrum.energy(i) - shift_energy) * tau);
    if (w < kPopulationFloor) w = 0.0;
    weights(i) = w;
  }
  weights /= weights.sum();
  return PopulationVector(std::move(weights));
}

Real partition_function(const PopulationVector& initial, const EnergySpectrum& spectrum,
                        Real tau) {
  require_same_levels(initial.size(), spectrum.level_count(), "partition_function");
  if (!std::isfinite(tau)) {
    throw std::invalid_argument("partition_function: tau must be finite");
  }
  Real z = 0.0;
  for (Index i = 0; i < initial.size(); ++i) {
    const Real p = initial[i];
    if (p <= 0.0) continue;
    z += p * std::exp(-2.0 * spectrum.energy(i) * tau);
  }
  return z;
}

Real distance(const PopulationVector& state, const DistanceFunction& df) {
  require_same_levels(state.size(), df.size(), "distance");
  const Real value = state.values().dot(df.weights());
  return value < kDistanceFloor ? 0.0 : value;
}

Real average_energy(const PopulationVector& state, const EnergySpectrum& spectrum) {
  require_same_levels(state.size(), spectrum.level_count(), "average_energy");
  return state.values().dot(spectrum.energies());
}

Vector population_derivative(const PopulationVector& state, const EnergySpectrum& spectrum) {
  require_same_levels(state.size(), spectrum.level_count(), "population_derivative");
  const Real ebar = average_energy(state, spectrum);
  return (-2.0 * (spectrum.energies().array() - ebar) * state.values().array()).matrix();
}

std::vector<Real> grid_points(const GridSpec& grid, Real tau_max) {
  if (!(tau_max > 0.0) || !std::isfinite(tau_max)) {
    throw std::invalid_argument("grid_points: tau_max must be positive and finite");
  }
  if (grid.points < 2) {
    throw std::invalid_argument("grid_points: need at least two points");
  }
  const int n = grid.points;
  std::vector<Real> taus(static_cast<std::size_t>(n));
  taus.front() = 0.0;
  taus.back() = tau_max;
  if (grid.spacing == GridSpec::Spacing::Linear) {
    for (int k = 1; k + 1 < n; ++k) {
      taus[static_cast<std::size_t>(k)] = tau_max * static_cast<Real>(k) / static_cast<Real>(n - 1);
    }
    return taus;
  }
  if (!(grid.first_fraction > 0.0) || !(grid.first_fraction < 1.0)) {
    throw std::invalid_argument("grid_points: first_fraction must lie in (0, 1)");
  }
  // Zero first, then a geometric ladder from first_fraction * tau_max up to
  // tau_max itself.
  const Real log_f = std::log(grid.first_fraction);
  for (int k = 1; k + 1 < n; ++k) {
    const Real exponent = static_cast<Real>(n - 1 - k) / static_cast<Real>(n - 2);
    taus[static_cast<std::size_t>(k)] = tau_max * std::exp(log_f * exponent);
  }
  return taus;
}

Trajectory sample_trajectory(const PopulationVector& initial, const EnergySpectrum& spectrum,
                             const DistanceFunction& df, Real tau_max, const GridSpec& grid) {
  require_same_levels(initial.size(), spectrum.level_count(), "sample_trajectory");
  require_same_levels(df.size(), spectrum.level_count(), "sample_trajectory");

  Trajectory out;
  out.taus = grid_points(grid, tau_max);
  const Index rows = static_cast<Index>(out.taus.size());
  out.populations.resize(rows, initial.size());
  out.distances.resize(out.taus.size());
  for (Index k = 0; k < rows; ++k) {
    const PopulationVector state = evolve(initial, spectrum, out.taus[static_cast<std::size_t>(k)]);
    out.populations.row(k) = state.values().transpose();
    out.distances[static_cast<std::size_t>(k)] = distance(state, df);
  }
  return out;
}

Real time_to_threshold(const PopulationVector& initial, const EnergySpectrum& spectrum,
                       const DistanceFunction& df, Real epsilon) {
  require_same_levels(initial.size(), spectrum.level_count(), "time_to_threshold");
  require_same_levels(df.size(), spectrum.level_count(), "time_to_threshold");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("time_to_threshold: epsilon must be positive");
  }
  const auto value_at = [&](Real tau) { return distance(evolve(initial, spectrum, tau), df); };
  if (value_at(0.0) <= epsilon) {
    return 0.0;
  }
  // The distance converges to the weight of the lowest occupied level; a
  // threshold at or below that limit is never reached.
  const Real limit = df.weight(initial.lowest_occupied());
  if (epsilon <= limit) {
    std::ostringstream msg;
    msg << "time_to_threshold: epsilon " << epsilon << " is at or below the asymptotic distance "
        << limit;
    throw InapplicableError(msg.str());
  }

  Real lo = 0.0, hi = 1.0;
  int expansions = 0;
  while (value_at(hi) > epsilon) {
    lo = hi;
    hi *= 2.0;
    if (++expansions > 200) {
      throw InapplicableError("time_to_threshold: threshold not reached in a representable time");
    }
  }
  while (hi - lo > 1e-13 * std::max(Real{1}, hi)) {
    const Real mid = 0.5 * (lo + hi);
    (value_at(mid) > epsilon ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace qite
