#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qite/dynamics.hpp"

namespace qite {

// Outcome of the asymptotic comparison: the lowest level where the two
// population-to-ground ratios differ decides which state relaxes faster,
// independently of the distance function.
struct MpembaVerdict {
  bool occurs = false;
  Index deciding_level = 0;  // equals level_count when no ratio differs
  Real ratio_hot = 0.0;
  Real ratio_cold = 0.0;
};

// Requires distance(hot) >= distance(cold) at tau = 0 (equality is accepted
// as the marginal case) and occupied ground levels on both states. Throws
// NotHotterError when the pair is ordered the other way round.
MpembaVerdict check_mpemba(const PopulationVector& hot, const PopulationVector& cold,
                           const EnergySpectrum& spectrum, const DistanceFunction& df);

// Sufficient condition for a crossing at finite time while both infidelities
// still exceed a threshold epsilon: for any epsilon < epsilon_bound the hot
// state provably overtakes no later than tau_tilde_star.
struct FiniteTimeCertificate {
  bool applicable = false;
  Real epsilon_bound = 0.0;
  Real tau_tilde_star = 0.0;
  Real r_hot = 0.0;
  Real r_cold = 0.0;
  Real s_hot = 0.0;
  Index level = 1;             // deciding level the ratios were taken at
  std::optional<Real> a_star;  // slack parameter (general distance functions)
  std::string reason;          // set when applicable is false
};

// Infidelity certificate. When the level-1 ratios tie, the comparison moves
// to the lowest level j where they differ, with cumulative ratios
// sum_{i<=j} p_i/p_0 standing in for r and (E_j, E_{j+1}) for (E_1, E_2).
FiniteTimeCertificate theorem2_certificate(const PopulationVector& hot,
                                           const PopulationVector& cold,
                                           const EnergySpectrum& spectrum);

// Certificate for an arbitrary admissible distance function. The slack
// parameter a trades the two crossing-time bounds against each other; when
// not supplied, the optimum (both bounds equal) is located by bisection.
FiniteTimeCertificate general_f_certificate(const PopulationVector& hot,
                                            const PopulationVector& cold,
                                            const EnergySpectrum& spectrum,
                                            const DistanceFunction& df,
                                            std::optional<Real> a = std::nullopt);

struct Crossing {
  Real tau = 0.0;
  Real value = 0.0;  // common distance of the two curves at the crossing
};

struct CrossingReport {
  std::vector<Crossing> crossings;       // ascending tau
  std::optional<Real> truncated_at;      // first time either curve fell below epsilon
};

// Scans D_hot - D_cold over the grid (each cell subdivided to separate close
// roots), refines every sign change by bisection to |dtau| < 1e-10. With
// epsilon given, evolution stops once either curve reaches it: truncated_at
// is set and later crossings are dropped. A marginal equality at tau = 0 is
// not reported as a crossing.
CrossingReport find_crossings(const PopulationVector& hot, const PopulationVector& cold,
                              const EnergySpectrum& spectrum, const DistanceFunction& df,
                              Real tau_max, std::optional<Real> epsilon = std::nullopt,
                              const GridSpec& grid = {});

// Closed-form late-time estimate of the first crossing of the average-energy
// distance curves, valid when the decay toward the crossing is dominated by
// single exponential tails.
struct CrossingEstimate {
  Real tau = 0.0;
  int dispatch_case = 1;    // 1: shared lowest occupied excited level, 2: distinct
  Real log_argument = 0.0;
  bool reliable = false;    // log argument comfortably above 1
};

CrossingEstimate estimate_crossing_detailed(const PopulationVector& hot,
                                            const PopulationVector& cold,
                                            const EnergySpectrum& spectrum);

Real estimate_crossing(const PopulationVector& hot, const PopulationVector& cold,
                       const EnergySpectrum& spectrum);

// Relaxation-time advantage tau_cold(epsilon) - tau_hot(epsilon) in the
// asymptotic regime, for a hot state supported on the ground and top levels
// only. That support pattern maximizes the advantage over all hot states of
// equal initial distance, so this is the design target for preparing fast
// relaxers. Asymptotic in epsilon: the smaller the threshold, the tighter.
Real max_acceleration_time(const PopulationVector& cold, const PopulationVector& hot,
                           const EnergySpectrum& spectrum, const DistanceFunction& df,
                           Real epsilon);

}  // namespace qite
