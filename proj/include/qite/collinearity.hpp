#pragma once

#include <optional>
#include <vector>

#include "qite/mpemba.hpp"

namespace qite {

// One-parameter family of initial states on the line through two anchors,
//   p(lambda) = (1 - lambda) * A + lambda * B.
// Members are validated lazily: the line leaves the probability simplex for
// extreme lambda, and only requested members need to be inside it.
class CollinearFamily {
public:
  CollinearFamily(PopulationVector anchor_a, PopulationVector anchor_b,
                  std::vector<Real> lambdas);

  const PopulationVector& anchor_a() const { return a_; }
  const PopulationVector& anchor_b() const { return b_; }
  const std::vector<Real>& lambdas() const { return lambdas_; }

  bool member_valid(Real lambda) const;
  PopulationVector member(Real lambda) const;  // throws for members off the simplex

private:
  PopulationVector a_;
  PopulationVector b_;
  std::vector<Real> lambdas_;
};

// Evolution preserves collinearity; only the affine coordinate moves:
//   lambda'(tau) = lambda * Z_B(tau) / Z_member(tau).
// The evolved member equals the combination of the evolved anchors with
// coefficient lambda'(tau).
Real evolved_lambda(const CollinearFamily& family, Real lambda,
                    const EnergySpectrum& spectrum, Real tau);

// Time at which all members of the family reach one common distance, if the
// distance spread max - min collapses below 1e-10 anywhere on [0, tau_max].
// Located by golden-section minimization of the spread after grid bracketing.
std::optional<Crossing> simultaneous_crossing(const CollinearFamily& family,
                                              const EnergySpectrum& spectrum,
                                              const DistanceFunction& df, Real tau_max,
                                              const GridSpec& grid = {});

// Dense tau x lambda table for isochrone plots: every listed member evolved
// across the grid, with its distance alongside.
struct IsochroneSweep {
  std::vector<Real> row_tau;     // one entry per row, lambda-major within tau
  std::vector<Real> row_lambda;
  Matrix populations;            // row k: member row_lambda[k] evolved to row_tau[k]
  std::vector<Real> distances;
};

IsochroneSweep isochrone_sweep(const CollinearFamily& family, const EnergySpectrum& spectrum,
                               const DistanceFunction& df, Real tau_max,
                               const GridSpec& grid = {});

}  // namespace qite
