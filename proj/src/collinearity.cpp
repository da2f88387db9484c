#include "qite/collinearity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include "qite/experiment.hpp"

namespace qite {
namespace {

constexpr Real kSpreadTolerance = 1e-10;

// Largest distance minus smallest distance across the evolved members.
struct Spread {
  Real width;
  Real mean;
  Real largest;
};

Spread spread_at(const std::vector<PopulationVector>& members, const EnergySpectrum& spectrum,
                 const DistanceFunction& df, Real tau) {
  Real lo = std::numeric_limits<Real>::infinity();
  Real hi = -lo;
  Real sum = 0.0;
  for (const PopulationVector& m : members) {
    const Real d = distance(evolve(m, spectrum, tau), df);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
    sum += d;
  }
  return {hi - lo, sum / static_cast<Real>(members.size()), hi};
}

}  // namespace

CollinearFamily::CollinearFamily(PopulationVector anchor_a, PopulationVector anchor_b,
                                 std::vector<Real> lambdas)
    : a_(std::move(anchor_a)), b_(std::move(anchor_b)), lambdas_(std::move(lambdas)) {
  if (a_.size() != b_.size()) {
    throw std::invalid_argument("CollinearFamily: anchors differ in level count");
  }
  for (Real lambda : lambdas_) {
    if (!std::isfinite(lambda)) {
      throw std::invalid_argument("CollinearFamily: lambdas must be finite");
    }
  }
}

bool CollinearFamily::member_valid(Real lambda) const {
  if (!std::isfinite(lambda)) return false;
  for (Index i = 0; i < a_.size(); ++i) {
    if ((1.0 - lambda) * a_[i] + lambda * b_[i] < -1e-12) return false;
  }
  return true;
}

PopulationVector CollinearFamily::member(Real lambda) const {
  if (!std::isfinite(lambda)) {
    throw std::invalid_argument("CollinearFamily: lambda must be finite");
  }
  Vector p(a_.size());
  for (Index i = 0; i < a_.size(); ++i) {
    Real v = (1.0 - lambda) * a_[i] + lambda * b_[i];
    if (v < 0.0) {
      if (v < -1e-12) {
        std::ostringstream msg;
        msg << "CollinearFamily: member at lambda = " << lambda
            << " leaves the simplex (level " << i << " population " << v << ")";
        throw std::invalid_argument(msg.str());
      }
      v = 0.0;  // rounding dust from the affine combination
    }
    p(i) = v;
  }
  return PopulationVector(p);
}

Real evolved_lambda(const CollinearFamily& family, Real lambda, const EnergySpectrum& spectrum,
                    Real tau) {
  const PopulationVector member = family.member(lambda);
  const PopulationVector& b = family.anchor_b();
  if (member.size() != spectrum.level_count()) {
    throw std::invalid_argument("evolved_lambda: family and spectrum differ in level count");
  }
  if (!std::isfinite(tau) || tau < 0.0) {
    throw std::invalid_argument("evolved_lambda: tau must be finite and nonnegative");
  }
  // lambda' = lambda Z_B / Z_member, with one shared exponent shift so the
  // ratio stays representable at large tau.
  const Real shift =
      spectrum.energy(std::min(b.lowest_occupied(), member.lowest_occupied()));
  Real z_b = 0.0, z_m = 0.0;
  for (Index i = 0; i < b.size(); ++i) {
    const Real w = std::exp(-2.0 * (spectrum.energy(i) - shift) * tau);
    if (b[i] > 0.0) z_b += b[i] * w;
    if (member[i] > 0.0) z_m += member[i] * w;
  }
  return lambda * z_b / z_m;
}

std::optional<Crossing> simultaneous_crossing(const CollinearFamily& family,
                                              const EnergySpectrum& spectrum,
                                              const DistanceFunction& df, Real tau_max,
                                              const GridSpec& grid) {
  if (df.size() != spectrum.level_count()) {
    throw std::invalid_argument("simultaneous_crossing: distance function and spectrum differ in level count");
  }
  std::vector<Real> lambdas = family.lambdas();
  std::sort(lambdas.begin(), lambdas.end());
  lambdas.erase(std::unique(lambdas.begin(), lambdas.end()), lambdas.end());
  if (lambdas.size() < 2) {
    throw std::invalid_argument("simultaneous_crossing: needs at least two distinct members");
  }
  std::vector<PopulationVector> members;
  members.reserve(lambdas.size());
  for (Real lambda : lambdas) members.push_back(family.member(lambda));

  const std::vector<Real> ts = grid_points(grid, tau_max);
  std::vector<Real> widths(ts.size());
  for (std::size_t k = 0; k < ts.size(); ++k) {
    widths[k] = spread_at(members, spectrum, df, ts[k]).width;
  }

  // Walk the grid minima of the spread in order; the first dip that closes
  // below tolerance while the curves still carry distance is the event. The
  // late-time regime also has tiny spread (everything relaxed to zero), which
  // the positivity guard rejects.
  constexpr Real kGolden = 0.6180339887498949;
  for (std::size_t k = 1; k + 1 < ts.size(); ++k) {
    if (!(widths[k] <= widths[k - 1] && widths[k] <= widths[k + 1])) continue;
    Real lo = ts[k - 1], hi = ts[k + 1];
    Real x1 = hi - kGolden * (hi - lo);
    Real x2 = lo + kGolden * (hi - lo);
    Real f1 = spread_at(members, spectrum, df, x1).width;
    Real f2 = spread_at(members, spectrum, df, x2).width;
    while (hi - lo > 1e-12 * std::max(Real{1}, hi)) {
      if (f1 < f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - kGolden * (hi - lo);
        f1 = spread_at(members, spectrum, df, x1).width;
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + kGolden * (hi - lo);
        f2 = spread_at(members, spectrum, df, x2).width;
      }
    }
    const Real tau = 0.5 * (lo + hi);
    const Spread s = spread_at(members, spectrum, df, tau);
    if (s.width < kSpreadTolerance && s.largest > kDistanceFloor) {
      return Crossing{tau, s.mean};
    }
  }
  return std::nullopt;
}

IsochroneSweep isochrone_sweep(const CollinearFamily& family, const EnergySpectrum& spectrum,
                               const DistanceFunction& df, Real tau_max, const GridSpec& grid) {
  if (df.size() != spectrum.level_count()) {
    throw std::invalid_argument("isochrone_sweep: distance function and spectrum differ in level count");
  }
  const std::vector<Real>& lambdas = family.lambdas();
  if (lambdas.empty()) {
    throw std::invalid_argument("isochrone_sweep: family lists no lambdas to sweep");
  }
  std::vector<PopulationVector> members;
  members.reserve(lambdas.size());
  for (Real lambda : lambdas) members.push_back(family.member(lambda));

  const std::vector<Real> ts = grid_points(grid, tau_max);
  const std::size_t rows = ts.size() * lambdas.size();

  IsochroneSweep sweep;
  sweep.row_tau.resize(rows);
  sweep.row_lambda.resize(rows);
  sweep.populations.resize(static_cast<Index>(rows), spectrum.level_count());
  sweep.distances.resize(rows);

  const auto fill_rows = [&](std::size_t begin, std::size_t end) {
    for (std::size_t row = begin; row < end; ++row) {
      const std::size_t ti = row / lambdas.size();
      const std::size_t li = row % lambdas.size();
      const PopulationVector evolved = evolve(members[li], spectrum, ts[ti]);
      sweep.row_tau[row] = ts[ti];
      sweep.row_lambda[row] = lambdas[li];
      sweep.populations.row(static_cast<Index>(row)) = evolved.values().transpose();
      sweep.distances[row] = distance(evolved, df);
    }
  };

  // Rows are independent; carve them into contiguous chunks so the result is
  // byte-identical for any worker count.
  const std::size_t workers =
      std::min(static_cast<std::size_t>(std::max(1, worker_count())), rows);
  if (workers <= 1) {
    fill_rows(0, rows);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (rows + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(rows, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(fill_rows, begin, end);
    }
    for (std::thread& t : pool) t.join();
  }
  return sweep;
}

}  // namespace qite
