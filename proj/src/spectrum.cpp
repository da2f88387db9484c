#include "qite/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace qite {
namespace {

void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) {
    throw std::invalid_argument(std::string(what) + ": entries must be finite");
  }
}

// Skip renormalization when the mass is already 1 up to accumulated rounding;
// dividing by such a sum would only churn the low bits and break
// canonicalize-twice bit equality.
bool effectively_normalized(Real sum, Index n) {
  const Real slack = 64.0 * std::numeric_limits<Real>::epsilon() * static_cast<Real>(std::max<Index>(n, 1));
  return std::abs(sum - 1.0) <= slack;
}

}  // namespace

EnergySpectrum::EnergySpectrum(Vector energies) : energies_(std::move(energies)) {
  require_finite(energies_, "EnergySpectrum");
  if (energies_.size() < 2) {
    throw std::invalid_argument("EnergySpectrum: need at least two levels");
  }
  if (energies_(0) != 0.0) {
    throw std::invalid_argument("EnergySpectrum: ground energy must be exactly 0 (canonicalize first)");
  }
  for (Index i = 1; i < energies_.size(); ++i) {
    if (!(energies_(i) > energies_(i - 1))) {
      std::ostringstream msg;
      msg << "EnergySpectrum: levels must be strictly increasing, E_" << i - 1 << " = "
          << energies_(i - 1) << " vs E_" << i << " = " << energies_(i);
      throw std::invalid_argument(msg.str());
    }
  }
}

Real EnergySpectrum::min_gap() const {
  Real gap = energies_(1) - energies_(0);
  for (Index i = 2; i < energies_.size(); ++i) {
    gap = std::min(gap, energies_(i) - energies_(i - 1));
  }
  return gap;
}

PopulationVector::PopulationVector(Vector populations) : populations_(std::move(populations)) {
  require_finite(populations_, "PopulationVector");
  if (populations_.size() == 0) {
    throw std::invalid_argument("PopulationVector: empty");
  }
  if ((populations_.array() < 0.0).any()) {
    throw std::invalid_argument("PopulationVector: negative population");
  }
  const Real sum = populations_.sum();
  if (std::abs(sum - 1.0) > kPopulationSumTolerance) {
    std::ostringstream msg;
    msg << "PopulationVector: total mass " << sum << " is not 1 within " << kPopulationSumTolerance;
    throw std::invalid_argument(msg.str());
  }
}

Index PopulationVector::lowest_occupied() const {
  for (Index i = 0; i < populations_.size(); ++i) {
    if (populations_(i) > 0.0) return i;
  }
  throw std::logic_error("PopulationVector: no occupied level");  // unreachable: mass is 1
}

Index PopulationVector::highest_occupied() const {
  for (Index i = populations_.size() - 1; i >= 0; --i) {
    if (populations_(i) > 0.0) return i;
  }
  throw std::logic_error("PopulationVector: no occupied level");
}

std::optional<Index> PopulationVector::lowest_occupied_excited() const {
  for (Index i = 1; i < populations_.size(); ++i) {
    if (populations_(i) > 0.0) return i;
  }
  return std::nullopt;
}

DistanceFunction::DistanceFunction(Vector weights, DistanceKind kind)
    : weights_(std::move(weights)), kind_(kind) {
  require_finite(weights_, "DistanceFunction");
  if (weights_.size() < 2) {
    throw std::invalid_argument("DistanceFunction: need at least two levels");
  }
  if (weights_(0) != 0.0) {
    throw std::invalid_argument("DistanceFunction: ground weight f(E_0) must be 0");
  }
  if (!(weights_(1) > 0.0)) {
    throw std::invalid_argument("DistanceFunction: first excited weight f(E_1) must be positive");
  }
  for (Index i = 1; i < weights_.size(); ++i) {
    if (weights_(i) < weights_(i - 1)) {
      std::ostringstream msg;
      msg << "DistanceFunction: weights must be nondecreasing, f_" << i - 1 << " = "
          << weights_(i - 1) << " vs f_" << i << " = " << weights_(i);
      throw std::invalid_argument(msg.str());
    }
  }
}

std::pair<EnergySpectrum, std::vector<PopulationVector>>
canonicalize_shared(const Vector& raw_energies, const std::vector<Vector>& raw_populations,
                    Real merge_tolerance) {
  require_finite(raw_energies, "canonicalize_spectrum: energies");
  if (!(merge_tolerance > 0.0) || !std::isfinite(merge_tolerance)) {
    throw std::invalid_argument("canonicalize_spectrum: merge_tolerance must be positive");
  }
  const Index n = raw_energies.size();
  if (n < 2) {
    throw std::invalid_argument("canonicalize_spectrum: need at least two raw levels");
  }
  for (const Vector& p : raw_populations) {
    require_finite(p, "canonicalize_spectrum: populations");
    if (p.size() != n) {
      throw std::invalid_argument("canonicalize_spectrum: populations and energies differ in length");
    }
    if ((p.array() < 0.0).any()) {
      throw std::invalid_argument("canonicalize_spectrum: negative population");
    }
    if (!(p.sum() > 0.0)) {
      throw std::invalid_argument("canonicalize_spectrum: populations are all zero");
    }
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return raw_energies(a) < raw_energies(b); });

  // Chain-merge: a gap <= merge_tolerance joins two sorted neighbours into
  // one multiplet. Each multiplet becomes one canonical level at the mean
  // energy, carrying the summed population.
  std::vector<std::pair<Index, Index>> groups;  // [begin, end) into `order`
  Index begin = 0;
  for (Index k = 1; k < n; ++k) {
    if (raw_energies(order[static_cast<std::size_t>(k)]) -
            raw_energies(order[static_cast<std::size_t>(k - 1)]) > merge_tolerance) {
      groups.emplace_back(begin, k);
      begin = k;
    }
  }
  groups.emplace_back(begin, n);

  const Index m = static_cast<Index>(groups.size());
  if (m < 2) {
    throw std::invalid_argument("canonicalize_spectrum: merge_tolerance collapses the spectrum to a single level");
  }

  Vector energies(m);
  for (Index g = 0; g < m; ++g) {
    Real acc = 0.0;
    for (Index k = groups[static_cast<std::size_t>(g)].first; k < groups[static_cast<std::size_t>(g)].second; ++k) {
      acc += raw_energies(order[static_cast<std::size_t>(k)]);
    }
    energies(g) = acc / static_cast<Real>(groups[static_cast<std::size_t>(g)].second -
                                          groups[static_cast<std::size_t>(g)].first);
  }
  const Real ground = energies(0);
  for (Index g = 0; g < m; ++g) {
    energies(g) -= ground;
  }
  energies(0) = 0.0;  // exact, independent of the shift arithmetic

  std::vector<PopulationVector> out;
  out.reserve(raw_populations.size());
  for (const Vector& p : raw_populations) {
    Vector merged = Vector::Zero(m);
    for (Index g = 0; g < m; ++g) {
      for (Index k = groups[static_cast<std::size_t>(g)].first; k < groups[static_cast<std::size_t>(g)].second; ++k) {
        merged(g) += p(order[static_cast<std::size_t>(k)]);
      }
      if (merged(g) < kPopulationFloor) merged(g) = 0.0;
    }
    const Real sum = merged.sum();
    if (!(sum > 0.0)) {
      throw std::invalid_argument("canonicalize_spectrum: populations are all zero after flooring");
    }
    if (!effectively_normalized(sum, m)) {
      merged /= sum;
    }
    out.emplace_back(std::move(merged));
  }
  return {EnergySpectrum(std::move(energies)), std::move(out)};
}

CanonicalSystem canonicalize_spectrum(const Vector& raw_energies, const Vector& raw_populations,
                                      Real merge_tolerance) {
  auto [spectrum, states] = canonicalize_shared(raw_energies, {raw_populations}, merge_tolerance);
  return CanonicalSystem{std::move(spectrum), std::move(states.front())};
}

DistanceFunction make_distance(const EnergySpectrum& spectrum, DistanceKind kind,
                               const std::optional<Vector>& custom_weights) {
  const Index n = spectrum.level_count();
  switch (kind) {
    case DistanceKind::Infidelity: {
      Vector w = Vector::Ones(n);
      w(0) = 0.0;
      return DistanceFunction(std::move(w), kind);
    }
    case DistanceKind::AverageEnergy:
      return DistanceFunction(spectrum.energies(), kind);
    case DistanceKind::Custom: {
      if (!custom_weights) {
        throw std::invalid_argument("make_distance: custom kind needs explicit weights");
      }
      if (custom_weights->size() != n) {
        throw std::invalid_argument("make_distance: custom weights and spectrum differ in length");
      }
      return DistanceFunction(*custom_weights, kind);
    }
  }
  throw std::invalid_argument("make_distance: unknown kind");
}

}  // namespace qite
