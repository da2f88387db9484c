#include "qite/spin_chain.hpp"

#include <Eigen/Eigenvalues>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

namespace qite {
namespace {

void require_finite(Real v, const char* name) {
  if (!std::isfinite(v)) {
    throw std::invalid_argument(std::string("spin_chain: ") + name + " must be finite");
  }
}

}  // namespace

SpinChainSystem::SpinChainSystem(Matrix hamiltonian, int sites)
    : hamiltonian_(std::move(hamiltonian)), sites_(sites) {
  if (sites_ < 2 || sites_ > 12) {
    throw std::invalid_argument("spin_chain: sites must be between 2 and 12 (dense diagonalization)");
  }
  const Index dim = Index{1} << sites_;
  if (hamiltonian_.rows() != dim || hamiltonian_.cols() != dim) {
    std::ostringstream msg;
    msg << "spin_chain: hamiltonian must be " << dim << " x " << dim << " for " << sites_
        << " sites";
    throw std::invalid_argument(msg.str());
  }
  if ((hamiltonian_ - hamiltonian_.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw std::invalid_argument("spin_chain: hamiltonian must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hamiltonian_);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("spin_chain: eigendecomposition failed to converge");
  }
  eigenvalues_ = solver.eigenvalues();
  eigenvectors_ = solver.eigenvectors();
}

SpinChainSystem build_hamiltonian(const SpinChainConfig& config,
                                  std::optional<Real> gamma_override) {
  if (config.sites < 2 || config.sites > 12) {
    throw std::invalid_argument("spin_chain: sites must be between 2 and 12 (dense diagonalization)");
  }
  const Real gamma = gamma_override.value_or(config.gamma);
  require_finite(gamma, "gamma");
  require_finite(config.mu, "mu");

  const int sites = config.sites;
  const Index dim = Index{1} << sites;
  Matrix h = Matrix::Zero(dim, dim);
  for (Index s = 0; s < dim; ++s) {
    const auto bits = static_cast<unsigned long long>(s);
    for (int j = 0; j < sites; ++j) {
      const unsigned long long ma = 1ull << j;
      const unsigned long long mb = 1ull << ((j + 1) % sites);
      const bool a_clear = (bits & ma) == 0;
      const bool b_clear = (bits & mb) == 0;
      const Real za = a_clear ? 1.0 : -1.0;
      const Real zb = b_clear ? 1.0 : -1.0;
      h(s, s) += -config.mu * za * zb;
      // xx flips both bonded spins with weight 1; yy flips the same pair with
      // weight -1 when the spins agree and +1 when they differ.
      const Index t = static_cast<Index>(bits ^ ma ^ mb);
      const Real yy = a_clear == b_clear ? -1.0 : 1.0;
      h(t, s) += -(1.0 + gamma * yy);
    }
  }
  return SpinChainSystem(std::move(h), sites);
}

StateVector::StateVector(Vector amplitudes) : amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() == 0 || !amplitudes_.allFinite()) {
    throw std::invalid_argument("spin_chain: amplitudes must be nonempty and finite");
  }
  if (std::abs(amplitudes_.norm() - 1.0) > 1e-12) {
    throw std::invalid_argument(
        "spin_chain: amplitudes are not unit norm; use StateVector::normalized");
  }
}

StateVector StateVector::normalized(Vector amplitudes) {
  if (amplitudes.size() == 0 || !amplitudes.allFinite()) {
    throw std::invalid_argument("spin_chain: amplitudes must be nonempty and finite");
  }
  const Real norm = amplitudes.norm();
  if (!(norm > 0.0)) {
    throw std::invalid_argument("spin_chain: cannot normalize a zero state");
  }
  return StateVector(amplitudes / norm);
}

StateVector tilted_state(const SpinChainConfig& config) {
  if (config.sites < 2 || config.sites > 12) {
    throw std::invalid_argument("spin_chain: sites must be between 2 and 12 (dense diagonalization)");
  }
  require_finite(config.theta, "theta");
  const Real c = std::cos(0.5 * config.theta);
  const Real s = std::sin(0.5 * config.theta);
  const Index dim = Index{1} << config.sites;
  Vector amplitudes(dim);
  for (Index b = 0; b < dim; ++b) {
    const int flipped = std::popcount(static_cast<unsigned long long>(b));
    amplitudes(b) = std::pow(c, config.sites - flipped) * std::pow(s, flipped);
  }
  return StateVector::normalized(std::move(amplitudes));
}

StateVector imaginary_propagate(const StateVector& state, const SpinChainSystem& system,
                                Real duration, PropagationDirection direction) {
  if (state.dimension() != system.dimension()) {
    throw std::invalid_argument("spin_chain: state and system dimensions differ");
  }
  if (!std::isfinite(duration) || duration < 0.0) {
    throw std::invalid_argument("spin_chain: duration must be finite and nonnegative");
  }
  const Real sign = direction == PropagationDirection::Forward ? -1.0 : 1.0;
  const Vector coeffs = system.eigenvectors().transpose() * state.amplitudes();

  // Shift exponents by the extremal occupied one; every kept term then
  // exponentiates something <= 0.
  Real shift = -std::numeric_limits<Real>::infinity();
  for (Index k = 0; k < coeffs.size(); ++k) {
    if (coeffs(k) != 0.0) {
      shift = std::max(shift, sign * system.eigenvalues()(k) * duration * 0.5);
    }
  }
  Vector weighted = Vector::Zero(coeffs.size());
  for (Index k = 0; k < coeffs.size(); ++k) {
    if (coeffs(k) == 0.0) continue;  // skip: 0 * exp(large) is NaN territory
    weighted(k) = coeffs(k) * std::exp(sign * system.eigenvalues()(k) * duration * 0.5 - shift);
  }
  return StateVector::normalized(system.eigenvectors() * weighted);
}

StateVector prepare_hotter_state(const SpinChainConfig& config, Real gamma0) {
  require_finite(gamma0, "gamma0");
  if (gamma0 == config.gamma) {
    throw std::invalid_argument(
        "spin_chain: heating needs the pre-evolution gamma0 detuned away from gamma");
  }
  require_finite(config.tau_pre, "tau_pre");
  const SpinChainSystem detuned = build_hamiltonian(config, gamma0);
  const SpinChainSystem reference = build_hamiltonian(config);
  StateVector state = tilted_state(config);
  state = imaginary_propagate(state, detuned, config.tau_pre, PropagationDirection::Forward);
  return imaginary_propagate(state, reference, config.tau_pre, PropagationDirection::Backward);
}

CanonicalSystem populations_of(const StateVector& state, const SpinChainSystem& system,
                               Real merge_tolerance) {
  if (state.dimension() != system.dimension()) {
    throw std::invalid_argument("spin_chain: state and system dimensions differ");
  }
  Real tol = merge_tolerance;
  if (!(tol > 0.0)) {
    const Real width = system.spectral_width();
    if (!(width > 0.0)) {
      throw InapplicableError("spin_chain: spectrum has zero width, level populations are trivial");
    }
    tol = 1e-8 * width;
  }
  const Vector coeffs = system.eigenvectors().transpose() * state.amplitudes();
  return canonicalize_spectrum(system.eigenvalues(), coeffs.cwiseAbs2(), tol);
}

}  // namespace qite
