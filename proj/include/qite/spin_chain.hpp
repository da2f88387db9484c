#pragma once

#include <optional>

#include "qite/spectrum.hpp"

namespace qite {

// Periodic anisotropic spin chain
//   H = -sum_j (sx_j sx_{j+1} + gamma * sy_j sy_{j+1} + mu * sz_j sz_{j+1}),
// site L+1 identified with site 1. All matrix elements are real. gamma = 1
// conserves total magnetization; detuning gamma away from 1 breaks that
// symmetry, which is what the heating protocol below exploits.
struct SpinChainConfig {
  int sites = 2;        // 2..12 (dense diagonalization)
  Real gamma = 1.0;
  Real mu = 0.0;
  Real theta = 0.0;     // tilt angle of the initial product state
  Real tau_pre = 0.0;   // duration of the heating pre-evolution
};

// Dense Hamiltonian together with its eager eigendecomposition.
class SpinChainSystem {
public:
  SpinChainSystem(Matrix hamiltonian, int sites);

  Index dimension() const { return hamiltonian_.rows(); }
  int sites() const { return sites_; }
  const Matrix& hamiltonian() const { return hamiltonian_; }
  const Vector& eigenvalues() const { return eigenvalues_; }          // ascending
  const Matrix& eigenvectors() const { return eigenvectors_; }        // columns
  Real ground_energy() const { return eigenvalues_(0); }
  Real spectral_width() const { return eigenvalues_(eigenvalues_.size() - 1) - eigenvalues_(0); }

private:
  Matrix hamiltonian_;
  Vector eigenvalues_;
  Matrix eigenvectors_;
  int sites_;
};

SpinChainSystem build_hamiltonian(const SpinChainConfig& config,
                                  std::optional<Real> gamma_override = std::nullopt);

// Real unit-norm amplitude vector over the computational basis.
class StateVector {
public:
  explicit StateVector(Vector amplitudes);      // must already be unit norm
  static StateVector normalized(Vector amplitudes);

  const Vector& amplitudes() const { return amplitudes_; }
  Index dimension() const { return amplitudes_.size(); }

private:
  Vector amplitudes_;
};

enum class PropagationDirection { Forward, Backward };

// Product state with every spin tilted by theta about the y axis,
// amplitudes cos(theta/2)^(L-k) sin(theta/2)^k on basis states with k
// flipped spins.
StateVector tilted_state(const SpinChainConfig& config);

// exp(-H * duration / 2) |state>, renormalized (Backward flips the sign in
// the exponent). Duration t halves here so that level populations pick up
// exactly exp(-E * t); exponents are shifted by their extremal value before
// exponentiation to keep large durations finite.
StateVector imaginary_propagate(const StateVector& state, const SpinChainSystem& system,
                                Real duration, PropagationDirection direction);

// Heating protocol: tilt, evolve forward under the detuned chain
// (gamma = gamma0), then backward under the reference chain (config.gamma)
// for the same duration. The result has the same energy profile shape but a
// suppressed first-excited-to-ground ratio, i.e. it is hotter yet relaxes
// faster under the reference chain.
StateVector prepare_hotter_state(const SpinChainConfig& config, Real gamma0);

// Level populations |<E_k|state>|^2 with degenerate multiplets merged and
// the spectrum shifted to a zero ground energy. merge_tolerance <= 0 selects
// 1e-8 of the spectral width.
CanonicalSystem populations_of(const StateVector& state, const SpinChainSystem& system,
                               Real merge_tolerance = 0.0);

}  // namespace qite
