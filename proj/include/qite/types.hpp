#pragma once

#include <Eigen/Dense>
#include <stdexcept>

namespace qite {

using Real = double;
using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Populations this small are treated as exactly unoccupied. Keeps ratios and
// exponent shifts well defined long before double underflow kicks in.
inline constexpr Real kPopulationFloor = 1e-300;

// Distances below this are indistinguishable from the relaxed state and are
// reported as zero.
inline constexpr Real kDistanceFloor = 1e-15;

// Tolerance on the total mass of a population vector.
inline constexpr Real kPopulationSumTolerance = 1e-12;

// Relative tolerance used when two population ratios count as equal.
inline constexpr Real kRatioTolerance = 1e-12;

// Thrown by two-state analyses when the pair arrives in the wrong order,
// i.e. the designated hot state is in fact the colder one. Distinct from
// invalid_argument so callers can swap the arguments and retry.
class NotHotterError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Thrown when a closed-form analysis does not cover the given states (wrong
// occupation pattern, early-time crossing, ...). The inputs are well formed;
// the method simply does not apply to them.
class InapplicableError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace qite
