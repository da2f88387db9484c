#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "qite/collinearity.hpp"
#include "qite/mpemba.hpp"

namespace qite {

// One double, 17 significant digits: enough to round-trip exactly, and the
// same text on every run and platform for a given value.
std::string format_real(Real x);

// Comment lines ("# ...") placed above the CSV header. Keep them free of
// timestamps or machine specifics so outputs stay byte-identical.
using HeaderComments = std::vector<std::string>;

// Trajectory table: tau,p_0,...,p_{n-1},distance.
std::string trajectory_csv(const Trajectory& trajectory, const HeaderComments& comments = {});
nlohmann::json trajectory_json(const Trajectory& trajectory);

// Crossing table: tau,value (+ "# truncated_at = ..." comment when set).
std::string crossings_csv(const CrossingReport& report, const HeaderComments& comments = {});
nlohmann::json crossings_json(const CrossingReport& report);

nlohmann::json verdict_json(const MpembaVerdict& verdict);
nlohmann::json certificate_json(const FiniteTimeCertificate& certificate);
nlohmann::json estimate_json(const CrossingEstimate& estimate);

// Canonical spectrum + populations: level,energy,population. The JSON form
// {"energies": [...], "populations": [...]} re-ingests as a config fragment.
std::string system_csv(const CanonicalSystem& system, const HeaderComments& comments = {});
nlohmann::json system_json(const CanonicalSystem& system);

// Isochrone table: tau,lambda,p_0,...,p_{n-1},distance.
std::string isochrone_csv(const IsochroneSweep& sweep, const HeaderComments& comments = {});
nlohmann::json isochrone_json(const IsochroneSweep& sweep);

}  // namespace qite
