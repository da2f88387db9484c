#include "qite/serialization.hpp"

#include <cstdio>
#include <sstream>

namespace qite {
namespace {

using nlohmann::json;

void write_comments(std::ostringstream& out, const HeaderComments& comments) {
  for (const std::string& line : comments) {
    out << "# " << line << '\n';
  }
}

json real_array(const std::vector<Real>& values) {
  return json(values);
}

json vector_array(const Vector& values) {
  json arr = json::array();
  for (Index i = 0; i < values.size(); ++i) arr.push_back(values(i));
  return arr;
}

json matrix_rows(const Matrix& m) {
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r) rows.push_back(vector_array(m.row(r).transpose()));
  return rows;
}

}  // namespace

std::string format_real(Real x) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", x);
  return buffer;
}

std::string trajectory_csv(const Trajectory& trajectory, const HeaderComments& comments) {
  std::ostringstream out;
  write_comments(out, comments);
  const Index levels = trajectory.populations.cols();
  out << "tau";
  for (Index i = 0; i < levels; ++i) out << ",p_" << i;
  out << ",distance\n";
  for (std::size_t r = 0; r < trajectory.taus.size(); ++r) {
    out << format_real(trajectory.taus[r]);
    for (Index i = 0; i < levels; ++i) {
      out << ',' << format_real(trajectory.populations(static_cast<Index>(r), i));
    }
    out << ',' << format_real(trajectory.distances[r]) << '\n';
  }
  return out.str();
}

nlohmann::json trajectory_json(const Trajectory& trajectory) {
  return json{{"taus", real_array(trajectory.taus)},
              {"populations", matrix_rows(trajectory.populations)},
              {"distances", real_array(trajectory.distances)}};
}

std::string crossings_csv(const CrossingReport& report, const HeaderComments& comments) {
  std::ostringstream out;
  write_comments(out, comments);
  if (report.truncated_at) {
    out << "# truncated_at = " << format_real(*report.truncated_at) << '\n';
  }
  out << "tau,value\n";
  for (const Crossing& c : report.crossings) {
    out << format_real(c.tau) << ',' << format_real(c.value) << '\n';
  }
  return out.str();
}

nlohmann::json crossings_json(const CrossingReport& report) {
  json crossings = json::array();
  for (const Crossing& c : report.crossings) {
    crossings.push_back(json{{"tau", c.tau}, {"value", c.value}});
  }
  json out{{"crossings", std::move(crossings)}};
  out["truncated_at"] = report.truncated_at ? json(*report.truncated_at) : json(nullptr);
  return out;
}

nlohmann::json verdict_json(const MpembaVerdict& verdict) {
  return json{{"occurs", verdict.occurs},
              {"deciding_level", verdict.deciding_level},
              {"ratio_hot", verdict.ratio_hot},
              {"ratio_cold", verdict.ratio_cold}};
}

nlohmann::json certificate_json(const FiniteTimeCertificate& certificate) {
  json out{{"applicable", certificate.applicable},
           {"epsilon_bound", certificate.epsilon_bound},
           {"tau_tilde_star", certificate.tau_tilde_star},
           {"r_hot", certificate.r_hot},
           {"r_cold", certificate.r_cold},
           {"s_hot", certificate.s_hot},
           {"level", certificate.level}};
  out["a_star"] = certificate.a_star ? json(*certificate.a_star) : json(nullptr);
  out["reason"] = certificate.reason;
  return out;
}

nlohmann::json estimate_json(const CrossingEstimate& estimate) {
  return json{{"tau", estimate.tau},
              {"dispatch_case", estimate.dispatch_case},
              {"log_argument", estimate.log_argument},
              {"reliable", estimate.reliable}};
}

std::string system_csv(const CanonicalSystem& system, const HeaderComments& comments) {
  std::ostringstream out;
  write_comments(out, comments);
  out << "level,energy,population\n";
  for (Index i = 0; i < system.spectrum.level_count(); ++i) {
    out << i << ',' << format_real(system.spectrum.energy(i)) << ','
        << format_real(system.populations[i]) << '\n';
  }
  return out.str();
}

nlohmann::json system_json(const CanonicalSystem& system) {
  return json{{"energies", vector_array(system.spectrum.energies())},
              {"populations", vector_array(system.populations.values())}};
}

std::string isochrone_csv(const IsochroneSweep& sweep, const HeaderComments& comments) {
  std::ostringstream out;
  write_comments(out, comments);
  const Index levels = sweep.populations.cols();
  out << "tau,lambda";
  for (Index i = 0; i < levels; ++i) out << ",p_" << i;
  out << ",distance\n";
  for (std::size_t r = 0; r < sweep.row_tau.size(); ++r) {
    out << format_real(sweep.row_tau[r]) << ',' << format_real(sweep.row_lambda[r]);
    for (Index i = 0; i < levels; ++i) {
      out << ',' << format_real(sweep.populations(static_cast<Index>(r), i));
    }
    out << ',' << format_real(sweep.distances[r]) << '\n';
  }
  return out.str();
}

nlohmann::json isochrone_json(const IsochroneSweep& sweep) {
  return json{{"taus", real_array(sweep.row_tau)},
              {"lambdas", real_array(sweep.row_lambda)},
              {"populations", matrix_rows(sweep.populations)},
              {"distances", real_array(sweep.distances)}};
}

}  // namespace qite
