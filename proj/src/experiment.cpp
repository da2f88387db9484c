#include "qite/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <string_view>
#include <thread>

#include "qite/collinearity.hpp"
#include "qite/serialization.hpp"
#include "qite/spin_chain.hpp"

namespace qite {
namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Field access. Every failure names the offending field.

const json& require_field(const json& fields, const char* name) {
  const auto it = fields.find(name);
  if (it == fields.end()) {
    throw ConfigError(std::string("missing required field \"") + name + "\"");
  }
  return *it;
}

Real number_field(const json& fields, const char* name) {
  const json& value = require_field(fields, name);
  if (!value.is_number()) {
    throw ConfigError(std::string("field \"") + name + "\" must be a number");
  }
  const Real x = value.get<Real>();
  if (!std::isfinite(x)) {
    throw ConfigError(std::string("field \"") + name + "\" must be finite");
  }
  return x;
}

Real positive_number_field(const json& fields, const char* name) {
  const Real x = number_field(fields, name);
  if (!(x > 0.0)) {
    throw ConfigError(std::string("field \"") + name + "\" must be positive");
  }
  return x;
}

std::optional<Real> optional_number_field(const json& fields, const char* name) {
  if (!fields.contains(name)) return std::nullopt;
  return number_field(fields, name);
}

int integer_field(const json& fields, const char* name) {
  const json& value = require_field(fields, name);
  if (!value.is_number_integer()) {
    throw ConfigError(std::string("field \"") + name + "\" must be an integer");
  }
  return value.get<int>();
}

Vector array_field(const json& fields, const char* name) {
  const json& value = require_field(fields, name);
  if (!value.is_array() || value.empty()) {
    throw ConfigError(std::string("field \"") + name + "\" must be a nonempty array of numbers");
  }
  Vector out(static_cast<Index>(value.size()));
  Index i = 0;
  for (const json& element : value) {
    if (!element.is_number()) {
      throw ConfigError(std::string("field \"") + name + "\" must be a nonempty array of numbers");
    }
    const Real x = element.get<Real>();
    if (!std::isfinite(x)) {
      throw ConfigError(std::string("field \"") + name + "\" must contain only finite numbers");
    }
    out(i++) = x;
  }
  return out;
}

void reject_unknown(const json& fields, std::initializer_list<std::string_view> allowed,
                    const char* where) {
  for (const auto& item : fields.items()) {
    if (std::find(allowed.begin(), allowed.end(), std::string_view(item.key())) == allowed.end()) {
      throw ConfigError("unknown field \"" + item.key() + "\" for " + where);
    }
  }
}

// ---------------------------------------------------------------------------
// Shared config fragments.

Real merge_tolerance_field(const json& fields) {
  const auto value = optional_number_field(fields, "merge_tolerance");
  if (!value) return 1e-9;
  if (!(*value > 0.0)) {
    throw ConfigError("field \"merge_tolerance\" must be positive");
  }
  return *value;
}

// Canonicalizes "energies" together with the named population arrays; all
// states share one merge plan so their canonical levels stay comparable.
std::pair<EnergySpectrum, std::vector<PopulationVector>> ingest_states(
    const json& fields, std::initializer_list<const char*> state_names) {
  const Vector energies = array_field(fields, "energies");
  std::vector<Vector> raw;
  raw.reserve(state_names.size());
  for (const char* name : state_names) {
    Vector p = array_field(fields, name);
    if (p.size() != energies.size()) {
      throw ConfigError(std::string("field \"") + name + "\" must list one population per energy (got " +
                        std::to_string(p.size()) + ", energies has " +
                        std::to_string(energies.size()) + ")");
    }
    for (Index i = 0; i < p.size(); ++i) {
      if (p(i) < 0.0) {
        throw ConfigError(std::string("field \"") + name + "\" has a negative population at index " +
                          std::to_string(i));
      }
    }
    raw.push_back(std::move(p));
  }
  return canonicalize_shared(energies, raw, merge_tolerance_field(fields));
}

GridSpec grid_field(const json& fields) {
  GridSpec grid;
  const auto it = fields.find("grid");
  if (it == fields.end()) return grid;
  if (!it->is_object()) {
    throw ConfigError("field \"grid\" must be an object");
  }
  reject_unknown(*it, {"spacing", "points", "first_fraction"}, "\"grid\"");
  if (it->contains("spacing")) {
    const json& spacing = (*it)["spacing"];
    if (spacing == "linear") {
      grid.spacing = GridSpec::Spacing::Linear;
    } else if (spacing == "geometric") {
      grid.spacing = GridSpec::Spacing::Geometric;
    } else {
      throw ConfigError("field \"grid.spacing\" must be \"linear\" or \"geometric\"");
    }
  }
  if (it->contains("points")) {
    const json& points = (*it)["points"];
    if (!points.is_number_integer() || points.get<int>() < 2) {
      throw ConfigError("field \"grid.points\" must be an integer >= 2");
    }
    grid.points = points.get<int>();
  }
  if (it->contains("first_fraction")) {
    const json& fraction = (*it)["first_fraction"];
    if (!fraction.is_number()) {
      throw ConfigError("field \"grid.first_fraction\" must be a number in (0, 1)");
    }
    grid.first_fraction = fraction.get<Real>();
    if (!(grid.first_fraction > 0.0) || !(grid.first_fraction < 1.0)) {
      throw ConfigError("field \"grid.first_fraction\" must be a number in (0, 1)");
    }
  }
  return grid;
}

DistanceKind distance_kind_field(const json& fields, bool allow_custom) {
  const auto it = fields.find("distance");
  if (it == fields.end()) return DistanceKind::Infidelity;
  if (!it->is_object()) {
    throw ConfigError("field \"distance\" must be an object with a \"kind\"");
  }
  reject_unknown(*it, {"kind", "weights"}, "\"distance\"");
  const auto kind_it = it->find("kind");
  if (kind_it == it->end()) {
    throw ConfigError("missing required field \"distance.kind\"");
  }
  if (*kind_it == "infidelity") return DistanceKind::Infidelity;
  if (*kind_it == "average-energy") return DistanceKind::AverageEnergy;
  if (*kind_it == "custom") {
    if (!allow_custom) {
      throw ConfigError(
          "field \"distance.kind\" cannot be \"custom\" here: the canonical level count is not "
          "known up front");
    }
    return DistanceKind::Custom;
  }
  throw ConfigError("field \"distance.kind\" must be \"infidelity\", \"average-energy\" or \"custom\"");
}

DistanceFunction distance_field(const json& fields, const EnergySpectrum& spectrum) {
  const DistanceKind kind = distance_kind_field(fields, true);
  const auto it = fields.find("distance");
  if (it != fields.end() && it->contains("weights") && kind != DistanceKind::Custom) {
    throw ConfigError("field \"distance.weights\" only applies to kind \"custom\"");
  }
  if (kind != DistanceKind::Custom) {
    return make_distance(spectrum, kind);
  }
  if (!it->contains("weights")) {
    throw ConfigError("missing required field \"distance.weights\" for kind \"custom\"");
  }
  const Vector weights = array_field(*it, "weights");
  if (weights.size() != spectrum.level_count()) {
    throw ConfigError("field \"distance.weights\" must list one weight per canonical level (" +
                      std::to_string(spectrum.level_count()) + " after merging)");
  }
  return make_distance(spectrum, DistanceKind::Custom, weights);
}

std::string distance_label(DistanceKind kind) {
  switch (kind) {
    case DistanceKind::Infidelity: return "infidelity";
    case DistanceKind::AverageEnergy: return "average-energy";
    case DistanceKind::Custom: return "custom";
  }
  return "custom";
}

// ---------------------------------------------------------------------------
// Output assembly.

struct Emit {
  OutputFormat format = OutputFormat::Csv;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> comments;
};

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

json with_seed(json j, const Emit& emit) {
  if (emit.seed) j["seed"] = *emit.seed;
  return j;
}

void push_table(RunResult& result, const Emit& emit, const std::string& stem, std::string csv,
                json j) {
  if (emit.format == OutputFormat::Csv) {
    result.outputs.emplace_back(stem + ".csv", std::move(csv));
  } else {
    result.outputs.emplace_back(stem + ".json", dump_json(with_seed(std::move(j), emit)));
  }
}

// Scalar results are structured; they are emitted as JSON in either format.
void push_json(RunResult& result, const Emit& emit, const std::string& name, json j) {
  result.outputs.emplace_back(name, dump_json(with_seed(std::move(j), emit)));
}

std::string vector_text(const Vector& v) {
  std::string out;
  for (Index i = 0; i < v.size(); ++i) {
    if (i > 0) out += ' ';
    out += format_real(v(i));
  }
  return out;
}

std::vector<Real> to_std(const Vector& v) {
  return std::vector<Real>(v.data(), v.data() + v.size());
}

// ---------------------------------------------------------------------------
// Mode runners.

RunResult run_evolve(const json& fields, Emit emit) {
  reject_unknown(fields, {"energies", "state", "tau_max", "grid", "distance", "merge_tolerance"},
                 "mode evolve");
  auto [spectrum, states] = ingest_states(fields, {"state"});
  const DistanceFunction df = distance_field(fields, spectrum);
  const Real tau_max = positive_number_field(fields, "tau_max");
  const GridSpec grid = grid_field(fields);
  emit.comments.push_back("distance = " + distance_label(df.kind()));
  emit.comments.push_back("energies = " + vector_text(spectrum.energies()));

  RunResult result;
  const Trajectory trajectory = sample_trajectory(states[0], spectrum, df, tau_max, grid);
  push_table(result, emit, "trajectory", trajectory_csv(trajectory, emit.comments),
             trajectory_json(trajectory));
  return result;
}

RunResult run_crossing(const json& fields, Emit emit) {
  reject_unknown(fields,
                 {"energies", "hot", "cold", "tau_max", "epsilon", "grid", "distance",
                  "merge_tolerance"},
                 "mode crossing");
  auto [spectrum, states] = ingest_states(fields, {"hot", "cold"});
  const DistanceFunction df = distance_field(fields, spectrum);
  const Real tau_max = positive_number_field(fields, "tau_max");
  std::optional<Real> epsilon = optional_number_field(fields, "epsilon");
  if (epsilon && !(*epsilon > 0.0)) {
    throw ConfigError("field \"epsilon\" must be positive");
  }
  const GridSpec grid = grid_field(fields);
  emit.comments.push_back("distance = " + distance_label(df.kind()));
  emit.comments.push_back("energies = " + vector_text(spectrum.energies()));

  RunResult result;
  const CrossingReport report =
      find_crossings(states[0], states[1], spectrum, df, tau_max, epsilon, grid);
  push_table(result, emit, "crossings", crossings_csv(report, emit.comments),
             crossings_json(report));
  return result;
}

RunResult run_check_mpemba(const json& fields, Emit emit) {
  reject_unknown(fields, {"energies", "hot", "cold", "distance", "merge_tolerance"},
                 "mode check-mpemba");
  auto [spectrum, states] = ingest_states(fields, {"hot", "cold"});
  const DistanceFunction df = distance_field(fields, spectrum);

  RunResult result;
  push_json(result, emit, "verdict.json",
            verdict_json(check_mpemba(states[0], states[1], spectrum, df)));
  return result;
}

RunResult run_certificate(const json& fields, Emit emit) {
  reject_unknown(fields, {"energies", "hot", "cold", "epsilon", "merge_tolerance"},
                 "mode certificate");
  auto [spectrum, states] = ingest_states(fields, {"hot", "cold"});
  const Real epsilon = positive_number_field(fields, "epsilon");
  if (!(epsilon < 1.0)) {
    throw ConfigError("field \"epsilon\" must lie in (0, 1) for the infidelity certificate");
  }

  const FiniteTimeCertificate certificate =
      theorem2_certificate(states[0], states[1], spectrum);
  json out = certificate_json(certificate);
  out["epsilon"] = epsilon;
  out["certified"] = certificate.applicable && epsilon < certificate.epsilon_bound;

  RunResult result;
  push_json(result, emit, "certificate.json", std::move(out));
  return result;
}

RunResult run_general_f(const json& fields, Emit emit) {
  reject_unknown(fields, {"energies", "hot", "cold", "epsilon", "distance", "a", "merge_tolerance"},
                 "mode general-f");
  if (!fields.contains("distance")) {
    throw ConfigError("missing required field \"distance\" (general-f certifies a configured distance)");
  }
  auto [spectrum, states] = ingest_states(fields, {"hot", "cold"});
  const DistanceFunction df = distance_field(fields, spectrum);
  const Real epsilon = positive_number_field(fields, "epsilon");
  const std::optional<Real> a = optional_number_field(fields, "a");

  const FiniteTimeCertificate certificate =
      general_f_certificate(states[0], states[1], spectrum, df, a);
  json out = certificate_json(certificate);
  out["epsilon"] = epsilon;
  out["certified"] = certificate.applicable && epsilon < certificate.epsilon_bound;

  RunResult result;
  push_json(result, emit, "certificate.json", std::move(out));
  return result;
}

RunResult run_estimate(const json& fields, Emit emit) {
  reject_unknown(fields, {"energies", "hot", "cold", "merge_tolerance"}, "mode estimate");
  auto [spectrum, states] = ingest_states(fields, {"hot", "cold"});

  const CrossingEstimate estimate =
      estimate_crossing_detailed(states[0], states[1], spectrum);
  RunResult result;
  push_json(result, emit, "estimate.json", estimate_json(estimate));
  if (!estimate.reliable) {
    result.warnings.push_back("crossing estimate: log argument " +
                              format_real(estimate.log_argument) +
                              " is below 2, the closed form is outside its reliable regime");
  }
  return result;
}

RunResult run_max_accel(const json& fields, Emit emit) {
  reject_unknown(fields, {"energies", "cold", "hot", "epsilon", "distance", "merge_tolerance"},
                 "mode max-accel");
  auto [spectrum, states] = ingest_states(fields, {"cold", "hot"});
  const DistanceFunction df = distance_field(fields, spectrum);
  const Real epsilon = positive_number_field(fields, "epsilon");
  if (!(epsilon < 1.0)) {
    throw ConfigError("field \"epsilon\" must lie in (0, 1)");
  }

  const Real advantage = max_acceleration_time(states[0], states[1], spectrum, df, epsilon);
  json out;
  out["epsilon"] = epsilon;
  out["tau_advantage"] = advantage;

  RunResult result;
  push_json(result, emit, "max_acceleration.json", std::move(out));
  return result;
}

RunResult run_collinear(const json& fields, Emit emit) {
  reject_unknown(fields,
                 {"energies", "anchor_a", "anchor_b", "lambdas", "tau_max", "grid", "distance",
                  "merge_tolerance"},
                 "mode collinear");
  auto [spectrum, states] = ingest_states(fields, {"anchor_a", "anchor_b"});
  const DistanceFunction df = distance_field(fields, spectrum);
  const Real tau_max = positive_number_field(fields, "tau_max");
  const GridSpec grid = grid_field(fields);
  const CollinearFamily family(states[0], states[1], to_std(array_field(fields, "lambdas")));
  emit.comments.push_back("distance = " + distance_label(df.kind()));
  emit.comments.push_back("energies = " + vector_text(spectrum.energies()));

  RunResult result;
  const IsochroneSweep sweep = isochrone_sweep(family, spectrum, df, tau_max, grid);
  push_table(result, emit, "isochrones", isochrone_csv(sweep, emit.comments),
             isochrone_json(sweep));

  const std::optional<Crossing> event =
      simultaneous_crossing(family, spectrum, df, tau_max, grid);
  json simultaneous;
  simultaneous["found"] = event.has_value();
  simultaneous["tau"] = event ? json(event->tau) : json(nullptr);
  simultaneous["value"] = event ? json(event->value) : json(nullptr);
  push_json(result, emit, "simultaneous.json", std::move(simultaneous));
  return result;
}

RunResult run_spin_chain(const json& fields, Emit emit) {
  reject_unknown(fields,
                 {"sites", "gamma", "mu", "theta", "tau_pre", "gamma0", "distance",
                  "merge_tolerance"},
                 "mode spin-chain");
  SpinChainConfig config;
  config.sites = integer_field(fields, "sites");
  if (config.sites < 2 || config.sites > 12) {
    throw ConfigError("field \"sites\" must be an integer between 2 and 12");
  }
  config.gamma = number_field(fields, "gamma");
  config.mu = optional_number_field(fields, "mu").value_or(0.0);
  config.theta = number_field(fields, "theta");
  config.tau_pre = number_field(fields, "tau_pre");
  if (config.tau_pre < 0.0) {
    throw ConfigError("field \"tau_pre\" must be nonnegative");
  }
  const Real gamma0 = number_field(fields, "gamma0");
  const DistanceKind kind = distance_kind_field(fields, false);
  Real merge_tolerance = 0.0;  // populations_of picks 1e-8 of the width
  if (fields.contains("merge_tolerance")) {
    merge_tolerance = merge_tolerance_field(fields);
  }

  const SpinChainSystem reference = build_hamiltonian(config);
  const StateVector cold_state = tilted_state(config);
  const StateVector hot_state = prepare_hotter_state(config, gamma0);
  const CanonicalSystem hot = populations_of(hot_state, reference, merge_tolerance);
  const CanonicalSystem cold = populations_of(cold_state, reference, merge_tolerance);

  const DistanceFunction df = make_distance(hot.spectrum, kind);
  const MpembaVerdict verdict =
      check_mpemba(hot.populations, cold.populations, hot.spectrum, df);

  json out;
  out["sites"] = config.sites;
  out["gamma"] = config.gamma;
  out["mu"] = config.mu;
  out["theta"] = config.theta;
  out["tau_pre"] = config.tau_pre;
  out["gamma0"] = gamma0;
  out["ground_energy"] = reference.ground_energy();
  out["level_count"] = hot.spectrum.level_count();
  out["energies"] = system_json(hot)["energies"];
  out["hot_populations"] = system_json(hot)["populations"];
  out["cold_populations"] = system_json(cold)["populations"];
  out["distance"] = distance_label(kind);
  out["verdict"] = verdict_json(verdict);

  RunResult result;
  push_json(result, emit, "spin_chain.json", std::move(out));
  return result;
}

// ---------------------------------------------------------------------------
// Presets: canned parameter sets reproducing the bundled studies.

Vector make_vector(std::initializer_list<Real> values) {
  Vector v(static_cast<Index>(values.size()));
  Index i = 0;
  for (Real x : values) v(i++) = x;
  return v;
}

void preset_trajectory(RunResult& result, const Emit& base, const std::string& stem,
                       const std::string& label, const PopulationVector& state,
                       const EnergySpectrum& spectrum, const DistanceFunction& df,
                       Real tau_max) {
  Emit emit = base;
  emit.comments.push_back("state " + label + " = " + vector_text(state.values()));
  const Trajectory trajectory = sample_trajectory(state, spectrum, df, tau_max);
  push_table(result, emit, stem, trajectory_csv(trajectory, emit.comments),
             trajectory_json(trajectory));
}

void preset_crossings(RunResult& result, const Emit& base, const std::string& stem,
                      const std::string& label, const PopulationVector& hot,
                      const PopulationVector& cold, const EnergySpectrum& spectrum,
                      const DistanceFunction& df, Real tau_max, std::optional<Real> epsilon) {
  Emit emit = base;
  emit.comments.push_back("pair = " + label);
  if (epsilon) emit.comments.push_back("epsilon = " + format_real(*epsilon));
  const CrossingReport report = find_crossings(hot, cold, spectrum, df, tau_max, epsilon);
  push_table(result, emit, stem, crossings_csv(report, emit.comments), crossings_json(report));
}

RunResult run_preset(const std::string& name, const Emit& base_in) {
  RunResult result;
  Emit base = base_in;
  base.comments.push_back("preset = " + name);

  if (name == "fig2a") {
    // Four states over one three-level spectrum, compared by average energy:
    // B starts level with A and relaxes faster from the first instant, B'
    // starts above and overtakes at finite time, B'' overtakes only far
    // beyond the plotted window.
    const Real tau_max = 8.0;
    auto [spectrum, states] = canonicalize_shared(
        make_vector({0.0, 0.2, 0.3}),
        {make_vector({0.35, 0.45, 0.20}), make_vector({0.45, 0.15, 0.40}),
         make_vector({0.36, 0.16, 0.48}), make_vector({0.11, 0.14, 0.75})},
        1e-9);
    const DistanceFunction df = make_distance(spectrum, DistanceKind::AverageEnergy);
    base.comments.push_back("energies = " + vector_text(spectrum.energies()));
    base.comments.push_back("distance = average-energy");
    base.comments.push_back("tau_max = " + format_real(tau_max));
    const char* labels[] = {"A", "B", "Bp", "Bpp"};
    for (std::size_t i = 0; i < 4; ++i) {
      preset_trajectory(result, base, std::string("trajectory_") + labels[i], labels[i],
                        states[i], spectrum, df, tau_max);
    }
    preset_crossings(result, base, "crossings_Bp_vs_A", "hot Bp, cold A", states[2], states[0],
                     spectrum, df, tau_max, std::nullopt);
    return result;
  }

  if (name == "fig2b") {
    // Same spectrum, infidelity distance, threshold 0.05: C overtakes A well
    // before either relaxes; C' would overtake only after A has already
    // reached the threshold, so its report is truncated instead.
    const Real tau_max = 12.0;
    const Real epsilon = 0.05;
    auto [spectrum, states] = canonicalize_shared(
        make_vector({0.0, 0.2, 0.3}),
        {make_vector({0.35, 0.45, 0.20}), make_vector({0.31, 0.16, 0.53}),
         make_vector({0.18, 0.15, 0.67})},
        1e-9);
    const DistanceFunction df = make_distance(spectrum, DistanceKind::Infidelity);
    base.comments.push_back("energies = " + vector_text(spectrum.energies()));
    base.comments.push_back("distance = infidelity");
    base.comments.push_back("tau_max = " + format_real(tau_max));
    const char* labels[] = {"A", "C", "Cp"};
    for (std::size_t i = 0; i < 3; ++i) {
      preset_trajectory(result, base, std::string("trajectory_") + labels[i], labels[i],
                        states[i], spectrum, df, tau_max);
    }
    preset_crossings(result, base, "crossings_C_vs_A", "hot C, cold A", states[1], states[0],
                     spectrum, df, tau_max, epsilon);
    preset_crossings(result, base, "crossings_Cp_vs_A", "hot Cp, cold A", states[2], states[0],
                     spectrum, df, tau_max, epsilon);

    const FiniteTimeCertificate certificate =
        theorem2_certificate(states[1], states[0], spectrum);
    json out = certificate_json(certificate);
    out["epsilon"] = epsilon;
    out["certified"] = certificate.applicable && epsilon < certificate.epsilon_bound;
    push_json(result, base, "certificate.json", std::move(out));
    return result;
  }

  if (name == "fig2c") {
    // Collinear family through A and B': every member pair crosses at one
    // common time under the average-energy distance.
    const Real tau_max = 6.0;
    auto [spectrum, states] = canonicalize_shared(
        make_vector({0.0, 0.2, 0.3}),
        {make_vector({0.35, 0.45, 0.20}), make_vector({0.36, 0.16, 0.48})}, 1e-9);
    const DistanceFunction df = make_distance(spectrum, DistanceKind::AverageEnergy);
    const CollinearFamily family(states[0], states[1],
                                 {-0.6, -0.3, 0.0, 0.35, 0.7, 1.0, 1.3});
    base.comments.push_back("energies = " + vector_text(spectrum.energies()));
    base.comments.push_back("distance = average-energy");
    base.comments.push_back("anchor A = " + vector_text(states[0].values()));
    base.comments.push_back("anchor Bp = " + vector_text(states[1].values()));
    base.comments.push_back("tau_max = " + format_real(tau_max));

    const IsochroneSweep sweep = isochrone_sweep(family, spectrum, df, tau_max);
    push_table(result, base, "isochrones", isochrone_csv(sweep, base.comments),
               isochrone_json(sweep));
    const std::optional<Crossing> event = simultaneous_crossing(family, spectrum, df, tau_max);
    json simultaneous;
    simultaneous["found"] = event.has_value();
    simultaneous["tau"] = event ? json(event->tau) : json(nullptr);
    simultaneous["value"] = event ? json(event->value) : json(nullptr);
    push_json(result, base, "simultaneous.json", std::move(simultaneous));
    return result;
  }

  if (name == "si-fig") {
    // Five-level spectrum, average energy. Pair I shares the lowest occupied
    // excited level; pair II does not, exercising both estimate branches.
    const Real tau_max = 12.0;
    auto [spectrum, states] = canonicalize_shared(
        make_vector({0.0, 0.15, 0.4, 0.65, 0.8}),
        {make_vector({0.05, 0.005, 0.8, 0.05, 0.095}),
         make_vector({0.30, 0.45, 0.05, 0.10, 0.10}),
         make_vector({0.05, 0.0, 0.9, 0.025, 0.025}),
         make_vector({0.40, 0.40, 0.05, 0.05, 0.10})},
        1e-9);
    const DistanceFunction df = make_distance(spectrum, DistanceKind::AverageEnergy);
    base.comments.push_back("energies = " + vector_text(spectrum.energies()));
    base.comments.push_back("distance = average-energy");
    base.comments.push_back("tau_max = " + format_real(tau_max));
    const char* labels[] = {"hot_I", "cold_I", "hot_II", "cold_II"};
    for (std::size_t i = 0; i < 4; ++i) {
      preset_trajectory(result, base, std::string("trajectory_") + labels[i], labels[i],
                        states[i], spectrum, df, tau_max);
    }
    preset_crossings(result, base, "crossings_I", "hot_I vs cold_I", states[0], states[1],
                     spectrum, df, tau_max, std::nullopt);
    preset_crossings(result, base, "crossings_II", "hot_II vs cold_II", states[2], states[3],
                     spectrum, df, tau_max, std::nullopt);
    push_json(result, base, "estimate_I.json",
              estimate_json(estimate_crossing_detailed(states[0], states[1], spectrum)));
    push_json(result, base, "estimate_II.json",
              estimate_json(estimate_crossing_detailed(states[2], states[3], spectrum)));
    return result;
  }

  throw ConfigError("unknown preset \"" + name +
                    "\"; expected fig2a, fig2b, fig2c or si-fig");
}

}  // namespace

RunMode parse_mode(const std::string& name) {
  if (name == "evolve") return RunMode::Evolve;
  if (name == "crossing") return RunMode::Crossing;
  if (name == "check-mpemba") return RunMode::CheckMpemba;
  if (name == "certificate") return RunMode::Certificate;
  if (name == "general-f") return RunMode::GeneralF;
  if (name == "estimate") return RunMode::Estimate;
  if (name == "max-accel") return RunMode::MaxAcceleration;
  if (name == "collinear") return RunMode::Collinear;
  if (name == "spin-chain") return RunMode::SpinChain;
  if (name == "preset") return RunMode::Preset;
  throw ConfigError("unknown mode \"" + name +
                    "\"; expected evolve, crossing, check-mpemba, certificate, general-f, "
                    "estimate, max-accel, collinear, spin-chain or preset");
}

ExperimentConfig load_config(RunMode mode, const std::string& config_path) {
  ExperimentConfig config;
  config.mode = mode;
  if (mode == RunMode::Preset) {
    if (config_path != "fig2a" && config_path != "fig2b" && config_path != "fig2c" &&
        config_path != "si-fig") {
      throw ConfigError("unknown preset \"" + config_path +
                        "\"; expected fig2a, fig2b, fig2c or si-fig");
    }
    config.preset_name = config_path;
    return config;
  }
  std::ifstream in(config_path);
  if (!in) {
    throw ConfigError("cannot open config file: " + config_path);
  }
  try {
    in >> config.fields;
  } catch (const json::parse_error& err) {
    throw ConfigError(std::string("config file is not valid JSON: ") + err.what());
  }
  if (!config.fields.is_object()) {
    throw ConfigError("config root must be a JSON object");
  }
  return config;
}

RunResult run_experiment(const ExperimentConfig& config) {
  Emit emit{config.format, config.seed, {}};
  if (config.mode != RunMode::Preset) {
    const char* names[] = {"evolve",   "crossing",  "check-mpemba", "certificate", "general-f",
                           "estimate", "max-accel", "collinear",    "spin-chain",  "preset"};
    emit.comments.push_back(std::string("mode = ") + names[static_cast<int>(config.mode)]);
  }
  if (config.seed) {
    emit.comments.push_back("seed = " + std::to_string(*config.seed));
  }
  switch (config.mode) {
    case RunMode::Evolve: return run_evolve(config.fields, std::move(emit));
    case RunMode::Crossing: return run_crossing(config.fields, std::move(emit));
    case RunMode::CheckMpemba: return run_check_mpemba(config.fields, std::move(emit));
    case RunMode::Certificate: return run_certificate(config.fields, std::move(emit));
    case RunMode::GeneralF: return run_general_f(config.fields, std::move(emit));
    case RunMode::Estimate: return run_estimate(config.fields, std::move(emit));
    case RunMode::MaxAcceleration: return run_max_accel(config.fields, std::move(emit));
    case RunMode::Collinear: return run_collinear(config.fields, std::move(emit));
    case RunMode::SpinChain: return run_spin_chain(config.fields, std::move(emit));
    case RunMode::Preset: return run_preset(config.preset_name, emit);
  }
  throw std::logic_error("run_experiment: unhandled mode");
}

int worker_count() {
  if (const char* env = std::getenv("QITE_MPEMBA_THREADS")) {
    char* end = nullptr;
    const long value = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || value < 1) {
      throw ConfigError("QITE_MPEMBA_THREADS must be a positive integer");
    }
    return static_cast<int>(std::min<long>(value, 256));
  }
  const unsigned hardware = std::thread::hardware_concurrency();
  return hardware == 0 ? 1 : static_cast<int>(hardware);
}

}  // namespace qite
