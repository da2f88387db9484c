#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qite/types.hpp"

namespace qite {

// Thrown on malformed run configurations. The message names the offending
// field so the user can fix the file without reading source code.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class RunMode {
  Evolve,          // one state, trajectory table
  Crossing,        // hot vs cold, crossing report
  CheckMpemba,     // hot vs cold, asymptotic verdict
  Certificate,     // hot vs cold, infidelity finite-time certificate
  GeneralF,        // hot vs cold, certificate for the configured distance
  Estimate,        // hot vs cold, closed-form crossing estimate
  MaxAcceleration, // relaxation-time advantage at a threshold
  Collinear,       // family sweep + simultaneous crossing
  SpinChain,       // heating protocol on the periodic chain
  Preset,          // canned parameter sets, multiple files
};

RunMode parse_mode(const std::string& name);

enum class OutputFormat { Csv, Json };

struct ExperimentConfig {
  RunMode mode = RunMode::Evolve;
  nlohmann::json fields;                // parsed config file (empty for presets)
  std::string preset_name;              // Preset mode only
  OutputFormat format = OutputFormat::Csv;
  std::optional<std::uint64_t> seed;    // echoed into output headers when given
};

ExperimentConfig load_config(RunMode mode, const std::string& config_path);

struct RunResult {
  // Output files as (suggested file name, content). Single-output modes
  // produce exactly one entry whose name the caller may override.
  std::vector<std::pair<std::string, std::string>> outputs;
  // Human-readable caveats (e.g. an estimate outside its reliable regime);
  // the CLI forwards them to stderr without failing the run.
  std::vector<std::string> warnings;
};

// Executes one run. Throws ConfigError for malformed configs (exit code 1 at
// the CLI) and NotHotterError / InapplicableError when the analysis does not
// apply to the given states (exit code 2).
RunResult run_experiment(const ExperimentConfig& config);

// Worker-pool width for sweep fan-out: QITE_MPEMBA_THREADS when set (>= 1),
// otherwise the machine's hardware concurrency.
int worker_count();

}  // namespace qite
