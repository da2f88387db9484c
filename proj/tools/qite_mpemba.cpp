#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "qite/experiment.hpp"

namespace {

namespace fs = std::filesystem;

bool write_file(const fs::path& path, const std::string& content) {
  std::ofstream file(path, std::ios::binary);
  if (!file) return false;
  file << content;
  file.flush();
  return file.good();
}

// Single output: --out names the file, stdout otherwise. Several outputs:
// --out names a directory (created on demand), default the current one.
int write_outputs(const qite::RunResult& result, const std::string& out_path) {
  if (result.outputs.size() == 1) {
    const std::string& content = result.outputs.front().second;
    if (out_path.empty()) {
      std::cout << content;
      return 0;
    }
    if (!write_file(out_path, content)) {
      std::cerr << "error: cannot write output file: " << out_path << '\n';
      return 1;
    }
    std::cerr << "wrote " << out_path << '\n';
    return 0;
  }

  const fs::path dir = out_path.empty() ? fs::path(".") : fs::path(out_path);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    std::cerr << "error: cannot create output directory: " << dir.string() << '\n';
    return 1;
  }
  for (const auto& [name, content] : result.outputs) {
    const fs::path path = dir / name;
    if (!write_file(path, content)) {
      std::cerr << "error: cannot write output file: " << path.string() << '\n';
      return 1;
    }
    std::cerr << "wrote " << path.string() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Imaginary-time relaxation toolkit: trajectories, crossings and certificates"};
  app.get_formatter()->column_width(26);

  std::string mode_name;
  std::string config_path;
  std::string out_path;
  std::string format_name = "csv";
  std::optional<std::uint64_t> seed;

  app.add_option("mode", mode_name,
                 "evolve | crossing | check-mpemba | certificate | general-f | estimate | "
                 "max-accel | collinear | spin-chain | preset")
      ->required();
  app.add_option("--config", config_path,
                 "JSON config file; for mode preset, one of fig2a, fig2b, fig2c, si-fig")
      ->required();
  app.add_option("--out", out_path, "output file, or output directory for multi-file modes");
  app.add_option("--format", format_name, "table format: csv (default) or json")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--seed", seed, "run label echoed into every output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const qite::RunMode mode = qite::parse_mode(mode_name);
    qite::ExperimentConfig config = qite::load_config(mode, config_path);
    config.format =
        format_name == "json" ? qite::OutputFormat::Json : qite::OutputFormat::Csv;
    config.seed = seed;

    const qite::RunResult result = qite::run_experiment(config);
    for (const std::string& warning : result.warnings) {
      std::cerr << "warning: " << warning << '\n';
    }
    return write_outputs(result, out_path);
  } catch (const qite::NotHotterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const qite::InapplicableError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const qite::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
