#pragma once

// Named end-to-end pipelines writing CSV, optional SVG plots and a manifest.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cqed::runner {

struct Grid {
  double start = 0.0;
  double stop = 0.0;
  int count = 1;

  std::vector<double> values() const;
};

// "a:b:n" -> Grid. Throws ConfigError.
Grid parse_grid(const std::string& text);

const std::vector<std::string>& scenario_names();

struct ScenarioConfig {
  std::string name;
  std::filesystem::path device_path;
  std::filesystem::path out_dir = "out";
  std::uint64_t seed = 1;
  std::map<std::string, Grid> grids;  // overrides of the scenario defaults
  std::optional<double> filter_f3db_mhz;
  bool precompensate = false;
  bool plots = true;
  // Run directory name under <out>/<scenario>/; a UTC timestamp when empty.
  std::string run_label;
};

struct ManifestFile {
  std::string path;    // relative to the run directory
  std::string sha256;  // empty for the manifest itself
  std::uintmax_t bytes = 0;
};

struct RunManifest {
  std::string scenario;
  std::string version;
  std::string contract_version;
  std::string config_hash;  // SHA-256 of the canonical resolved configuration
  std::uint64_t seed = 0;
  std::filesystem::path run_dir;
  std::vector<ManifestFile> files;
  std::vector<std::pair<std::string, double>> timings_s;
  std::vector<std::pair<std::string, std::string>> parameters;  // every resolved parameter
  std::vector<std::string> warnings;
  double total_seconds = 0.0;
};

// Names every violation (unknown scenario, bad grid names or bounds,
// unwritable output). Empty when the configuration can run.
std::vector<std::string> check_scenario(const ScenarioConfig& cfg);

// Runs the pipeline and writes manifest.json last. Errors from the modules
// are rethrown with the scenario name prepended, keeping their class.
RunManifest run_scenario(const ScenarioConfig& cfg);

// Hex SHA-256 of a file or a byte string.
std::string sha256_file(const std::filesystem::path& p);
std::string sha256_hex(const std::string& bytes);

}  // namespace cqed::runner
