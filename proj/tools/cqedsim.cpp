// cqedsim: runs the named simulation scenarios from the command line.

#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "cqed/error.hpp"
#include "cqed/runner/config.hpp"
#include "cqed/runner/scenario.hpp"
#include "cqed/version.hpp"

namespace {

int exit_code(const cqed::Error& e) { return static_cast<int>(e.error_class()); }

int run_validate(const std::string& path) {
  const cqed::runner::ConfigReport rep = cqed::runner::validate_config(path);
  std::cout << rep.format();
  return rep.valid() ? 0 : static_cast<int>(cqed::ErrorClass::config);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pulse-level simulator for a flux-tunable transmon coupled to a cavity"};
  app.require_subcommand(0, 1);
  bool show_version = false;
  app.add_flag("--version", show_version, "Print code and contract version");

  std::string validate_path;
  CLI::App* validate = app.add_subcommand("validate", "Validate a device configuration file");
  validate->add_option("file", validate_path, "Device file")->required();

  struct ScenarioArgs {
    std::string device;
    std::string out = "out";
    std::uint64_t seed = 1;
    std::vector<std::string> grids;
    std::optional<double> f3db;
    bool precompensate = false;
    bool no_plots = false;
    std::string label;
  };
  std::map<std::string, ScenarioArgs> args;
  std::map<std::string, CLI::App*> subs;
  for (const auto& name : cqed::runner::scenario_names()) {
    ScenarioArgs& a = args[name];
    CLI::App* s = app.add_subcommand(name, fmt::format("Run the {} scenario", name));
    s->add_option("--device", a.device, "Device file")->required();
    s->add_option("--out", a.out, "Output root directory")->capture_default_str();
    s->add_option("--seed", a.seed, "Master random seed")->capture_default_str();
    s->add_option("--grid", a.grids, "Sweep override name=start:stop:count (repeatable)");
    s->add_option("--filter-f3db", a.f3db, "Flux-line -3 dB bandwidth in MHz (swap-chevron)");
    s->add_flag("--precompensate", a.precompensate, "Invert the flux-line filter before applying it (swap-chevron)");
    s->add_flag("--no-plots", a.no_plots, "Skip SVG plots");
    s->add_option("--label", a.label, "Run directory name instead of a UTC timestamp");
    subs[name] = s;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(cqed::ErrorClass::config);
  }

  if (show_version) {
    std::cout << fmt::format("cqedsim {} (contract {})\n", cqed::kVersion, cqed::kContractVersion);
    return 0;
  }

  try {
    if (validate->parsed()) return run_validate(validate_path);
    for (const auto& [name, sub] : subs) {
      if (!sub->parsed()) continue;
      const ScenarioArgs& a = args[name];
      cqed::runner::ScenarioConfig cfg;
      cfg.name = name;
      cfg.device_path = a.device;
      cfg.out_dir = a.out;
      cfg.seed = a.seed;
      cfg.plots = !a.no_plots;
      cfg.precompensate = a.precompensate;
      cfg.run_label = a.label;
      cfg.filter_f3db_mhz = a.f3db;
      for (const auto& g : a.grids) {
        const auto eq = g.find('=');
        if (eq == std::string::npos) throw cqed::ConfigError(fmt::format("--grid '{}': expected name=start:stop:count", g));
        cfg.grids[g.substr(0, eq)] = cqed::runner::parse_grid(g.substr(eq + 1));
      }
      const cqed::runner::RunManifest m = cqed::runner::run_scenario(cfg);
      for (const auto& w : m.warnings) std::cerr << "warning: " << w << "\n";
      std::cout << fmt::format("{}: {} files in {} ({:.2f} s)\n", name, m.files.size(), m.run_dir.string(),
                               m.total_seconds);
      return 0;
    }
    std::cout << app.help();
    return static_cast<int>(cqed::ErrorClass::config);
  } catch (const cqed::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(cqed::ErrorClass::numeric);
  }
}
