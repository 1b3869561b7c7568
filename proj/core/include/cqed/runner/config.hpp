#pragma once

// Device configuration files.
//
//   # comment
//   key = value   # trailing comment
//
// Keys are case sensitive and may appear once. Unknown keys are errors.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cqed/device.hpp"
#include "cqed/lindblad/space.hpp"

namespace cqed::runner {

struct ParseIssue {
  int line = 0;
  int column = 0;
  std::string message;
};

struct RawConfig {
  std::string source;  // file name for messages
  std::map<std::string, double> values;
  std::map<std::string, int> lines;  // key -> line number
  std::vector<ParseIssue> issues;
};

RawConfig parse_config_text(const std::string& text, const std::string& source = "<text>");

enum class ValueSource { file, default_value, derived };

const char* source_name(ValueSource s);

struct ResolvedEntry {
  std::string key;
  double value = 0.0;
  ValueSource source = ValueSource::file;
};

struct ConfigReport {
  std::vector<ParseIssue> parse_errors;
  std::vector<Violation> violations;
  std::vector<std::string> warnings;
  std::vector<ResolvedEntry> resolved;  // every parameter, defaults included

  bool valid() const { return parse_errors.empty() && violations.empty(); }
  std::string format() const;
};

struct DeviceConfig {
  DeviceModel device;
  lindblad::HilbertSpace space;
  FluxBias baseline;
  std::vector<ResolvedEntry> resolved;
  std::vector<std::string> warnings;
};

// Full validation: every parse error and invariant violation is collected.
ConfigReport validate_config_text(const std::string& text, const std::string& source = "<text>");

// Throws IoError when the file cannot be read.
ConfigReport validate_config(const std::filesystem::path& path);

// Throws ConfigError carrying the formatted report when invalid.
DeviceConfig load_device_text(const std::string& text, const std::string& source = "<text>");
DeviceConfig load_device(const std::filesystem::path& path);

// Canonical "key = value" text of the resolved parameters, sorted by key.
std::string canonical_text(const std::vector<ResolvedEntry>& resolved);

// Names of all accepted keys.
const std::vector<std::string>& known_keys();

}  // namespace cqed::runner
