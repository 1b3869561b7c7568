#include "cqed/runner/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include <boost/math/tools/roots.hpp>
#include <fmt/format.h>

#include "cqed/error.hpp"
#include "cqed/spectral/transmon.hpp"

namespace cqed::runner {

namespace {

struct KeySpec {
  const char* key;
  std::optional<double> fallback;  // empty: required or derived
  bool integer;
};

const std::vector<KeySpec>& key_specs() {
  static const std::vector<KeySpec> specs = {
      {"ej_max_ghz", std::nullopt, false}, {"ec_ghz", std::nullopt, false},
      {"f01_ghz", std::nullopt, false},    {"alpha_q_mhz", std::nullopt, false},
      {"asym", 0.0, false},                {"ng", 0.0, false},
      {"n_cut", 30.0, true},               {"omega_c_ghz", std::nullopt, false},
      {"kappa_mhz", std::nullopt, false},  {"g_mhz", std::nullopt, false},
      {"t1_us", std::nullopt, false},      {"gamma_phi_mhz", 0.0, false},
      {"n_cav_cut", 6.0, true},            {"n_q", 3.0, true},
      {"n_c", 5.0, true},                  {"baseline_phi", 0.0, false},
  };
  return specs;
}

const KeySpec* find_spec(const std::string& key) {
  for (const auto& s : key_specs()) {
    if (key == s.key) return &s;
  }
  return nullptr;
}

std::string trim(const std::string& s, std::size_t& offset) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) {
    offset = s.size();
    return {};
  }
  std::size_t e = s.find_last_not_of(" \t\r");
  offset = b;
  return s.substr(b, e - b + 1);
}

// E_C giving the requested f01 at fixed E_J (or the reverse), at zero flux.
double solve_for_f01(double f01, double fixed, bool solve_ec, const TransmonParams& p) {
  auto f = [&](double x) {
    const double ej = solve_ec ? fixed : x;
    const double ec = solve_ec ? x : fixed;
    return spectral::observables(ej, ec, p.ng, p.n_cut).f01_ghz - f01;
  };
  // f01 rises with both energies in the transmon regime.
  double lo = solve_ec ? 1e-4 * f01 : 0.5 * f01;
  double hi = solve_ec ? 0.5 * f01 : 1e3 * f01;
  double flo = f(lo), fhi = f(hi);
  if (flo * fhi > 0.0) throw ConvergenceError("no solution bracketed for f01", std::min(std::abs(flo), std::abs(fhi)));
  std::uintmax_t it = 200;
  auto [a, b] = boost::math::tools::toms748_solve(
      f, lo, hi, flo, fhi, [](double u, double v) { return std::abs(u - v) < 1e-13 * std::max(1.0, std::abs(u)); },
      it);
  return 0.5 * (a + b);
}

struct Resolution {
  ConfigReport report;
  DeviceConfig config;
};

Resolution resolve(const RawConfig& raw) {
  Resolution r;
  ConfigReport& rep = r.report;
  rep.parse_errors = raw.issues;

  auto has = [&](const char* k) { return raw.values.count(k) > 0; };
  auto get = [&](const char* k) -> double {
    if (has(k)) return raw.values.at(k);
    const KeySpec* s = find_spec(k);
    return s && s->fallback ? *s->fallback : std::nan("");
  };
  auto record = [&](const char* k, double v, ValueSource src) { rep.resolved.push_back({k, v, src}); };

  for (const auto& s : key_specs()) {
    const std::string k = s.key;
    if (has(s.key)) {
      const double v = raw.values.at(k);
      if (s.integer && v != std::floor(v)) rep.violations.push_back({k, "must be an integer"});
    } else if (s.fallback) {
      record(s.key, *s.fallback, ValueSource::default_value);
    }
  }
  for (const char* k : {"omega_c_ghz", "kappa_mhz", "g_mhz", "t1_us"}) {
    if (!has(k)) rep.violations.push_back({k, "required"});
  }

  DeviceModel dev;
  dev.transmon.asym = get("asym");
  dev.transmon.ng = get("ng");
  dev.transmon.n_cut = static_cast<int>(get("n_cut"));
  dev.cavity.omega_bare_ghz = get("omega_c_ghz");
  dev.cavity.kappa_mhz = get("kappa_mhz");
  dev.cavity.n_cav_cut = static_cast<int>(get("n_cav_cut"));
  dev.coupling.g_mhz = get("g_mhz");
  dev.dissipation.t1_q_us = get("t1_us");
  dev.dissipation.kappa_mhz = dev.cavity.kappa_mhz;
  dev.dissipation.gamma_phi_mhz = get("gamma_phi_mhz");

  // Transmon energies: explicit, or derived from the measured transition.
  const bool ej_in = has("ej_max_ghz"), ec_in = has("ec_ghz");
  const bool f01_in = has("f01_ghz"), alpha_in = has("alpha_q_mhz");
  bool transmon_ok = true;
  try {
    if (ej_in && ec_in) {
      dev.transmon.ej_max_ghz = get("ej_max_ghz");
      dev.transmon.ec_ghz = get("ec_ghz");
    } else if (ej_in || ec_in) {
      if (!f01_in) {
        rep.violations.push_back({ej_in ? "ec_ghz" : "ej_max_ghz", "required unless f01_ghz is given"});
        transmon_ok = false;
      } else if (ej_in) {
        dev.transmon.ej_max_ghz = get("ej_max_ghz");
        dev.transmon.ec_ghz = solve_for_f01(get("f01_ghz"), dev.transmon.ej_max_ghz, true, dev.transmon);
        record("ec_ghz", dev.transmon.ec_ghz, ValueSource::derived);
      } else {
        dev.transmon.ec_ghz = get("ec_ghz");
        dev.transmon.ej_max_ghz = solve_for_f01(get("f01_ghz"), dev.transmon.ec_ghz, false, dev.transmon);
        record("ej_max_ghz", dev.transmon.ej_max_ghz, ValueSource::derived);
      }
    } else if (f01_in && alpha_in) {
      spectral::Calibration cal =
          spectral::calibrate_from_observables(get("f01_ghz"), get("alpha_q_mhz"), dev.transmon.n_cut);
      dev.transmon.ej_max_ghz = cal.ej_ghz;
      dev.transmon.ec_ghz = cal.ec_ghz;
      record("ej_max_ghz", cal.ej_ghz, ValueSource::derived);
      record("ec_ghz", cal.ec_ghz, ValueSource::derived);
    } else {
      rep.violations.push_back({"ej_max_ghz", "give ej_max_ghz and ec_ghz, or f01_ghz and alpha_q_mhz"});
      transmon_ok = false;
    }
  } catch (const Error& e) {
    rep.violations.push_back({"f01_ghz", std::string("transmon energies could not be derived: ") + e.what()});
    transmon_ok = false;
  }

  if (transmon_ok && dev.transmon.ej_max_ghz > 0.0 && dev.transmon.ec_ghz > 0.0 && dev.transmon.n_cut >= 1) {
    const auto obs = spectral::observables(dev.transmon.ej_max_ghz, dev.transmon.ec_ghz, dev.transmon.ng,
                                           dev.transmon.n_cut);
    if (!f01_in) record("f01_ghz", obs.f01_ghz, ValueSource::derived);
    if (!alpha_in) record("alpha_q_mhz", obs.alpha_mhz, ValueSource::derived);
    if (f01_in && std::abs(obs.f01_ghz - get("f01_ghz")) > 1e-3) {
      rep.warnings.push_back(fmt::format("f01_ghz = {} but the transmon energies give {:.6f} GHz", get("f01_ghz"),
                                         obs.f01_ghz));
    }
    if (alpha_in && std::abs(obs.alpha_mhz - get("alpha_q_mhz")) > 1.0) {
      rep.warnings.push_back(fmt::format("alpha_q_mhz = {} but the transmon energies give {:.3f} MHz",
                                         get("alpha_q_mhz"), obs.alpha_mhz));
    }
  }

  for (auto&& v : check_invariants(dev)) {
    // Transmon energy problems were already explained above.
    if (!transmon_ok && (v.field == "ej_max_ghz" || v.field == "ec_ghz")) continue;
    const bool seen = std::any_of(rep.violations.begin(), rep.violations.end(),
                                  [&](const Violation& x) { return x.field == v.field; });
    if (!seen) rep.violations.push_back(v);
  }

  lindblad::HilbertSpace space{static_cast<int>(get("n_q")), static_cast<int>(get("n_c"))};
  if (space.n_q < 2) rep.violations.push_back({"n_q", "must be >= 2"});
  if (space.n_c < 2) rep.violations.push_back({"n_c", "must be >= 2"});
  if (space.n_q >= 2 && space.n_c >= 2 && space.dim() > space.max_dim) {
    rep.violations.push_back({"n_q", fmt::format("n_q * n_c must not exceed {}", space.max_dim)});
  }
  const double baseline = get("baseline_phi");
  if (!std::isfinite(baseline)) rep.violations.push_back({"baseline_phi", "must be finite"});

  if (rep.violations.empty()) {
    for (auto&& w : device_warnings(dev)) rep.warnings.push_back(w);
  }
  for (const auto& [k, v] : raw.values) {
    if (find_spec(k)) record(find_spec(k)->key, v, ValueSource::file);
  }
  std::sort(rep.resolved.begin(), rep.resolved.end(),
            [](const ResolvedEntry& a, const ResolvedEntry& b) { return a.key < b.key; });

  r.config.device = dev;
  r.config.space = space;
  r.config.baseline = FluxBias{baseline};
  r.config.resolved = rep.resolved;
  r.config.warnings = rep.warnings;
  return r;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot read '{}'", path.string()));
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

const char* source_name(ValueSource s) {
  switch (s) {
    case ValueSource::file: return "file";
    case ValueSource::default_value: return "default";
    case ValueSource::derived: return "derived";
  }
  return "?";
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& s : key_specs()) k.emplace_back(s.key);
    return k;
  }();
  return keys;
}

RawConfig parse_config_text(const std::string& text, const std::string& source) {
  RawConfig raw;
  raw.source = source;
  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string body = line.substr(0, line.find('#'));
    std::size_t off = 0;
    if (trim(body, off).empty()) continue;
    const std::size_t eq = body.find('=');
    if (eq == std::string::npos) {
      raw.issues.push_back({line_no, static_cast<int>(off) + 1, "expected 'key = value'"});
      continue;
    }
    std::size_t key_off = 0, val_off = 0;
    const std::string key = trim(body.substr(0, eq), key_off);
    const std::string val = trim(body.substr(eq + 1), val_off);
    const int key_col = static_cast<int>(key_off) + 1;
    const int val_col = static_cast<int>(eq + 1 + val_off) + 1;
    if (key.empty()) {
      raw.issues.push_back({line_no, static_cast<int>(eq) + 1, "missing key before '='"});
      continue;
    }
    const KeySpec* spec = find_spec(key);
    if (!spec) {
      raw.issues.push_back({line_no, key_col, fmt::format("unknown key '{}'", key)});
      continue;
    }
    if (val.empty()) {
      raw.issues.push_back({line_no, val_col, fmt::format("missing value for '{}'", key)});
      continue;
    }
    double v = 0.0;
    const char* first = val.data();
    const char* last = val.data() + val.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
      const int col = val_col + static_cast<int>(ec == std::errc() ? ptr - first : 0);
      raw.issues.push_back({line_no, col, fmt::format("'{}' is not a finite number", val)});
      continue;
    }
    if (raw.values.count(key)) {
      raw.issues.push_back(
          {line_no, key_col, fmt::format("duplicate key '{}' (first set on line {})", key, raw.lines[key])});
      continue;
    }
    raw.values[key] = v;
    raw.lines[key] = line_no;
  }
  return raw;
}

std::string ConfigReport::format() const {
  std::ostringstream os;
  for (const auto& p : parse_errors) os << fmt::format("error: line {}, column {}: {}\n", p.line, p.column, p.message);
  for (const auto& v : violations) os << fmt::format("error: {}: {}\n", v.field, v.reason);
  for (const auto& w : warnings) os << "warning: " << w << "\n";
  if (valid()) {
    os << "valid\n";
    for (const auto& e : resolved) os << fmt::format("  {} = {:.10g} ({})\n", e.key, e.value, source_name(e.source));
  }
  return os.str();
}

ConfigReport validate_config_text(const std::string& text, const std::string& source) {
  return resolve(parse_config_text(text, source)).report;
}

ConfigReport validate_config(const std::filesystem::path& path) {
  return validate_config_text(read_file(path), path.string());
}

DeviceConfig load_device_text(const std::string& text, const std::string& source) {
  Resolution r = resolve(parse_config_text(text, source));
  if (!r.report.valid()) throw ConfigError(fmt::format("{}: invalid device config\n{}", source, r.report.format()));
  return r.config;
}

DeviceConfig load_device(const std::filesystem::path& path) { return load_device_text(read_file(path), path.string()); }

std::string canonical_text(const std::vector<ResolvedEntry>& resolved) {
  std::vector<ResolvedEntry> sorted = resolved;
  std::sort(sorted.begin(), sorted.end(), [](const ResolvedEntry& a, const ResolvedEntry& b) { return a.key < b.key; });
  std::string out;
  for (const auto& e : sorted) out += fmt::format("{} = {:.17g}\n", e.key, e.value);
  return out;
}

}  // namespace cqed::runner
