#include "cqed/pulse/sequence.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "cqed/error.hpp"
#include "cqed/spectral/coupled.hpp"
#include "cqed/spectral/transmon.hpp"

namespace cqed::pulse {

namespace {

constexpr const char* kHeader = "cqed-sequence 1";

std::string num(double x) { return fmt::format("{:.17g}", x); }

double parse_double(const std::string& s, int line) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || s.empty()) {
    throw ConfigError(fmt::format("sequence line {}: bad number '{}'", line, s));
  }
  return v;
}

using Fields = std::vector<std::pair<std::string, std::string>>;

Fields shape_fields(const Shape& s, std::string& name) {
  return std::visit(
      [&name](const auto& x) -> Fields {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, PumpPulse>) {
          name = "pump_pulse";
          return {{"duration_ns", num(x.duration_ns)}, {"freq_ghz", num(x.freq_ghz)}, {"photons", num(x.photons)}};
        } else if constexpr (std::is_same_v<T, GaussEdgeRect>) {
          name = "gauss_edge_rect";
          return {{"length_total_ns", num(x.length_total_ns)}, {"edge_length_ns", num(x.edge_length_ns)},
                  {"edge_sigma_ns", num(x.edge_sigma_ns)},     {"amplitude", num(x.amplitude)},
                  {"carrier_freq_ghz", num(x.carrier_freq_ghz)}, {"phase_rad", num(x.phase_rad)}};
        } else if constexpr (std::is_same_v<T, FluxPulse>) {
          name = "flux_pulse";
          return {{"plateau_length_ns", num(x.plateau_length_ns)},
                  {"edge_sigma_ns", num(x.edge_sigma_ns)},
                  {"amplitude", num(x.amplitude)},
                  {"baseline_phi", num(x.baseline.phi_ratio)}};
        } else {
          name = "measure_pulse";
          return {{"duration_ns", num(x.duration_ns)}, {"freq_ghz", num(x.freq_ghz)}, {"nbar", num(x.nbar)}};
        }
      },
      s);
}

Shape parse_shape(const std::string& name, const std::map<std::string, double>& kv, int line) {
  auto get = [&](const char* key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw ConfigError(fmt::format("sequence line {}: missing field '{}'", line, key));
    return it->second;
  };
  std::size_t expected = 0;
  Shape out;
  if (name == "pump_pulse") {
    out = PumpPulse{get("duration_ns"), get("freq_ghz"), get("photons")};
    expected = 3;
  } else if (name == "gauss_edge_rect") {
    out = GaussEdgeRect{get("length_total_ns"), get("edge_length_ns"), get("edge_sigma_ns"),
                        get("amplitude"),       get("carrier_freq_ghz"), get("phase_rad")};
    expected = 6;
  } else if (name == "flux_pulse") {
    out = FluxPulse{get("plateau_length_ns"), get("edge_sigma_ns"), get("amplitude"), FluxBias{get("baseline_phi")}};
    expected = 4;
  } else if (name == "measure_pulse") {
    out = MeasurePulse{get("duration_ns"), get("freq_ghz"), get("nbar")};
    expected = 3;
  } else {
    throw ConfigError(fmt::format("sequence line {}: unknown shape '{}'", line, name));
  }
  if (kv.size() != expected) throw ConfigError(fmt::format("sequence line {}: unexpected extra fields", line));
  return out;
}

}  // namespace

const char* role_name(Role r) {
  switch (r) {
    case Role::pump: return "pump";
    case Role::control: return "control";
    case Role::flux: return "flux";
    case Role::measure: return "measure";
  }
  return "?";
}

Role role_from_name(const std::string& s) {
  if (s == "pump") return Role::pump;
  if (s == "control") return Role::control;
  if (s == "flux") return Role::flux;
  if (s == "measure") return Role::measure;
  throw ConfigError("unknown segment role '" + s + "'");
}

double PulseSequence::end_ns() const {
  double t = 0.0;
  for (const auto& s : segments) t = std::max(t, s.end_ns());
  return t;
}

const Segment* PulseSequence::find(Role r) const {
  for (const auto& s : segments) {
    if (s.role == r) return &s;
  }
  return nullptr;
}

void validate(const PulseSequence& seq) {
  constexpr double kTimeTol = 1e-9;
  for (const auto& s : seq.segments) {
    if (!(s.start_ns >= 0.0)) throw ConfigError(fmt::format("{} segment starts at negative time", role_name(s.role)));
    std::visit(
        [](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, GaussEdgeRect> || std::is_same_v<T, FluxPulse>) validate(x);
        },
        s.shape);
    if (!(duration_ns(s.shape) >= 0.0)) throw ConfigError("segment has negative duration");
  }
  for (std::size_t i = 0; i < seq.segments.size(); ++i) {
    for (std::size_t j = i + 1; j < seq.segments.size(); ++j) {
      const auto& a = seq.segments[i];
      const auto& b = seq.segments[j];
      if (a.role != b.role) continue;
      if (a.start_ns < b.end_ns() - kTimeTol && b.start_ns < a.end_ns() - kTimeTol) {
        throw ConfigError(fmt::format("overlapping {} segments", role_name(a.role)));
      }
    }
  }
  if (seq.tau_int_ns < 0.0 || seq.tau_d_ns < 0.0) throw ConfigError("tau_d and tau_int must be >= 0");
  if (const Segment* f = seq.find(Role::flux)) {
    const auto& fp = std::get<FluxPulse>(f->shape);
    if (std::abs(fp.plateau_length_ns - seq.tau_int_ns) > kTimeTol) {
      throw ConfigError("tau_int does not match the flux plateau length");
    }
  }
  const Segment* pump = seq.find(Role::pump);
  const Segment* ctrl = seq.find(Role::control);
  if (pump && ctrl && std::abs(ctrl->start_ns - pump->end_ns() - seq.tau_d_ns) > kTimeTol) {
    throw ConfigError("tau_d does not match the pump-to-control gap");
  }
}

Waveform flux_waveform(const PulseSequence& seq, double dt, double t_begin, double t_end) {
  if (!(dt > 0.0) || t_end < t_begin) throw ConfigError("flux_waveform: need dt > 0 and t_end >= t_begin");
  Waveform w;
  w.t0_ns = t_begin;
  w.dt_ns = dt;
  const auto n = static_cast<std::size_t>(std::floor((t_end - t_begin) / dt + 1e-9)) + 1;
  w.values.assign(n, seq.baseline.phi_ratio);
  for (const auto& s : seq.segments) {
    if (s.role != Role::flux) continue;
    const auto& fp = std::get<FluxPulse>(s.shape);
    for (std::size_t k = 0; k < n; ++k) {
      const double t = w.time(k) - s.start_ns;
      if (t >= 0.0 && t <= fp.length_total_ns()) {
        const double step = sample_envelope(fp, t) - fp.baseline.phi_ratio;
        w.values[k] = seq.baseline.phi_ratio + seq.flux_gain * step;
      }
    }
  }
  return w;
}

void write_sequence(std::ostream& os, const PulseSequence& seq) {
  os << kHeader << '\n';
  os << "tau_d_ns " << num(seq.tau_d_ns) << '\n';
  os << "tau_int_ns " << num(seq.tau_int_ns) << '\n';
  os << "baseline_phi " << num(seq.baseline.phi_ratio) << '\n';
  os << "flux_gain " << num(seq.flux_gain) << '\n';
  for (const auto& s : seq.segments) {
    std::string name;
    const Fields f = shape_fields(s.shape, name);
    os << "segment " << role_name(s.role) << ' ' << num(s.start_ns) << ' ' << name;
    for (const auto& [k, v] : f) os << ' ' << k << '=' << v;
    os << '\n';
  }
}

std::string to_text(const PulseSequence& seq) {
  std::ostringstream os;
  write_sequence(os, seq);
  return os.str();
}

PulseSequence read_sequence(std::istream& is) {
  PulseSequence seq;
  std::string line;
  int lineno = 0;
  bool header = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != kHeader) throw ConfigError(fmt::format("sequence line {}: expected '{}'", lineno, kHeader));
      header = true;
      continue;
    }
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "tau_d_ns" || key == "tau_int_ns" || key == "baseline_phi" || key == "flux_gain") {
      std::string v;
      ls >> v;
      const double x = parse_double(v, lineno);
      if (key == "tau_d_ns") seq.tau_d_ns = x;
      else if (key == "tau_int_ns") seq.tau_int_ns = x;
      else if (key == "flux_gain") seq.flux_gain = x;
      else seq.baseline.phi_ratio = x;
    } else if (key == "segment") {
      std::string role, start, shape;
      ls >> role >> start >> shape;
      Segment s;
      s.role = role_from_name(role);
      s.start_ns = parse_double(start, lineno);
      std::map<std::string, double> kv;
      std::string tok;
      while (ls >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) throw ConfigError(fmt::format("sequence line {}: expected key=value", lineno));
        kv[tok.substr(0, eq)] = parse_double(tok.substr(eq + 1), lineno);
      }
      s.shape = parse_shape(shape, kv, lineno);
      seq.segments.push_back(std::move(s));
    } else {
      throw ConfigError(fmt::format("sequence line {}: unknown record '{}'", lineno, key));
    }
  }
  if (!header) throw ConfigError("empty sequence file");
  return seq;
}

PulseSequence from_text(const std::string& s) {
  std::istringstream is(s);
  return read_sequence(is);
}

PulseSequence build_swap_sequence(const DeviceModel& dev, double target_detuning_ghz, double tau_int_ns,
                                  double tau_d_ns, bool with_pump, const SwapOptions& opt) {
  if (tau_int_ns < 0.0 || tau_d_ns < 0.0) throw ConfigError("build_swap_sequence: negative tau");
  if (!(opt.flux_gain > 0.0)) throw ConfigError("build_swap_sequence: flux gain must be > 0");
  const double phi_target = spectral::flux_for_detuning(dev, target_detuning_ghz);
  const double base = spectral::fold_flux(opt.baseline.phi_ratio);

  PulseSequence seq;
  seq.tau_d_ns = tau_d_ns;
  seq.tau_int_ns = tau_int_ns;
  seq.baseline = FluxBias{base};
  seq.flux_gain = opt.flux_gain;

  double t = 0.0;
  if (with_pump) {
    seq.segments.push_back({Role::pump, t, PumpPulse{opt.pump_duration_ns, dev.cavity.omega_bare_ghz, opt.pump_photons}});
    t += opt.pump_duration_ns + tau_d_ns;
  }
  GaussEdgeRect pi = opt.control;
  if (pi.carrier_freq_ghz == 0.0) pi.carrier_freq_ghz = spectral::dressed_qubit_frequency(dev, seq.baseline);
  seq.segments.push_back({Role::control, t, pi});
  t += pi.length_total_ns + opt.settle_ns;

  FluxPulse fp;
  fp.plateau_length_ns = tau_int_ns;
  fp.edge_sigma_ns = opt.flux_edge_sigma_ns;
  fp.amplitude = (phi_target - base) / opt.flux_gain;
  fp.baseline = seq.baseline;
  seq.segments.push_back({Role::flux, t, fp});
  t += fp.length_total_ns() + opt.settle_ns;

  seq.segments.push_back({Role::measure, t, MeasurePulse{opt.measure_duration_ns, dev.cavity.omega_bare_ghz, opt.measure_nbar}});
  validate(seq);
  return seq;
}

}  // namespace cqed::pulse
