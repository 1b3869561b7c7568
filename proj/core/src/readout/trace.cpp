#include "cqed/readout/trace.hpp"

#include <cmath>
#include <complex>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include <Eigen/Dense>
#include <fmt/format.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "cqed/error.hpp"

namespace cqed::readout {

namespace {

using cplx = std::complex<double>;
using Mat4 = Eigen::Matrix<cplx, 4, 4>;
using Vec4 = Eigen::Matrix<cplx, 4, 1>;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Pointer {
  double delta_g;  // rad / ns
  double delta_e;
};

Pointer pointer_detunings(const spectral::DerivedSpectrum& spec, const ReadoutOptions& opt) {
  const double chi = kTwoPi * spec.chi_mhz * 1e-3;
  const double offset = kTwoPi * opt.tone_offset_mhz * 1e-3;
  if (opt.tone_at_midpoint) return {-0.5 * chi - offset, 0.5 * chi - offset};
  return {-offset, chi - offset};
}

// State (x_e, x_g, p_e, p_g): the field carried by each qubit branch and the
// branch populations. Linear, so relaxation mid-window is exact.
Mat4 generator(double kappa, double gamma, const Pointer& d, double amp, bool drive) {
  Mat4 m = Mat4::Zero();
  const double pump = drive ? 0.5 * kappa * amp : 0.0;
  m(0, 0) = cplx(-0.5 * kappa - gamma, -d.delta_e);
  m(0, 2) = pump;
  m(1, 1) = cplx(-0.5 * kappa, -d.delta_g);
  m(1, 0) = gamma;
  m(1, 3) = pump;
  m(2, 2) = -gamma;
  m(3, 2) = gamma;
  return m;
}

SignalTrace synthesize(double p_g, double p_e, const spectral::DerivedSpectrum& spec, double nbar, double duration_ns,
                       std::uint64_t seed, const ReadoutOptions& opt, bool decay) {
  if (!(opt.dt_ns > 0.0)) throw ConfigError("synthesize_trace: dt_ns must be > 0");
  if (!(nbar > 0.0)) throw ConfigError("synthesize_trace: readout_nbar must be > 0");
  if (!(duration_ns > 0.0)) throw ConfigError("synthesize_trace: duration must be > 0");
  if (opt.ensemble < 1) throw ConfigError("synthesize_trace: ensemble must be >= 1");
  if (!(spec.kappa_mhz > 0.0)) throw ConfigError("synthesize_trace: spectrum has no cavity linewidth");

  const double kappa = kTwoPi * spec.kappa_mhz * 1e-3;
  const double gamma = decay && spec.t1_us > 0.0 ? 1.0 / (spec.t1_us * 1e3) : 0.0;
  const Pointer d = pointer_detunings(spec, opt);
  const double amp = std::sqrt(nbar);
  const Mat4 step_on = (generator(kappa, gamma, d, amp, true) * opt.dt_ns).exp();
  const Mat4 step_off = (generator(kappa, gamma, d, amp, false) * opt.dt_ns).exp();

  const auto n_on = static_cast<std::size_t>(std::llround(duration_ns / opt.dt_ns));
  const auto n_off = static_cast<std::size_t>(std::llround(std::max(0.0, opt.ringdown_ns) / opt.dt_ns));

  SignalTrace t;
  t.dt_ns = opt.dt_ns;
  t.role = opt.role;
  t.ensemble = opt.ensemble;
  t.i.reserve(n_on + n_off);
  t.q.reserve(n_on + n_off);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, opt.single_shot_sigma / std::sqrt(static_cast<double>(opt.ensemble)));
  Vec4 s(0.0, 0.0, p_e, p_g);
  for (std::size_t k = 0; k < n_on + n_off; ++k) {
    const cplx v = s(0) + s(1);
    double ni = 0.0, nq = 0.0;
    if (opt.noise) {
      ni = gauss(rng);
      nq = gauss(rng);
    }
    t.i.push_back(v.real() + ni);
    t.q.push_back(v.imag() + nq);
    s = (k < n_on ? step_on : step_off) * s;
  }
  return t;
}

}  // namespace

const char* role_name(TraceRole r) {
  switch (r) {
    case TraceRole::v_g: return "V_g";
    case TraceRole::v_s: return "V_s";
    case TraceRole::v_m: return "V_m";
  }
  return "?";
}

void validate(const SignalTrace& t) {
  if (t.i.size() != t.q.size()) throw ConfigError("signal trace: I and Q arrays differ in length");
  if (!(t.dt_ns > 0.0)) throw ConfigError("signal trace: dt must be > 0");
  if (t.ensemble < 1) throw ConfigError("signal trace: ensemble size must be >= 1");
}

SignalTrace synthesize_trace(const std::vector<double>& populations, const spectral::DerivedSpectrum& spec,
                             double readout_nbar, double duration_ns, std::uint64_t noise_seed,
                             const ReadoutOptions& opt) {
  if (populations.size() != 2) throw ConfigError("synthesize_trace: expected populations {p_g, p_e}");
  for (double p : populations) {
    if (!(p >= 0.0)) throw ConfigError("synthesize_trace: populations must be non-negative");
  }
  if (std::abs(populations[0] + populations[1] - 1.0) > 1e-9) {
    throw ConfigError("synthesize_trace: populations must sum to 1");
  }
  return synthesize(populations[0], populations[1], spec, readout_nbar, duration_ns, noise_seed, opt,
                    opt.include_decay);
}

SignalTrace saturation_reference(const spectral::DerivedSpectrum& spec, double readout_nbar, double duration_ns,
                                 std::uint64_t noise_seed, const ReadoutOptions& opt) {
  ReadoutOptions o = opt;
  o.role = TraceRole::v_s;
  SignalTrace t = synthesize(0.5, 0.5, spec, readout_nbar, duration_ns, noise_seed, o, false);
  return t;
}

void write_trace_csv(std::ostream& os, const SignalTrace& t) {
  validate(t);
  os << "t_ns,i,q\n";
  for (std::size_t k = 0; k < t.size(); ++k) os << fmt::format("{:.10g},{:.17g},{:.17g}\n", t.time(k), t.i[k], t.q[k]);
}

SignalTrace read_trace_csv(std::istream& is, TraceRole role, long ensemble) {
  std::string line;
  if (!std::getline(is, line)) throw IoError("trace csv: empty input");
  if (line.rfind("t_ns,i,q", 0) != 0) throw IoError("trace csv: expected header t_ns,i,q");
  std::vector<double> times;
  SignalTrace t;
  t.role = role;
  t.ensemble = ensemble;
  int row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream ls(line);
    double v[3];
    char comma = 0;
    if (!(ls >> v[0] >> comma >> v[1] >> comma >> v[2])) {
      throw IoError(fmt::format("trace csv: malformed row {}", row));
    }
    times.push_back(v[0]);
    t.i.push_back(v[1]);
    t.q.push_back(v[2]);
  }
  if (times.size() < 2) throw IoError("trace csv: need at least two rows");
  t.t0_ns = times.front();
  t.dt_ns = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (std::abs(times[k] - t.time(k)) > 1e-6 * t.dt_ns) throw IoError("trace csv: time grid is not uniform");
  }
  validate(t);
  return t;
}

std::uint64_t task_seed(std::uint64_t master, std::uint64_t index) {
  // splitmix64 finalizer over the combined key
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace cqed::readout
