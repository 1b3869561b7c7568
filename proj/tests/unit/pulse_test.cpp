#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cqed/device.hpp"
#include "cqed/error.hpp"
#include "cqed/pulse/filter.hpp"
#include "cqed/pulse/sequence.hpp"
#include "cqed/pulse/shapes.hpp"
#include "cqed/spectral/transmon.hpp"

#include "approx.hpp"

using namespace cqed;
using namespace cqed::pulse;

namespace {

Waveform box(double t_on, double width, double amp, double dt, double t_end) {
  Waveform w{0.0, dt, {}};
  const auto n = static_cast<std::size_t>(std::llround(t_end / dt)) + 1;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = w.time(k);
    w.values.push_back(t > t_on + 1e-12 && t <= t_on + width + 1e-12 ? amp : 0.0);
  }
  return w;
}

double crossing(const Waveform& w, double level) {
  for (std::size_t k = 1; k < w.values.size(); ++k) {
    if (w.values[k - 1] < level && w.values[k] >= level) {
      const double u = (level - w.values[k - 1]) / (w.values[k] - w.values[k - 1]);
      return w.time(k - 1) + u * w.dt_ns;
    }
  }
  return NAN;
}

double sum(const Waveform& w) {
  double s = 0.0;
  for (double v : w.values) s += v;
  return s * w.dt_ns;
}

}  // namespace

TEST_CASE("GaussEdgeRect envelope") {
  const GaussEdgeRect p{35.0, 10.0, 3.0, 1.0, 0.0, 0.0};
  CHECK(sample_envelope(p, 17.5) == 1.0);
  CHECK(sample_envelope(p, -0.1) == 0.0);
  CHECK(sample_envelope(p, 35.1) == 0.0);
  double peak = 0.0;
  for (int k = 0; k <= 3500; ++k) {
    const double v = sample_envelope(p, 0.01 * k);
    CHECK(v >= 0.0);
    peak = std::max(peak, v);
  }
  CHECK(peak <= 1.0);
  // Composite Simpson on a fine grid as the area oracle.
  const int n = 35000;
  const double h = 35.0 / n;
  double s = sample_envelope(p, 0.0) + sample_envelope(p, 35.0);
  for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * sample_envelope(p, k * h);
  CHECK(envelope_area(p) == rel_approx(s * h / 3.0, 1e-6));
  CHECK_THROWS_AS(validate(GaussEdgeRect{10.0, 6.0, 1.0, 1.0, 0.0, 0.0}), ConfigError);
  CHECK_THROWS_AS(validate(GaussEdgeRect{10.0, 2.0, 0.0, 1.0, 0.0, 0.0}), ConfigError);
}

TEST_CASE("flux pulse edges are monotone and stay at baseline outside") {
  const FluxPulse p{20.0, 1.1, 0.2, {0.05}};
  CHECK(p.edge_span_ns() == rel_approx(kFluxEdgeSigmas * 1.1));
  CHECK(sample_envelope(p, -1.0) == 0.05);
  CHECK(sample_envelope(p, p.length_total_ns() + 1.0) == 0.05);
  CHECK(sample_envelope(p, p.edge_span_ns() + 10.0) == rel_approx(0.25));
  double prev = sample_envelope(p, 0.0);
  for (double t = 0.01; t <= p.edge_span_ns(); t += 0.01) {
    const double v = sample_envelope(p, t);
    CHECK(v >= prev);
    prev = v;
  }
  const double fall0 = p.edge_span_ns() + p.plateau_length_ns;
  prev = sample_envelope(p, fall0);
  for (double t = fall0 + 0.01; t <= p.length_total_ns(); t += 0.01) {
    const double v = sample_envelope(p, t);
    CHECK(v <= prev);
    prev = v;
  }
  CHECK_THROWS_AS(validate(FluxPulse{-1.0, 1.1, 0.1, {}}), ConfigError);
  CHECK_THROWS_AS(validate(FluxPulse{1.0, 0.0, 0.1, {}}), ConfigError);
}

TEST_CASE("first-order step response rise time") {
  const LineFilter f{100.0, 1};
  const auto y = apply_line_filter(box(5.0, 1000.0, 1.0, 0.01, 60.0), f);
  const double rise = crossing(y, 0.9) - crossing(y, 0.1);
  const double analytic = std::log(9.0) / (2.0 * std::numbers::pi * f.f3db_mhz * 1e-3);
  CHECK(analytic == rel_approx(3.5, 0.01));
  CHECK(rise == rel_approx(analytic, 0.05));
  CHECK(rise == rel_approx(analytic, 5e-3));
}

TEST_CASE("DC gain is one") {
  Waveform w{0.0, 0.1, std::vector<double>(400, 0.37)};
  for (int order : {1, 3}) {
    const auto y = apply_line_filter(w, {100.0, order});
    for (std::size_t k = 0; k < w.values.size(); ++k) CHECK(y.values[k] == rel_approx(0.37, 1e-15));
  }
}

TEST_CASE("a 3 ns plateau does not reach 90 percent through 100 MHz") {
  const LineFilter f{100.0, 1};
  const auto y = apply_line_filter(box(2.0, 3.0, 1.0, 0.01, 20.0), f);
  double peak = 0.0;
  for (double v : y.values) peak = std::max(peak, v);
  // Exponential ramp oracle.
  const double oracle = 1.0 - std::exp(-2.0 * std::numbers::pi * 0.1 * 3.0);
  CHECK(peak < 0.9);
  CHECK(peak == rel_approx(oracle, 2e-3));
}

TEST_CASE("filter conserves pulse area in a long window") {
  for (int order : {1, 2}) {
    const LineFilter f{100.0, order};
    const double tau = f.stage_tau_ns();
    const auto x = box(5.0, 7.0, 0.8, 0.02, 12.0 + 25.0 * order * tau);
    CHECK(sum(apply_line_filter(x, f)) == rel_approx(sum(x), 1e-9));
  }
}

TEST_CASE("filter is causal and linear") {
  const LineFilter f{80.0, 2};
  const auto x = box(3.0, 4.0, 1.0, 0.05, 30.0);
  auto z = box(9.0, 2.0, -0.5, 0.05, 30.0);
  for (std::size_t k = 0; k < z.values.size(); ++k) z.values[k] += 0.01 * std::sin(0.3 * k);
  const auto yx = apply_line_filter(x, f), yz = apply_line_filter(z, f);

  Waveform comb = x;
  for (std::size_t k = 0; k < comb.values.size(); ++k) comb.values[k] = 2.5 * x.values[k] - 1.5 * z.values[k];
  const auto yc = apply_line_filter(comb, f);
  for (std::size_t k = 0; k < comb.values.size(); ++k) {
    CHECK(std::abs(yc.values[k] - (2.5 * yx.values[k] - 1.5 * yz.values[k])) < 1e-12);
  }

  Waveform cut = x;
  cut.values.resize(300);
  const auto ycut = apply_line_filter(cut, f);
  for (std::size_t k = 0; k < cut.values.size(); ++k) CHECK(ycut.values[k] == yx.values[k]);
}

TEST_CASE("filter rejects coarse sampling") {
  const LineFilter f{100.0, 1};
  CHECK(max_filter_dt_ns(f) == rel_approx(0.5));
  CHECK_THROWS_AS(apply_line_filter(box(1.0, 1.0, 1.0, 0.6, 10.0), f), SamplingTooCoarseError);
  CHECK_THROWS_AS(validate(LineFilter{0.0, 1}), ConfigError);
  CHECK_THROWS_AS(validate(LineFilter{100.0, 0}), ConfigError);
}

TEST_CASE("precompensation") {
  SUBCASE("wide filter leaves the target unchanged") {
    const auto x = box(0.2, 0.3, 0.2, 1e-4, 1.0);
    const auto r = precompensate(x, {1e9, 1}, 1.0);
    for (std::size_t k = 0; k < x.values.size(); ++k) CHECK(std::abs(r.waveform.values[k] - x.values[k]) < 1e-6);
  }
  SUBCASE("unclamped inverse is exact") {
    const LineFilter f{100.0, 2};
    const auto x = box(2.0, 10.0, 0.2, 0.05, 30.0);
    const auto r = precompensate(x, f, 100.0);
    CHECK(r.clamped_samples == 0);
    const auto y = apply_line_filter(r.waveform, f);
    for (std::size_t k = 0; k < x.values.size(); ++k) CHECK(std::abs(y.values[k] - x.values[k]) < 1e-12);
  }
  SUBCASE("tight clamp leaves a residual") {
    const auto x = box(2.0, 3.0, 0.2, 0.05, 20.0);
    const auto r = precompensate(x, {100.0, 1}, 1.05 * 0.2);
    CHECK(r.clamped_samples > 0);
    CHECK(r.residual > 0.0);
    CHECK_FALSE(r.warnings.empty());
  }
}

TEST_CASE("swap sequence geometry") {
  const auto dev = reference_device();
  SUBCASE("resonant plateau flux") {
    const auto seq = build_swap_sequence(dev, 0.0, 20.0, 0.0, false);
    const auto& fp = std::get<FluxPulse>(seq.find(Role::flux)->shape);
    const double phi = seq.baseline.phi_ratio + seq.flux_gain * fp.amplitude;
    // Forward scan oracle through the SQUID relation and the charge spectrum.
    double best = 1.0, best_phi = 0.0;
    for (int k = 0; k <= 5000; ++k) {
      const double x = 0.5 * k / 5000.0;
      const double f01 = spectral::transmon_spectrum(dev.transmon, {x}, 2)[1];
      if (std::abs(f01 - dev.cavity.omega_bare_ghz) < best) {
        best = std::abs(f01 - dev.cavity.omega_bare_ghz);
        best_phi = x;
      }
    }
    CHECK(std::abs(phi - best_phi) < 2e-4);
    const double f01 = spectral::transmon_spectrum(dev.transmon, {phi}, 2)[1];
    CHECK(std::abs(f01 - dev.cavity.omega_bare_ghz) < 1e-4);
    CHECK(seq.tau_int_ns == 20.0);
    CHECK(fp.plateau_length_ns == 20.0);
  }
  SUBCASE("zero interaction time keeps the two edges") {
    const auto seq = build_swap_sequence(dev, 0.05, 0.0, 0.0, false);
    validate(seq);
    const auto* flux = seq.find(Role::flux);
    REQUIRE(flux != nullptr);
    CHECK(duration_ns(flux->shape) == rel_approx(2.0 * kFluxEdgeSigmas * 1.1));
  }
  SUBCASE("pump delay") {
    const auto seq = build_swap_sequence(dev, 0.0, 10.0, 8800.0, true);
    const auto* pump = seq.find(Role::pump);
    const auto* ctrl = seq.find(Role::control);
    REQUIRE(pump != nullptr);
    REQUIRE(ctrl != nullptr);
    CHECK(ctrl->start_ns - pump->end_ns() == 8800.0);
    CHECK(seq.tau_d_ns == 8800.0);
  }
  SUBCASE("unreachable detuning") {
    CHECK_THROWS_AS(build_swap_sequence(dev, 3.0, 10.0, 0.0, false), UnreachableDetuningError);
  }
}

TEST_CASE("sequence text round trip keeps times exact") {
  const auto dev = reference_device();
  SwapOptions opt;
  opt.control.amplitude = 23.4321987654321;
  opt.flux_gain = 0.97;
  const auto seq = build_swap_sequence(dev, 0.1234567, 13.7, 2640.3, true, opt);
  const auto back = from_text(to_text(seq));
  REQUIRE(back.segments.size() == seq.segments.size());
  for (std::size_t k = 0; k < seq.segments.size(); ++k) {
    CHECK(back.segments[k].role == seq.segments[k].role);
    CHECK(back.segments[k].start_ns == seq.segments[k].start_ns);
    CHECK(back.segments[k].end_ns() == seq.segments[k].end_ns());
  }
  CHECK(back.tau_d_ns == seq.tau_d_ns);
  CHECK(back.tau_int_ns == seq.tau_int_ns);
  CHECK(back.flux_gain == seq.flux_gain);
  CHECK(to_text(back) == to_text(seq));
}

TEST_CASE("sequence validation") {
  auto seq = build_swap_sequence(reference_device(), 0.0, 10.0, 100.0, true);
  seq.tau_d_ns += 1.0;
  CHECK_THROWS_AS(validate(seq), ConfigError);
  seq = build_swap_sequence(reference_device(), 0.0, 10.0, 100.0, true);
  seq.segments.front().start_ns = -1.0;
  CHECK_THROWS_AS(validate(seq), ConfigError);
}

TEST_CASE("sampled flux waveform follows the sequence") {
  const auto seq = build_swap_sequence(reference_device(), 0.0, 10.0, 0.0, false);
  const auto* flux = seq.find(Role::flux);
  const auto& fp = std::get<FluxPulse>(flux->shape);
  const auto w = flux_waveform(seq, 0.1, flux->start_ns - 5.0, flux->end_ns() + 5.0);
  CHECK(w.values.front() == seq.baseline.phi_ratio);
  CHECK(w.values.back() == seq.baseline.phi_ratio);
  const double mid = flux->start_ns + 0.5 * fp.length_total_ns();
  CHECK(w.at(mid) == rel_approx(seq.baseline.phi_ratio + seq.flux_gain * fp.amplitude));
}
