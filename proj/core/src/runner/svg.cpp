#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "cqed/error.hpp"

namespace cqed::runner::svg {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 20, kTop = 36, kBottom = 50;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

struct Range {
  double lo = 0.0, hi = 1.0;
  void include(double v) {
    if (!std::isfinite(v)) return;
    if (empty) {
      lo = hi = v;
      empty = false;
    } else {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  void pad() {
    if (hi - lo < 1e-300) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
  bool empty = true;
};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

void frame(std::ostringstream& os, const Axes& a, const Range& rx, const Range& ry) {
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  os << fmt::format("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\" "
                    "font-size=\"12\">\n",
                    kWidth, kHeight);
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << fmt::format("<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n", kWidth / 2,
                    escape(a.title));
  os << fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", kLeft, kTop,
                    pw, ph);
  for (int k = 0; k <= 4; ++k) {
    const double fx = rx.lo + (rx.hi - rx.lo) * k / 4.0;
    const double fy = ry.lo + (ry.hi - ry.lo) * k / 4.0;
    const double px = kLeft + pw * k / 4.0;
    const double py = kTop + ph - ph * k / 4.0;
    os << fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{:.4g}</text>\n", px, kTop + ph + 16, fx);
    os << fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{:.4g}</text>\n", kLeft - 6, py + 4, fy);
  }
  os << fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", kLeft + pw / 2, kHeight - 12,
                    escape(a.x_label));
  os << fmt::format("<text x=\"16\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{}</text>\n",
                    kTop + ph / 2, kTop + ph / 2, escape(a.y_label));
}

void write(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw IoError(fmt::format("cannot write plot '{}'", path.string()));
}

}  // namespace

void line_plot(const std::filesystem::path& path, const Axes& axes, const std::vector<Series>& series, bool markers) {
  Range rx, ry;
  for (const auto& s : series) {
    for (double v : s.x) rx.include(v);
    for (double v : s.y) ry.include(v);
  }
  rx.pad();
  ry.pad();
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double v) { return kLeft + pw * (v - rx.lo) / (rx.hi - rx.lo); };
  auto py = [&](double v) { return kTop + ph - ph * (v - ry.lo) / (ry.hi - ry.lo); };

  std::ostringstream os;
  frame(os, axes, rx, ry);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* colour = kPalette[k % std::size(kPalette)];
    std::string pts;
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      pts += fmt::format("{:.2f},{:.2f} ", px(s.x[i]), py(s.y[i]));
      if (markers) {
        os << fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2.5\" fill=\"{}\"/>\n", px(s.x[i]), py(s.y[i]),
                          colour);
      }
    }
    if (!markers) os << fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n", colour, pts);
    os << fmt::format("<text x=\"{}\" y=\"{}\" fill=\"{}\">{}</text>\n", kLeft + 8, kTop + 16 + 14 * k, colour,
                      escape(s.label));
  }
  os << "</svg>\n";
  write(path, os.str());
}

void heatmap(const std::filesystem::path& path, const Axes& axes, const std::vector<double>& x,
             const std::vector<double>& y, const std::vector<double>& z) {
  if (x.empty() || y.empty() || z.size() != x.size() * y.size()) throw IoError("heatmap: inconsistent data");
  Range rx, ry, rz;
  for (double v : x) rx.include(v);
  for (double v : y) ry.include(v);
  for (double v : z) rz.include(v);
  rx.pad();
  ry.pad();
  rz.pad();
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  const double cw = pw / static_cast<double>(x.size()), ch = ph / static_cast<double>(y.size());

  std::ostringstream os;
  frame(os, axes, rx, ry);
  for (std::size_t j = 0; j < y.size(); ++j) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double u = (z[j * x.size() + i] - rz.lo) / (rz.hi - rz.lo);
      // dark blue to yellow
      const int r = static_cast<int>(std::lround(255 * std::clamp(1.6 * u - 0.3, 0.0, 1.0)));
      const int g = static_cast<int>(std::lround(255 * std::clamp(u, 0.0, 1.0)));
      const int b = static_cast<int>(std::lround(255 * std::clamp(0.5 - 0.5 * u, 0.0, 1.0)));
      os << fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"#{:02x}{:02x}{:02x}\"/>\n",
                        kLeft + cw * i, kTop + ph - ch * (j + 1), cw + 0.05, ch + 0.05, r, g, b);
    }
  }
  os << "</svg>\n";
  write(path, os.str());
}

}  // namespace cqed::runner::svg
