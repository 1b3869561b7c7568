#pragma once
// Minimal static SVG charts rendered from the CSV data.

#include <filesystem>
#include <string>
#include <vector>

namespace cqed::runner::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct Axes {
  std::string title;
  std::string x_label;
  std::string y_label;
};

// Throws IoError when the file cannot be written.
void line_plot(const std::filesystem::path& path, const Axes& axes, const std::vector<Series>& series,
               bool markers = false);

// z is row-major [y][x]; colour scale spans min..max of z.
void heatmap(const std::filesystem::path& path, const Axes& axes, const std::vector<double>& x,
             const std::vector<double>& y, const std::vector<double>& z);

}  // namespace cqed::runner::svg
