#pragma once

// File output for the CLI: staged atomic writes, CSV formatting, SVG plots.

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "qlpme/core.hpp"

namespace qlpme::cli {

/// Collects output files in a hidden staging directory next to the target
/// and moves them into place on commit(). Destroying an uncommitted stage
/// removes everything it wrote, so an interrupted or failed run leaves no
/// partial outputs behind.
class OutputStage {
 public:
  explicit OutputStage(std::filesystem::path directory);
  ~OutputStage();
  OutputStage(const OutputStage&) = delete;
  OutputStage& operator=(const OutputStage&) = delete;

  void write(const std::string& name, const std::string& content);
  /// Renames every staged file into the target directory.
  void commit();

  const std::filesystem::path& directory() const { return directory_; }
  const std::vector<std::string>& files() const { return files_; }

 private:
  std::filesystem::path directory_;
  std::filesystem::path staging_;
  std::vector<std::string> files_;
  bool committed_ = false;
};

/// Shortest round-trip decimal representation ('.' separator).
std::string format_number(double v);

/// Rows of (coordinate, value) from a two-column CSV with a header row.
std::vector<std::pair<double, double>> read_xy_csv(const std::filesystem::path& path);

/// Samples (coordinate, value) data onto `grid` by monotone cubic
/// interpolation; the data must cover [x_a, x_b].
ScalarField sample_csv_onto(const std::vector<std::pair<double, double>>& rows,
                            const SpatialGrid& grid, const std::string& what);

/// Heatmap of a space-time field (x horizontal, t vertical).
std::string heatmap_svg(const SpaceTimeField& field, const std::string& title);

struct PlotSeries {
  std::string label;
  std::vector<double> values;
};

/// Log-log line plot of several series against common abscissae.
std::string line_plot_svg(const std::vector<double>& xs, const std::vector<PlotSeries>& series,
                          const std::string& title, const std::string& x_label);

}  // namespace qlpme::cli
