#include "output.hpp"

#include <unistd.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "run_config.hpp"

namespace qlpme::cli {

namespace fs = std::filesystem;

OutputStage::OutputStage(fs::path directory) : directory_(std::move(directory)) {
  fs::create_directories(directory_);
  staging_ = directory_ / (".staging-" + std::to_string(::getpid()));
  fs::remove_all(staging_);
  fs::create_directories(staging_);
}

OutputStage::~OutputStage() {
  std::error_code ec;
  fs::remove_all(staging_, ec);
}

void OutputStage::write(const std::string& name, const std::string& content) {
  if (committed_) throw std::logic_error("OutputStage: write after commit");
  std::ofstream out(staging_ / name, std::ios::binary);
  out << content;
  if (!out) throw std::runtime_error("cannot write " + (staging_ / name).string());
  files_.push_back(name);
}

void OutputStage::commit() {
  for (const auto& name : files_) fs::rename(staging_ / name, directory_ / name);
  committed_ = true;
  fs::remove_all(staging_);
}

std::string format_number(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf.data(), ptr);
}

std::vector<std::pair<double, double>> read_xy_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open data file " + path.string());
  std::vector<std::pair<double, double>> rows;
  std::string line;
  int number = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(number) + ": expected two columns");
    }
    try {
      std::size_t used = 0;
      const double x = std::stod(line.substr(0, comma), &used);
      const double y = std::stod(line.substr(comma + 1), &used);
      rows.emplace_back(x, y);
    } catch (const std::exception&) {
      throw ConfigError(path.string() + ":" + std::to_string(number) + ": malformed number");
    }
  }
  if (rows.size() < 2) throw ConfigError(path.string() + ": need at least two data rows");
  return rows;
}

ScalarField sample_csv_onto(const std::vector<std::pair<double, double>>& rows,
                            const SpatialGrid& grid, const std::string& what) {
  auto sorted = rows;
  std::sort(sorted.begin(), sorted.end());
  Eigen::ArrayXd xs(static_cast<Index>(sorted.size()));
  Eigen::ArrayXd ys(static_cast<Index>(sorted.size()));
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    xs(static_cast<Index>(i)) = sorted[i].first;
    ys(static_cast<Index>(i)) = sorted[i].second;
  }
  try {
    const MonotoneCubic interp(xs, ys);
    return ScalarField(grid, interp(grid.nodes()));
  } catch (const DomainError& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

namespace {

// Five-stop perceptual ramp (dark blue -> yellow).
std::string ramp(double s) {
  static constexpr std::array<std::array<double, 3>, 5> stops{{{68, 1, 84},
                                                                {59, 82, 139},
                                                                {33, 145, 140},
                                                                {94, 201, 98},
                                                                {253, 231, 37}}};
  s = std::clamp(s, 0.0, 1.0) * 4.0;
  const int k = std::min(3, static_cast<int>(s));
  const double f = s - k;
  char buf[8];
  int rgb[3];
  for (int c = 0; c < 3; ++c) {
    rgb[c] = static_cast<int>(std::lround(stops[k][c] + f * (stops[k + 1][c] - stops[k][c])));
  }
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
  return buf;
}

std::string svg_header(int width, int height) {
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << " " << height << "\" font-family=\"sans-serif\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  return os.str();
}

}  // namespace

std::string heatmap_svg(const SpaceTimeField& field, const std::string& title) {
  constexpr int kCols = 200;
  constexpr int kRows = 150;
  constexpr int kCell = 3;
  constexpr int kLeft = 60;
  constexpr int kTop = 40;
  const Index nx = field.grid.nx();
  const Index levels = field.tgrid.levels();
  const int cols = static_cast<int>(std::min<Index>(kCols, nx));
  const int rows = static_cast<int>(std::min<Index>(kRows, levels));
  const double lo = field.values.minCoeff();
  const double hi = field.values.maxCoeff();
  const double span = hi > lo ? hi - lo : 1.0;

  std::ostringstream os;
  const int width = kLeft + cols * kCell + 40;
  const int height = kTop + rows * kCell + 50;
  os << svg_header(width, height);
  os << "<text x=\"" << kLeft << "\" y=\"24\" font-size=\"14\">" << title << "</text>\n";
  for (int r = 0; r < rows; ++r) {
    const Index m = rows == 1 ? 0 : static_cast<Index>(r) * (levels - 1) / (rows - 1);
    for (int c = 0; c < cols; ++c) {
      const Index i = cols == 1 ? 0 : static_cast<Index>(c) * (nx - 1) / (cols - 1);
      const double s = (field.values(i, m) - lo) / span;
      // t increases upward.
      os << "<rect x=\"" << kLeft + c * kCell << "\" y=\"" << kTop + (rows - 1 - r) * kCell
         << "\" width=\"" << kCell << "\" height=\"" << kCell << "\" fill=\"" << ramp(s)
         << "\"/>\n";
    }
  }
  const int bottom = kTop + rows * kCell;
  os << "<text x=\"" << kLeft << "\" y=\"" << bottom + 16 << "\" font-size=\"11\">x = "
     << format_number(field.grid.x_a()) << "</text>\n"
     << "<text x=\"" << kLeft + cols * kCell - 60 << "\" y=\"" << bottom + 16
     << "\" font-size=\"11\">x = " << format_number(field.grid.x_b()) << "</text>\n"
     << "<text x=\"4\" y=\"" << bottom << "\" font-size=\"11\">t = 0</text>\n"
     << "<text x=\"4\" y=\"" << kTop + 10 << "\" font-size=\"11\">t = "
     << format_number(field.tgrid.horizon()) << "</text>\n"
     << "<text x=\"" << kLeft << "\" y=\"" << bottom + 34 << "\" font-size=\"11\">range ["
     << format_number(lo) << ", " << format_number(hi) << "]</text>\n"
     << "</svg>\n";
  return os.str();
}

std::string line_plot_svg(const std::vector<double>& xs, const std::vector<PlotSeries>& series,
                          const std::string& title, const std::string& x_label) {
  constexpr int kWidth = 640;
  constexpr int kHeight = 420;
  constexpr int kLeft = 70;
  constexpr int kRight = 170;
  constexpr int kTop = 40;
  constexpr int kBottom = 50;
  static constexpr std::array<const char*, 8> kColors{
      "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

  double ylo = std::numeric_limits<double>::infinity();
  double yhi = -ylo;
  for (const auto& s : series) {
    for (double v : s.values) {
      if (v > 0.0 && std::isfinite(v)) {
        ylo = std::min(ylo, std::log10(v));
        yhi = std::max(yhi, std::log10(v));
      }
    }
  }
  if (!std::isfinite(ylo)) {
    ylo = -1.0;
    yhi = 1.0;
  }
  if (yhi - ylo < 1e-12) {
    ylo -= 0.5;
    yhi += 0.5;
  }
  double xlo = std::numeric_limits<double>::infinity();
  double xhi = -xlo;
  for (double x : xs) {
    if (x > 0.0) {
      xlo = std::min(xlo, std::log2(x));
      xhi = std::max(xhi, std::log2(x));
    }
  }
  if (!std::isfinite(xlo) || xhi - xlo < 1e-12) {
    xlo = 0.0;
    xhi = 1.0;
  }
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (std::log2(x) - xlo) / (xhi - xlo) * pw; };
  auto py = [&](double y) { return kTop + (yhi - std::log10(y)) / (yhi - ylo) * ph; };

  std::ostringstream os;
  os << svg_header(kWidth, kHeight);
  os << "<text x=\"" << kLeft << "\" y=\"24\" font-size=\"14\">" << title << "</text>\n";
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double x : xs) {
    if (x <= 0.0) continue;
    os << "<text x=\"" << px(x) - 8 << "\" y=\"" << kTop + ph + 16 << "\" font-size=\"10\">"
       << format_number(x) << "</text>\n";
  }
  os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 10 << "\" font-size=\"12\">"
     << x_label << "</text>\n";
  for (int e = static_cast<int>(std::ceil(ylo)); e <= static_cast<int>(std::floor(yhi)); ++e) {
    const double y = kTop + (yhi - e) / (yhi - ylo) * ph;
    os << "<text x=\"8\" y=\"" << y + 4 << "\" font-size=\"10\">1e" << e << "</text>\n"
       << "<line x1=\"" << kLeft << "\" x2=\"" << kLeft + pw << "\" y1=\"" << y << "\" y2=\"" << y
       << "\" stroke=\"#dddddd\"/>\n";
  }
  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* color = kColors[k % kColors.size()];
    std::ostringstream pts;
    for (std::size_t i = 0; i < xs.size() && i < series[k].values.size(); ++i) {
      const double v = series[k].values[i];
      if (v > 0.0 && std::isfinite(v) && xs[i] > 0.0) pts << px(xs[i]) << "," << py(v) << " ";
    }
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\""
       << pts.str() << "\"/>\n";
    os << "<text x=\"" << kLeft + pw + 10 << "\" y=\"" << kTop + 14 + 16 * k
       << "\" font-size=\"11\" fill=\"" << color << "\">" << series[k].label << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace qlpme::cli
