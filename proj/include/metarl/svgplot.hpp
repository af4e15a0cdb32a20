#pragma once

#include <string>
#include <vector>

namespace metarl {

struct SvgSeries {
  std::string label;
  std::string color = "#1f77b4";
  bool dashed = false;
  std::vector<double> x, y;
};

/// Shaded region between lo(x) and hi(x).
struct SvgBand {
  std::string color = "#1f77b4";
  double opacity = 0.25;
  std::vector<double> x, lo, hi;
};

struct SvgScatterSeries {
  std::string label;
  std::string color = "#1f77b4";
  double radius = 3.0;
  std::vector<double> x, y;
};

/// Ten-color qualitative palette, cycled by index.
const std::string& svg_color(size_t i);

/// Minimal line/band/scatter plot emitter. Bounds come from the data unless
/// fixed; non-finite points are dropped.
class SvgPlot {
 public:
  SvgPlot(std::string title, std::string xlabel, std::string ylabel, int width = 760,
          int height = 480);

  void add_series(SvgSeries s);
  void add_band(SvgBand b);
  void add_scatter(SvgScatterSeries s);
  void fix_bounds(double xmin, double xmax, double ymin, double ymax);

  std::string render() const;
  void write(const std::string& path) const;

 private:
  std::string title_, xlabel_, ylabel_;
  int width_, height_;
  bool fixed_ = false;
  double fx0_ = 0, fx1_ = 1, fy0_ = 0, fy1_ = 1;
  std::vector<SvgSeries> series_;
  std::vector<SvgBand> bands_;
  std::vector<SvgScatterSeries> scatters_;
};

}  // namespace metarl
