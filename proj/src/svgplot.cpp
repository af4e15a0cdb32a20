#include "metarl/svgplot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace metarl {

const std::string& svg_color(size_t i) {
  static const std::vector<std::string> palette = {
      "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
      "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  return palette[i % palette.size()];
}

SvgPlot::SvgPlot(std::string title, std::string xlabel, std::string ylabel, int width, int height)
    : title_(std::move(title)),
      xlabel_(std::move(xlabel)),
      ylabel_(std::move(ylabel)),
      width_(width),
      height_(height) {}

void SvgPlot::add_series(SvgSeries s) {
  if (s.x.size() != s.y.size()) throw std::invalid_argument("svg series: x/y size mismatch");
  series_.push_back(std::move(s));
}

void SvgPlot::add_band(SvgBand b) {
  if (b.x.size() != b.lo.size() || b.x.size() != b.hi.size())
    throw std::invalid_argument("svg band: x/lo/hi size mismatch");
  bands_.push_back(std::move(b));
}

void SvgPlot::add_scatter(SvgScatterSeries s) {
  if (s.x.size() != s.y.size()) throw std::invalid_argument("svg scatter: x/y size mismatch");
  scatters_.push_back(std::move(s));
}

void SvgPlot::fix_bounds(double xmin, double xmax, double ymin, double ymax) {
  fixed_ = true;
  fx0_ = xmin;
  fx1_ = xmax;
  fy0_ = ymin;
  fy1_ = ymax;
}

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&')
      out += "&amp;";
    else if (c == '<')
      out += "&lt;";
    else if (c == '>')
      out += "&gt;";
    else
      out += c;
  }
  return out;
}

void grow(double v, double& lo, double& hi) {
  if (!std::isfinite(v)) return;
  lo = std::min(lo, v);
  hi = std::max(hi, v);
}

}  // namespace

std::string SvgPlot::render() const {
  const double ml = 72, mr = 18, mt = 40, mb = 52;
  const double pw = width_ - ml - mr, ph = height_ - mt - mb;

  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
  double y0 = x0, y1 = -x0;
  if (fixed_) {
    x0 = fx0_, x1 = fx1_, y0 = fy0_, y1 = fy1_;
  } else {
    for (const auto& s : series_)
      for (size_t i = 0; i < s.x.size(); ++i) {
        grow(s.x[i], x0, x1);
        grow(s.y[i], y0, y1);
      }
    for (const auto& b : bands_)
      for (size_t i = 0; i < b.x.size(); ++i) {
        grow(b.x[i], x0, x1);
        grow(b.lo[i], y0, y1);
        grow(b.hi[i], y0, y1);
      }
    for (const auto& s : scatters_)
      for (size_t i = 0; i < s.x.size(); ++i) {
        grow(s.x[i], x0, x1);
        grow(s.y[i], y0, y1);
      }
    if (!std::isfinite(x0)) x0 = 0, x1 = 1;
    if (!std::isfinite(y0)) y0 = 0, y1 = 1;
    if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
    if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
    const double px = 0.05 * (x1 - x0), py = 0.05 * (y1 - y0);
    x0 -= px, x1 += px, y0 -= py, y1 += py;
  }

  auto sx = [&](double v) { return ml + (v - x0) / (x1 - x0) * pw; };
  auto sy = [&](double v) { return mt + ph - (v - y0) / (y1 - y0) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\"" << height_
    << "\" viewBox=\"0 0 " << width_ << " " << height_ << "\">\n";
  o << "<rect width=\"" << width_ << "\" height=\"" << height_ << "\" fill=\"white\"/>\n";
  o << "<text x=\"" << width_ / 2 << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\""
    << " font-size=\"15\">" << escape(title_) << "</text>\n";

  // Gridlines and ticks: five divisions per axis.
  o << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = x0 + (x1 - x0) * i / 5.0;
    const double yv = y0 + (y1 - y0) * i / 5.0;
    o << "<line x1=\"" << num(sx(xv)) << "\" y1=\"" << num(mt) << "\" x2=\"" << num(sx(xv))
      << "\" y2=\"" << num(mt + ph) << "\" stroke=\"#e0e0e0\"/>\n";
    o << "<line x1=\"" << num(ml) << "\" y1=\"" << num(sy(yv)) << "\" x2=\"" << num(ml + pw)
      << "\" y2=\"" << num(sy(yv)) << "\" stroke=\"#e0e0e0\"/>\n";
    o << "<text x=\"" << num(sx(xv)) << "\" y=\"" << num(mt + ph + 16)
      << "\" text-anchor=\"middle\">" << tick_label(xv) << "</text>\n";
    o << "<text x=\"" << num(ml - 6) << "\" y=\"" << num(sy(yv) + 4)
      << "\" text-anchor=\"end\">" << tick_label(yv) << "</text>\n";
  }
  o << "</g>\n";

  for (const auto& b : bands_) {
    std::ostringstream d;
    bool first = true;
    for (size_t i = 0; i < b.x.size(); ++i) {
      if (!std::isfinite(b.x[i]) || !std::isfinite(b.hi[i])) continue;
      d << (first ? "M" : "L") << num(sx(b.x[i])) << " " << num(sy(b.hi[i])) << " ";
      first = false;
    }
    for (size_t i = b.x.size(); i-- > 0;) {
      if (!std::isfinite(b.x[i]) || !std::isfinite(b.lo[i])) continue;
      d << "L" << num(sx(b.x[i])) << " " << num(sy(b.lo[i])) << " ";
    }
    if (first) continue;
    o << "<path d=\"" << d.str() << "Z\" fill=\"" << b.color << "\" fill-opacity=\"" << b.opacity
      << "\" stroke=\"none\"/>\n";
  }

  for (const auto& s : series_) {
    o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.8\"";
    if (s.dashed) o << " stroke-dasharray=\"6 4\"";
    o << " points=\"";
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      o << num(sx(s.x[i])) << "," << num(sy(s.y[i])) << " ";
    }
    o << "\"/>\n";
  }

  for (const auto& s : scatters_) {
    o << "<g fill=\"" << s.color << "\" fill-opacity=\"0.8\">\n";
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      o << "<circle cx=\"" << num(sx(s.x[i])) << "\" cy=\"" << num(sy(s.y[i])) << "\" r=\""
        << s.radius << "\"/>\n";
    }
    o << "</g>\n";
  }

  // Legend: one entry per labeled series/scatter, top-left inside the axes.
  double ly = mt + 16;
  o << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
  for (const auto& s : series_) {
    if (s.label.empty()) continue;
    o << "<line x1=\"" << num(ml + 10) << "\" y1=\"" << num(ly - 4) << "\" x2=\"" << num(ml + 34)
      << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"";
    if (s.dashed) o << " stroke-dasharray=\"6 4\"";
    o << "/>\n";
    o << "<text x=\"" << num(ml + 40) << "\" y=\"" << num(ly) << "\">" << escape(s.label)
      << "</text>\n";
    ly += 16;
  }
  for (const auto& s : scatters_) {
    if (s.label.empty()) continue;
    o << "<circle cx=\"" << num(ml + 22) << "\" cy=\"" << num(ly - 4) << "\" r=\"4\" fill=\""
      << s.color << "\"/>\n";
    o << "<text x=\"" << num(ml + 40) << "\" y=\"" << num(ly) << "\">" << escape(s.label)
      << "</text>\n";
    ly += 16;
  }
  o << "</g>\n";

  o << "<text x=\"" << width_ / 2 << "\" y=\"" << height_ - 10
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << escape(xlabel_)
    << "</text>\n";
  o << "<text x=\"18\" y=\"" << height_ / 2
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 18 "
    << height_ / 2 << ")\">" << escape(ylabel_) << "</text>\n";
  o << "</svg>\n";
  return o.str();
}

void SvgPlot::write(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("svg: cannot open " + path);
  f << render();
  if (!f.good()) throw std::runtime_error("svg: write failed for " + path);
}

}  // namespace metarl
