#include "sglab/svg.hpp"

#include "sglab/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace sglab::svg {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

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

}  // namespace

Canvas::Canvas(double width, double height) : width_(width), height_(height) {}

void Canvas::frame(const Rect& a, const std::string& title) {
  body_ += "<rect x=\"" + num(a.x) + "\" y=\"" + num(a.y) + "\" width=\"" + num(a.w) + "\" height=\"" + num(a.h) +
           "\" fill=\"none\" stroke=\"#444\"/>\n";
  body_ += "<text x=\"" + num(a.x + a.w / 2) + "\" y=\"" + num(a.y - 6) +
           "\" font-size=\"12\" text-anchor=\"middle\">" + escape(title) + "</text>\n";
}

void Canvas::line_panel(const Rect& a, const std::string& title, const std::vector<Series>& series) {
  frame(a, title);
  double xmin = INFINITY, xmax = -INFINITY, ymax = 0.0;
  for (const auto& s : series) {
    for (double v : s.x) xmin = std::min(xmin, v), xmax = std::max(xmax, v);
    for (double v : s.y) ymax = std::max(ymax, v);
  }
  if (!(xmax > xmin)) xmin = 0.0, xmax = 1.0;
  if (!(ymax > 0.0)) ymax = 1.0;
  ymax *= 1.05;
  auto px = [&](double v) { return a.x + (v - xmin) / (xmax - xmin) * a.w; };
  auto py = [&](double v) { return a.y + a.h - v / ymax * a.h; };
  double legend_y = a.y + 14;
  for (const auto& s : series) {
    std::string pts;
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) pts += num(px(s.x[i])) + "," + num(py(s.y[i])) + " ";
    body_ += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    if (!s.label.empty()) {
      body_ += "<text x=\"" + num(a.x + 8) + "\" y=\"" + num(legend_y) + "\" font-size=\"10\" fill=\"" + s.color + "\">" +
               escape(s.label) + "</text>\n";
      legend_y += 12;
    }
  }
  body_ += "<text x=\"" + num(a.x) + "\" y=\"" + num(a.y + a.h + 12) + "\" font-size=\"9\">" + num(xmin) + "</text>\n";
  body_ += "<text x=\"" + num(a.x + a.w) + "\" y=\"" + num(a.y + a.h + 12) +
           "\" font-size=\"9\" text-anchor=\"end\">" + num(xmax) + "</text>\n";
}

void Canvas::scatter_panel(const Rect& a, const std::string& title, const Mat& points, double lo, double hi,
                           const std::string& color, std::size_t max_points) {
  frame(a, title);
  if (points.cols() != 2) throw DimensionError("scatter panel needs 2-d points");
  const auto n = static_cast<std::size_t>(points.rows());
  const std::size_t stride = std::max<std::size_t>(1, n / std::max<std::size_t>(1, max_points));
  for (std::size_t i = 0; i < n; i += stride) {
    const double x = points(static_cast<Eigen::Index>(i), 0);
    const double y = points(static_cast<Eigen::Index>(i), 1);
    if (x < lo || x > hi || y < lo || y > hi) continue;
    body_ += "<circle cx=\"" + num(a.x + (x - lo) / (hi - lo) * a.w) + "\" cy=\"" +
             num(a.y + a.h - (y - lo) / (hi - lo) * a.h) + "\" r=\"0.8\" fill=\"" + color + "\"/>\n";
  }
}

void Canvas::heatmap_panel(const Rect& a, const std::string& title, const std::vector<double>& values, int n,
                           double /*lo*/, double /*hi*/) {
  if (values.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n)) {
    throw DimensionError("heatmap values must be n x n");
  }
  const double top = *std::max_element(values.begin(), values.end());
  const double cw = a.w / n, ch = a.h / n;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double v = top > 0.0 ? values[static_cast<std::size_t>(i * n + j)] / top : 0.0;
      const int shade = static_cast<int>(std::lround(255.0 * (1.0 - std::clamp(v, 0.0, 1.0))));
      // Axis 0 runs left to right, axis 1 bottom to top.
      body_ += "<rect x=\"" + num(a.x + i * cw) + "\" y=\"" + num(a.y + a.h - (j + 1) * ch) + "\" width=\"" +
               num(cw + 0.05) + "\" height=\"" + num(ch + 0.05) + "\" fill=\"rgb(255," + std::to_string(shade) + "," +
               std::to_string(shade) + ")\"/>\n";
    }
  }
  frame(a, title);
}

std::string Canvas::str() const {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width_) + "\" height=\"" + num(height_) +
         "\" viewBox=\"0 0 " + num(width_) + " " + num(height_) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" +
         body_ + "</svg>\n";
}

void Canvas::save(const std::string& path) const { write_file(path, str()); }

}  // namespace sglab::svg
