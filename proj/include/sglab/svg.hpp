#pragma once

#include "sglab/types.hpp"

#include <string>
#include <vector>

namespace sglab::svg {

struct Series {
  std::vector<double> x;
  std::vector<double> y;
  std::string color;
  std::string label;
};

struct Rect {
  double x, y, w, h;
};

/// Standalone SVG document built from rectangular panels.
class Canvas {
 public:
  Canvas(double width, double height);

  /// Line plot; the y range starts at 0 and covers every series.
  void line_panel(const Rect& area, const std::string& title, const std::vector<Series>& series);
  /// Scatter of 2-d points over the square [lo, hi]^2.
  void scatter_panel(const Rect& area, const std::string& title, const Mat& points, double lo, double hi,
                     const std::string& color, std::size_t max_points = 4000);
  /// Row-major n x n magnitudes over [lo, hi]^2 shown on a white-to-red ramp.
  void heatmap_panel(const Rect& area, const std::string& title, const std::vector<double>& values, int n,
                     double lo, double hi);

  std::string str() const;
  void save(const std::string& path) const;

 private:
  void frame(const Rect& area, const std::string& title);

  double width_, height_;
  std::string body_;
};

}  // namespace sglab::svg
