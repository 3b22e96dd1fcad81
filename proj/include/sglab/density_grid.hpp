#pragma once

#include "sglab/types.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace sglab {

/// Axis-aligned box split into equal cells.
struct GridSpec {
  Vec lower;
  Vec upper;
  std::vector<int> resolution;

  static GridSpec line(double lo, double hi, int cells);
  static GridSpec square(double lo, double hi, int cells_per_axis);

  int dim() const { return static_cast<int>(resolution.size()); }
  std::size_t cell_count() const;
  double cell_width(int axis) const;
  double cell_volume() const;
  /// Center of cell `index` (row-major, axis 0 outermost).
  Vec center(std::size_t index) const;
  /// All cell centers, one per row, in storage order.
  Mat centers() const;
  /// Cell containing x, or -1 outside the box.
  long locate(const Vec& x) const;
  void validate() const;

  bool operator==(const GridSpec& other) const;
};

/// Discretized density over a box; the shared currency of oracles and metrics.
class DensityGrid {
 public:
  DensityGrid() = default;
  explicit DensityGrid(GridSpec spec);
  DensityGrid(GridSpec spec, std::vector<double> values);

  const GridSpec& spec() const { return spec_; }
  int dim() const { return spec_.dim(); }
  std::size_t size() const { return values_.size(); }
  double cell_volume() const { return spec_.cell_volume(); }

  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  /// Sum of value * cell_volume.
  double mass() const;
  /// Rescales to unit mass; throws if the grid carries no mass.
  void normalize();

  /// CSV: header with axis names then "density"; one row per cell, row-major.
  void write_csv(std::ostream& out) const;
  void write_csv(const std::string& path) const;

 private:
  GridSpec spec_;
  std::vector<double> values_;
};

/// Normalized grid of exp(log_values - max); log values are floored at -745.
DensityGrid grid_from_log_values(const GridSpec& spec, const Vec& log_values);

}  // namespace sglab
