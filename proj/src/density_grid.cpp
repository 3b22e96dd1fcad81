#include "sglab/density_grid.hpp"

#include "sglab/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>

namespace sglab {

GridSpec GridSpec::line(double lo, double hi, int cells) {
  return {Vec::Constant(1, lo), Vec::Constant(1, hi), {cells}};
}

GridSpec GridSpec::square(double lo, double hi, int cells_per_axis) {
  return {Vec::Constant(2, lo), Vec::Constant(2, hi), {cells_per_axis, cells_per_axis}};
}

void GridSpec::validate() const {
  const auto d = static_cast<Eigen::Index>(resolution.size());
  if (d < 1 || d > 2) throw DimensionError("grid dimension must be 1 or 2");
  if (lower.size() != d || upper.size() != d) throw DimensionError("grid bounds do not match resolution");
  for (Eigen::Index i = 0; i < d; ++i) {
    if (!(upper(i) > lower(i))) throw DomainError("grid upper bound must exceed lower bound");
    if (resolution[static_cast<std::size_t>(i)] < 1) throw DomainError("grid resolution must be positive");
  }
}

std::size_t GridSpec::cell_count() const {
  std::size_t n = 1;
  for (int r : resolution) n *= static_cast<std::size_t>(r);
  return n;
}

double GridSpec::cell_width(int axis) const {
  return (upper(axis) - lower(axis)) / resolution[static_cast<std::size_t>(axis)];
}

double GridSpec::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim(); ++a) v *= cell_width(a);
  return v;
}

Vec GridSpec::center(std::size_t index) const {
  Vec x(dim());
  for (int a = dim() - 1; a >= 0; --a) {
    const auto n = static_cast<std::size_t>(resolution[static_cast<std::size_t>(a)]);
    const std::size_t i = index % n;
    index /= n;
    x(a) = lower(a) + (static_cast<double>(i) + 0.5) * cell_width(a);
  }
  return x;
}

Mat GridSpec::centers() const {
  Mat out(static_cast<Eigen::Index>(cell_count()), dim());
  for (std::size_t i = 0; i < cell_count(); ++i) out.row(static_cast<Eigen::Index>(i)) = center(i).transpose();
  return out;
}

long GridSpec::locate(const Vec& x) const {
  long index = 0;
  for (int a = 0; a < dim(); ++a) {
    const double u = (x(a) - lower(a)) / cell_width(a);
    const int n = resolution[static_cast<std::size_t>(a)];
    if (!(u >= 0.0 && u <= n)) return -1;
    const long i = std::min(static_cast<long>(u), static_cast<long>(n - 1));
    index = index * n + i;
  }
  return index;
}

bool GridSpec::operator==(const GridSpec& other) const {
  return resolution == other.resolution && lower == other.lower && upper == other.upper;
}

DensityGrid::DensityGrid(GridSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  values_.assign(spec_.cell_count(), 0.0);
}

DensityGrid::DensityGrid(GridSpec spec, std::vector<double> values)
    : spec_(std::move(spec)), values_(std::move(values)) {
  spec_.validate();
  if (values_.size() != spec_.cell_count()) throw DimensionError("grid values do not match the cell count");
}

double DensityGrid::mass() const {
  return std::accumulate(values_.begin(), values_.end(), 0.0) * cell_volume();
}

void DensityGrid::normalize() {
  const double m = mass();
  if (!(m > 0.0) || !std::isfinite(m)) throw NumericalError("cannot normalize a grid with mass " + std::to_string(m));
  for (double& v : values_) v /= m;
}

void DensityGrid::write_csv(std::ostream& out) const {
  static const char* names[] = {"x", "y"};
  for (int a = 0; a < dim(); ++a) out << names[a] << ',';
  out << "density\n";
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const Vec c = spec_.center(i);
    for (int a = 0; a < dim(); ++a) out << format_double(c(a)) << ',';
    out << format_double(values_[i]) << '\n';
  }
}

void DensityGrid::write_csv(const std::string& path) const {
  std::ofstream out = open_output(path);
  write_csv(out);
  check_stream(out, path);
}

DensityGrid grid_from_log_values(const GridSpec& spec, const Vec& log_values) {
  constexpr double kLogFloor = -745.0;
  if (static_cast<std::size_t>(log_values.size()) != spec.cell_count()) {
    throw DimensionError("log values do not match the cell count");
  }
  const double top = std::max(log_values.maxCoeff(), kLogFloor);
  std::vector<double> v(spec.cell_count());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = std::exp(std::max(log_values(static_cast<Eigen::Index>(i)), kLogFloor) - top);
  }
  DensityGrid g(spec, std::move(v));
  g.normalize();
  return g;
}

}  // namespace sglab
