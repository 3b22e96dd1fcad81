#include "sglab/eval.hpp"

#include "sglab/io.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sglab {

Histogram histogram_density(const Mat& samples, const GridSpec& box) {
  if (samples.rows() == 0) throw DomainError("histogram of an empty sample set");
  box.validate();
  if (samples.cols() != box.dim()) throw DimensionError("sample and grid dimensions differ");
  Histogram h{DensityGrid(box)};
  std::size_t inside = 0;
  for (Eigen::Index r = 0; r < samples.rows(); ++r) {
    const long idx = box.locate(samples.row(r).transpose());
    if (idx < 0) {
      ++h.escaped;
      continue;
    }
    h.grid[static_cast<std::size_t>(idx)] += 1.0;
    ++inside;
  }
  h.escaped_fraction = static_cast<double>(h.escaped) / static_cast<double>(samples.rows());
  if (inside > 0) h.grid.normalize();
  return h;
}

double tv_distance(const DensityGrid& a, const DensityGrid& b) {
  if (!(a.spec() == b.spec())) throw DimensionError("tv_distance: grids differ in box or resolution");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
  return 0.5 * acc * a.cell_volume();
}

double valley_mass(const Mat& samples, double lo, double hi) {
  if (!(lo < hi)) throw DomainError("valley_mass: need lo < hi");
  if (samples.cols() != 1) throw DimensionError("valley_mass needs 1-d samples");
  if (samples.rows() == 0) throw DomainError("valley_mass of an empty sample set");
  const auto hits = (samples.col(0).array() >= lo && samples.col(0).array() <= hi).count();
  return static_cast<double>(hits) / static_cast<double>(samples.rows());
}

double valley_mass(const DensityGrid& grid, double lo, double hi) {
  if (!(lo < hi)) throw DomainError("valley_mass: need lo < hi");
  if (grid.dim() != 1) throw DimensionError("valley_mass needs a 1-d grid");
  const double w = grid.spec().cell_width(0);
  const double x0 = grid.spec().lower(0);
  double acc = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double a = x0 + static_cast<double>(i) * w;
    const double overlap = std::min(a + w, hi) - std::max(a, lo);
    if (overlap > 0.0) acc += grid[i] * overlap;
  }
  return acc;
}

double bootstrap_se(const Mat& samples, const std::function<double(const Mat&)>& statistic, int resamples,
                    std::uint64_t seed) {
  if (samples.rows() == 0) throw DomainError("bootstrap of an empty sample set");
  if (resamples < 2) throw DomainError("bootstrap needs at least 2 resamples");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Eigen::Index> pick(0, samples.rows() - 1);
  std::vector<double> stats;
  Mat draw(samples.rows(), samples.cols());
  for (int b = 0; b < resamples; ++b) {
    for (Eigen::Index r = 0; r < draw.rows(); ++r) draw.row(r) = samples.row(pick(rng));
    stats.push_back(statistic(draw));
  }
  double mean = 0.0;
  for (double s : stats) mean += s;
  mean /= static_cast<double>(stats.size());
  double var = 0.0;
  for (double s : stats) var += (s - mean) * (s - mean);
  return std::sqrt(var / static_cast<double>(stats.size() - 1));
}

SwirlStats swirl_outlier_stats(const Mat& samples, const SwirlManifold& manifold, double epsilon, int bins) {
  if (samples.rows() == 0) throw DomainError("swirl statistics of an empty sample set");
  if (samples.cols() != 2) throw DimensionError("swirl statistics need 2-d samples");
  if (!(epsilon > 0.0)) throw DomainError("swirl epsilon must be positive");
  if (bins < 1) throw DomainError("swirl recall needs at least one bin");
  std::vector<char> covered(static_cast<std::size_t>(2 * bins), 0);
  std::size_t outliers = 0;
  double total = 0.0;
  for (Eigen::Index r = 0; r < samples.rows(); ++r) {
    const ManifoldHit hit = manifold.nearest(samples.row(r).transpose());
    total += hit.distance;
    if (hit.distance > epsilon) {
      ++outliers;
      continue;
    }
    const int bin = std::min(bins - 1, static_cast<int>(hit.arc_fraction * bins));
    covered[static_cast<std::size_t>(hit.arm * bins + bin)] = 1;
  }
  const auto n = static_cast<double>(samples.rows());
  const auto hit_bins = std::count(covered.begin(), covered.end(), 1);
  return {static_cast<double>(outliers) / n, total / n, static_cast<double>(hit_bins) / (2.0 * bins)};
}

void MetricReport::add(const std::string& name, double value) {
  for (auto& [k, v] : metrics_) {
    if (k == name) {
      v = value;
      return;
    }
  }
  metrics_.emplace_back(name, value);
}

void MetricReport::add_provenance(const std::string& key, const std::string& value) {
  provenance_.emplace_back(key, value);
}

bool MetricReport::has(const std::string& name) const {
  return std::any_of(metrics_.begin(), metrics_.end(), [&](const auto& kv) { return kv.first == name; });
}

double MetricReport::at(const std::string& name) const {
  for (const auto& [k, v] : metrics_) {
    if (k == name) return v;
  }
  throw std::out_of_range("no metric named " + name);
}

std::string MetricReport::to_csv() const {
  std::ostringstream out;
  out << "metric,value\n";
  for (const auto& [k, v] : metrics_) out << k << ',' << format_double(v) << '\n';
  return out.str();
}

}  // namespace sglab
