#pragma once

#include "sglab/density_grid.hpp"
#include "sglab/swirl.hpp"
#include "sglab/types.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace sglab {

struct Histogram {
  DensityGrid grid;  // normalized over the in-box samples
  std::size_t escaped = 0;
  double escaped_fraction = 0.0;
};

Histogram histogram_density(const Mat& samples, const GridSpec& box);

/// Half the L1 distance between two grids on the same box.
double tv_distance(const DensityGrid& a, const DensityGrid& b);

/// Fraction of 1-d samples in [lo, hi].
double valley_mass(const Mat& samples, double lo, double hi);
/// Mass of a 1-d grid over [lo, hi], splitting partially covered cells.
double valley_mass(const DensityGrid& grid, double lo, double hi);

/// Bootstrap standard error of a statistic over sample rows.
double bootstrap_se(const Mat& samples, const std::function<double(const Mat&)>& statistic, int resamples,
                    std::uint64_t seed);

struct SwirlStats {
  double outlier_fraction;
  double mean_manifold_distance;
  double mode_recall;
};

/// Outliers lie farther than epsilon from both arms; recall is the fraction of
/// `bins` equal arc-length bins per arm holding at least one inlier.
SwirlStats swirl_outlier_stats(const Mat& samples, const SwirlManifold& manifold, double epsilon = 0.2,
                               int bins = 64);

/// Density evolution dp/ds = -div(u p) + D Laplacian(p) in reverse time s = -t,
/// matching particles that move with velocity u = dx/ds.
struct FokkerPlanckProblem {
  // u(x, t) at the given points (one per row), with t the frozen sampler time.
  std::function<Mat(const Mat& points, double t)> velocity;
  std::function<double(double t)> diffusion;
  // Sampler times, decreasing; the fields are frozen at times[k] over [times[k+1], times[k]].
  std::vector<double> times;
  double cfl = 0.4;
  // Substeps per interval; 0 chooses the smallest stable count.
  int substeps = 0;
};

DensityGrid fokker_planck_evolve(const DensityGrid& initial, const FokkerPlanckProblem& problem);

/// Named scalar metrics plus provenance, in insertion order.
class MetricReport {
 public:
  void add(const std::string& name, double value);
  void add_provenance(const std::string& key, const std::string& value);
  const std::vector<std::pair<std::string, double>>& metrics() const { return metrics_; }
  const std::vector<std::pair<std::string, std::string>>& provenance() const { return provenance_; }
  double at(const std::string& name) const;
  bool has(const std::string& name) const;

  /// Long format "metric,value".
  std::string to_csv() const;

 private:
  std::vector<std::pair<std::string, double>> metrics_;
  std::vector<std::pair<std::string, std::string>> provenance_;
};

}  // namespace sglab
