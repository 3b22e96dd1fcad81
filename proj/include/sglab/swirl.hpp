#pragma once

#include "sglab/mixture.hpp"
#include "sglab/types.hpp"

#include <random>
#include <vector>

namespace sglab {

/// Two interleaved Archimedean spirals; the second is the first rotated by pi.
/// Arm 0 is r(theta) = radius * theta / theta_end for theta in [theta_start, theta_end].
struct SwirlSpec {
  double theta_start = 0.5 * 3.14159265358979323846;
  double theta_end = 3.0 * 3.14159265358979323846;
  double radius = 2.4;
  double jitter = 0.05;

  Vec point(int arm, double theta) const;
  void validate() const;
};

struct ManifoldHit {
  double distance;
  int arm;
  double arc_fraction;  // position along the arm in [0, 1]
};

/// Dense polyline discretization of both arms, used for distance queries.
class SwirlManifold {
 public:
  explicit SwirlManifold(SwirlSpec spec, int points_per_arm = 10000);

  const SwirlSpec& spec() const { return spec_; }
  ManifoldHit nearest(const Vec& x) const;
  /// Point at arc-length fraction u in [0, 1] along `arm`.
  Vec at_fraction(int arm, double u) const;

  /// n samples uniform in arc length plus isotropic jitter.
  Mat sample(std::size_t n, std::mt19937_64& rng, std::vector<int>* arms = nullptr) const;

  /// Mixture approximation with `per_arm` components equally spaced in arc length.
  MixtureDensity mixture_approximation(int per_arm = 100) const;

 private:
  void build_buckets();

  SwirlSpec spec_;
  std::vector<Mat> points_;          // per arm, m x 2
  std::vector<Vec> cumulative_;      // arc length at each point
  // Uniform bucket grid over the polyline's bounding box for nearest queries.
  double bucket_size_ = 0.1;
  Vec bucket_origin_;
  int bucket_nx_ = 0, bucket_ny_ = 0;
  std::vector<std::vector<std::pair<int, int>>> buckets_;  // (arm, segment)
};

}  // namespace sglab
