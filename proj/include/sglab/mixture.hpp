#pragma once

#include "sglab/types.hpp"

#include <random>
#include <vector>

namespace sglab {

struct MixtureComponent {
  double weight;
  Vec mean;
  double std;  // isotropic
};

/// Weighted isotropic Gaussian mixture in 1 or 2 dimensions.
class MixtureDensity {
 public:
  MixtureDensity() = default;
  explicit MixtureDensity(std::vector<MixtureComponent> components);

  /// Equal-weight modes on the real line.
  static MixtureDensity line(const std::vector<double>& means, double std);
  static MixtureDensity standard_normal(int dim);

  int dim() const { return dim_; }
  std::size_t size() const { return components_.size(); }
  const std::vector<MixtureComponent>& components() const { return components_; }
  const MixtureComponent& component(std::size_t i) const { return components_.at(i); }

  /// Single component (weight 1); the class-conditional density of label i.
  MixtureDensity conditional(std::size_t i) const;

  double density(const Vec& x) const;
  double log_density(const Vec& x) const;
  Vec score(const Vec& x) const;
  /// Trace of the Hessian of the density (not the log density).
  double laplacian(const Vec& x) const;

  // Batched variants, one point per row.
  Vec log_density(const Mat& x) const;
  Mat score(const Mat& x) const;

  /// Draws n samples; labels (component index) returned when requested.
  Mat sample(std::size_t n, std::mt19937_64& rng, std::vector<int>* labels = nullptr) const;

 private:
  void check_point(Eigen::Index d) const;

  std::vector<MixtureComponent> components_;
  int dim_ = 0;
};

}  // namespace sglab
