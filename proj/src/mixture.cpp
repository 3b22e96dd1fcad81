#include "sglab/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace sglab {

namespace {

// log N(x; mu, s^2 I) given the squared distance.
double log_gauss(double sq_dist, double std, int dim) {
  const double var = std * std;
  return -0.5 * sq_dist / var - 0.5 * dim * std::log(2.0 * std::numbers::pi * var);
}

}  // namespace

MixtureDensity::MixtureDensity(std::vector<MixtureComponent> components)
    : components_(std::move(components)) {
  if (components_.empty()) throw DomainError("mixture needs at least one component");
  dim_ = static_cast<int>(components_.front().mean.size());
  if (dim_ < 1 || dim_ > 2) throw DimensionError("mixture dimension must be 1 or 2");
  double total = 0.0;
  for (const auto& c : components_) {
    if (c.mean.size() != dim_) throw DimensionError("mixture means differ in dimension");
    if (!(c.weight > 0.0)) throw DomainError("mixture weights must be positive");
    if (!(c.std > 0.0)) throw DomainError("mixture stds must be positive");
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw DomainError("mixture weights sum to " + std::to_string(total) + ", expected 1");
  }
}

MixtureDensity MixtureDensity::line(const std::vector<double>& means, double std) {
  std::vector<MixtureComponent> comps;
  const double w = 1.0 / static_cast<double>(means.size());
  for (double m : means) comps.push_back({w, Vec::Constant(1, m), std});
  // Re-normalize so that the weights sum to 1 to the last bit.
  if (!comps.empty()) {
    double rest = 0.0;
    for (std::size_t i = 1; i < comps.size(); ++i) rest += comps[i].weight;
    comps.front().weight = 1.0 - rest;
  }
  return MixtureDensity(std::move(comps));
}

MixtureDensity MixtureDensity::standard_normal(int dim) {
  return MixtureDensity({{1.0, Vec::Zero(dim), 1.0}});
}

MixtureDensity MixtureDensity::conditional(std::size_t i) const {
  MixtureComponent c = components_.at(i);
  c.weight = 1.0;
  return MixtureDensity({c});
}

void MixtureDensity::check_point(Eigen::Index d) const {
  if (d != dim_) {
    throw DimensionError("point of dimension " + std::to_string(d) + " for a " +
                         std::to_string(dim_) + "-d mixture");
  }
}

double MixtureDensity::log_density(const Vec& x) const {
  check_point(x.size());
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> terms(components_.size());
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const auto& c = components_[i];
    terms[i] = std::log(c.weight) + log_gauss((x - c.mean).squaredNorm(), c.std, dim_);
    best = std::max(best, terms[i]);
  }
  double acc = 0.0;
  for (double v : terms) acc += std::exp(v - best);
  return best + std::log(acc);
}

double MixtureDensity::density(const Vec& x) const { return std::exp(log_density(x)); }

Vec MixtureDensity::score(const Vec& x) const {
  check_point(x.size());
  std::vector<double> terms(components_.size());
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const auto& c = components_[i];
    terms[i] = std::log(c.weight) + log_gauss((x - c.mean).squaredNorm(), c.std, dim_);
    best = std::max(best, terms[i]);
  }
  double norm = 0.0;
  Vec acc = Vec::Zero(dim_);
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const auto& c = components_[i];
    const double r = std::exp(terms[i] - best);
    norm += r;
    acc += r * (c.mean - x) / (c.std * c.std);
  }
  return acc / norm;
}

double MixtureDensity::laplacian(const Vec& x) const {
  check_point(x.size());
  double acc = 0.0;
  for (const auto& c : components_) {
    const double var = c.std * c.std;
    const double sq = (x - c.mean).squaredNorm();
    const double p = std::exp(log_gauss(sq, c.std, dim_));
    acc += c.weight * p * (sq / (var * var) - dim_ / var);
  }
  return acc;
}

Vec MixtureDensity::log_density(const Mat& x) const {
  check_point(x.cols());
  Vec out(x.rows());
  for (Eigen::Index r = 0; r < x.rows(); ++r) out(r) = log_density(Vec(x.row(r).transpose()));
  return out;
}

Mat MixtureDensity::score(const Mat& x) const {
  check_point(x.cols());
  const auto k = components_.size();
  const Eigen::Index n = x.rows();
  Mat out(n, dim_);
  std::vector<double> terms(k);
  for (Eigen::Index r = 0; r < n; ++r) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < k; ++i) {
      const auto& c = components_[i];
      double sq = 0.0;
      for (int j = 0; j < dim_; ++j) {
        const double d = x(r, j) - c.mean(j);
        sq += d * d;
      }
      terms[i] = std::log(c.weight) + log_gauss(sq, c.std, dim_);
      best = std::max(best, terms[i]);
    }
    double norm = 0.0;
    double acc[2] = {0.0, 0.0};
    for (std::size_t i = 0; i < k; ++i) {
      const auto& c = components_[i];
      const double w = std::exp(terms[i] - best);
      norm += w;
      const double inv_var = 1.0 / (c.std * c.std);
      for (int j = 0; j < dim_; ++j) acc[j] += w * (c.mean(j) - x(r, j)) * inv_var;
    }
    for (int j = 0; j < dim_; ++j) out(r, j) = acc[j] / norm;
  }
  return out;
}

Mat MixtureDensity::sample(std::size_t n, std::mt19937_64& rng, std::vector<int>* labels) const {
  std::vector<double> weights;
  for (const auto& c : components_) weights.push_back(c.weight);
  std::discrete_distribution<int> pick(weights.begin(), weights.end());
  std::normal_distribution<double> normal;
  Mat out(static_cast<Eigen::Index>(n), dim_);
  if (labels) labels->resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int k = pick(rng);
    const auto& c = components_[static_cast<std::size_t>(k)];
    for (int j = 0; j < dim_; ++j) out(static_cast<Eigen::Index>(i), j) = c.mean(j) + c.std * normal(rng);
    if (labels) (*labels)[i] = k;
  }
  return out;
}

}  // namespace sglab
