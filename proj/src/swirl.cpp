#include "sglab/swirl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sglab {

Vec SwirlSpec::point(int arm, double theta) const {
  const double r = radius * theta / theta_end;
  Vec p(2);
  p << r * std::cos(theta), r * std::sin(theta);
  return arm == 0 ? p : Vec(-p);
}

void SwirlSpec::validate() const {
  if (!(theta_end > theta_start && theta_start >= 0.0)) throw ConfigError("data.swirl: need 0 <= theta_start < theta_end");
  if (!(radius > 0.0)) throw ConfigError("data.swirl.radius must be positive");
  if (!(jitter >= 0.0)) throw ConfigError("data.swirl.jitter must be non-negative");
}

SwirlManifold::SwirlManifold(SwirlSpec spec, int points_per_arm) : spec_(spec) {
  spec_.validate();
  if (points_per_arm < 2) throw DomainError("swirl discretization needs at least 2 points per arm");
  for (int arm = 0; arm < 2; ++arm) {
    Mat pts(points_per_arm, 2);
    Vec cum(points_per_arm);
    for (int i = 0; i < points_per_arm; ++i) {
      const double theta = spec_.theta_start + (spec_.theta_end - spec_.theta_start) * i / (points_per_arm - 1);
      pts.row(i) = spec_.point(arm, theta).transpose();
      cum(i) = i == 0 ? 0.0 : cum(i - 1) + (pts.row(i) - pts.row(i - 1)).norm();
    }
    points_.push_back(std::move(pts));
    cumulative_.push_back(std::move(cum));
  }
  build_buckets();
}

void SwirlManifold::build_buckets() {
  Vec lo = Vec::Constant(2, std::numeric_limits<double>::infinity());
  Vec hi = -lo;
  for (const auto& pts : points_) {
    lo = lo.cwiseMin(pts.colwise().minCoeff().transpose());
    hi = hi.cwiseMax(pts.colwise().maxCoeff().transpose());
  }
  bucket_origin_ = lo;
  bucket_nx_ = static_cast<int>((hi(0) - lo(0)) / bucket_size_) + 1;
  bucket_ny_ = static_cast<int>((hi(1) - lo(1)) / bucket_size_) + 1;
  buckets_.assign(static_cast<std::size_t>(bucket_nx_ * bucket_ny_), {});
  auto cell = [&](double v, int axis, int n) {
    return std::clamp(static_cast<int>((v - bucket_origin_(axis)) / bucket_size_), 0, n - 1);
  };
  for (int arm = 0; arm < 2; ++arm) {
    const Mat& pts = points_[static_cast<std::size_t>(arm)];
    for (Eigen::Index s = 0; s + 1 < pts.rows(); ++s) {
      const int x0 = cell(std::min(pts(s, 0), pts(s + 1, 0)), 0, bucket_nx_);
      const int x1 = cell(std::max(pts(s, 0), pts(s + 1, 0)), 0, bucket_nx_);
      const int y0 = cell(std::min(pts(s, 1), pts(s + 1, 1)), 1, bucket_ny_);
      const int y1 = cell(std::max(pts(s, 1), pts(s + 1, 1)), 1, bucket_ny_);
      for (int bx = x0; bx <= x1; ++bx) {
        for (int by = y0; by <= y1; ++by) {
          buckets_[static_cast<std::size_t>(bx * bucket_ny_ + by)].emplace_back(arm, static_cast<int>(s));
        }
      }
    }
  }
}

ManifoldHit SwirlManifold::nearest(const Vec& x) const {
  if (x.size() != 2) throw DimensionError("swirl distance needs 2-d points");
  const int qx = std::clamp(static_cast<int>(std::floor((x(0) - bucket_origin_(0)) / bucket_size_)), 0, bucket_nx_ - 1);
  const int qy = std::clamp(static_cast<int>(std::floor((x(1) - bucket_origin_(1)) / bucket_size_)), 0, bucket_ny_ - 1);
  double best = std::numeric_limits<double>::infinity();
  ManifoldHit hit{best, 0, 0.0};
  const int max_ring = std::max(bucket_nx_, bucket_ny_);
  for (int ring = 0; ring <= max_ring; ++ring) {
    for (int bx = qx - ring; bx <= qx + ring; ++bx) {
      if (bx < 0 || bx >= bucket_nx_) continue;
      for (int by = qy - ring; by <= qy + ring; ++by) {
        if (by < 0 || by >= bucket_ny_) continue;
        if (std::max(std::abs(bx - qx), std::abs(by - qy)) != ring) continue;
        for (const auto& [arm, s] : buckets_[static_cast<std::size_t>(bx * bucket_ny_ + by)]) {
          const Mat& pts = points_[static_cast<std::size_t>(arm)];
          const Eigen::Vector2d a = pts.row(s).transpose();
          const Eigen::Vector2d b = pts.row(s + 1).transpose();
          const Eigen::Vector2d ab = b - a;
          const double len2 = ab.squaredNorm();
          const double u = len2 > 0.0 ? std::clamp((x - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
          const double d = (x - (a + u * ab)).norm();
          if (d < best) {
            best = d;
            const Vec& cum = cumulative_[static_cast<std::size_t>(arm)];
            const double arc = cum(s) + u * (cum(s + 1) - cum(s));
            hit = {d, arm, arc / cum(cum.size() - 1)};
          }
        }
      }
    }
    if (best <= ring * bucket_size_) break;
  }
  return hit;
}

Vec SwirlManifold::at_fraction(int arm, double u) const {
  const Vec& cum = cumulative_.at(static_cast<std::size_t>(arm));
  const Mat& pts = points_[static_cast<std::size_t>(arm)];
  const double target = std::clamp(u, 0.0, 1.0) * cum(cum.size() - 1);
  const auto* begin = cum.data();
  const auto* it = std::upper_bound(begin, begin + cum.size(), target);
  Eigen::Index i = std::clamp<Eigen::Index>(it - begin - 1, 0, cum.size() - 2);
  const double span = cum(i + 1) - cum(i);
  const double w = span > 0.0 ? (target - cum(i)) / span : 0.0;
  return ((1.0 - w) * pts.row(i) + w * pts.row(i + 1)).transpose();
}

Mat SwirlManifold::sample(std::size_t n, std::mt19937_64& rng, std::vector<int>* arms) const {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal;
  Mat out(static_cast<Eigen::Index>(n), 2);
  if (arms) arms->resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int arm = unif(rng) < 0.5 ? 0 : 1;
    const Vec p = at_fraction(arm, unif(rng));
    const auto r = static_cast<Eigen::Index>(i);
    out(r, 0) = p(0) + spec_.jitter * normal(rng);
    out(r, 1) = p(1) + spec_.jitter * normal(rng);
    if (arms) (*arms)[i] = arm;
  }
  return out;
}

MixtureDensity SwirlManifold::mixture_approximation(int per_arm) const {
  if (per_arm < 2) throw DomainError("swirl mixture needs at least 2 components per arm");
  const double length = cumulative_[0](cumulative_[0].size() - 1);
  const double spacing = length / (per_arm - 1);
  const double std = std::sqrt(spec_.jitter * spec_.jitter + 0.25 * spacing * spacing);
  std::vector<MixtureComponent> comps;
  const double w = 1.0 / (2.0 * per_arm);
  for (int arm = 0; arm < 2; ++arm) {
    for (int i = 0; i < per_arm; ++i) {
      comps.push_back({w, at_fraction(arm, static_cast<double>(i) / (per_arm - 1)), std});
    }
  }
  double rest = 0.0;
  for (std::size_t i = 1; i < comps.size(); ++i) rest += comps[i].weight;
  comps.front().weight = 1.0 - rest;
  return MixtureDensity(std::move(comps));
}

}  // namespace sglab
