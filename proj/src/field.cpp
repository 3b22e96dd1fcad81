#include "sglab/field.hpp"

#include "sglab/analytic.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace sglab {

AnalyticField::AnalyticField(MixtureDensity data, NoiseSchedule schedule)
    : data_(std::move(data)), schedule_(schedule) {}

MixtureDensity AnalyticField::conditioned(Condition c) const {
  if (c == kNullCondition) return data_;
  if (c < 0 || static_cast<std::size_t>(c) >= data_.size()) {
    throw DomainError("unknown condition id " + std::to_string(c));
  }
  return data_.conditional(static_cast<std::size_t>(c));
}

Mat AnalyticField::evaluate(const Mat& x, double t, Condition c) const {
  const MixtureDensity data = conditioned(c);
  if (schedule_.kind == ProcessKind::VP) return diffused_mixture(data, schedule_, t).score(x);
  return mixture_velocity(data, schedule_, x, t);
}

Mat mixture_velocity(const MixtureDensity& data, const NoiseSchedule& schedule, const Mat& z, double t) {
  if (z.cols() != data.dim()) throw DimensionError("velocity query has the wrong dimension");
  const Coefficients co = coefficients(schedule, t);
  if (!(co.b > 0.0)) throw DomainError("mixture velocity undefined where b_t = 0");
  const int d = data.dim();
  const auto& comps = data.components();
  Mat out(z.rows(), d);
  std::vector<double> logw(comps.size());
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    const Vec zr = z.row(r).transpose();
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < comps.size(); ++k) {
      const double var = co.a * co.a * comps[k].std * comps[k].std + co.b * co.b;
      logw[k] = std::log(comps[k].weight) - 0.5 * (zr - co.a * comps[k].mean).squaredNorm() / var -
                0.5 * d * std::log(2.0 * std::numbers::pi * var);
      best = std::max(best, logw[k]);
    }
    double norm = 0.0;
    Vec acc = Vec::Zero(d);
    for (std::size_t k = 0; k < comps.size(); ++k) {
      const double w = std::exp(logw[k] - best);
      norm += w;
      const double s2 = comps[k].std * comps[k].std;
      const double var = co.a * co.a * s2 + co.b * co.b;
      const Vec x0 = comps[k].mean + (co.a * s2 / var) * (zr - co.a * comps[k].mean);
      const Vec eps = (zr - co.a * x0) / co.b;
      acc += w * (co.da * x0 + co.db * eps);
    }
    out.row(r) = (acc / norm).transpose();
  }
  return out;
}

NetField::NetField(std::shared_ptr<const nn::ScoreNet> net, NoiseSchedule schedule)
    : net_(std::move(net)), schedule_(schedule) {
  if (!net_) throw std::invalid_argument("NetField needs a network");
}

}  // namespace sglab
