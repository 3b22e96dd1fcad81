#include "sglab/analytic.hpp"

#include <cmath>

namespace sglab {

MixtureDensity diffused_mixture(const MixtureDensity& data, const NoiseSchedule& schedule, double t) {
  const Coefficients c = coefficients(schedule, t);
  std::vector<MixtureComponent> out;
  out.reserve(data.size());
  for (const auto& comp : data.components()) {
    const double var = c.a * c.a * comp.std * comp.std + c.b * c.b;
    out.push_back({comp.weight, c.a * comp.mean, std::sqrt(var)});
  }
  return MixtureDensity(std::move(out));
}

DensityGrid diffused_density_grid(const MixtureDensity& data, const NoiseSchedule& schedule, double t,
                                  const GridSpec& box) {
  box.validate();
  if (box.dim() != data.dim()) throw DimensionError("grid and mixture dimensions differ");
  return grid_from_log_values(box, diffused_mixture(data, schedule, t).log_density(box.centers()));
}

namespace {

void check_sg_args(double t, double delta, double omega) {
  if (!(delta >= 0.0)) throw DomainError("shift delta must be non-negative");
  if (!(omega >= 0.0)) throw DomainError("guidance scale omega must be non-negative");
  if (t + delta > 1.0) throw DomainError("t + delta exceeds 1");
}

}  // namespace

DensityGrid sg_density_grid(const MixtureDensity& data, const NoiseSchedule& schedule, double t, double delta,
                            double omega, const GridSpec& box) {
  check_sg_args(t, delta, omega);
  box.validate();
  if (box.dim() != data.dim()) throw DimensionError("grid and mixture dimensions differ");
  constexpr double kLogFloor = -745.0;
  const Mat pts = box.centers();
  const Vec log_now = diffused_mixture(data, schedule, t).log_density(pts).cwiseMax(kLogFloor);
  const Vec log_shift = diffused_mixture(data, schedule, t + delta).log_density(pts).cwiseMax(kLogFloor);
  return grid_from_log_values(box, (1.0 + omega) * log_now - omega * log_shift);
}

double sg_log_density(const MixtureDensity& data, const NoiseSchedule& schedule, double t, double delta,
                      double omega, const Vec& x) {
  check_sg_args(t, delta, omega);
  return (1.0 + omega) * diffused_mixture(data, schedule, t).log_density(x) -
         omega * diffused_mixture(data, schedule, t + delta).log_density(x);
}

SmoothingFamily SmoothingFamily::variance_expansion(MixtureDensity data, NoiseSchedule schedule) {
  if (schedule.kind != ProcessKind::VP) throw DomainError("variance-expansion family needs a VP schedule");
  return SmoothingFamily(std::move(data), schedule, false);
}

SmoothingFamily SmoothingFamily::brownian(MixtureDensity data) {
  return SmoothingFamily(std::move(data), NoiseSchedule::vp(), true);
}

double SmoothingFamily::variance(double t) const {
  if (brownian_) return t;
  return -std::expm1(-vp_beta_integral(schedule_, t));
}

double SmoothingFamily::g_squared(double t) const {
  if (brownian_) return 1.0;
  return vp_beta(schedule_, t) * std::exp(-vp_beta_integral(schedule_, t));
}

MixtureDensity SmoothingFamily::at(double t) const {
  const double v = variance(t);
  std::vector<MixtureComponent> out;
  for (const auto& c : data_.components()) out.push_back({c.weight, c.mean, std::sqrt(c.std * c.std + v)});
  return MixtureDensity(std::move(out));
}

double time_derivative(const SmoothingFamily& family, double t, const Vec& x, double h) {
  return (family.at(t + h).density(x) - family.at(t - h).density(x)) / (2.0 * h);
}

double heat_residual(const SmoothingFamily& family, double t, const Vec& x, double h) {
  return time_derivative(family, t, x, h) - 0.5 * family.g_squared(t) * family.at(t).laplacian(x);
}

double heat_residual(const MixtureDensity& data, const NoiseSchedule& schedule, double t, const Vec& x) {
  return heat_residual(SmoothingFamily::variance_expansion(data, schedule), t, x);
}

}  // namespace sglab
