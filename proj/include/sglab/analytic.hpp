#pragma once

#include "sglab/density_grid.hpp"
#include "sglab/mixture.hpp"
#include "sglab/schedule.hpp"

namespace sglab {

/// Marginal of the forward process started from `data`: means scale by a_t,
/// variances become a_t^2 s^2 + b_t^2. Weights are unchanged.
MixtureDensity diffused_mixture(const MixtureDensity& data, const NoiseSchedule& schedule, double t);

/// Normalized p_t on the grid.
DensityGrid diffused_density_grid(const MixtureDensity& data, const NoiseSchedule& schedule, double t,
                                  const GridSpec& box);

/// Self-guided density p_t^{1+omega} / p_{t+delta}^omega, normalized over the box.
DensityGrid sg_density_grid(const MixtureDensity& data, const NoiseSchedule& schedule, double t, double delta,
                            double omega, const GridSpec& box);

/// Unnormalized log of the self-guided density at a point.
double sg_log_density(const MixtureDensity& data, const NoiseSchedule& schedule, double t, double delta,
                      double omega, const Vec& x);

/// Gaussian smoothing family p_t = data * N(0, v(t) I) with v' = g^2, which
/// satisfies the heat equation dp/dt = g^2/2 Laplacian(p) exactly.
class SmoothingFamily {
 public:
  /// v(t) = sigma_t^2 of a VP schedule, so g(t)^2 = beta(t) alpha_t^2.
  static SmoothingFamily variance_expansion(MixtureDensity data, NoiseSchedule schedule);
  /// v(t) = t, g = 1.
  static SmoothingFamily brownian(MixtureDensity data);

  double variance(double t) const;
  double g_squared(double t) const;
  MixtureDensity at(double t) const;

 private:
  SmoothingFamily(MixtureDensity data, NoiseSchedule schedule, bool brownian)
      : data_(std::move(data)), schedule_(schedule), brownian_(brownian) {}

  MixtureDensity data_;
  NoiseSchedule schedule_;
  bool brownian_;
};

/// d/dt p_t(x) by central difference with step h.
double time_derivative(const SmoothingFamily& family, double t, const Vec& x, double h = 1e-5);

/// d/dt p_t(x) - g(t)^2/2 Laplacian p_t(x); Laplacian in closed form.
double heat_residual(const SmoothingFamily& family, double t, const Vec& x, double h = 1e-5);
double heat_residual(const MixtureDensity& data, const NoiseSchedule& schedule, double t, const Vec& x);

}  // namespace sglab
