#include "sglab/schedule.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace sglab {

namespace {

void check_time(double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw DomainError("time " + std::to_string(t) + " outside [0, 1]");
  }
}

void require_vp(const NoiseSchedule& s, const char* op) {
  if (s.kind != ProcessKind::VP) throw DomainError(std::string(op) + " requires a VP schedule");
}

}  // namespace

NoiseSchedule NoiseSchedule::vp(double beta_min, double beta_max) {
  NoiseSchedule s;
  s.kind = ProcessKind::VP;
  s.beta_min = beta_min;
  s.beta_max = beta_max;
  return s;
}

NoiseSchedule NoiseSchedule::rf() {
  NoiseSchedule s;
  s.kind = ProcessKind::RF;
  return s;
}

void NoiseSchedule::validate() const {
  if (kind == ProcessKind::VP && !(beta_min > 0.0 && beta_max >= beta_min)) {
    throw ConfigError("schedule.beta_min/beta_max: need 0 < beta_min <= beta_max");
  }
  if (t_max != 1.0) throw ConfigError("schedule.t_max: continuous time is normalized to 1");
  if (discretization_steps <= 0) throw ConfigError("schedule.discretization_steps must be positive");
  if (!(t_eps > 0.0 && t_eps < 0.5)) throw ConfigError("schedule.t_eps must lie in (0, 0.5)");
}

double vp_beta(const NoiseSchedule& s, double t) {
  return s.beta_min + t * (s.beta_max - s.beta_min);
}

double vp_beta_integral(const NoiseSchedule& s, double t) {
  return s.beta_min * t + 0.5 * (s.beta_max - s.beta_min) * t * t;
}

AlphaSigma vp_alpha_sigma(const NoiseSchedule& s, double t) {
  require_vp(s, "vp_alpha_sigma");
  check_time(t);
  const double b = vp_beta_integral(s, t);
  // sigma^2 = 1 - exp(-B), computed without cancellation near t = 0.
  return {std::exp(-0.5 * b), std::sqrt(-std::expm1(-b))};
}

DriftDiffusion vp_drift_diffusion(const NoiseSchedule& s, const Vec& x, double t) {
  require_vp(s, "vp_drift_diffusion");
  check_time(t);
  const double beta = vp_beta(s, t);
  return {-0.5 * beta * x, std::sqrt(beta)};
}

Vec rf_interpolant(const Vec& x0, const Vec& eps, double t) {
  check_time(t);
  if (x0.size() != eps.size()) throw DimensionError("rf_interpolant: x0 and eps differ in dimension");
  return (1.0 - t) * x0 + t * eps;
}

Coefficients coefficients(const NoiseSchedule& s, double t) {
  check_time(t);
  if (s.kind == ProcessKind::RF) return {1.0 - t, t, -1.0, 1.0};
  const auto [alpha, sigma] = vp_alpha_sigma(s, t);
  const double beta = vp_beta(s, t);
  const double da = -0.5 * beta * alpha;
  // d sigma/dt = beta alpha^2 / (2 sigma); infinite at t = 0.
  const double db = sigma > 0.0 ? 0.5 * beta * alpha * alpha / sigma
                                 : std::numeric_limits<double>::infinity();
  return {alpha, sigma, da, db};
}

SnrValue snr_lambda(const NoiseSchedule& s, double t) {
  check_time(t);
  const Coefficients c = coefficients(s, t);
  if (c.b <= 0.0) throw DomainError("snr_lambda: b_t vanishes at t = " + std::to_string(t));
  if (c.a <= 0.0) throw DomainError("snr_lambda: a_t vanishes at t = " + std::to_string(t));
  return {std::log(c.a * c.a / (c.b * c.b)), 2.0 * (c.da / c.a - c.db / c.b)};
}

}  // namespace sglab
