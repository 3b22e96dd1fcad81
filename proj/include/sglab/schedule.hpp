#pragma once

#include "sglab/types.hpp"

namespace sglab {

enum class ProcessKind { VP, RF };

/// Forward noising process. Continuous time runs over [0, 1]; integer
/// "diffusion time" values (shift 10, threshold 500) are divided by
/// discretization_steps.
struct NoiseSchedule {
  ProcessKind kind = ProcessKind::VP;
  double beta_min = 0.1;
  double beta_max = 20.0;
  double t_max = 1.0;
  int discretization_steps = 1000;
  // Clamp for singular endpoints during training and sampling.
  double t_eps = 1e-3;

  static NoiseSchedule vp(double beta_min = 0.1, double beta_max = 20.0);
  static NoiseSchedule rf();

  void validate() const;
  double to_continuous(double diffusion_time) const { return diffusion_time / discretization_steps; }
};

struct AlphaSigma {
  double alpha;
  double sigma;
};

/// Interpolation coefficients x_t = a x_0 + b eps and their time derivatives.
struct Coefficients {
  double a, b, da, db;
};

struct DriftDiffusion {
  Vec drift;
  double diffusion;
};

struct SnrValue {
  double lambda;
  double lambda_prime;
};

double vp_beta(const NoiseSchedule& s, double t);
/// Integral of beta from 0 to t.
double vp_beta_integral(const NoiseSchedule& s, double t);
AlphaSigma vp_alpha_sigma(const NoiseSchedule& s, double t);
DriftDiffusion vp_drift_diffusion(const NoiseSchedule& s, const Vec& x, double t);

Vec rf_interpolant(const Vec& x0, const Vec& eps, double t);

Coefficients coefficients(const NoiseSchedule& s, double t);
SnrValue snr_lambda(const NoiseSchedule& s, double t);

}  // namespace sglab
