#pragma once

#include "sglab/field.hpp"
#include "sglab/schedule.hpp"
#include "sglab/types.hpp"

#include <string>

namespace sglab {

enum class ShiftKind { Constant, Dynamic, Prev };

/// How the noisier reference level t + delta(t) is chosen.
///   Constant: value is a shift in diffusion-time steps (delta = value / steps).
///   Dynamic:  value is the divisor sigma in delta(t) = t / sigma.
///   Prev:     reuse the previous step's model output below the SG-prev
///             threshold; a positive value adds a constant-shift SG term above it.
struct ShiftSchedule {
  ShiftKind kind = ShiftKind::Constant;
  double value = 10.0;
};

struct GuidanceStack {
  double omega_cfg = 0.0;
  double omega_sg = 0.0;
  // Perturbed-attention guidance needs attention layers; must stay 0.
  double omega_pag = 0.0;
  ShiftSchedule shift;
  // Diffusion time (in steps) below which SG-prev applies.
  double sg_prev_threshold = 500.0;
  Condition condition = kNullCondition;

  void validate() const;
};

/// Previous step's conditional model output, one row per chain.
struct StepCache {
  Mat input;
  Mat output;
  double time = 0.0;
  bool valid = false;

  void clear() { *this = StepCache{}; }
};

template <class M>
M cfg_combine(const M& s_cond, const M& s_uncond, double omega) {
  if (s_cond.rows() != s_uncond.rows() || s_cond.cols() != s_uncond.cols()) {
    throw DimensionError("cfg_combine: dimension mismatch");
  }
  if (omega == 1.0) return s_cond;
  return s_uncond + omega * (s_cond - s_uncond);
}

template <class M>
M sg_combine(const M& s_t, const M& s_shifted, double omega) {
  if (s_t.rows() != s_shifted.rows() || s_t.cols() != s_shifted.cols()) {
    throw DimensionError("sg_combine: dimension mismatch");
  }
  if (!(omega >= 0.0)) throw DomainError("sg_combine: omega must be non-negative");
  return s_t + omega * (s_t - s_shifted);
}

/// Falls back to s_t when the cache is invalid or t >= threshold (continuous time).
Mat sg_prev_combine(const Mat& s_t, const StepCache& cache, double omega, double t, double threshold);

/// Continuous-time shift at t, clamped so that t + delta <= 1.
double shift_delta(const GuidanceStack& stack, const NoiseSchedule& schedule, double t);

/// True when the shifted-time model call is made at t.
bool sg_shift_active(const GuidanceStack& stack, const NoiseSchedule& schedule, double t);

struct GuidedOutput {
  Mat score;
  int model_calls = 0;
};

/// Algorithm-1 combination:
///   s* = base + omega_sg (s_c - s_ref),
/// where base is s_c, or s_0 + omega_cfg (s_c - s_0) when omega_cfg > 0, and
/// s_ref is the shifted-time output (SG) or the cached previous output
/// (SG-prev). The cache is refreshed with this step's conditional output.
GuidedOutput stack_apply(const ScoreField& field, const GuidanceStack& stack, const Mat& x, double t,
                         StepCache& cache);

std::string to_string(ShiftKind kind);
ShiftKind shift_kind_from_string(const std::string& text);

}  // namespace sglab
