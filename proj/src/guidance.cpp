#include "sglab/guidance.hpp"

#include <algorithm>
#include <cmath>

namespace sglab {

void GuidanceStack::validate() const {
  if (omega_pag != 0.0) throw ConfigError("guidance.omega_pag: PAG requires attention perturbation - out of scope");
  if (!(omega_cfg >= 0.0) || !std::isfinite(omega_cfg)) throw ConfigError("guidance.omega_cfg must be >= 0");
  if (!(omega_sg >= 0.0) || !std::isfinite(omega_sg)) throw ConfigError("guidance.omega_sg must be >= 0");
  if (omega_cfg > 0.0 && condition == kNullCondition) {
    throw ConfigError("guidance.omega_cfg: classifier-free guidance needs a non-empty guidance.condition");
  }
  switch (shift.kind) {
    case ShiftKind::Constant:
      if (!(shift.value > 0.0)) throw ConfigError("guidance.shift.value: constant shift must be positive");
      break;
    case ShiftKind::Dynamic:
      if (!(shift.value > 0.0)) throw ConfigError("guidance.shift.value: dynamic divisor must be positive");
      break;
    case ShiftKind::Prev:
      if (!(shift.value >= 0.0)) throw ConfigError("guidance.shift.value: must be >= 0 for prev");
      break;
  }
  if (!(sg_prev_threshold >= 0.0)) throw ConfigError("guidance.sg_prev_threshold must be >= 0");
}

Mat sg_prev_combine(const Mat& s_t, const StepCache& cache, double omega, double t, double threshold) {
  if (!cache.valid || t >= threshold) return s_t;
  if (cache.output.rows() != s_t.rows() || cache.output.cols() != s_t.cols()) return s_t;
  return s_t + omega * (s_t - cache.output);
}

double shift_delta(const GuidanceStack& stack, const NoiseSchedule& schedule, double t) {
  double delta = 0.0;
  switch (stack.shift.kind) {
    case ShiftKind::Constant:
    case ShiftKind::Prev:
      delta = schedule.to_continuous(stack.shift.value);
      break;
    case ShiftKind::Dynamic:
      delta = t / stack.shift.value;
      break;
  }
  return std::clamp(delta, 0.0, std::max(0.0, 1.0 - t));
}

namespace {

bool below_prev_threshold(const GuidanceStack& stack, const NoiseSchedule& schedule, double t) {
  return t < schedule.to_continuous(stack.sg_prev_threshold);
}

}  // namespace

bool sg_shift_active(const GuidanceStack& stack, const NoiseSchedule& schedule, double t) {
  if (stack.omega_sg <= 0.0) return false;
  if (stack.shift.kind != ShiftKind::Prev) return true;
  return !below_prev_threshold(stack, schedule, t) && stack.shift.value > 0.0;
}

GuidedOutput stack_apply(const ScoreField& field, const GuidanceStack& stack, const Mat& x, double t,
                         StepCache& cache) {
  stack.validate();
  const NoiseSchedule& schedule = field.schedule();
  GuidedOutput out;
  const Mat s_cond = field.evaluate(x, t, stack.condition);
  out.model_calls = 1;
  out.score = s_cond;
  if (stack.omega_cfg > 0.0) {
    const Mat s_uncond = field.evaluate(x, t, kNullCondition);
    ++out.model_calls;
    out.score = cfg_combine(s_cond, s_uncond, stack.omega_cfg);
  }
  if (stack.omega_sg > 0.0) {
    if (stack.shift.kind == ShiftKind::Prev && below_prev_threshold(stack, schedule, t)) {
      const double threshold = schedule.to_continuous(stack.sg_prev_threshold);
      out.score += sg_prev_combine(s_cond, cache, stack.omega_sg, t, threshold) - s_cond;
    } else if (sg_shift_active(stack, schedule, t)) {
      const double delta = shift_delta(stack, schedule, t);
      const Mat s_shift = field.evaluate(x, t + delta, stack.condition);
      ++out.model_calls;
      out.score += stack.omega_sg * (s_cond - s_shift);
    }
  }
  cache.input = x;
  cache.output = s_cond;
  cache.time = t;
  cache.valid = true;
  return out;
}

std::string to_string(ShiftKind kind) {
  switch (kind) {
    case ShiftKind::Constant:
      return "constant";
    case ShiftKind::Dynamic:
      return "dynamic";
    case ShiftKind::Prev:
      return "prev";
  }
  return "constant";
}

ShiftKind shift_kind_from_string(const std::string& text) {
  if (text == "constant") return ShiftKind::Constant;
  if (text == "dynamic") return ShiftKind::Dynamic;
  if (text == "prev") return ShiftKind::Prev;
  throw ConfigError("guidance.shift.kind: expected constant, dynamic or prev, got '" + text + "'");
}

}  // namespace sglab
