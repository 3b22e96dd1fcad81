#include "sglab/oracle.hpp"

namespace sglab {

FokkerPlanckProblem reverse_process_problem(const ScoreField& field, const GuidanceStack& stack,
                                            const SamplerConfig& config) {
  config.validate();
  stack.validate();
  if (stack.shift.kind == ShiftKind::Prev && stack.omega_sg > 0.0) {
    throw ConfigError("oracle: SG-prev guidance has no frozen-field form");
  }
  if (config.kind == SamplerKind::DDIM) throw ConfigError("oracle: use the sde or ode sampler");
  const NoiseSchedule schedule = field.schedule();
  if (schedule.kind == ProcessKind::RF && config.kind != SamplerKind::ODE) {
    throw ConfigError("oracle: RF processes use the ode sampler");
  }
  const double tau = config.kind == SamplerKind::SDE ? config.tau : 0.0;
  FokkerPlanckProblem p;
  p.times = time_grid(config);
  p.velocity = [&field, stack, schedule, tau](const Mat& pts, double t) -> Mat {
    StepCache cache;
    const Mat s = stack_apply(field, stack, pts, t, cache).score;
    if (schedule.kind == ProcessKind::RF) return -s;
    const double beta = vp_beta(schedule, t);
    return 0.5 * beta * pts + 0.5 * (1.0 + tau * tau) * beta * s;
  };
  p.diffusion = [schedule, tau](double t) {
    if (schedule.kind == ProcessKind::RF) return 0.0;
    return 0.5 * tau * tau * vp_beta(schedule, t);
  };
  return p;
}

}  // namespace sglab
