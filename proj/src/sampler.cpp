#include "sglab/sampler.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

namespace sglab {

SamplerConfig SamplerConfig::defaults(SamplerKind kind) {
  SamplerConfig c;
  c.kind = kind;
  c.steps = kind == SamplerKind::ODE ? 28 : 50;
  if (kind == SamplerKind::SDE) c.steps = 1000;
  return c;
}

void SamplerConfig::validate() const {
  if (steps < 1) throw ConfigError("sampler.steps must be >= 1");
  if (!(tau >= 0.0)) throw ConfigError("sampler.tau must be >= 0");
  if (!(t_start <= 1.0 && t_end > 0.0 && t_end < t_start)) {
    throw ConfigError("sampler.t_end must satisfy 0 < t_end < t_start <= 1");
  }
}

long SampleRun::total_calls() const { return std::accumulate(calls_per_step.begin(), calls_per_step.end(), 0L); }

double SampleRun::total_seconds() const { return std::accumulate(step_seconds.begin(), step_seconds.end(), 0.0); }

std::vector<double> time_grid(const SamplerConfig& config) {
  std::vector<double> ts(static_cast<std::size_t>(config.steps) + 1);
  for (int k = 0; k <= config.steps; ++k) {
    ts[static_cast<std::size_t>(k)] =
        config.t_start + (config.t_end - config.t_start) * static_cast<double>(k) / config.steps;
  }
  ts.back() = config.t_end;
  return ts;
}

namespace {

void require_finite(const Mat& m, const char* what) {
  if (!m.allFinite()) throw NumericalError(std::string(what) + " is not finite");
}

}  // namespace

Mat euler_maruyama_step(const Mat& x, double t, double dt, const Mat& score, const NoiseSchedule& schedule,
                        double tau, const Mat& noise) {
  require_finite(score, "euler_maruyama_step: score");
  const double beta = vp_beta(schedule, t);
  const double g2 = beta;
  Mat drift = -0.5 * beta * x - 0.5 * (1.0 + tau * tau) * g2 * score;
  Mat out = x + dt * drift;
  if (tau > 0.0) out += tau * std::sqrt(g2 * std::abs(dt)) * noise;
  return out;
}

Vec euler_maruyama_step(const Vec& x, double t, double dt, const Vec& score, const NoiseSchedule& schedule,
                        double tau, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Mat noise(1, x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) noise(0, j) = normal(rng);
  const Mat row = x.transpose();
  const Mat s = score.transpose();
  return euler_maruyama_step(row, t, dt, s, schedule, tau, noise).row(0).transpose();
}

Mat ode_euler_step(const Mat& z, double dt, const Mat& velocity) {
  require_finite(velocity, "ode_euler_step: velocity");
  return z + dt * velocity;
}

Vec ode_euler_step(const Vec& z, double /*t*/, double dt, const Vec& velocity) {
  if (!velocity.allFinite()) throw NumericalError("ode_euler_step: velocity is not finite");
  return z + dt * velocity;
}

Mat ddim_step(const Mat& x, double t, double t_next, const Mat& score, const NoiseSchedule& schedule) {
  require_finite(score, "ddim_step: score");
  if (t_next > t) throw DomainError("ddim_step: t_next must not exceed t");
  const auto [a, s] = vp_alpha_sigma(schedule, t);
  if (!(s > 0.0)) throw DomainError("ddim_step: sigma_t = 0 at t = " + std::to_string(t));
  if (t_next == t) return x;
  const auto [a_next, s_next] = vp_alpha_sigma(schedule, t_next);
  const Mat x0 = (x + s * s * score) / a;
  return a_next * x0 + s_next * (x - a * x0) / s;
}

Vec ddim_step(const Vec& x, double t, double t_next, const Vec& score, const NoiseSchedule& schedule) {
  const Mat row = x.transpose();
  const Mat sc = score.transpose();
  return ddim_step(row, t, t_next, sc, schedule).row(0).transpose();
}

Mat probability_flow_velocity(const Mat& x, double t, const Mat& score, const NoiseSchedule& schedule) {
  const double beta = vp_beta(schedule, t);
  return -0.5 * beta * x - 0.5 * beta * score;
}

Mat draw_prior(std::size_t n, int dim, std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0u};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal;
  Mat x(static_cast<Eigen::Index>(n), dim);
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (Eigen::Index c = 0; c < x.cols(); ++c) x(r, c) = normal(rng);
  }
  return x;
}

SampleRun run_chain(const ScoreField& field, const GuidanceStack& stack, const SamplerConfig& config,
                    std::size_t n) {
  return run_chain_from(field, stack, config, draw_prior(n, field.dim(), config.seed));
}

SampleRun run_chain_from(const ScoreField& field, const GuidanceStack& stack, const SamplerConfig& config,
                         Mat start) {
  config.validate();
  stack.validate();
  const NoiseSchedule& schedule = field.schedule();
  if (start.cols() != field.dim()) throw DimensionError("chain start has the wrong dimension");
  if (schedule.kind == ProcessKind::RF && config.kind != SamplerKind::ODE) {
    throw ConfigError("sampler.kind: RF processes are sampled with the ode sampler");
  }
  SampleRun run;
  run.seed = config.seed;
  run.times = time_grid(config);
  Mat x = std::move(start);
  if (x.rows() == 0) {
    run.samples = x;
    return run;
  }
  std::seed_seq seq{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32), 1u};
  std::mt19937_64 noise_rng(seq);
  std::normal_distribution<double> normal;
  StepCache cache;
  for (int k = 0; k < config.steps; ++k) {
    const auto tic = std::chrono::steady_clock::now();
    const double t = run.times[static_cast<std::size_t>(k)];
    const double t_next = run.times[static_cast<std::size_t>(k) + 1];
    const double dt = t_next - t;
    if (config.store_trajectory) run.trajectory.push_back(x);
    const GuidedOutput g = stack_apply(field, stack, x, t, cache);
    switch (config.kind) {
      case SamplerKind::DDIM:
        x = ddim_step(x, t, t_next, g.score, schedule);
        break;
      case SamplerKind::ODE:
        x = ode_euler_step(x, dt,
                           schedule.kind == ProcessKind::RF ? g.score
                                                            : probability_flow_velocity(x, t, g.score, schedule));
        break;
      case SamplerKind::SDE: {
        Mat noise(x.rows(), x.cols());
        for (Eigen::Index r = 0; r < noise.rows(); ++r) {
          for (Eigen::Index c = 0; c < noise.cols(); ++c) noise(r, c) = normal(noise_rng);
        }
        x = euler_maruyama_step(x, t, dt, g.score, schedule, config.tau, noise);
        break;
      }
    }
    if (!x.allFinite()) throw NumericalError("chain state became non-finite at step " + std::to_string(k));
    run.calls_per_step.push_back(g.model_calls);
    run.step_seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - tic).count());
  }
  if (config.store_trajectory) run.trajectory.push_back(x);
  run.samples = std::move(x);
  return run;
}

std::string to_string(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::SDE:
      return "sde";
    case SamplerKind::ODE:
      return "ode";
    case SamplerKind::DDIM:
      return "ddim";
  }
  return "ddim";
}

SamplerKind sampler_kind_from_string(const std::string& text) {
  if (text == "sde") return SamplerKind::SDE;
  if (text == "ode") return SamplerKind::ODE;
  if (text == "ddim") return SamplerKind::DDIM;
  throw ConfigError("sampler.kind: expected sde, ode or ddim, got '" + text + "'");
}

}  // namespace sglab
