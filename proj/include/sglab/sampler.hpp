#pragma once

#include "sglab/field.hpp"
#include "sglab/guidance.hpp"
#include "sglab/schedule.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace sglab {

enum class SamplerKind { SDE, ODE, DDIM };

struct SamplerConfig {
  SamplerKind kind = SamplerKind::DDIM;
  int steps = 50;
  // Stochasticity of the reverse SDE; 0 gives the probability-flow drift.
  double tau = 1.0;
  double t_start = 1.0;
  double t_end = 1e-3;
  std::uint64_t seed = 0;
  bool store_trajectory = false;

  static SamplerConfig defaults(SamplerKind kind);
  void validate() const;
};

struct SampleRun {
  Mat samples;
  // Filled when store_trajectory: state before each step plus the final state.
  std::vector<Mat> trajectory;
  std::vector<double> times;
  std::vector<int> calls_per_step;
  std::vector<double> step_seconds;
  std::uint64_t seed = 0;

  long total_calls() const;
  double total_seconds() const;
};

/// steps + 1 times spaced uniformly from t_start down to t_end.
std::vector<double> time_grid(const SamplerConfig& config);

/// Reverse-SDE step x + {F - (1+tau^2)/2 G^2 s} dt + tau G sqrt(|dt|) z, dt < 0.
Mat euler_maruyama_step(const Mat& x, double t, double dt, const Mat& score, const NoiseSchedule& schedule,
                        double tau, const Mat& noise);
Vec euler_maruyama_step(const Vec& x, double t, double dt, const Vec& score, const NoiseSchedule& schedule,
                        double tau, std::mt19937_64& rng);

Mat ode_euler_step(const Mat& z, double dt, const Mat& velocity);
Vec ode_euler_step(const Vec& z, double t, double dt, const Vec& velocity);

/// Deterministic VP update through the predicted clean sample.
Mat ddim_step(const Mat& x, double t, double t_next, const Mat& score, const NoiseSchedule& schedule);
Vec ddim_step(const Vec& x, double t, double t_next, const Vec& score, const NoiseSchedule& schedule);

/// Probability-flow velocity F - G^2 s / 2 of a VP process.
Mat probability_flow_velocity(const Mat& x, double t, const Mat& score, const NoiseSchedule& schedule);

/// Standard-normal prior draw, n x d, from a stream derived from `seed`.
Mat draw_prior(std::size_t n, int dim, std::uint64_t seed);

/// Runs n chains from the prior; one guided evaluation and one solver step per time interval.
SampleRun run_chain(const ScoreField& field, const GuidanceStack& stack, const SamplerConfig& config, std::size_t n);
SampleRun run_chain_from(const ScoreField& field, const GuidanceStack& stack, const SamplerConfig& config,
                         Mat start);

std::string to_string(SamplerKind kind);
SamplerKind sampler_kind_from_string(const std::string& text);

}  // namespace sglab
