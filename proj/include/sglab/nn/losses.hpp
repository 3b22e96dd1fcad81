#pragma once

#include "sglab/data.hpp"
#include "sglab/nn/graph.hpp"
#include "sglab/nn/net.hpp"
#include "sglab/schedule.hpp"

#include <random>
#include <vector>

namespace sglab::nn {

enum class LossKind { DSM, CFM, RF };
enum class Weighting { Sigma2, Unit };

/// Frozen random draws for one loss evaluation.
struct TrainingBatch {
  Mat x0;
  Mat eps;
  Vec t;
  std::vector<Condition> conditions;

  std::size_t size() const { return static_cast<std::size_t>(x0.rows()); }
};

/// Samples x0 from `data`, eps ~ N(0, I) and t uniform on the loss's time
/// range ([t_eps, 1] for DSM, [t_eps, 1 - t_eps] for flows). Labels are kept
/// when `conditional`, then replaced by the empty label with `drop_prob`.
TrainingBatch draw_batch(const DataSource& data, std::size_t n, const NoiseSchedule& schedule, LossKind kind,
                         bool conditional, double drop_prob, std::mt19937_64& rng);

/// x_t = a_t x0 + b_t eps, row by row.
Mat noised_inputs(const TrainingBatch& batch, const NoiseSchedule& schedule);

/// Conditional score grad log q_t(x_t | x0) = -(x_t - alpha_t x0) / sigma_t^2.
Mat dsm_target(const TrainingBatch& batch, const NoiseSchedule& schedule);
/// eps - x0.
Mat rf_target(const TrainingBatch& batch);
/// (a'_t / a_t) z_t - (b_t / 2) lambda'_t eps.
Mat cfm_target(const TrainingBatch& batch, const NoiseSchedule& schedule);

Vec dsm_weights(const TrainingBatch& batch, const NoiseSchedule& schedule, Weighting weighting);

struct LossResult {
  double value = 0.0;
  ValueGraph graph;
  ValueGraph::NodeId loss = 0;
  ValueGraph::NodeId output = 0;

  /// Runs backward and returns d loss / d parameter for every parameter of `net`.
  std::vector<Mat> gradients(const ScoreNet& net);
};

/// Weighted mean over rows of w_r * |pred_r - target_r|^2, recorded on a graph.
LossResult weighted_mse(const ScoreNet& net, const Mat& features, const Mat& target, const Vec& weights);

LossResult dsm_loss(const ScoreNet& net, const TrainingBatch& batch, const NoiseSchedule& schedule,
                    Weighting weighting = Weighting::Sigma2);
LossResult flow_loss(const ScoreNet& net, const TrainingBatch& batch, const NoiseSchedule& schedule, LossKind kind);

}  // namespace sglab::nn
