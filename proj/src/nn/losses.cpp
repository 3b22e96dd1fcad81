#include "sglab/nn/losses.hpp"

#include <cmath>

namespace sglab::nn {

TrainingBatch draw_batch(const DataSource& data, std::size_t n, const NoiseSchedule& schedule, LossKind kind,
                         bool conditional, double drop_prob, std::mt19937_64& rng) {
  if (n == 0) throw DomainError("training batch must not be empty");
  if (!(drop_prob >= 0.0 && drop_prob <= 1.0)) throw DomainError("condition drop probability outside [0, 1]");
  TrainingBatch b;
  std::vector<int> labels;
  b.x0 = data.sample(n, rng, &labels);
  std::normal_distribution<double> normal;
  b.eps.resize(b.x0.rows(), b.x0.cols());
  for (Eigen::Index r = 0; r < b.eps.rows(); ++r) {
    for (Eigen::Index c = 0; c < b.eps.cols(); ++c) b.eps(r, c) = normal(rng);
  }
  const double hi = kind == LossKind::DSM ? 1.0 : 1.0 - schedule.t_eps;
  std::uniform_real_distribution<double> unif(schedule.t_eps, hi);
  b.t.resize(static_cast<Eigen::Index>(n));
  for (Eigen::Index r = 0; r < b.t.size(); ++r) b.t(r) = unif(rng);
  std::bernoulli_distribution drop(drop_prob);
  b.conditions.resize(n, kNullCondition);
  for (std::size_t i = 0; i < n; ++i) {
    const bool dropped = drop(rng);
    if (conditional && !dropped) b.conditions[i] = labels[i];
  }
  return b;
}

Mat noised_inputs(const TrainingBatch& batch, const NoiseSchedule& schedule) {
  Mat out(batch.x0.rows(), batch.x0.cols());
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    const Coefficients c = coefficients(schedule, batch.t(r));
    out.row(r) = c.a * batch.x0.row(r) + c.b * batch.eps.row(r);
  }
  return out;
}

Mat dsm_target(const TrainingBatch& batch, const NoiseSchedule& schedule) {
  const Mat xt = noised_inputs(batch, schedule);
  Mat out(xt.rows(), xt.cols());
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    const Coefficients c = coefficients(schedule, batch.t(r));
    if (!(c.b > 0.0)) throw DomainError("dsm target undefined where sigma_t = 0");
    out.row(r) = -(xt.row(r) - c.a * batch.x0.row(r)) / (c.b * c.b);
  }
  return out;
}

Mat rf_target(const TrainingBatch& batch) { return batch.eps - batch.x0; }

Mat cfm_target(const TrainingBatch& batch, const NoiseSchedule& schedule) {
  const Mat z = noised_inputs(batch, schedule);
  Mat out(z.rows(), z.cols());
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    const Coefficients c = coefficients(schedule, batch.t(r));
    const SnrValue snr = snr_lambda(schedule, batch.t(r));
    out.row(r) = (c.da / c.a) * z.row(r) - 0.5 * c.b * snr.lambda_prime * batch.eps.row(r);
  }
  return out;
}

Vec dsm_weights(const TrainingBatch& batch, const NoiseSchedule& schedule, Weighting weighting) {
  Vec w = Vec::Ones(batch.t.size());
  if (weighting == Weighting::Sigma2) {
    for (Eigen::Index r = 0; r < w.size(); ++r) {
      const double b = coefficients(schedule, batch.t(r)).b;
      w(r) = b * b;
    }
  }
  return w;
}

std::vector<Mat> LossResult::gradients(const ScoreNet& net) {
  graph.backward(loss);
  return graph.parameter_gradients(net.parameters());
}

LossResult weighted_mse(const ScoreNet& net, const Mat& features, const Mat& target, const Vec& weights) {
  if (features.rows() == 0) throw DomainError("loss over an empty batch");
  LossResult res;
  auto& g = res.graph;
  res.output = net.record(g, features);
  const auto diff = g.sub(res.output, g.constant(target));
  const auto per_row = g.scale_rows(g.square(diff), weights);
  res.loss = g.scale(g.sum(per_row), 1.0 / static_cast<double>(features.rows()));
  res.value = g.value(res.loss)(0, 0);
  return res;
}

LossResult dsm_loss(const ScoreNet& net, const TrainingBatch& batch, const NoiseSchedule& schedule,
                    Weighting weighting) {
  if (batch.size() == 0) throw DomainError("loss over an empty batch");
  if (schedule.kind != ProcessKind::VP) throw DomainError("denoising score matching requires a VP schedule");
  const Mat xt = noised_inputs(batch, schedule);
  return weighted_mse(net, net.features(xt, batch.t, batch.conditions), dsm_target(batch, schedule),
                      dsm_weights(batch, schedule, weighting));
}

LossResult flow_loss(const ScoreNet& net, const TrainingBatch& batch, const NoiseSchedule& schedule, LossKind kind) {
  if (batch.size() == 0) throw DomainError("loss over an empty batch");
  if (kind == LossKind::DSM) throw DomainError("flow_loss called with the DSM loss kind");
  if (kind == LossKind::RF && schedule.kind != ProcessKind::RF) {
    throw DomainError("rectified-flow loss requires an RF schedule");
  }
  const Mat z = noised_inputs(batch, schedule);
  const Mat target = kind == LossKind::RF ? rf_target(batch) : cfm_target(batch, schedule);
  return weighted_mse(net, net.features(z, batch.t, batch.conditions), target, Vec::Ones(z.rows()));
}

}  // namespace sglab::nn
