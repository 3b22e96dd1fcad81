#include "sglab/nn/train.hpp"

#include "sglab/io.hpp"

#include <cmath>
#include <numbers>

namespace sglab::nn {

void TrainConfig::validate() const {
  if (!(adam.lr > 0.0)) throw ConfigError("train.lr must be positive");
  if (!(lr_final > 0.0 && lr_final <= adam.lr)) throw ConfigError("train.lr_final must lie in (0, train.lr]");
  if (!(drop_prob >= 0.0 && drop_prob <= 1.0)) throw ConfigError("train.drop_prob must lie in [0, 1]");
  if (batch_size == 0) throw ConfigError("train.batch_size must be positive");
  if (steps < 0) throw ConfigError("train.steps must be non-negative");
  if (log_every < 1) throw ConfigError("train.log_every must be positive");
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0 && adam.beta2 >= 0.0 && adam.beta2 < 1.0)) {
    throw ConfigError("train.beta1/beta2 must lie in [0, 1)");
  }
  if (!(adam.eps > 0.0)) throw ConfigError("train.adam_eps must be positive");
}

TrainResult train(ScoreNet net, const TrainConfig& config, const DataSource& data, const NoiseSchedule& schedule,
                  const TrainProgress& progress) {
  config.validate();
  if (data.dim() != net.shape().data_dim) throw DimensionError("training data and network dimensions differ");
  if (config.loss == LossKind::DSM && schedule.kind != ProcessKind::VP) {
    throw ConfigError("train.loss=dsm needs schedule.kind=vp");
  }
  if (config.loss == LossKind::RF && schedule.kind != ProcessKind::RF) {
    throw ConfigError("train.loss=rf needs schedule.kind=rf");
  }
  std::mt19937_64 rng(config.seed);
  AdamState state;
  AdamConfig adam = config.adam;
  TrainResult result;
  double window = 0.0;
  long window_count = 0;
  for (long step = 1; step <= config.steps; ++step) {
    const TrainingBatch batch =
        draw_batch(data, config.batch_size, schedule, config.loss, config.conditional, config.drop_prob, rng);
    LossResult loss = config.loss == LossKind::DSM ? dsm_loss(net, batch, schedule, config.weighting)
                                                   : flow_loss(net, batch, schedule, config.loss);
    if (!std::isfinite(loss.value)) {
      throw NumericalError("non-finite training loss at step " + std::to_string(step));
    }
    const std::vector<Mat> grads = loss.gradients(net);
    const double progress_frac = static_cast<double>(step - 1) / static_cast<double>(config.steps);
    adam.lr = config.lr_final +
              0.5 * (config.adam.lr - config.lr_final) * (1.0 + std::cos(std::numbers::pi * progress_frac));
    adam_update(net.parameters(), grads, state, adam);
    window += loss.value;
    ++window_count;
    if (step % config.log_every == 0 || step == config.steps) {
      const LossPoint p{step, window / static_cast<double>(window_count)};
      result.trace.push_back(p);
      if (progress) progress(p);
      window = 0.0;
      window_count = 0;
    }
  }
  result.net = std::move(net);
  return result;
}

void write_loss_trace(const std::vector<LossPoint>& trace, const std::string& path) {
  std::ofstream out = open_output(path);
  out << "step,loss\n";
  for (const auto& p : trace) out << p.step << ',' << format_double(p.loss) << '\n';
  check_stream(out, path);
}

}  // namespace sglab::nn
