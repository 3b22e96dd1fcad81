#pragma once

#include "sglab/data.hpp"
#include "sglab/nn/adam.hpp"
#include "sglab/nn/losses.hpp"
#include "sglab/nn/net.hpp"
#include "sglab/schedule.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace sglab::nn {

struct TrainConfig {
  LossKind loss = LossKind::DSM;
  Weighting weighting = Weighting::Sigma2;
  std::size_t batch_size = 256;
  long steps = 20000;
  AdamConfig adam;
  // Learning rate decays on a cosine from adam.lr to lr_final.
  double lr_final = 1e-4;
  double drop_prob = 0.1;
  bool conditional = false;
  std::uint64_t seed = 0;
  long log_every = 100;

  void validate() const;
};

struct LossPoint {
  long step;
  double loss;  // mean over the steps since the previous point
};

struct TrainResult {
  ScoreNet net;
  std::vector<LossPoint> trace;
};

using TrainProgress = std::function<void(const LossPoint&)>;

/// Deterministic given config.seed. Throws NumericalError naming the step on
/// a non-finite loss.
TrainResult train(ScoreNet net, const TrainConfig& config, const DataSource& data, const NoiseSchedule& schedule,
                  const TrainProgress& progress = {});

void write_loss_trace(const std::vector<LossPoint>& trace, const std::string& path);

}  // namespace sglab::nn
