#pragma once

#include "sglab/types.hpp"

#include <vector>

namespace sglab::nn {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<Mat> m;
  std::vector<Mat> v;
  long step = 0;
};

/// One bias-corrected Adam step. Moments are created on first use.
void adam_update(std::vector<Mat>& params, const std::vector<Mat>& grads, AdamState& state,
                 const AdamConfig& config);

}  // namespace sglab::nn
