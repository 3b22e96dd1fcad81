#include "sglab/nn/adam.hpp"

#include <cmath>

namespace sglab::nn {

void adam_update(std::vector<Mat>& params, const std::vector<Mat>& grads, AdamState& state,
                 const AdamConfig& config) {
  if (params.size() != grads.size()) throw DimensionError("adam: parameter and gradient counts differ");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].rows() != grads[i].rows() || params[i].cols() != grads[i].cols()) {
      throw DimensionError("adam: gradient shape differs from its parameter");
    }
  }
  if (state.m.empty()) {
    for (const auto& p : params) {
      state.m.push_back(Mat::Zero(p.rows(), p.cols()));
      state.v.push_back(Mat::Zero(p.rows(), p.cols()));
    }
  } else if (state.m.size() != params.size()) {
    throw DimensionError("adam: optimizer state does not match the parameters");
  }
  ++state.step;
  const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = config.beta1 * state.m[i] + (1.0 - config.beta1) * grads[i];
    state.v[i] = config.beta2 * state.v[i] + (1.0 - config.beta2) * grads[i].cwiseProduct(grads[i]);
    params[i].array() -= config.lr * (state.m[i].array() / c1) / ((state.v[i].array() / c2).sqrt() + config.eps);
  }
}

}  // namespace sglab::nn
