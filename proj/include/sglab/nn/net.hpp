#pragma once

#include "sglab/nn/graph.hpp"
#include "sglab/types.hpp"

#include <random>
#include <vector>

namespace sglab::nn {

struct NetShape {
  int data_dim = 1;
  int time_embed = 16;
  // Number of class labels; 0 means unconditional (only the empty label).
  int vocab = 0;
  std::vector<int> hidden{128, 128};

  int condition_width() const { return vocab > 0 ? vocab + 1 : 0; }
  int input_dim() const { return data_dim + time_embed + condition_width(); }
  void validate() const;
  bool operator==(const NetShape&) const = default;
};

/// Sinusoidal features of t: sin then cos at frequencies geometric in [1, 1000].
Mat time_embedding(const Vec& t, int width);

/// MLP with SiLU activations mapping (x, t, c) to a d-dimensional score or
/// velocity. Parameters are stored as [W0, b0, W1, b1, ...]; W is in x out.
class ScoreNet {
 public:
  ScoreNet() = default;
  explicit ScoreNet(NetShape shape);  // all parameters zero

  static ScoreNet initialized(NetShape shape, std::mt19937_64& rng);

  const NetShape& shape() const { return shape_; }
  const std::vector<Mat>& parameters() const { return params_; }
  std::vector<Mat>& parameters() { return params_; }
  std::size_t parameter_count() const;

  /// Concatenated [x, time embedding, one-hot condition] inputs.
  Mat features(const Mat& x, const Vec& t, const std::vector<Condition>& conditions) const;

  Mat forward(const Mat& x, const Vec& t, const std::vector<Condition>& conditions) const;
  Mat forward(const Mat& x, double t, Condition c) const;
  Vec forward(const Vec& x, double t, Condition c) const;

  /// Records the forward pass on `graph` and returns the output node.
  ValueGraph::NodeId record(ValueGraph& graph, const Mat& features) const;

 private:
  void check_condition(Condition c) const;

  NetShape shape_;
  std::vector<Mat> params_;
};

}  // namespace sglab::nn
