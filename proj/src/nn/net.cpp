#include "sglab/nn/net.hpp"

#include <cmath>
#include <string>

namespace sglab::nn {

void NetShape::validate() const {
  if (data_dim < 1) throw ConfigError("network data dimension must be positive");
  if (time_embed < 2 || time_embed % 2 != 0) throw ConfigError("train.time_embed must be an even number >= 2");
  if (vocab < 0) throw ConfigError("network vocabulary size must be non-negative");
  for (int h : hidden) {
    if (h < 1) throw ConfigError("train.hidden widths must be positive");
  }
}

Mat time_embedding(const Vec& t, int width) {
  const int half = width / 2;
  Mat out(t.size(), width);
  for (int k = 0; k < half; ++k) {
    const double freq = half > 1 ? std::pow(1000.0, static_cast<double>(k) / (half - 1)) : 1.0;
    for (Eigen::Index r = 0; r < t.size(); ++r) {
      out(r, k) = std::sin(freq * t(r));
      out(r, half + k) = std::cos(freq * t(r));
    }
  }
  return out;
}

ScoreNet::ScoreNet(NetShape shape) : shape_(std::move(shape)) {
  shape_.validate();
  int in = shape_.input_dim();
  for (int h : shape_.hidden) {
    params_.push_back(Mat::Zero(in, h));
    params_.push_back(Mat::Zero(1, h));
    in = h;
  }
  params_.push_back(Mat::Zero(in, shape_.data_dim));
  params_.push_back(Mat::Zero(1, shape_.data_dim));
}

ScoreNet ScoreNet::initialized(NetShape shape, std::mt19937_64& rng) {
  ScoreNet net(std::move(shape));
  std::normal_distribution<double> normal;
  for (std::size_t i = 0; i < net.params_.size(); i += 2) {
    Mat& w = net.params_[i];
    const double scale = 1.0 / std::sqrt(static_cast<double>(w.rows()));
    for (Eigen::Index c = 0; c < w.cols(); ++c) {
      for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = scale * normal(rng);
    }
  }
  return net;
}

std::size_t ScoreNet::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += static_cast<std::size_t>(p.size());
  return n;
}

void ScoreNet::check_condition(Condition c) const {
  if (c == kNullCondition) return;
  if (c < 0 || c >= shape_.vocab) {
    throw DomainError("unknown condition id " + std::to_string(c) + " (vocabulary " + std::to_string(shape_.vocab) + ")");
  }
}

Mat ScoreNet::features(const Mat& x, const Vec& t, const std::vector<Condition>& conditions) const {
  if (x.cols() != shape_.data_dim) throw DimensionError("network input has the wrong dimension");
  if (t.size() != x.rows()) throw DimensionError("one time per input row required");
  if (conditions.size() != static_cast<std::size_t>(x.rows())) throw DimensionError("one condition per input row required");
  for (Eigen::Index r = 0; r < t.size(); ++r) {
    if (!(t(r) >= 0.0 && t(r) <= 1.0)) throw DomainError("network time outside [0, 1]");
  }
  Mat f = Mat::Zero(x.rows(), shape_.input_dim());
  f.leftCols(shape_.data_dim) = x;
  f.middleCols(shape_.data_dim, shape_.time_embed) = time_embedding(t, shape_.time_embed);
  const int cw = shape_.condition_width();
  for (std::size_t r = 0; r < conditions.size(); ++r) {
    const Condition c = conditions[r];
    check_condition(c);
    if (cw > 0) {
      const int slot = c == kNullCondition ? shape_.vocab : c;
      f(static_cast<Eigen::Index>(r), shape_.data_dim + shape_.time_embed + slot) = 1.0;
    }
  }
  return f;
}

Mat ScoreNet::forward(const Mat& x, const Vec& t, const std::vector<Condition>& conditions) const {
  Mat h = features(x, t, conditions);
  const std::size_t layers = params_.size() / 2;
  for (std::size_t l = 0; l < layers; ++l) {
    Mat z = h * params_[2 * l];
    z.rowwise() += params_[2 * l + 1].row(0);
    if (l + 1 < layers) {
      h = z.unaryExpr([](double v) { return v * (1.0 / (1.0 + std::exp(-v))); });
    } else {
      h = std::move(z);
    }
  }
  return h;
}

Mat ScoreNet::forward(const Mat& x, double t, Condition c) const {
  return forward(x, Vec::Constant(x.rows(), t), std::vector<Condition>(static_cast<std::size_t>(x.rows()), c));
}

Vec ScoreNet::forward(const Vec& x, double t, Condition c) const {
  const Mat row = x.transpose();
  return forward(row, t, c).row(0).transpose();
}

ValueGraph::NodeId ScoreNet::record(ValueGraph& graph, const Mat& features) const {
  auto h = graph.constant(features);
  const std::size_t layers = params_.size() / 2;
  for (std::size_t l = 0; l < layers; ++l) {
    const auto w = graph.parameter(2 * l, params_[2 * l]);
    const auto b = graph.parameter(2 * l + 1, params_[2 * l + 1]);
    h = graph.add_bias(graph.matmul(h, w), b);
    if (l + 1 < layers) h = graph.silu(h);
  }
  return h;
}

}  // namespace sglab::nn
