#include "sglab/nn/graph.hpp"

#include <cmath>
#include <string>

namespace sglab::nn {

namespace {

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

void same_shape(const Mat& a, const Mat& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(op) + ": shape mismatch");
  }
}

}  // namespace

void ValueGraph::check(NodeId id) const {
  if (id >= nodes_.size()) throw std::out_of_range("graph node " + std::to_string(id) + " does not exist");
}

ValueGraph::NodeId ValueGraph::push(Node n) {
  nodes_.push_back(std::move(n));
  return nodes_.size() - 1;
}

ValueGraph::NodeId ValueGraph::parameter(std::size_t index, const Mat& value) {
  Node n{OpKind::Parameter};
  n.param_index = index;
  n.value = value;
  return push(std::move(n));
}

ValueGraph::NodeId ValueGraph::constant(Mat value) {
  Node n{OpKind::Constant};
  n.value = std::move(value);
  return push(std::move(n));
}

ValueGraph::NodeId ValueGraph::matmul(NodeId a, NodeId b) {
  check(a);
  check(b);
  if (value(a).cols() != value(b).rows()) throw DimensionError("matmul: inner dimensions differ");
  Node n{OpKind::MatMul, a, b};
  n.value = value(a) * value(b);
  return push(std::move(n));
}

ValueGraph::NodeId ValueGraph::add_bias(NodeId a, NodeId bias) {
  check(a);
  check(bias);
  if (value(bias).rows() != 1 || value(bias).cols() != value(a).cols()) {
    throw DimensionError("add_bias: bias must be a 1 x cols row");
  }
  Node n{OpKind::AddBias, a, bias};
  n.value = value(a).rowwise() + value(bias).row(0);
  return push(std::move(n));
}

ValueGraph::NodeId ValueGraph::add(NodeId a, NodeId b) {
  check(a);
  check(b);
  same_shape(value(a), value(b), "add");
  Node n{OpKind::Add, a, b};
  n.value = value(a) + value(b);
  return push(std::move(n));
}

ValueGraph::NodeId ValueGraph::sub(NodeId a, NodeId b) {
  check(a);
  check(b);
  same_shape(value(a), value(b), "sub");
  Node n{OpKind::Sub, a, b};
  n.value = value(a) - value(b);
  return push(std::move(n));
}

ValueGraph::NodeId ValueGraph::mul(NodeId a, NodeId b) {
  check(a);
  check(b);
  same_shape(value(a), value(b), "mul");
  Node n{OpKind::Mul, a, b};
  n.value = value(a).cwiseProduct(value(b));
  return push(std::move(n));
}

ValueGraph::NodeId ValueGraph::silu(NodeId a) {
  check(a);
  Node n{OpKind::Silu, a};
  n.value = value(a).unaryExpr([](double v) { return v * sigmoid(v); });
  return push(std::move(n));
}

ValueGraph::NodeId ValueGraph::scale(NodeId a, double k) {
  check(a);
  Node n{OpKind::Scale, a};
  n.scalar = k;
  n.value = k * value(a);
  return push(std::move(n));
}

ValueGraph::NodeId ValueGraph::scale_rows(NodeId a, Vec weights) {
  check(a);
  if (weights.size() != value(a).rows()) throw DimensionError("scale_rows: one weight per row required");
  Node n{OpKind::ScaleRows, a};
  n.value = weights.asDiagonal() * value(a);
  n.weights = std::move(weights);
  return push(std::move(n));
}

ValueGraph::NodeId ValueGraph::concat_cols(NodeId a, NodeId b) {
  check(a);
  check(b);
  if (value(a).rows() != value(b).rows()) throw DimensionError("concat_cols: row counts differ");
  Node n{OpKind::ConcatCols, a, b};
  n.value.resize(value(a).rows(), value(a).cols() + value(b).cols());
  n.value << value(a), value(b);
  return push(std::move(n));
}

ValueGraph::NodeId ValueGraph::square(NodeId a) {
  check(a);
  Node n{OpKind::Square, a};
  n.value = value(a).array().square().matrix();
  return push(std::move(n));
}

ValueGraph::NodeId ValueGraph::sum(NodeId a) {
  check(a);
  Node n{OpKind::Sum, a};
  n.value = Mat::Constant(1, 1, value(a).sum());
  return push(std::move(n));
}

void ValueGraph::backward(NodeId loss) {
  check(loss);
  if (value(loss).rows() != 1 || value(loss).cols() != 1) {
    throw DimensionError("backward: loss node must be a 1 x 1 scalar");
  }
  for (auto& n : nodes_) n.adjoint = Mat::Zero(n.value.rows(), n.value.cols());
  nodes_[loss].adjoint(0, 0) = 1.0;

  for (std::size_t i = loss + 1; i-- > 0;) {
    Node& n = nodes_[i];
    const Mat& g = n.adjoint;
    switch (n.kind) {
      case OpKind::Parameter:
      case OpKind::Constant:
        break;
      case OpKind::MatMul:
        nodes_[n.a].adjoint.noalias() += g * nodes_[n.b].value.transpose();
        nodes_[n.b].adjoint.noalias() += nodes_[n.a].value.transpose() * g;
        break;
      case OpKind::AddBias:
        nodes_[n.a].adjoint += g;
        nodes_[n.b].adjoint += g.colwise().sum();
        break;
      case OpKind::Add:
        nodes_[n.a].adjoint += g;
        nodes_[n.b].adjoint += g;
        break;
      case OpKind::Sub:
        nodes_[n.a].adjoint += g;
        nodes_[n.b].adjoint -= g;
        break;
      case OpKind::Mul:
        nodes_[n.a].adjoint += g.cwiseProduct(nodes_[n.b].value);
        nodes_[n.b].adjoint += g.cwiseProduct(nodes_[n.a].value);
        break;
      case OpKind::Silu: {
        const Mat& in = nodes_[n.a].value;
        nodes_[n.a].adjoint += g.binaryExpr(in, [](double gi, double v) {
          const double s = sigmoid(v);
          return gi * s * (1.0 + v * (1.0 - s));
        });
        break;
      }
      case OpKind::Scale:
        nodes_[n.a].adjoint += n.scalar * g;
        break;
      case OpKind::ScaleRows:
        nodes_[n.a].adjoint += n.weights.asDiagonal() * g;
        break;
      case OpKind::ConcatCols: {
        const auto ca = nodes_[n.a].value.cols();
        nodes_[n.a].adjoint += g.leftCols(ca);
        nodes_[n.b].adjoint += g.rightCols(g.cols() - ca);
        break;
      }
      case OpKind::Square:
        nodes_[n.a].adjoint += 2.0 * g.cwiseProduct(nodes_[n.a].value);
        break;
      case OpKind::Sum:
        nodes_[n.a].adjoint.array() += g(0, 0);
        break;
    }
  }
}

std::vector<Mat> ValueGraph::parameter_gradients(const std::vector<Mat>& shapes) const {
  std::vector<Mat> grads;
  grads.reserve(shapes.size());
  for (const auto& s : shapes) grads.push_back(Mat::Zero(s.rows(), s.cols()));
  for (const auto& n : nodes_) {
    if (n.kind != OpKind::Parameter) continue;
    if (n.param_index >= grads.size()) throw std::out_of_range("parameter index outside the shape list");
    if (n.adjoint.size() == 0) continue;
    grads[n.param_index] += n.adjoint;
  }
  return grads;
}

}  // namespace sglab::nn
