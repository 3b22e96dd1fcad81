#pragma once

#include "sglab/types.hpp"

#include <cstddef>
#include <vector>

namespace sglab::nn {

enum class OpKind {
  Parameter,
  Constant,
  MatMul,
  AddBias,
  Add,
  Sub,
  Mul,
  Silu,
  Scale,
  ScaleRows,
  ConcatCols,
  Square,
  Sum,
};

/// Reverse-mode tape over matrix values. Nodes are appended in evaluation
/// order, so the tape is topologically sorted by construction.
class ValueGraph {
 public:
  using NodeId = std::size_t;

  NodeId parameter(std::size_t index, const Mat& value);
  NodeId constant(Mat value);
  NodeId matmul(NodeId a, NodeId b);
  /// a (n x m) plus a 1 x m row broadcast over rows.
  NodeId add_bias(NodeId a, NodeId bias);
  NodeId add(NodeId a, NodeId b);
  NodeId sub(NodeId a, NodeId b);
  NodeId mul(NodeId a, NodeId b);
  NodeId silu(NodeId a);
  NodeId scale(NodeId a, double k);
  NodeId scale_rows(NodeId a, Vec weights);
  NodeId concat_cols(NodeId a, NodeId b);
  NodeId square(NodeId a);
  NodeId sum(NodeId a);

  const Mat& value(NodeId id) const { return nodes_.at(id).value; }
  const Mat& adjoint(NodeId id) const { return nodes_.at(id).adjoint; }
  OpKind kind(NodeId id) const { return nodes_.at(id).kind; }
  std::size_t size() const { return nodes_.size(); }

  /// Seeds d loss / d loss = 1 and sweeps the tape in reverse.
  void backward(NodeId loss);

  /// Adjoints summed per parameter slot; `shapes` gives zero gradients for
  /// parameters absent from the tape.
  std::vector<Mat> parameter_gradients(const std::vector<Mat>& shapes) const;

 private:
  struct Node {
    OpKind kind = OpKind::Constant;
    NodeId a = 0, b = 0;
    double scalar = 0.0;
    Vec weights{};
    std::size_t param_index = 0;
    Mat value{};
    Mat adjoint{};
  };

  NodeId push(Node n);
  void check(NodeId id) const;

  std::vector<Node> nodes_;
};

}  // namespace sglab::nn
