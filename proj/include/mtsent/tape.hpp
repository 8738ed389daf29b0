#pragma once

#include <cstdint>
#include <vector>

#include "mtsent/rng.hpp"
#include "mtsent/tensor.hpp"

namespace mtsent {

enum class TrainMode { Train, Eval };

/// Reverse-mode autodiff over column vectors and parameter matrices.
///
/// Forward calls append nodes; node ids grow in creation order, which is a
/// topological order of the computation. backward() seeds the loss adjoint
/// and sweeps the nodes once in reverse, accumulating into Parameter::grad.
/// reset() rewinds the tape without releasing node storage, so per-example
/// reuse does not reallocate.
class Tape {
 public:
  enum class Op : std::uint8_t {
    kInput,        // constant leaf
    kParam,        // parameter leaf; reads param->value, writes param->grad
    kParamRow,     // one row of a parameter, as a column vector
    kMatVec,       // value = A(a) * x(b)
    kAdd,          // elementwise a + b
    kMul,          // elementwise a * b
    kTanh,
    kSigmoid,
    kConcat,       // [a; b] stacked column vectors
    kDropout,      // inverted dropout; aux holds the kept/scaled mask
    kSum,          // scalar sum of all entries
    kSoftmax,      // probabilities (inference)
    kSoftmaxXent,  // scalar weighted cross-entropy; aux holds probabilities
  };

  struct Node {
    Op op = Op::kInput;
    int a = -1;
    int b = -1;
    int i0 = 0;         // row index / true class
    double d0 = 0.0;    // class weight / dropout rate
    Parameter* param = nullptr;
    Tensor2 value;      // unused for kParam (lives in the Parameter)
    Tensor2 adjoint;
    Tensor2 aux;        // saved activations (dropout mask, softmax probs)
  };

  // ---- leaves ----
  int input(const Tensor2& v);
  int param(Parameter& p);
  /// Row `row` of `table.value` as a (cols x 1) vector; backward accumulates
  /// into that row of table.grad only.
  int param_row(Parameter& table, int row);

  // ---- ops ----
  int matvec(int matrix, int x);
  int add(int a, int b);
  int mul(int a, int b);
  int tanh_of(int a);
  int sigmoid_of(int a);
  int concat(int a, int b);
  int dropout(int a, double rate, TrainMode mode, Rng& rng);
  int sum(int a);
  int softmax(int logits);
  /// Numerically stable softmax + weighted negative log-likelihood:
  /// loss = -weight * log(max(p[true_class], 1e-12)). Scalar node.
  int softmax_xent(int logits, int true_class, double weight);

  /// Probabilities saved by a kSoftmaxXent node.
  const Tensor2& saved_probs(int xent_node) const;

  const Tensor2& value(int id) const;

  /// Seed d(loss)/d(loss) = 1 and sweep the tape in reverse creation order.
  /// Parameter gradients ACCUMULATE; callers zero them between batches.
  void backward(int loss);

  void reset() { used_ = 0; }
  int size() const { return used_; }

 private:
  Node& node(int id) { return nodes_[static_cast<std::size_t>(id)]; }
  const Node& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
  const Tensor2& val(const Node& n) const { return n.op == Op::kParam ? n.param->value : n.value; }
  Tensor2& adj(Node& n) { return n.op == Op::kParam ? n.param->grad : n.adjoint; }
  void check_id(int id) const;

  std::vector<Node> nodes_;
  int used_ = 0;
};

}  // namespace mtsent
