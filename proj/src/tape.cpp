#include "mtsent/tape.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mtsent {

namespace {

void size_tensor(Tensor2& t, int rows, int cols) {
  t.rows = rows;
  t.cols = cols;
  t.values.assign(static_cast<std::size_t>(rows) * cols, 0.0);  // keeps capacity on reuse
}

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

void Tape::check_id(int id) const {
  if (id < 0 || id >= used_) throw DisconnectedTape("node id " + std::to_string(id) + " is not on this tape");
}

// Reserves the next slot and resets its bookkeeping; tensor storage is kept
// and resized in place by the caller.
static Tape::Node* alloc_slot(std::vector<Tape::Node>& nodes, int& used) {
  if (used == static_cast<int>(nodes.size())) nodes.emplace_back();
  Tape::Node& n = nodes[static_cast<std::size_t>(used)];
  n.op = Tape::Op::kInput;
  n.a = n.b = -1;
  n.i0 = 0;
  n.d0 = 0.0;
  n.param = nullptr;
  return &n;
}

int Tape::input(const Tensor2& v) {
  Node* n = alloc_slot(nodes_, used_);
  n->op = Op::kInput;
  n->value = v;
  size_tensor(n->adjoint, v.rows, v.cols);
  return used_++;
}

int Tape::param(Parameter& p) {
  if (!p.value.same_shape(p.grad)) {
    throw ShapeMismatch("parameter '" + p.name + "' grad shape differs from value");
  }
  Node* n = alloc_slot(nodes_, used_);
  n->op = Op::kParam;
  n->param = &p;
  size_tensor(n->value, 0, 0);
  size_tensor(n->adjoint, 0, 0);
  return used_++;
}

int Tape::param_row(Parameter& table, int row) {
  if (row < 0 || row >= table.value.rows) {
    throw ShapeMismatch("row " + std::to_string(row) + " outside parameter '" + table.name + "'");
  }
  Node* n = alloc_slot(nodes_, used_);
  n->op = Op::kParamRow;
  n->param = &table;
  n->i0 = row;
  const int d = table.value.cols;
  size_tensor(n->value, d, 1);
  for (int c = 0; c < d; ++c) n->value.values[c] = table.value.at(row, c);
  size_tensor(n->adjoint, d, 1);
  return used_++;
}

int Tape::matvec(int matrix, int x) {
  check_id(matrix);
  check_id(x);
  {
    const Tensor2& a = val(node(matrix));
    const Tensor2& v = val(node(x));
    if (v.cols != 1 || a.cols != v.rows) {
      throw ShapeMismatch("matvec of (" + std::to_string(a.rows) + "x" + std::to_string(a.cols) +
                          ") with (" + std::to_string(v.rows) + "x" + std::to_string(v.cols) + ")");
    }
  }
  Node* n = alloc_slot(nodes_, used_);
  n->op = Op::kMatVec;
  n->a = matrix;
  n->b = x;
  const Tensor2& a = val(node(matrix));
  const Tensor2& v = val(node(x));
  size_tensor(n->value, a.rows, 1);
  size_tensor(n->adjoint, a.rows, 1);
  for (int r = 0; r < a.rows; ++r) {
    double acc = 0.0;
    const double* row = a.values.data() + static_cast<std::size_t>(r) * a.cols;
    for (int c = 0; c < a.cols; ++c) acc += row[c] * v.values[static_cast<std::size_t>(c)];
    n->value.values[static_cast<std::size_t>(r)] = acc;
  }
  return used_++;
}

int Tape::add(int a, int b) {
  check_id(a);
  check_id(b);
  if (!val(node(a)).same_shape(val(node(b)))) throw ShapeMismatch("add of differing shapes");
  Node* n = alloc_slot(nodes_, used_);
  n->op = Op::kAdd;
  n->a = a;
  n->b = b;
  const Tensor2& x = val(node(a));
  const Tensor2& y = val(node(b));
  size_tensor(n->value, x.rows, x.cols);
  size_tensor(n->adjoint, x.rows, x.cols);
  for (std::size_t i = 0; i < x.size(); ++i) n->value.values[i] = x.values[i] + y.values[i];
  return used_++;
}

int Tape::mul(int a, int b) {
  check_id(a);
  check_id(b);
  if (!val(node(a)).same_shape(val(node(b)))) throw ShapeMismatch("mul of differing shapes");
  Node* n = alloc_slot(nodes_, used_);
  n->op = Op::kMul;
  n->a = a;
  n->b = b;
  const Tensor2& x = val(node(a));
  const Tensor2& y = val(node(b));
  size_tensor(n->value, x.rows, x.cols);
  size_tensor(n->adjoint, x.rows, x.cols);
  for (std::size_t i = 0; i < x.size(); ++i) n->value.values[i] = x.values[i] * y.values[i];
  return used_++;
}

int Tape::tanh_of(int a) {
  check_id(a);
  Node* n = alloc_slot(nodes_, used_);
  n->op = Op::kTanh;
  n->a = a;
  const Tensor2& x = val(node(a));
  size_tensor(n->value, x.rows, x.cols);
  size_tensor(n->adjoint, x.rows, x.cols);
  for (std::size_t i = 0; i < x.size(); ++i) n->value.values[i] = std::tanh(x.values[i]);
  return used_++;
}

int Tape::sigmoid_of(int a) {
  check_id(a);
  Node* n = alloc_slot(nodes_, used_);
  n->op = Op::kSigmoid;
  n->a = a;
  const Tensor2& x = val(node(a));
  size_tensor(n->value, x.rows, x.cols);
  size_tensor(n->adjoint, x.rows, x.cols);
  for (std::size_t i = 0; i < x.size(); ++i) n->value.values[i] = stable_sigmoid(x.values[i]);
  return used_++;
}

int Tape::concat(int a, int b) {
  check_id(a);
  check_id(b);
  if (val(node(a)).cols != 1 || val(node(b)).cols != 1) {
    throw ShapeMismatch("concat expects column vectors");
  }
  Node* n = alloc_slot(nodes_, used_);
  n->op = Op::kConcat;
  n->a = a;
  n->b = b;
  const Tensor2& x = val(node(a));
  const Tensor2& y = val(node(b));
  size_tensor(n->value, x.rows + y.rows, 1);
  size_tensor(n->adjoint, x.rows + y.rows, 1);
  std::copy(x.values.begin(), x.values.end(), n->value.values.begin());
  std::copy(y.values.begin(), y.values.end(), n->value.values.begin() + x.rows);
  return used_++;
}

int Tape::dropout(int a, double rate, TrainMode mode, Rng& rng) {
  check_id(a);
  if (rate < 0.0 || rate >= 1.0) throw Error("dropout rate must be in [0, 1)");
  if (mode == TrainMode::Eval || rate == 0.0) return a;  // exact identity
  Node* n = alloc_slot(nodes_, used_);
  n->op = Op::kDropout;
  n->a = a;
  n->d0 = rate;
  const Tensor2& x = val(node(a));
  const double scale = 1.0 / (1.0 - rate);
  size_tensor(n->value, x.rows, x.cols);
  size_tensor(n->adjoint, x.rows, x.cols);
  size_tensor(n->aux, x.rows, x.cols);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = rng.bernoulli(1.0 - rate) ? scale : 0.0;
    n->aux.values[i] = keep;
    n->value.values[i] = x.values[i] * keep;
  }
  return used_++;
}

int Tape::sum(int a) {
  check_id(a);
  Node* n = alloc_slot(nodes_, used_);
  n->op = Op::kSum;
  n->a = a;
  const Tensor2& x = val(node(a));
  size_tensor(n->value, 1, 1);
  size_tensor(n->adjoint, 1, 1);
  double acc = 0.0;
  for (double v : x.values) acc += v;
  n->value.values[0] = acc;
  return used_++;
}

namespace {

void stable_softmax(const Tensor2& logits, Tensor2& out) {
  double mx = logits.values[0];
  for (double v : logits.values) mx = std::max(mx, v);
  double z = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out.values[i] = std::exp(logits.values[i] - mx);
    z += out.values[i];
  }
  for (double& v : out.values) v /= z;
}

}  // namespace

int Tape::softmax(int logits) {
  check_id(logits);
  if (val(node(logits)).cols != 1) throw ShapeMismatch("softmax expects a column vector");
  Node* n = alloc_slot(nodes_, used_);
  n->op = Op::kSoftmax;
  n->a = logits;
  const Tensor2& x = val(node(logits));
  size_tensor(n->value, x.rows, x.cols);
  size_tensor(n->adjoint, x.rows, x.cols);
  stable_softmax(x, n->value);
  return used_++;
}

int Tape::softmax_xent(int logits, int true_class, double weight) {
  check_id(logits);
  {
    const Tensor2& x = val(node(logits));
    if (x.cols != 1 || x.rows < 2) throw ShapeMismatch("softmax_xent expects >= 2 logits");
    if (true_class < 0 || true_class >= x.rows) {
      throw ShapeMismatch("true class " + std::to_string(true_class) + " outside logits");
    }
  }
  Node* n = alloc_slot(nodes_, used_);
  n->op = Op::kSoftmaxXent;
  n->a = logits;
  n->i0 = true_class;
  n->d0 = weight;
  const Tensor2& x = val(node(logits));
  size_tensor(n->aux, x.rows, 1);
  stable_softmax(x, n->aux);
  size_tensor(n->value, 1, 1);
  size_tensor(n->adjoint, 1, 1);
  const double p = std::max(n->aux.values[static_cast<std::size_t>(true_class)], 1e-12);
  n->value.values[0] = -weight * std::log(p);
  return used_++;
}

const Tensor2& Tape::saved_probs(int xent_node) const {
  check_id(xent_node);
  const Node& n = node(xent_node);
  if (n.op != Op::kSoftmaxXent && n.op != Op::kSoftmax) {
    throw Error("node does not hold softmax probabilities");
  }
  return n.op == Op::kSoftmax ? n.value : n.aux;
}

const Tensor2& Tape::value(int id) const {
  check_id(id);
  return val(node(id));
}

void Tape::backward(int loss) {
  if (loss < 0 || loss >= used_) throw DisconnectedTape("loss node is not on this tape");
  if (val(node(loss)).size() != 1) throw ShapeMismatch("loss node must be scalar");
  adj(node(loss)).values[0] = 1.0;

  for (int id = loss; id >= 0; --id) {
    Node& n = node(id);
    const Tensor2& g = n.adjoint;
    switch (n.op) {
      case Op::kInput:
      case Op::kParam:
        break;
      case Op::kParamRow: {
        double* grow = n.param->grad.values.data() +
                       static_cast<std::size_t>(n.i0) * n.param->grad.cols;
        for (int c = 0; c < n.value.rows; ++c) grow[c] += g.values[static_cast<std::size_t>(c)];
        break;
      }
      case Op::kMatVec: {
        Node& an = node(n.a);
        Node& xn = node(n.b);
        const Tensor2& a = val(an);
        const Tensor2& x = val(xn);
        Tensor2& ga = adj(an);
        Tensor2& gx = adj(xn);
        for (int r = 0; r < a.rows; ++r) {
          const double gr = g.values[static_cast<std::size_t>(r)];
          if (gr == 0.0) continue;
          double* ga_row = ga.values.data() + static_cast<std::size_t>(r) * a.cols;
          const double* a_row = a.values.data() + static_cast<std::size_t>(r) * a.cols;
          for (int c = 0; c < a.cols; ++c) {
            ga_row[c] += gr * x.values[static_cast<std::size_t>(c)];
            gx.values[static_cast<std::size_t>(c)] += gr * a_row[c];
          }
        }
        break;
      }
      case Op::kAdd: {
        Tensor2& ga = adj(node(n.a));
        Tensor2& gb = adj(node(n.b));
        for (std::size_t i = 0; i < g.size(); ++i) {
          ga.values[i] += g.values[i];
          gb.values[i] += g.values[i];
        }
        break;
      }
      case Op::kMul: {
        Node& an = node(n.a);
        Node& bn = node(n.b);
        const Tensor2& xa = val(an);
        const Tensor2& xb = val(bn);
        Tensor2& ga = adj(an);
        Tensor2& gb = adj(bn);
        for (std::size_t i = 0; i < g.size(); ++i) {
          ga.values[i] += g.values[i] * xb.values[i];
          gb.values[i] += g.values[i] * xa.values[i];
        }
        break;
      }
      case Op::kTanh: {
        Tensor2& ga = adj(node(n.a));
        for (std::size_t i = 0; i < g.size(); ++i) {
          const double y = n.value.values[i];
          ga.values[i] += g.values[i] * (1.0 - y * y);
        }
        break;
      }
      case Op::kSigmoid: {
        Tensor2& ga = adj(node(n.a));
        for (std::size_t i = 0; i < g.size(); ++i) {
          const double y = n.value.values[i];
          ga.values[i] += g.values[i] * y * (1.0 - y);
        }
        break;
      }
      case Op::kConcat: {
        Node& an = node(n.a);
        Node& bn = node(n.b);
        Tensor2& ga = adj(an);
        Tensor2& gb = adj(bn);
        const std::size_t na = val(an).size();
        for (std::size_t i = 0; i < na; ++i) ga.values[i] += g.values[i];
        for (std::size_t i = 0; i < val(bn).size(); ++i) gb.values[i] += g.values[na + i];
        break;
      }
      case Op::kDropout: {
        Tensor2& ga = adj(node(n.a));
        for (std::size_t i = 0; i < g.size(); ++i) ga.values[i] += g.values[i] * n.aux.values[i];
        break;
      }
      case Op::kSum: {
        Tensor2& ga = adj(node(n.a));
        const double gs = g.values[0];
        for (std::size_t i = 0; i < ga.size(); ++i) ga.values[i] += gs;
        break;
      }
      case Op::kSoftmax: {
        Tensor2& ga = adj(node(n.a));
        double dot = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) dot += g.values[i] * n.value.values[i];
        for (std::size_t i = 0; i < g.size(); ++i) {
          ga.values[i] += n.value.values[i] * (g.values[i] - dot);
        }
        break;
      }
      case Op::kSoftmaxXent: {
        // The 1e-12 clamp guards only the log; the usual p - onehot form stays.
        Tensor2& ga = adj(node(n.a));
        const double gw = g.values[0] * n.d0;
        for (int j = 0; j < n.aux.rows; ++j) {
          const double onehot = j == n.i0 ? 1.0 : 0.0;
          ga.values[static_cast<std::size_t>(j)] += gw * (n.aux.values[static_cast<std::size_t>(j)] - onehot);
        }
        break;
      }
    }
  }
}

}  // namespace mtsent
