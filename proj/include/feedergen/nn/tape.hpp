#pragma once

#include <string>
#include <vector>

#include "feedergen/matrix.hpp"
#include "feedergen/rng.hpp"

namespace feedergen::nn {

// Learnable tensor: value plus gradient plus RMSProp accumulator, addressed
// by name in checkpoints.
struct Param {
  std::string name;
  Matrix value;
  Matrix grad;
  Matrix rms;

  Param() = default;
  Param(std::string n, int rows, int cols)
      : name(std::move(n)), value(rows, cols), grad(rows, cols), rms(rows, cols) {}

  // Uniform init in [-1/sqrt(fan_in), +1/sqrt(fan_in)].
  void init_uniform(Rng& rng, int fan_in);
  void zero_grad() { grad.fill(0.0); }
};

// Reverse-mode tape over the fixed forward graphs. Ops evaluate eagerly into
// node values; backward() walks the recorded nodes in reverse and accumulates
// into bound Params' grad buffers. A tape is built fresh per forward pass.
class Tape {
 public:
  using Id = int;

  // Constant leaf; no gradient flows into it.
  Id input(Matrix v);
  // Differentiable leaf bound to external storage. backward() adds into
  // p.grad (which the optimizer zeroes between steps).
  Id param(Param& p);

  Id matmul(Id a, Id b);     // [m x k] * [k x n]
  Id matmul_nt(Id a, Id b);  // a * b^T; a [m x k], b [n x k]
  Id add_rowvec(Id x, Id bias);  // bias [1 x n] broadcast over rows
  Id relu(Id x);
  Id leaky_relu(Id x, double slope);
  Id tanh_(Id x);
  Id softmax_rows(Id x);
  Id softmax_cols(Id x);
  // Per-row normalization (population variance) with learned per-column
  // scale/shift; gamma/beta are [1 x n] leaves. Row width must be >= 2.
  Id layer_norm(Id x, Id gamma, Id beta, double eps = 1e-5);
  Id concat_cols(const std::vector<Id>& xs);
  Id max_all(Id x);  // global max pool -> [1 x 1]

  const Matrix& value(Id id) const { return nodes_[id].value; }
  // Gradient of the last backward() root w.r.t. this node; zero matrix when
  // nothing flowed. Valid only after backward().
  const Matrix& grad(Id id) const { return nodes_[id].grad; }

  // Seed d(root)/d(root) = seed and propagate. root must be [1 x 1].
  void backward(Id root, double seed = 1.0);

 private:
  enum class Kind {
    Input,
    ParamLeaf,
    MatMul,
    MatMulNT,
    AddRowVec,
    Relu,
    LeakyRelu,
    Tanh,
    SoftmaxRows,
    SoftmaxCols,
    LayerNorm,
    ConcatCols,
    MaxAll,
  };
  struct Node {
    Kind kind;
    Matrix value;
    Matrix grad;   // allocated lazily in backward()
    Matrix aux;    // op-specific saved state
    int a = -1, b = -1, c = -1;
    double scalar = 0.0;
    std::vector<int> args;  // ConcatCols only
    Param* bound = nullptr;
    bool needs_grad = false;
  };

  int push(Node n);
  bool needs(Id id) const { return nodes_[id].needs_grad; }
  void check_id(Id id) const;

  std::vector<Node> nodes_;
};

}  // namespace feedergen::nn
