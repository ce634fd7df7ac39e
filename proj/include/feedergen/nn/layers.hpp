#pragma once

#include <vector>

#include "feedergen/nn/tape.hpp"

namespace feedergen::nn {

// Fully connected layer: x*W + bias (bias broadcast per row). Activation is
// applied by the caller; output heads differ in what they want on top.
struct FcLayer {
  Param w;
  Param b;

  FcLayer(const std::string& name, int in, int out)
      : w(name + ".w", in, out), b(name + ".b", 1, out) {}

  void init(Rng& rng) {
    w.init_uniform(rng, w.value.rows());
    b.value.fill(0.0);
    b.grad.fill(0.0);
    b.rms.fill(0.0);
  }

  Tape::Id forward(Tape& t, Tape::Id x) {
    return t.add_rowvec(t.matmul(x, t.param(w)), t.param(b));
  }

  std::vector<Param*> params() { return {&w, &b}; }
};

// Graph convolution: A_hat * X * W, no bias. Activation applied by caller.
struct GcnLayer {
  Param w;

  GcnLayer(const std::string& name, int in, int out) : w(name + ".w", in, out) {}

  void init(Rng& rng) { w.init_uniform(rng, w.value.rows()); }

  Tape::Id forward(Tape& t, Tape::Id a_hat, Tape::Id x) {
    return t.matmul(t.matmul(a_hat, x), t.param(w));
  }

  std::vector<Param*> params() { return {&w}; }
};

// Embedding of a one-hot (or softmax-relaxed) category block: rows select —
// or mix — rows of the table.
struct EmbeddingLayer {
  Param table;

  EmbeddingLayer(const std::string& name, int categories, int width)
      : table(name + ".t", categories, width) {}

  void init(Rng& rng) { table.init_uniform(rng, table.value.rows()); }

  Tape::Id forward(Tape& t, Tape::Id onehot) { return t.matmul(onehot, t.param(table)); }

  std::vector<Param*> params() { return {&table}; }
};

// Row-wise layer normalization with learned per-column scale and shift.
struct LayerNormLayer {
  Param gamma;
  Param beta;
  double eps;

  LayerNormLayer(const std::string& name, int width, double eps_ = 1e-5)
      : gamma(name + ".gamma", 1, width), beta(name + ".beta", 1, width), eps(eps_) {
    gamma.value.fill(1.0);
  }

  void init(Rng&) {
    gamma.value.fill(1.0);
    beta.value.fill(0.0);
  }

  Tape::Id forward(Tape& t, Tape::Id x) {
    return t.layer_norm(x, t.param(gamma), t.param(beta), eps);
  }

  std::vector<Param*> params() { return {&gamma, &beta}; }
};

// One RMSProp step on p.value from p.grad:
//   acc <- decay*acc + (1-decay)*g^2;  p <- p + sign * lr * g / sqrt(acc+eps)
// sign +1 ascends the objective, -1 descends.
void rmsprop_step(Param& p, double lr, double sign, double decay = 0.9, double eps = 1e-8);

// Clamp every entry of p.value to [-c, c].
void clip_weights(Param& p, double c);

void zero_grads(const std::vector<Param*>& params);

}  // namespace feedergen::nn
