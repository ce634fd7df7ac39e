#include "feedergen/nn/tape.hpp"

#include <cmath>
#include <stdexcept>

#include "feedergen/kernels.hpp"

namespace feedergen::nn {

using kernels::active;

void Param::init_uniform(Rng& rng, int fan_in) {
  if (fan_in <= 0) throw std::invalid_argument("Param::init_uniform: fan_in must be positive");
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (size_t i = 0; i < value.size(); ++i) value.data()[i] = rng.uniform(-bound, bound);
  grad.fill(0.0);
  rms.fill(0.0);
}

int Tape::push(Node n) {
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

void Tape::check_id(Id id) const {
  if (id < 0 || id >= static_cast<int>(nodes_.size()))
    throw std::out_of_range("Tape: bad node id");
}

Tape::Id Tape::input(Matrix v) {
  Node n;
  n.kind = Kind::Input;
  n.value = std::move(v);
  n.needs_grad = false;
  return push(std::move(n));
}

Tape::Id Tape::param(Param& p) {
  Node n;
  n.kind = Kind::ParamLeaf;
  n.value = p.value;
  n.bound = &p;
  n.needs_grad = true;
  return push(std::move(n));
}

Tape::Id Tape::matmul(Id a, Id b) {
  check_id(a);
  check_id(b);
  const Matrix& av = nodes_[a].value;
  const Matrix& bv = nodes_[b].value;
  if (av.cols() != bv.rows()) throw std::invalid_argument("Tape::matmul: inner dim mismatch");
  Node n;
  n.kind = Kind::MatMul;
  n.a = a;
  n.b = b;
  n.value = Matrix(av.rows(), bv.cols());
  active().matmul(av.data(), bv.data(), n.value.data(), av.rows(), av.cols(), bv.cols());
  n.needs_grad = needs(a) || needs(b);
  return push(std::move(n));
}

Tape::Id Tape::matmul_nt(Id a, Id b) {
  check_id(a);
  check_id(b);
  const Matrix& av = nodes_[a].value;
  const Matrix& bv = nodes_[b].value;
  if (av.cols() != bv.cols()) throw std::invalid_argument("Tape::matmul_nt: inner dim mismatch");
  Node n;
  n.kind = Kind::MatMulNT;
  n.a = a;
  n.b = b;
  n.value = Matrix(av.rows(), bv.rows());
  active().matmul_nt(av.data(), bv.data(), n.value.data(), av.rows(), av.cols(), bv.rows());
  n.needs_grad = needs(a) || needs(b);
  return push(std::move(n));
}

Tape::Id Tape::add_rowvec(Id x, Id bias) {
  check_id(x);
  check_id(bias);
  const Matrix& xv = nodes_[x].value;
  const Matrix& bv = nodes_[bias].value;
  if (bv.rows() != 1 || bv.cols() != xv.cols())
    throw std::invalid_argument("Tape::add_rowvec: bias must be [1 x cols(x)]");
  Node n;
  n.kind = Kind::AddRowVec;
  n.a = x;
  n.b = bias;
  n.value = Matrix(xv.rows(), xv.cols());
  for (int r = 0; r < xv.rows(); ++r)
    active().add(xv.row(r), bv.row(0), n.value.row(r), static_cast<size_t>(xv.cols()));
  n.needs_grad = needs(x) || needs(bias);
  return push(std::move(n));
}

Tape::Id Tape::relu(Id x) {
  check_id(x);
  const Matrix& xv = nodes_[x].value;
  Node n;
  n.kind = Kind::Relu;
  n.a = x;
  n.value = Matrix(xv.rows(), xv.cols());
  active().relu(xv.data(), n.value.data(), xv.size());
  n.needs_grad = needs(x);
  return push(std::move(n));
}

Tape::Id Tape::leaky_relu(Id x, double slope) {
  check_id(x);
  const Matrix& xv = nodes_[x].value;
  Node n;
  n.kind = Kind::LeakyRelu;
  n.a = x;
  n.scalar = slope;
  n.value = Matrix(xv.rows(), xv.cols());
  active().leaky_relu(slope, xv.data(), n.value.data(), xv.size());
  n.needs_grad = needs(x);
  return push(std::move(n));
}

Tape::Id Tape::tanh_(Id x) {
  check_id(x);
  const Matrix& xv = nodes_[x].value;
  Node n;
  n.kind = Kind::Tanh;
  n.a = x;
  n.value = Matrix(xv.rows(), xv.cols());
  for (size_t i = 0; i < xv.size(); ++i) n.value.data()[i] = std::tanh(xv.data()[i]);
  n.needs_grad = needs(x);
  return push(std::move(n));
}

Tape::Id Tape::softmax_rows(Id x) {
  check_id(x);
  const Matrix& xv = nodes_[x].value;
  Node n;
  n.kind = Kind::SoftmaxRows;
  n.a = x;
  n.value = Matrix(xv.rows(), xv.cols());
  for (int r = 0; r < xv.rows(); ++r) {
    double mx = xv.at(r, 0);
    for (int c = 1; c < xv.cols(); ++c) mx = std::max(mx, xv.at(r, c));
    double sum = 0.0;
    for (int c = 0; c < xv.cols(); ++c) {
      double e = std::exp(xv.at(r, c) - mx);
      n.value.at(r, c) = e;
      sum += e;
    }
    for (int c = 0; c < xv.cols(); ++c) n.value.at(r, c) /= sum;
  }
  n.needs_grad = needs(x);
  return push(std::move(n));
}

Tape::Id Tape::softmax_cols(Id x) {
  check_id(x);
  const Matrix& xv = nodes_[x].value;
  Node n;
  n.kind = Kind::SoftmaxCols;
  n.a = x;
  n.value = Matrix(xv.rows(), xv.cols());
  for (int c = 0; c < xv.cols(); ++c) {
    double mx = xv.at(0, c);
    for (int r = 1; r < xv.rows(); ++r) mx = std::max(mx, xv.at(r, c));
    double sum = 0.0;
    for (int r = 0; r < xv.rows(); ++r) {
      double e = std::exp(xv.at(r, c) - mx);
      n.value.at(r, c) = e;
      sum += e;
    }
    for (int r = 0; r < xv.rows(); ++r) n.value.at(r, c) /= sum;
  }
  n.needs_grad = needs(x);
  return push(std::move(n));
}

Tape::Id Tape::layer_norm(Id x, Id gamma, Id beta, double eps) {
  check_id(x);
  check_id(gamma);
  check_id(beta);
  const Matrix& xv = nodes_[x].value;
  const Matrix& gv = nodes_[gamma].value;
  const Matrix& bv = nodes_[beta].value;
  if (xv.cols() < 2) throw std::invalid_argument("Tape::layer_norm: row width must be >= 2");
  if (gv.rows() != 1 || gv.cols() != xv.cols() || bv.rows() != 1 || bv.cols() != xv.cols())
    throw std::invalid_argument("Tape::layer_norm: scale/shift must be [1 x cols(x)]");
  Node n;
  n.kind = Kind::LayerNorm;
  n.a = x;
  n.b = gamma;
  n.c = beta;
  n.scalar = eps;
  n.value = Matrix(xv.rows(), xv.cols());
  n.aux = Matrix(xv.rows(), xv.cols() + 1);  // xhat columns, then rstd
  const int w = xv.cols();
  for (int r = 0; r < xv.rows(); ++r) {
    double mean = 0.0;
    for (int c = 0; c < w; ++c) mean += xv.at(r, c);
    mean /= w;
    double var = 0.0;
    for (int c = 0; c < w; ++c) {
      double d = xv.at(r, c) - mean;
      var += d * d;
    }
    var /= w;
    const double rstd = 1.0 / std::sqrt(var + eps);
    n.aux.at(r, w) = rstd;
    for (int c = 0; c < w; ++c) {
      const double xhat = (xv.at(r, c) - mean) * rstd;
      n.aux.at(r, c) = xhat;
      n.value.at(r, c) = gv.at(0, c) * xhat + bv.at(0, c);
    }
  }
  n.needs_grad = needs(x) || needs(gamma) || needs(beta);
  return push(std::move(n));
}

Tape::Id Tape::concat_cols(const std::vector<Id>& xs) {
  if (xs.empty()) throw std::invalid_argument("Tape::concat_cols: no inputs");
  int rows = -1, cols = 0;
  for (Id id : xs) {
    check_id(id);
    const Matrix& v = nodes_[id].value;
    if (rows < 0)
      rows = v.rows();
    else if (v.rows() != rows)
      throw std::invalid_argument("Tape::concat_cols: row count mismatch");
    cols += v.cols();
  }
  Node n;
  n.kind = Kind::ConcatCols;
  n.args = xs;
  n.value = Matrix(rows, cols);
  int off = 0;
  for (Id id : xs) {
    const Matrix& v = nodes_[id].value;
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < v.cols(); ++c) n.value.at(r, off + c) = v.at(r, c);
    off += v.cols();
    n.needs_grad = n.needs_grad || needs(id);
  }
  return push(std::move(n));
}

Tape::Id Tape::max_all(Id x) {
  check_id(x);
  const Matrix& xv = nodes_[x].value;
  if (xv.empty()) throw std::invalid_argument("Tape::max_all: empty input");
  Node n;
  n.kind = Kind::MaxAll;
  n.a = x;
  n.value = Matrix(1, 1);
  size_t best = 0;
  for (size_t i = 1; i < xv.size(); ++i)
    if (xv.data()[i] > xv.data()[best]) best = i;  // ties keep the first
  n.value.at(0, 0) = xv.data()[best];
  n.aux = Matrix(1, 1);
  n.aux.at(0, 0) = static_cast<double>(best);
  n.needs_grad = needs(x);
  return push(std::move(n));
}

void Tape::backward(Id root, double seed) {
  check_id(root);
  Node& rn = nodes_[root];
  if (rn.value.rows() != 1 || rn.value.cols() != 1)
    throw std::invalid_argument("Tape::backward: root must be [1 x 1]");
  for (auto& n : nodes_) {
    if (n.needs_grad) n.grad = Matrix(n.value.rows(), n.value.cols());
  }
  if (!rn.needs_grad) return;  // nothing differentiable below the root
  rn.grad.at(0, 0) = seed;

  auto g = [&](int id) -> Matrix& { return nodes_[id].grad; };
  auto v = [&](int id) -> const Matrix& { return nodes_[id].value; };

  for (int i = static_cast<int>(nodes_.size()) - 1; i >= 0; --i) {
    Node& n = nodes_[i];
    if (!n.needs_grad) continue;
    const Matrix& dy = n.grad;
    switch (n.kind) {
      case Kind::Input:
        break;
      case Kind::ParamLeaf:
        active().add(n.bound->grad.data(), dy.data(), n.bound->grad.data(), dy.size());
        break;
      case Kind::MatMul: {
        const Matrix& a = v(n.a);
        const Matrix& b = v(n.b);
        if (needs(n.a)) {
          Matrix da(a.rows(), a.cols());
          active().matmul_nt(dy.data(), b.data(), da.data(), a.rows(), b.cols(), a.cols());
          active().add(g(n.a).data(), da.data(), g(n.a).data(), da.size());
        }
        if (needs(n.b)) {
          Matrix db(b.rows(), b.cols());
          active().matmul_tn(a.data(), dy.data(), db.data(), b.rows(), a.rows(), b.cols());
          active().add(g(n.b).data(), db.data(), g(n.b).data(), db.size());
        }
        break;
      }
      case Kind::MatMulNT: {
        const Matrix& a = v(n.a);
        const Matrix& b = v(n.b);
        if (needs(n.a)) {
          Matrix da(a.rows(), a.cols());
          active().matmul(dy.data(), b.data(), da.data(), a.rows(), b.rows(), b.cols());
          active().add(g(n.a).data(), da.data(), g(n.a).data(), da.size());
        }
        if (needs(n.b)) {
          Matrix db(b.rows(), b.cols());
          active().matmul_tn(dy.data(), a.data(), db.data(), b.rows(), a.rows(), a.cols());
          active().add(g(n.b).data(), db.data(), g(n.b).data(), db.size());
        }
        break;
      }
      case Kind::AddRowVec: {
        if (needs(n.a)) active().add(g(n.a).data(), dy.data(), g(n.a).data(), dy.size());
        if (needs(n.b)) {
          Matrix& db = g(n.b);
          for (int r = 0; r < dy.rows(); ++r)
            active().add(db.row(0), dy.row(r), db.row(0), static_cast<size_t>(dy.cols()));
        }
        break;
      }
      case Kind::Relu: {
        const Matrix& x = v(n.a);
        Matrix& dx = g(n.a);
        for (size_t k = 0; k < x.size(); ++k)
          if (x.data()[k] > 0.0) dx.data()[k] += dy.data()[k];
        break;
      }
      case Kind::LeakyRelu: {
        const Matrix& x = v(n.a);
        Matrix& dx = g(n.a);
        for (size_t k = 0; k < x.size(); ++k)
          dx.data()[k] += dy.data()[k] * (x.data()[k] > 0.0 ? 1.0 : n.scalar);
        break;
      }
      case Kind::Tanh: {
        const Matrix& y = n.value;
        Matrix& dx = g(n.a);
        for (size_t k = 0; k < y.size(); ++k)
          dx.data()[k] += dy.data()[k] * (1.0 - y.data()[k] * y.data()[k]);
        break;
      }
      case Kind::SoftmaxRows: {
        const Matrix& y = n.value;
        Matrix& dx = g(n.a);
        for (int r = 0; r < y.rows(); ++r) {
          double dot = 0.0;
          for (int c = 0; c < y.cols(); ++c) dot += dy.at(r, c) * y.at(r, c);
          for (int c = 0; c < y.cols(); ++c) dx.at(r, c) += y.at(r, c) * (dy.at(r, c) - dot);
        }
        break;
      }
      case Kind::SoftmaxCols: {
        const Matrix& y = n.value;
        Matrix& dx = g(n.a);
        for (int c = 0; c < y.cols(); ++c) {
          double dot = 0.0;
          for (int r = 0; r < y.rows(); ++r) dot += dy.at(r, c) * y.at(r, c);
          for (int r = 0; r < y.rows(); ++r) dx.at(r, c) += y.at(r, c) * (dy.at(r, c) - dot);
        }
        break;
      }
      case Kind::LayerNorm: {
        const int w = n.value.cols();
        const Matrix& gv = v(n.b);
        for (int r = 0; r < n.value.rows(); ++r) {
          const double rstd = n.aux.at(r, w);
          double mean_dxhat = 0.0, mean_dxhat_xhat = 0.0;
          for (int c = 0; c < w; ++c) {
            const double dxhat = dy.at(r, c) * gv.at(0, c);
            mean_dxhat += dxhat;
            mean_dxhat_xhat += dxhat * n.aux.at(r, c);
          }
          mean_dxhat /= w;
          mean_dxhat_xhat /= w;
          if (needs(n.a)) {
            Matrix& dx = g(n.a);
            for (int c = 0; c < w; ++c) {
              const double dxhat = dy.at(r, c) * gv.at(0, c);
              dx.at(r, c) += rstd * (dxhat - mean_dxhat - n.aux.at(r, c) * mean_dxhat_xhat);
            }
          }
          if (needs(n.b)) {
            Matrix& dg = g(n.b);
            for (int c = 0; c < w; ++c) dg.at(0, c) += dy.at(r, c) * n.aux.at(r, c);
          }
          if (needs(n.c)) {
            Matrix& db = g(n.c);
            for (int c = 0; c < w; ++c) db.at(0, c) += dy.at(r, c);
          }
        }
        break;
      }
      case Kind::ConcatCols: {
        int off = 0;
        for (Id id : n.args) {
          const Matrix& part = v(id);
          if (needs(id)) {
            Matrix& dx = g(id);
            for (int r = 0; r < part.rows(); ++r)
              for (int c = 0; c < part.cols(); ++c) dx.at(r, c) += dy.at(r, off + c);
          }
          off += part.cols();
        }
        break;
      }
      case Kind::MaxAll: {
        const size_t best = static_cast<size_t>(n.aux.at(0, 0));
        g(n.a).data()[best] += dy.at(0, 0);
        break;
      }
    }
  }
}

}  // namespace feedergen::nn
