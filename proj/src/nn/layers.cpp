#include "feedergen/nn/layers.hpp"

#include "feedergen/kernels.hpp"

namespace feedergen::nn {

void rmsprop_step(Param& p, double lr, double sign, double decay, double eps) {
  kernels::active().rmsprop(lr, decay, eps, sign, p.grad.data(), p.rms.data(), p.value.data(),
                            p.value.size());
}

void clip_weights(Param& p, double c) {
  kernels::active().clamp(-c, c, p.value.data(), p.value.size());
}

void zero_grads(const std::vector<Param*>& params) {
  for (Param* p : params) p->zero_grad();
}

}  // namespace feedergen::nn
