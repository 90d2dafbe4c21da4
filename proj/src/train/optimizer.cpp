#include "augrec/train/optimizer.hpp"

#include <cmath>

namespace augrec {

AdamW::AdamW(const ModelState& like, AdamWSettings settings)
    : settings_(settings), m_(like.zeros_like()), v_(like.zeros_like()) {}

void AdamW::step(ModelState& state, const ModelState& grad) {
  ++t_;
  const double b1 = settings_.beta1;
  const double b2 = settings_.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  const double lr = settings_.lr;
  const double decay = lr * settings_.weight_decay;

  auto params = state.parameters();
  const auto grads = grad.parameters();
  auto ms = m_.parameters();
  auto vs = v_.parameters();
  if (params.size() != grads.size() || params.size() != ms.size()) {
    throw Error("optimizer state does not match the model layout");
  }
  for (std::size_t p = 0; p < params.size(); ++p) {
    if (params[p].size != grads[p].size) throw Error("gradient shape mismatch for " + params[p].name);
    double* theta = params[p].data;
    const double* g = grads[p].data;
    double* m = ms[p].data;
    double* v = vs[p].data;
    for (std::size_t i = 0; i < params[p].size; ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * g[i];
      v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      theta[i] -= decay * theta[i] + lr * m_hat / (std::sqrt(v_hat) + settings_.eps);
    }
  }
}

}  // namespace augrec
