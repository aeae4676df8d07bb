#include "invizo/recognizer/optimizer.hpp"

#include <cmath>

namespace invizo::nn {

AdamW::AdamW(std::vector<Var> params, AdamWParams hp) : params_(std::move(params)), hp_(hp) {
  for (const Var& p : params_) {
    m_.emplace_back(p->value.shape, 0.0);
    v_.emplace_back(p->value.shape, 0.0);
  }
}

void AdamW::zero_grad() {
  for (const Var& p : params_) p->grad_buffer().fill(0.0);
}

void AdamW::step() {
  ++t_;
  const double c1 = 1.0 - std::pow(hp_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(hp_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Node& p = *params_[i];
    const Tensor& g = p.grad_buffer();
    for (std::size_t j = 0; j < p.value.size(); ++j) {
      const double gj = g.data[j];
      m_[i].data[j] = hp_.beta1 * m_[i].data[j] + (1.0 - hp_.beta1) * gj;
      v_[i].data[j] = hp_.beta2 * v_[i].data[j] + (1.0 - hp_.beta2) * gj * gj;
      const double mhat = m_[i].data[j] / c1;
      const double vhat = v_[i].data[j] / c2;
      p.value.data[j] -= hp_.lr * (mhat / (std::sqrt(vhat) + hp_.eps) + hp_.weight_decay * p.value.data[j]);
    }
  }
}

}  // namespace invizo::nn
