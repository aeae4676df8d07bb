#pragma once

#include <vector>

#include "invizo/recognizer/autograd.hpp"

namespace invizo::nn {

struct AdamWParams {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;
};

// Adam with bias correction and decoupled weight decay.
class AdamW {
 public:
  AdamW(std::vector<Var> params, AdamWParams hp = {});

  void zero_grad();
  void step();

  long steps() const noexcept { return t_; }
  AdamWParams& hyper() noexcept { return hp_; }

 private:
  std::vector<Var> params_;
  AdamWParams hp_;
  std::vector<Tensor> m_, v_;
  long t_ = 0;
};

}  // namespace invizo::nn
