#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "invizo/recognizer/tensor.hpp"

namespace invizo::nn {

// One value in the computation graph. Backward closures read `grad` of the
// node they belong to and accumulate into their parents' `grad`.
struct Node {
  Tensor value;
  Tensor grad;  // allocated lazily, same shape as value
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward_fn;

  Tensor& grad_buffer();
};

using Var = std::shared_ptr<Node>;

Var constant(Tensor value);
Var parameter(Tensor value);

// Graph recording is on by default; a guard disables it on this thread.
bool grad_enabled() noexcept;
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

// Result node; records parents and the closure only when some parent needs
// a gradient and recording is enabled.
Var make_node(Tensor value, std::vector<Var> parents, std::function<void(Node&)> backward_fn);

// Seeds d(root)/d(root) = 1 (root must hold one element) and runs every
// closure in reverse topological order.
void backward(const Var& root);

}  // namespace invizo::nn
