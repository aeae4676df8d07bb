#include "invizo/recognizer/tensor.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "invizo/core/error.hpp"

namespace invizo::nn {

std::size_t shape_size(const std::vector<int>& dims) {
  std::size_t n = 1;
  for (int d : dims) {
    require(d >= 0, "tensor dimensions must be non-negative");
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

Tensor::Tensor(std::vector<int> dims, double fill) : shape(std::move(dims)), data(shape_size(shape), fill) {}

Tensor::Tensor(std::vector<int> dims, std::vector<double> values) : shape(std::move(dims)), data(std::move(values)) {
  require(data.size() == shape_size(shape), "tensor data length does not match its shape");
}

std::size_t Tensor::rows() const noexcept {
  if (shape.empty()) return 1;
  return shape.back() == 0 ? 0 : data.size() / static_cast<std::size_t>(shape.back());
}

Tensor Tensor::reshaped(std::vector<int> dims) const {
  require(shape_size(dims) == data.size(), "reshape must preserve the element count");
  return Tensor(std::move(dims), data);
}

void Tensor::fill(double v) { std::fill(data.begin(), data.end(), v); }

Rng::Rng(std::uint64_t seed) : engine_(seed) {}

std::uint64_t Rng::next() { return engine_(); }

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
  has_spare_ = true;
  return r * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace invizo::nn
