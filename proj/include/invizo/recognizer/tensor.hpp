#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace invizo::nn {

// Dense row-major array of doubles.
struct Tensor {
  std::vector<int> shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(std::vector<int> dims, double fill = 0.0);
  Tensor(std::vector<int> dims, std::vector<double> values);

  std::size_t size() const noexcept { return data.size(); }
  int rank() const noexcept { return static_cast<int>(shape.size()); }
  // Negative indices count from the back.
  int dim(int i) const noexcept { return shape[i < 0 ? shape.size() + i : i]; }
  // Product of all but the last dimension.
  std::size_t rows() const noexcept;

  double& operator[](std::size_t i) noexcept { return data[i]; }
  double operator[](std::size_t i) const noexcept { return data[i]; }

  Tensor reshaped(std::vector<int> dims) const;
  void fill(double v);
  bool same_shape(const Tensor& other) const noexcept { return shape == other.shape; }

  friend bool operator==(const Tensor&, const Tensor&) = default;
};

std::size_t shape_size(const std::vector<int>& dims);

// Portable uniform / normal draws on top of mt19937_64 so initialization is
// identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  double uniform();  // [0, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  std::uint64_t next();
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(next() % n); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace invizo::nn
