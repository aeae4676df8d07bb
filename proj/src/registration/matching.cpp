#include "invizo/registration/matching.hpp"

#include <cmath>
#include <limits>

#include "invizo/simd/kernels.hpp"

namespace invizo::registration {
namespace {

struct Nearest {
  std::size_t index = 0;
  float sq_distance = std::numeric_limits<float>::infinity();
};

std::vector<Nearest> nearest_neighbours(std::span<const Descriptor> from, std::span<const Descriptor> to) {
  const auto& kt = simd::active();
  std::vector<Nearest> out(from.size());
  for (std::size_t i = 0; i < from.size(); ++i) {
    Nearest best;
    for (std::size_t j = 0; j < to.size(); ++j) {
      const float d = kt.sq_dist_f32(from[i].data(), to[j].data(), kDescriptorSize);
      if (d < best.sq_distance) best = {j, d};
    }
    out[i] = best;
  }
  return out;
}

}  // namespace

double l2_distance(const Descriptor& a, const Descriptor& b) {
  return std::sqrt(static_cast<double>(simd::active().sq_dist_f32(a.data(), b.data(), kDescriptorSize)));
}

std::vector<Match> match_bruteforce(std::span<const Descriptor> a, std::span<const Descriptor> b,
                                    bool cross_check) {
  std::vector<Match> matches;
  if (a.empty() || b.empty()) return matches;
  const auto forward = nearest_neighbours(a, b);
  std::vector<Nearest> backward;
  if (cross_check) backward = nearest_neighbours(b, a);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::size_t j = forward[i].index;
    if (cross_check && backward[j].index != i) continue;
    matches.push_back({i, j, std::sqrt(static_cast<double>(forward[i].sq_distance))});
  }
  return matches;
}

}  // namespace invizo::registration
