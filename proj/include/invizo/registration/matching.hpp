#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "invizo/registration/descriptors.hpp"

namespace invizo::registration {

struct Match {
  std::size_t index_a = 0;
  std::size_t index_b = 0;
  double distance = 0.0;  // Euclidean distance between the two descriptors
};

// Nearest neighbour in `b` for every descriptor of `a` (ties to the lower
// index). With cross_check a pair survives only if the descriptor in `a` is
// also the nearest neighbour of its partner, which makes the result a
// one-to-one partial matching. Works for any equal-length float vectors.
std::vector<Match> match_bruteforce(std::span<const Descriptor> a, std::span<const Descriptor> b,
                                    bool cross_check = true);

double l2_distance(const Descriptor& a, const Descriptor& b);

}  // namespace invizo::registration
