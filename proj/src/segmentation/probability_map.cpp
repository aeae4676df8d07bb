#include <bit>
#include <cstring>

#include "invizo/core/error.hpp"
#include "invizo/imaging/image_io.hpp"
#include "invizo/segmentation/segmentation.hpp"

namespace invizo::segmentation {
namespace {

std::uint32_t read_u32(const std::uint8_t* p) {
  return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 | std::uint32_t(p[3]) << 24;
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

}  // namespace

ProbabilityMap read_probability_map(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  if (bytes.size() < 8) fail(ErrorCode::Io, "probability map '" + path.string() + "' has no header");
  const std::uint32_t w = read_u32(bytes.data());
  const std::uint32_t h = read_u32(bytes.data() + 4);
  if (w == 0 || h == 0 || (bytes.size() - 8) / 4 / w != h || bytes.size() != 8 + std::size_t(w) * h * 4)
    fail(ErrorCode::Io, "probability map '" + path.string() + "' size does not match its header");
  ProbabilityMap map(static_cast<int>(w), static_cast<int>(h));
  for (std::size_t i = 0; i < map.values.size(); ++i) {
    const std::uint32_t bits = read_u32(bytes.data() + 8 + 4 * i);
    const float v = std::bit_cast<float>(bits);
    if (!(v >= 0.0f && v <= 1.0f)) fail(ErrorCode::Io, "probability map values must lie in [0, 1]");
    map.values[i] = v;
  }
  return map;
}

void write_probability_map(const std::filesystem::path& path, const ProbabilityMap& map) {
  std::vector<std::uint8_t> out;
  out.reserve(8 + map.values.size() * 4);
  put_u32(out, static_cast<std::uint32_t>(map.width));
  put_u32(out, static_cast<std::uint32_t>(map.height));
  for (double v : map.values) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  write_file(path, out);
}

}  // namespace invizo::segmentation
