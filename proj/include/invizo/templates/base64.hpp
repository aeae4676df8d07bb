#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace invizo {

// RFC 4648 standard alphabet with '=' padding.
std::string base64_encode(std::span<const std::uint8_t> bytes);

// Accepts padded or unpadded input and ignores ASCII whitespace; returns
// false on any other character or a truncated quantum.
bool base64_decode(std::string_view text, std::vector<std::uint8_t>& out);

}  // namespace invizo
