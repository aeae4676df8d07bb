#include "invizo/imaging/image_io.hpp"

#include <png.h>

#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "invizo/core/error.hpp"

namespace invizo {

RasterImage decode_png(std::span<const std::uint8_t> bytes) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()))
    fail(ErrorCode::ImageDecode, std::string("PNG decode failed: ") + image.message);

  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const int channels = color ? 3 : 1;
  if (image.width == 0 || image.height == 0) {
    png_image_free(&image);
    fail(ErrorCode::ImageDecode, "PNG has zero size");
  }
  std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(image));
  // Transparent areas composite onto white, the page background.
  png_color background{255, 255, 255};
  if (!png_image_finish_read(&image, &background, pixels.data(), 0, nullptr))
    fail(ErrorCode::ImageDecode, std::string("PNG decode failed: ") + image.message);
  return RasterImage(static_cast<int>(image.width), static_cast<int>(image.height), channels,
                     std::move(pixels));
}

std::vector<std::uint8_t> encode_png(const RasterImage& img) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = img.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;

  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, img.data().data(), 0, nullptr))
    fail(ErrorCode::Io, std::string("PNG encode failed: ") + image.message);
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, img.data().data(), 0, nullptr))
    fail(ErrorCode::Io, std::string("PNG encode failed: ") + image.message);
  out.resize(size);
  return out;
}

namespace {

// Reads the next whitespace-separated header token, skipping '#' comments.
long pgm_token(std::span<const std::uint8_t> bytes, std::size_t& pos) {
  for (;;) {
    while (pos < bytes.size() && std::isspace(bytes[pos])) ++pos;
    if (pos < bytes.size() && bytes[pos] == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      continue;
    }
    break;
  }
  long value = 0;
  bool any = false;
  while (pos < bytes.size() && std::isdigit(bytes[pos])) {
    value = value * 10 + (bytes[pos] - '0');
    ++pos;
    any = true;
    if (value > (1L << 24)) fail(ErrorCode::ImageDecode, "PGM header value too large");
  }
  if (!any) fail(ErrorCode::ImageDecode, "malformed PGM header");
  return value;
}

}  // namespace

RasterImage decode_pgm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5')
    fail(ErrorCode::ImageDecode, "not a binary PGM (P5)");
  std::size_t pos = 2;
  const long width = pgm_token(bytes, pos);
  const long height = pgm_token(bytes, pos);
  const long maxval = pgm_token(bytes, pos);
  if (width < 1 || height < 1) fail(ErrorCode::ImageDecode, "PGM has zero size");
  if (maxval != 255) fail(ErrorCode::ImageDecode, "only 8-bit PGM (maxval 255) is supported");
  ++pos;  // single whitespace byte before the raster
  const std::size_t count = static_cast<std::size_t>(width) * height;
  if (bytes.size() < pos + count) fail(ErrorCode::ImageDecode, "truncated PGM raster");
  std::vector<std::uint8_t> pixels(bytes.begin() + pos, bytes.begin() + pos + count);
  return RasterImage(static_cast<int>(width), static_cast<int>(height), 1, std::move(pixels));
}

std::vector<std::uint8_t> encode_pgm(const RasterImage& img) {
  require(img.channels() == 1, "PGM output requires a single-channel image");
  const std::string header =
      "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.data().begin(), img.data().end());
  return out;
}

RasterImage decode_image(std::span<const std::uint8_t> bytes) {
  static constexpr std::uint8_t kPngMagic[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
  if (bytes.size() >= 8 && std::memcmp(bytes.data(), kPngMagic, 8) == 0) return decode_png(bytes);
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5') return decode_pgm(bytes);
  fail(ErrorCode::ImageDecode, "unrecognized image format (expected PNG or binary PGM)");
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::Io, "write failed for " + path.string());
}

RasterImage read_image(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  try {
    return decode_image(bytes);
  } catch (const Error& e) {
    fail(e.code(), path.string() + ": " + e.what());
  }
}

void write_image(const std::filesystem::path& path, const RasterImage& img) {
  std::string ext = path.extension().string();
  for (auto& ch : ext) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  write_file(path, ext == ".pgm" ? encode_pgm(img) : encode_png(img));
}

}  // namespace invizo
