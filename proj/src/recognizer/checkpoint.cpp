#include "invizo/recognizer/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <map>
#include <string_view>

#include "invizo/core/error.hpp"
#include "invizo/imaging/image_io.hpp"

namespace invizo::nn {
namespace {

constexpr std::string_view kMagic = "INVIZO-CHECKPOINT 1\n";

void put_le(std::vector<std::uint8_t>& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_le(const std::uint8_t* p, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= std::uint64_t(p[i]) << (8 * i);
  return v;
}

std::map<std::string, Tensor*> tensor_slots(const Recognizer& model) {
  std::map<std::string, Tensor*> slots;
  for (const auto& [name, var] : model.parameters()) slots[name] = &var->value;
  for (const auto& [name, buf] : model.buffers()) slots[name] = buf;
  return slots;
}

}  // namespace

std::filesystem::path vocabulary_path(const std::filesystem::path& checkpoint) {
  auto p = checkpoint;
  p += ".vocab";
  return p;
}

void save_checkpoint(const std::filesystem::path& path, const Recognizer& model) {
  nlohmann::json manifest;
  manifest["config"] = model.config().to_json();
  manifest["vocab_size"] = model.vocab_size();
  manifest["tensors"] = nlohmann::json::array();
  std::vector<std::uint8_t> data;
  for (const auto& [name, tensor] : tensor_slots(model)) {
    manifest["tensors"].push_back({{"name", name}, {"shape", tensor->shape}, {"offset", data.size()}});
    for (double v : tensor->data) put_le(data, std::bit_cast<std::uint32_t>(static_cast<float>(v)), 4);
  }
  const std::string header = manifest.dump();
  std::vector<std::uint8_t> out(kMagic.begin(), kMagic.end());
  put_le(out, header.size(), 8);
  out.insert(out.end(), header.begin(), header.end());
  out.insert(out.end(), data.begin(), data.end());
  write_file(path, out);
}

std::unique_ptr<Recognizer> load_checkpoint(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  const std::string where = "checkpoint '" + path.string() + "'";
  if (bytes.size() < kMagic.size() + 8 || std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0)
    fail(ErrorCode::Schema, where + " has no checkpoint header");
  const std::uint64_t len = get_le(bytes.data() + kMagic.size(), 8);
  const std::size_t data_start = kMagic.size() + 8 + len;
  if (data_start > bytes.size()) fail(ErrorCode::Schema, where + " manifest is truncated");
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(bytes.begin() + kMagic.size() + 8, bytes.begin() + data_start);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Schema, where + " manifest: " + e.what());
  }
  auto model = std::make_unique<Recognizer>(ModelConfig::from_json(manifest.at("config")),
                                            manifest.at("vocab_size").get<int>());
  auto slots = tensor_slots(*model);
  std::size_t filled = 0;
  for (const auto& entry : manifest.at("tensors")) {
    const auto name = entry.at("name").get<std::string>();
    const auto it = slots.find(name);
    if (it == slots.end()) fail(ErrorCode::Schema, where + " has unexpected tensor '" + name + "'");
    Tensor& t = *it->second;
    if (entry.at("shape").get<std::vector<int>>() != t.shape)
      fail(ErrorCode::Schema, where + " tensor '" + name + "' has the wrong shape");
    const std::size_t offset = entry.at("offset").get<std::size_t>();
    if (data_start + offset + 4 * t.size() > bytes.size())
      fail(ErrorCode::Schema, where + " tensor '" + name + "' is truncated");
    const std::uint8_t* p = bytes.data() + data_start + offset;
    for (std::size_t i = 0; i < t.size(); ++i)
      t.data[i] = std::bit_cast<float>(static_cast<std::uint32_t>(get_le(p + 4 * i, 4)));
    ++filled;
  }
  if (filled != slots.size()) fail(ErrorCode::Schema, where + " is missing tensors");
  return model;
}

}  // namespace invizo::nn
