#pragma once

#include <filesystem>
#include <memory>

#include "invizo/recognizer/model.hpp"
#include "invizo/recognizer/vocabulary.hpp"

namespace invizo::nn {

// Layout: the line "INVIZO-CHECKPOINT 1\n", a uint64 little-endian manifest
// length, the JSON manifest {config, vocab_size, tensors: [{name, shape,
// offset}]}, then every tensor as float32 little-endian at its byte offset
// from the start of the data section. Parameters and batch-norm running
// statistics are both stored.
void save_checkpoint(const std::filesystem::path& path, const Recognizer& model);
std::unique_ptr<Recognizer> load_checkpoint(const std::filesystem::path& path);

// Vocabulary file stored beside a checkpoint.
std::filesystem::path vocabulary_path(const std::filesystem::path& checkpoint);

}  // namespace invizo::nn
