#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "invizo/pipeline/config.hpp"
#include "invizo/pipeline/pipeline.hpp"

namespace httplib {
class Server;
}

namespace invizo::pipeline {

struct Correction {
  std::string prediction_id;
  std::string field_id;
  std::string text;
  std::string timestamp;  // ISO 8601 UTC
};

// Append-only newline-delimited JSON; one object per correction with keys
// id, field, text, timestamp. Existing records are read back on open.
class CorrectionStore {
 public:
  explicit CorrectionStore(std::filesystem::path path);

  void append(const std::vector<Correction>& records);
  // Latest correction per field of one prediction.
  std::map<std::string, std::string> latest(const std::string& prediction_id) const;
  std::size_t size() const;

 private:
  std::filesystem::path path_;
  mutable std::mutex mutex_;
  std::vector<Correction> records_;
};

std::string utc_timestamp();

// Templates and predictions live as JSON files under config.store_dir
// (templates/, predictions/), corrections in corrections.ndjson.
class Service {
 public:
  Service(PipelineConfig config, ModelSnapshot model);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Blocks until stop(). Returns false when the address cannot be bound.
  bool listen();
  // Binds an ephemeral port on config.host and returns it; serve with run().
  int bind_any_port();
  bool run();
  void stop();
  // Blocks until the server accepts connections.
  void wait_until_ready() const;

 private:
  void routes();

  PipelineConfig config_;
  ModelSnapshot model_;
  std::unique_ptr<httplib::Server> server_;
  CorrectionStore corrections_;
  mutable std::shared_mutex templates_mutex_;
  std::map<std::string, Template> templates_;
  mutable std::shared_mutex predictions_mutex_;
  std::map<std::string, nlohmann::json> predictions_;
};

// 16 hex digits of FNV-1a 64 over the bytes.
std::string content_id(std::string_view bytes);

}  // namespace invizo::pipeline
