#include <chrono>
#include <ctime>
#include <fstream>

#include "invizo/core/error.hpp"
#include "invizo/pipeline/service.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace invizo::pipeline {

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

CorrectionStore::CorrectionStore(fs::path path) : path_(std::move(path)) {
  std::ifstream in(path_, std::ios::binary);
  if (!in) return;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      records_.push_back({j.at("id").get<std::string>(), j.at("field").get<std::string>(),
                          j.at("text").get<std::string>(), j.at("timestamp").get<std::string>()});
    } catch (const json::exception& e) {
      fail(ErrorCode::Schema, path_.string() + ":" + std::to_string(number) + ": bad correction record");
    }
  }
}

void CorrectionStore::append(const std::vector<Correction>& records) {
  std::lock_guard lock(mutex_);
  if (path_.has_parent_path()) fs::create_directories(path_.parent_path());
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  if (!out) fail(ErrorCode::Io, "cannot append to " + path_.string());
  for (const auto& r : records) {
    const json j = {{"id", r.prediction_id}, {"field", r.field_id}, {"text", r.text}, {"timestamp", r.timestamp}};
    out << j.dump() << '\n';
  }
  out.flush();
  if (!out) fail(ErrorCode::Io, "write to " + path_.string() + " failed");
  records_.insert(records_.end(), records.begin(), records.end());
}

std::map<std::string, std::string> CorrectionStore::latest(const std::string& prediction_id) const {
  std::lock_guard lock(mutex_);
  std::map<std::string, std::string> out;
  for (const auto& r : records_)
    if (r.prediction_id == prediction_id) out[r.field_id] = r.text;
  return out;
}

std::size_t CorrectionStore::size() const {
  std::lock_guard lock(mutex_);
  return records_.size();
}

}  // namespace invizo::pipeline
