#include "invizo/pipeline/service.hpp"

#include <httplib.h>

#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "invizo/imaging/image_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace invizo::pipeline {
namespace {

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& message,
                 const std::optional<std::string>& stage = std::nullopt, const std::optional<ErrorCode>& code = {}) {
  json body = {{"error", message}};
  if (stage) body["stage"] = *stage;
  if (code) body["code"] = std::string(to_string(*code));
  reply(res, status, body);
}

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::Parameter:
    case ErrorCode::Schema:
    case ErrorCode::Validation:
    case ErrorCode::ImageDecode:
      return 400;
    default:
      return 422;
  }
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    out << text;
    if (!out) fail(ErrorCode::Io, "cannot write " + tmp.string());
  }
  fs::rename(tmp, p);
}

}  // namespace

std::string content_id(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Service::Service(PipelineConfig config, ModelSnapshot model)
    : config_(std::move(config)),
      model_(std::move(model)),
      server_(std::make_unique<httplib::Server>()),
      corrections_(config_.store_dir / "corrections.ndjson") {
  require(model_.model != nullptr, "service needs a recognizer");
  const fs::path tdir = config_.store_dir / "templates";
  if (fs::exists(tdir))
    for (const auto& entry : fs::directory_iterator(tdir))
      if (entry.path().extension() == ".json")
        templates_.emplace(entry.path().stem().string(), parse_template(read_text(entry.path())));
  const fs::path pdir = config_.store_dir / "predictions";
  if (fs::exists(pdir))
    for (const auto& entry : fs::directory_iterator(pdir))
      if (entry.path().extension() == ".json")
        predictions_.emplace(entry.path().stem().string(), json::parse(read_text(entry.path())));
  routes();
}

Service::~Service() { stop(); }

bool Service::listen() { return server_->listen(config_.host, config_.port); }
int Service::bind_any_port() { return server_->bind_to_any_port(config_.host); }
bool Service::run() { return server_->listen_after_bind(); }
void Service::stop() { server_->stop(); }
void Service::wait_until_ready() const { server_->wait_until_ready(); }

void Service::routes() {
  server_->Get("/api/health", [](const httplib::Request&, httplib::Response& res) {
    reply(res, 200, {{"status", "ok"}});
  });

  server_->Post("/api/templates", [this](const httplib::Request& req, httplib::Response& res) {
    Template t;
    try {
      t = parse_template(req.body);
    } catch (const Error& e) {
      return reply_error(res, 400, e.what(), std::nullopt, e.code());
    }
    if (t.image_path) return reply_error(res, 400, "templates posted to the service must embed imageData");
    const std::string text = serialize_template(t);
    const std::string id = content_id(text);
    {
      std::unique_lock lock(templates_mutex_);
      if (!templates_.contains(id)) {
        write_text(config_.store_dir / "templates" / (id + ".json"), text);
        templates_.emplace(id, std::move(t));
      }
    }
    reply(res, 201, {{"id", id}});
  });

  server_->Get(R"(/api/templates/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    std::shared_lock lock(templates_mutex_);
    const auto it = templates_.find(id);
    if (it == templates_.end()) return reply_error(res, 404, "unknown template " + id);
    res.status = 200;
    res.set_content(serialize_template(it->second), "application/json");
  });

  server_->Post("/api/recognize", [this](const httplib::Request& req, httplib::Response& res) {
    if (!req.has_file("image") || !req.has_file("template_id"))
      return reply_error(res, 400, "multipart fields 'image' and 'template_id' are required");
    const std::string template_id = req.get_file_value("template_id").content;
    Template t;
    {
      std::shared_lock lock(templates_mutex_);
      const auto it = templates_.find(template_id);
      if (it == templates_.end()) return reply_error(res, 404, "unknown template " + template_id);
      t = it->second;
    }
    const std::string& bytes = req.get_file_value("image").content;
    RasterImage image;
    try {
      image = decode_image(std::span(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()));
    } catch (const Error& e) {
      return reply_error(res, 400, e.what(), std::nullopt, e.code());
    }
    PipelineResult result;
    try {
      result = run_pipeline(image, t, config_, model_);
    } catch (const StageError& e) {
      return reply_error(res, 422, e.what(), e.stage(), e.code());
    } catch (const Error& e) {
      return reply_error(res, status_for(e.code()), e.what(), std::nullopt, e.code());
    }
    std::random_device rd;
    const std::string nonce = std::to_string(rd()) + std::to_string(rd());
    const std::string id = content_id(template_id + '\n' + bytes + '\n' + nonce + utc_timestamp());
    json record = {{"id", id},
                   {"template_id", template_id},
                   {"registration", std::string(to_string(result.registration))},
                   {"predictions", predictions_to_json(result.predictions)}};
    {
      std::unique_lock lock(predictions_mutex_);
      write_text(config_.store_dir / "predictions" / (id + ".json"), record.dump(2) + "\n");
      predictions_[id] = record;
    }
    reply(res, 200, record);
  });

  server_->Get(R"(/api/predictions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    json record;
    {
      std::shared_lock lock(predictions_mutex_);
      const auto it = predictions_.find(id);
      if (it == predictions_.end()) return reply_error(res, 404, "unknown prediction " + id);
      record = it->second;
    }
    const auto corrected = corrections_.latest(id);
    for (auto& p : record["predictions"]) {
      const auto c = corrected.find(p["field_id"].get<std::string>());
      if (c != corrected.end()) p["corrected_text"] = c->second;
    }
    reply(res, 200, record);
  });

  server_->Post(R"(/api/predictions/([^/]+)/corrections)", [this](const httplib::Request& req,
                                                                  httplib::Response& res) {
    const std::string id = req.matches[1];
    std::set<std::string> fields;
    {
      std::shared_lock lock(predictions_mutex_);
      const auto it = predictions_.find(id);
      if (it == predictions_.end()) return reply_error(res, 404, "unknown prediction " + id);
      for (const auto& p : it->second["predictions"]) fields.insert(p["field_id"].get<std::string>());
    }
    std::vector<Correction> records;
    try {
      const json body = json::parse(req.body);
      const std::string ts = utc_timestamp();
      for (const auto& c : body.at("corrections")) {
        const std::string field = c.at("field_id").get<std::string>();
        if (!fields.contains(field)) return reply_error(res, 400, "prediction " + id + " has no field " + field);
        records.push_back({id, field, c.at("text").get<std::string>(), ts});
      }
    } catch (const json::exception& e) {
      return reply_error(res, 400, std::string("expected {\"corrections\":[{\"field_id\",\"text\"}]}: ") + e.what());
    }
    corrections_.append(records);
    reply(res, 200, {{"id", id}, {"stored", records.size()}});
  });

  server_->set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const Error& e) {
      reply_error(res, 500, e.what(), std::nullopt, e.code());
    } catch (const std::exception& e) {
      reply_error(res, 500, e.what());
    }
  });
}

}  // namespace invizo::pipeline
