#include "invizo/pipeline/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "invizo/core/error.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace invizo::pipeline {
namespace {

class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(ErrorCode::Schema, "config " + label() + " must be an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      fail(ErrorCode::Schema, "config key " + path_ + key + " has the wrong type");
    }
  }

  Reader child(const char* key) {
    seen_.insert(key);
    static const json kEmpty = json::object();
    return Reader(j_.contains(key) ? j_.at(key) : kEmpty, path_ + key + ".");
  }

  bool has(const char* key) {
    seen_.insert(key);
    return j_.contains(key);
  }
  const json& at(const char* key) const { return j_.at(key); }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.contains(k)) fail(ErrorCode::Schema, "unknown config key " + path_ + k);
  }

 private:
  std::string label() const { return path_.empty() ? "root" : path_.substr(0, path_.size() - 1); }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

fs::path resolve(const fs::path& p, const fs::path& base) {
  return p.empty() || p.is_absolute() || base.empty() ? p : base / p;
}

}  // namespace

void PipelineConfig::set_seed(std::uint64_t s) {
  seed = s;
  registration.ransac.seed = s;
}

PipelineConfig config_from_json(const json& j, const fs::path& base_dir) {
  PipelineConfig c;
  Reader r(j, "");
  {
    Reader f = r.child("fnlm");
    f.get("patch_radius", c.fnlm.patch_radius);
    f.get("search_radius", c.fnlm.search_radius);
    f.get("h", c.fnlm.h);
    f.finish();
  }
  if (r.has("threshold")) {
    const json& t = r.at("threshold");
    if (t.is_string() && t.get<std::string>() == "otsu") c.threshold = OtsuThreshold{};
    else if (t.is_number_integer()) c.threshold = FixedThreshold{t.get<int>()};
    else fail(ErrorCode::Schema, "config key threshold must be \"otsu\" or an integer");
  }
  r.get("open", c.open);
  {
    Reader reg = r.child("registration");
    Reader rs = reg.child("ransac");
    rs.get("iterations", c.registration.ransac.iterations);
    rs.get("inlier_px", c.registration.ransac.inlier_px);
    rs.get("min_inliers", c.registration.ransac.min_inliers);
    rs.get("confidence", c.registration.ransac.confidence);
    rs.finish();
    Reader ss = reg.child("scale_space");
    ss.get("scales_per_octave", c.registration.scale_space.scales_per_octave);
    ss.get("base_sigma", c.registration.scale_space.base_sigma);
    ss.get("assumed_blur", c.registration.scale_space.assumed_blur);
    ss.get("contrast_threshold", c.registration.scale_space.contrast_threshold);
    ss.get("edge_ratio", c.registration.scale_space.edge_ratio);
    ss.get("min_octave_size", c.registration.scale_space.min_octave_size);
    ss.finish();
    reg.finish();
  }
  r.get("fallback_on_registration_fail", c.fallback_on_registration_fail);
  {
    Reader p = r.child("projection");
    p.get("smooth_window", c.projection.smooth_window);
    p.get("min_density", c.projection.min_density);
    p.get("min_gap", c.projection.min_gap);
    p.get("expand_px", c.projection.expand_px);
    p.finish();
  }
  r.get("raw_crops", c.raw_crops);
  std::string checkpoint;
  r.get("checkpoint", checkpoint);
  c.checkpoint = resolve(checkpoint, base_dir);
  r.get("max_output", c.max_output);
  r.get("workers", c.workers);
  std::uint64_t seed = c.seed;
  r.get("seed", seed);
  c.set_seed(seed);
  r.get("host", c.host);
  r.get("port", c.port);
  std::string store = c.store_dir.string();
  r.get("store_dir", store);
  c.store_dir = resolve(store, base_dir);
  r.finish();

  require(c.max_output >= 1, "max_output must be positive");
  require(c.workers >= 1, "workers must be positive");
  require(c.port >= 0 && c.port <= 65535, "port out of range");
  return c;
}

json to_json(const PipelineConfig& c) {
  json j;
  j["fnlm"] = {{"patch_radius", c.fnlm.patch_radius}, {"search_radius", c.fnlm.search_radius}, {"h", c.fnlm.h}};
  if (const auto* f = std::get_if<FixedThreshold>(&c.threshold)) j["threshold"] = f->value;
  else j["threshold"] = "otsu";
  j["open"] = c.open;
  const auto& rs = c.registration.ransac;
  const auto& ss = c.registration.scale_space;
  j["registration"] = {
      {"ransac",
       {{"iterations", rs.iterations}, {"inlier_px", rs.inlier_px}, {"min_inliers", rs.min_inliers},
        {"confidence", rs.confidence}}},
      {"scale_space",
       {{"scales_per_octave", ss.scales_per_octave}, {"base_sigma", ss.base_sigma},
        {"assumed_blur", ss.assumed_blur}, {"contrast_threshold", ss.contrast_threshold},
        {"edge_ratio", ss.edge_ratio}, {"min_octave_size", ss.min_octave_size}}}};
  j["fallback_on_registration_fail"] = c.fallback_on_registration_fail;
  j["projection"] = {{"smooth_window", c.projection.smooth_window}, {"min_density", c.projection.min_density},
                     {"min_gap", c.projection.min_gap}, {"expand_px", c.projection.expand_px}};
  j["raw_crops"] = c.raw_crops;
  j["checkpoint"] = c.checkpoint.string();
  j["max_output"] = c.max_output;
  j["workers"] = c.workers;
  j["seed"] = c.seed;
  j["host"] = c.host;
  j["port"] = c.port;
  j["store_dir"] = c.store_dir.string();
  return j;
}

PipelineConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  json j;
  try {
    j = json::parse(ss.str());
  } catch (const json::parse_error& e) {
    fail(ErrorCode::Schema, "config " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(j, path.parent_path());
}

PipelineConfig config_from_env() {
  const char* env = std::getenv("INVIZO_CONFIG");
  if (env == nullptr || *env == '\0') return {};
  return load_config(env);
}

}  // namespace invizo::pipeline
