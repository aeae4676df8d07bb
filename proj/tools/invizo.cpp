// invizo command line: run, synth, eval, eval-det, train, recognize, serve.

#include <CLI11.hpp>

#include <malloc.h>

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "invizo/core/error.hpp"
#include "invizo/core/geometry.hpp"
#include "invizo/imaging/image_io.hpp"
#include "invizo/metrics/metrics.hpp"
#include "invizo/pipeline/config.hpp"
#include "invizo/pipeline/pipeline.hpp"
#include "invizo/pipeline/service.hpp"
#include "invizo/recognizer/checkpoint.hpp"
#include "invizo/recognizer/trainer.hpp"
#include "invizo/synthesis/augment.hpp"
#include "invizo/synthesis/charset.hpp"
#include "invizo/synthesis/dataset.hpp"
#include "invizo/templates/template.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace invizo;

namespace {

constexpr int kInputError = 1;
constexpr int kProcessingError = 2;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::Parameter:
    case ErrorCode::Io:
    case ErrorCode::ImageDecode:
    case ErrorCode::Schema:
    case ErrorCode::Validation:
    case ErrorCode::Font:
      return kInputError;
    default:
      return kProcessingError;
  }
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const fs::path& p) {
  try {
    return json::parse(read_text(p));
  } catch (const json::parse_error& e) {
    fail(ErrorCode::Schema, p.string() + " is not valid JSON: " + e.what());
  }
}

void write_text(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << text;
  if (!out) fail(ErrorCode::Io, "cannot write " + p.string());
}

std::vector<std::string> read_lines(const fs::path& p) {
  std::istringstream in(read_text(p));
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(line);
  }
  return out;
}

pipeline::PipelineConfig base_config(const std::string& config_path) {
  return config_path.empty() ? pipeline::config_from_env() : pipeline::load_config(config_path);
}

// ---- run ----

struct RunArgs {
  std::string image, tmpl, out, config, checkpoint;
  std::optional<std::uint64_t> seed;
  std::optional<bool> fallback;
};

int cmd_run(const RunArgs& a) {
  pipeline::PipelineConfig config = base_config(a.config);
  if (a.seed) config.set_seed(*a.seed);
  if (a.fallback) config.fallback_on_registration_fail = *a.fallback;
  if (!a.checkpoint.empty()) config.checkpoint = a.checkpoint;
  const Template t = load_template(a.tmpl);
  const RasterImage image = read_image(a.image);
  const pipeline::ModelSnapshot model = pipeline::load_model(config);
  const auto result = pipeline::run_pipeline(image, t, config, model);
  write_text(a.out, pipeline::serialize_predictions(result.predictions));
  if (result.registration == RegistrationMode::Fallback)
    std::cerr << "registration failed, template quads used: " << result.registration_error.value_or("") << "\n";
  return 0;
}

// ---- synth ----

synthesis::AugmentSpec augment_from_json(const json& j) {
  synthesis::AugmentSpec s;
  try {
    for (const auto& [k, v] : j.items()) {
      if (k == "lined") s.lined = synthesis::LinedBackground{v.value("spacing", 16), v.value("intensity", 80)};
      else if (k == "dotted") s.dotted = synthesis::DottedBackground{v.value("spacing", 8), v.value("intensity", 100)};
      else if (k == "rotation_deg") s.rotation_deg = v.get<double>();
      else if (k == "motion_blur") s.motion_blur = synthesis::MotionBlur{v.value("length", 5), v.value("angle_deg", 0.0)};
      else if (k == "low_res_factor") s.low_res_factor = v.get<double>();
      else if (k == "gaussian_sigma") s.gaussian_sigma = v.get<double>();
      else if (k == "salt_pepper_rate") s.salt_pepper_rate = v.get<double>();
      else if (k == "seed") s.seed = v.get<std::uint64_t>();
      else fail(ErrorCode::Schema, "unknown augmentation key " + k);
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::Schema, std::string("bad augmentation spec: ") + e.what());
  }
  return s;
}

struct SynthArgs {
  std::string out, corpus, font = std::string(synthesis::kDefaultFont), augment;
  std::size_t digits = 0;
  std::uint64_t seed = 42;
};

int cmd_synth(const SynthArgs& a) {
  synthesis::SynthOptions o;
  o.out_dir = a.out;
  o.digit_count = a.digits;
  o.font_file = a.font;
  o.seed = a.seed;
  if (!a.corpus.empty()) o.corpus = read_lines(a.corpus);
  if (!a.augment.empty()) o.augment = augment_from_json(read_json(a.augment));
  require(o.digit_count > 0 || !o.corpus.empty(), "nothing to generate: give --digits or --corpus");
  const std::size_t n = synthesis::write_dataset(o);
  std::cout << "wrote " << n << " samples to " << a.out << "\n";
  return 0;
}

// ---- eval ----

int cmd_eval(const std::string& refs, const std::string& hyps, const std::string& tsv, const std::string& json_out) {
  auto r = read_lines(refs);
  auto h = read_lines(hyps);
  const auto report = metrics::evaluate_text(r, h);
  if (!tsv.empty()) write_text(tsv, metrics::to_tsv(report));
  const std::string summary = metrics::to_json(report).dump(2) + "\n";
  if (!json_out.empty()) write_text(json_out, summary);
  std::cout << summary;
  return 0;
}

std::vector<std::vector<Quad>> read_quads(const fs::path& p) {
  const json j = read_json(p);
  const auto quad = [&](const json& q) {
    Quad out;
    if (!q.is_array() || q.size() != 4) fail(ErrorCode::Schema, p.string() + ": a quad is four [x, y] points");
    for (std::size_t i = 0; i < 4; ++i) out[i] = {q[i].at(0).get<double>(), q[i].at(1).get<double>()};
    return out;
  };
  std::vector<std::vector<Quad>> images;
  try {
    if (!j.is_array()) fail(ErrorCode::Schema, p.string() + ": expected a list of images, each a list of quads");
    for (const auto& img : j) {
      std::vector<Quad> quads;
      for (const auto& q : img) quads.push_back(quad(q));
      images.push_back(std::move(quads));
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::Schema, p.string() + ": " + e.what());
  }
  return images;
}

int cmd_eval_det(const std::string& gt_path, const std::string& pred_path, double iou) {
  const auto gt = read_quads(gt_path);
  const auto pred = read_quads(pred_path);
  require(gt.size() == pred.size(), "ground truth and predictions cover a different number of images");
  std::size_t tp = 0, n_gt = 0, n_pred = 0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    tp += metrics::detection_prf(gt[i], pred[i], iou).true_positives;
    n_gt += gt[i].size();
    n_pred += pred[i].size();
  }
  metrics::Prf total;
  total.true_positives = tp;
  total.precision = n_pred ? static_cast<double>(tp) / n_pred : 0.0;
  total.recall = n_gt ? static_cast<double>(tp) / n_gt : 0.0;
  total.f_measure = total.precision + total.recall > 0
                        ? 2 * total.precision * total.recall / (total.precision + total.recall)
                        : 0.0;
  std::cout << metrics::to_json(total).dump(2) << "\n";
  return 0;
}

// ---- train ----

struct TrainArgs {
  std::string manifest, config, checkpoint, charset, resume;
  int steps = 300;
  int log_every = 10;
};

int cmd_train(const TrainArgs& a) {
  nn::ModelConfig mc = a.config.empty() ? nn::ModelConfig{} : nn::ModelConfig::from_json(read_json(a.config));
  mc.validate();
  const synthesis::Charset charset =
      a.charset.empty() ? synthesis::Charset::default_set() : synthesis::Charset::load(a.charset);
  nn::Vocabulary vocab(charset.characters());
  std::unique_ptr<nn::Recognizer> model;
  if (!a.resume.empty()) {
    model = nn::load_checkpoint(a.resume);
    vocab = nn::Vocabulary::load(nn::vocabulary_path(a.resume));
  } else {
    model = std::make_unique<nn::Recognizer>(mc, vocab.size());
  }
  std::vector<nn::TrainingSample> samples;
  for (const auto& e : synthesis::read_manifest(a.manifest)) samples.push_back({read_image(e.image_path), e.label});
  require(!samples.empty(), "manifest " + a.manifest + " lists no samples");

  nn::AdamW opt = nn::make_optimizer(*model);
  nn::TrainOptions to;
  to.steps = a.steps;
  to.batch = model->config().batch;
  to.seed = model->config().seed;
  to.on_step = [&](int step, double loss) {
    if (a.log_every > 0 && (step + 1) % a.log_every == 0) std::cout << "step " << step + 1 << " loss " << loss << std::endl;
    return true;
  };
  nn::train(*model, opt, samples, vocab, to);
  nn::save_checkpoint(a.checkpoint, *model);
  vocab.save(nn::vocabulary_path(a.checkpoint));
  std::cout << "saved " << a.checkpoint << "\n";
  return 0;
}

// ---- recognize ----

int cmd_recognize(const std::string& checkpoint, const std::vector<std::string>& images, const std::string& manifest) {
  const auto model = nn::load_checkpoint(checkpoint);
  const auto vocab = nn::Vocabulary::load(nn::vocabulary_path(checkpoint));
  if (!manifest.empty()) {
    std::vector<std::string> refs, hyps;
    for (const auto& e : synthesis::read_manifest(manifest)) {
      refs.push_back(e.label);
      hyps.push_back(nn::recognize(read_image(e.image_path), *model, vocab).text);
      std::cout << e.image_path.filename().string() << '\t' << hyps.back() << '\n';
    }
    const auto report = metrics::evaluate_text(refs, hyps);
    std::size_t exact = 0;
    for (std::size_t i = 0; i < refs.size(); ++i) exact += refs[i] == hyps[i];
    json summary = metrics::to_json(report);
    summary["sequence_accuracy"] = refs.empty() ? 0.0 : static_cast<double>(exact) / refs.size();
    std::cout << summary.dump(2) << "\n";
    return 0;
  }
  for (const auto& path : images) std::cout << path << '\t' << nn::recognize(read_image(path), *model, vocab).text << '\n';
  return 0;
}

// ---- serve ----

pipeline::Service* g_service = nullptr;

void on_signal(int) {
  if (g_service) g_service->stop();
}

int cmd_serve(const std::string& config_path, const std::string& host, int port) {
  pipeline::PipelineConfig config = base_config(config_path);
  if (!host.empty()) config.host = host;
  if (port >= 0) config.port = port;
  pipeline::Service service(config, pipeline::load_model(config));
  g_service = &service;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cout << "listening on " << config.host << ":" << config.port << std::endl;
  if (!service.listen()) fail(ErrorCode::Io, "cannot listen on " + config.host + ":" + std::to_string(config.port));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  // Training allocates and frees activation tensors of tens of megabytes per
  // step; keeping them on the heap avoids refaulting fresh pages every time.
  mallopt(M_MMAP_MAX, 0);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
  CLI::App app{"Template-driven Arabic document OCR"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Recognize the fields of a template in a test image");
  run_cmd->add_option("--image", run.image, "Test image")->required();
  run_cmd->add_option("--template", run.tmpl, "Template JSON")->required();
  run_cmd->add_option("--out", run.out, "Predictions JSON to write")->required();
  run_cmd->add_option("--seed", run.seed, "Seed for every seeded stage");
  run_cmd->add_option("--config", run.config, "Config JSON (default: $INVIZO_CONFIG)");
  run_cmd->add_option("--checkpoint", run.checkpoint, "Model checkpoint (overrides the config)");
  run_cmd->add_flag("--fallback-on-registration-fail,!--no-fallback-on-registration-fail", run.fallback,
                    "Use template quads when registration fails");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a line dataset");
  synth_cmd->add_option("--out", synth.out, "Output directory")->required();
  synth_cmd->add_option("--digits", synth.digits, "Number of digit-sequence lines");
  synth_cmd->add_option("--corpus", synth.corpus, "Text corpus, one line per sample");
  synth_cmd->add_option("--font", synth.font, "TrueType font");
  synth_cmd->add_option("--augment", synth.augment, "Augmentation spec JSON");
  synth_cmd->add_option("--seed", synth.seed, "Generator seed");

  std::string refs, hyps, tsv, json_out;
  auto* eval_cmd = app.add_subcommand("eval", "CER and WER of line-aligned text files");
  eval_cmd->add_option("--refs", refs, "Reference lines")->required();
  eval_cmd->add_option("--hyps", hyps, "Hypothesis lines")->required();
  eval_cmd->add_option("--tsv", tsv, "Per-line TSV report");
  eval_cmd->add_option("--json", json_out, "JSON summary");

  std::string gt, pred;
  double iou = 0.5;
  auto* det_cmd = app.add_subcommand("eval-det", "Detection precision, recall and F-measure");
  det_cmd->add_option("--gt", gt, "Ground-truth quads JSON")->required();
  det_cmd->add_option("--pred", pred, "Predicted quads JSON")->required();
  det_cmd->add_option("--iou", iou, "IoU threshold")->check(CLI::Range(0.0, 1.0));

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train the recognizer");
  train_cmd->add_option("--manifest", train.manifest, "Dataset manifest TSV")->required();
  train_cmd->add_option("--config", train.config, "Model config JSON");
  train_cmd->add_option("--checkpoint", train.checkpoint, "Checkpoint to write")->required();
  train_cmd->add_option("--steps", train.steps, "Optimizer steps")->check(CLI::PositiveNumber);
  train_cmd->add_option("--charset", train.charset, "Charset file");
  train_cmd->add_option("--resume", train.resume, "Checkpoint to continue from");
  train_cmd->add_option("--log-every", train.log_every, "Loss print interval");

  std::string rec_checkpoint, rec_manifest;
  std::vector<std::string> rec_images;
  auto* rec_cmd = app.add_subcommand("recognize", "Recognize single text-line images");
  rec_cmd->add_option("--checkpoint", rec_checkpoint, "Model checkpoint")->required();
  rec_cmd->add_option("images", rec_images, "Line images");
  rec_cmd->add_option("--manifest", rec_manifest, "Labelled manifest; prints CER, WER and sequence accuracy");

  std::string serve_config, host;
  int port = -1;
  auto* serve_cmd = app.add_subcommand("serve", "HTTP service");
  serve_cmd->add_option("--config", serve_config, "Config JSON (default: $INVIZO_CONFIG)");
  serve_cmd->add_option("--host", host, "Bind address");
  serve_cmd->add_option("--port", port, "Port");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kInputError;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*synth_cmd) return cmd_synth(synth);
    if (*eval_cmd) return cmd_eval(refs, hyps, tsv, json_out);
    if (*det_cmd) return cmd_eval_det(gt, pred, iou);
    if (*train_cmd) return cmd_train(train);
    if (*rec_cmd) return cmd_recognize(rec_checkpoint, rec_images, rec_manifest);
    if (*serve_cmd) return cmd_serve(serve_config, host, port);
  } catch (const pipeline::StageError& e) {
    std::cerr << "error (" << e.stage() << "): " << e.what() << "\n";
    return kProcessingError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kProcessingError;
  }
  return kInputError;
}
