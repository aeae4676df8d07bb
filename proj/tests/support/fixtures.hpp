#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "invizo/imaging/raster.hpp"
#include "invizo/imaging/resample.hpp"
#include "invizo/pipeline/pipeline.hpp"
#include "invizo/recognizer/model.hpp"
#include "invizo/recognizer/trainer.hpp"
#include "invizo/recognizer/vocabulary.hpp"
#include "invizo/registration/homography.hpp"
#include "invizo/synthesis/compose.hpp"
#include "invizo/templates/template.hpp"

namespace invizo::testing {

// Gray page with rectangles, disks and rendered words in random places.
RasterImage textured_page(int width, int height, std::uint64_t seed);

// Homography in continuous coordinates to the matrix warp_perspective wants
// for integer pixel positions.
Mat3 integer_grid(const registration::Homography& h);

// Image content moved by h (test = h(template)), background 255.
RasterImage warp_by(const RasterImage& img, const registration::Homography& h, int out_w, int out_h);

// Perspective distortion of a w x h page: rotation within +-max_deg about the
// centre, scale 0.9..1.1, shift within 5% and a small projective tilt.
registration::Homography random_homography(std::mt19937_64& rng, int w, int h, double max_deg);

// Fresh empty directory under the system temp directory.
std::filesystem::path temp_dir(const std::string& name);

// Recognizer used by desk-scale training and the end-to-end fixtures.
nn::ModelConfig toy_config();

struct TrainedModel {
  std::shared_ptr<nn::Recognizer> model;
  nn::Vocabulary vocab;
};

// Trains toy_config() on `samples` for `steps` optimizer steps.
TrainedModel train_model(const std::vector<synthesis::ComposedLine>& lines, int steps, std::uint64_t seed = 42);

// Digit model trained once per process and cached (64 lines, seed 42).
const TrainedModel& cached_digit_model();

pipeline::ModelSnapshot snapshot(const TrainedModel& m);

struct FormFixture {
  Template tmpl;
  std::vector<std::string> texts;
};
// Textured 640x420 page with one Number field per text (three random digit
// strings when none are given), glyphs as in compose_digit_sequence.
FormFixture digit_form(std::uint64_t seed, std::vector<std::string> texts = {});

}  // namespace invizo::testing
