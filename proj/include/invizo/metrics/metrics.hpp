#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "invizo/core/geometry.hpp"

namespace invizo::metrics {

// Edit distance over Unicode scalars divided by the reference length.
// Throws ParameterError on an empty reference.
double cer(std::string_view reference, std::string_view hypothesis);

// Word-level edit distance (whitespace tokens) over the reference word count.
double wer(std::string_view reference, std::string_view hypothesis);

// Area of the intersection of two simple polygons (either orientation).
double intersection_area(const Polygon& a, const Polygon& b);
double polygon_iou(const Polygon& a, const Polygon& b);
double quad_iou(const Quad& a, const Quad& b);

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
  std::size_t true_positives = 0;
};

// Pairs are taken greedily by descending IoU, each quad used at most once;
// a pair counts when IoU >= iou_thresh.
Prf detection_prf(const std::vector<Quad>& gt, const std::vector<Quad>& pred, double iou_thresh = 0.5);

struct TextSample {
  std::string id;
  std::string reference;
  std::string hypothesis;
  double cer = 0.0;
  double wer = 0.0;
};

struct TextReport {
  std::vector<TextSample> samples;
  // Corpus-level: total edits over total reference length.
  double cer = 0.0;
  double wer = 0.0;
  double mean_cer = 0.0;
  double mean_wer = 0.0;
};

// refs and hyps pair up by position; ids default to the 1-based line number.
TextReport evaluate_text(const std::vector<std::string>& refs, const std::vector<std::string>& hyps,
                         const std::vector<std::string>& ids = {});

std::string to_tsv(const TextReport& report);
nlohmann::json to_json(const TextReport& report);
nlohmann::json to_json(const Prf& prf);

}  // namespace invizo::metrics
