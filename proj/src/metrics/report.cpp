#include <cstdio>
#include <sstream>

#include "invizo/core/error.hpp"
#include "invizo/core/utf8.hpp"
#include "invizo/enhancement/levenshtein.hpp"
#include "invizo/metrics/metrics.hpp"

namespace invizo::metrics {
namespace {

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

TextReport evaluate_text(const std::vector<std::string>& refs, const std::vector<std::string>& hyps,
                         const std::vector<std::string>& ids) {
  require(refs.size() == hyps.size(), "reference and hypothesis counts differ: " + std::to_string(refs.size()) +
                                          " vs " + std::to_string(hyps.size()));
  require(ids.empty() || ids.size() == refs.size(), "id count does not match the references");
  TextReport rep;
  std::size_t char_edits = 0, chars = 0, word_edits = 0, words = 0;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    TextSample s{ids.empty() ? std::to_string(i + 1) : ids[i], refs[i], hyps[i], 0.0, 0.0};
    const std::u32string r = utf8::decode(refs[i]);
    const auto rw = utf8::split_words(refs[i]);
    require(!r.empty() && !rw.empty(), "reference " + s.id + " is empty");
    const std::size_t ce = levenshtein(r, utf8::decode(hyps[i]));
    const std::size_t we = edit_distance<std::string>(rw, utf8::split_words(hyps[i]));
    s.cer = static_cast<double>(ce) / static_cast<double>(r.size());
    s.wer = static_cast<double>(we) / static_cast<double>(rw.size());
    char_edits += ce;
    chars += r.size();
    word_edits += we;
    words += rw.size();
    rep.mean_cer += s.cer;
    rep.mean_wer += s.wer;
    rep.samples.push_back(std::move(s));
  }
  if (!refs.empty()) {
    rep.cer = static_cast<double>(char_edits) / static_cast<double>(chars);
    rep.wer = static_cast<double>(word_edits) / static_cast<double>(words);
    rep.mean_cer /= static_cast<double>(refs.size());
    rep.mean_wer /= static_cast<double>(refs.size());
  }
  return rep;
}

std::string to_tsv(const TextReport& report) {
  std::ostringstream out;
  out << "id\tcer\twer\treference\thypothesis\n";
  for (const auto& s : report.samples)
    out << s.id << '\t' << fixed(s.cer) << '\t' << fixed(s.wer) << '\t' << s.reference << '\t' << s.hypothesis << '\n';
  out << "TOTAL\t" << fixed(report.cer) << '\t' << fixed(report.wer) << "\t\t\n";
  return out.str();
}

nlohmann::json to_json(const TextReport& report) {
  nlohmann::json j;
  j["cer"] = report.cer;
  j["wer"] = report.wer;
  j["mean_cer"] = report.mean_cer;
  j["mean_wer"] = report.mean_wer;
  j["samples"] = report.samples.size();
  return j;
}

nlohmann::json to_json(const Prf& prf) {
  return {{"precision", prf.precision}, {"recall", prf.recall}, {"f_measure", prf.f_measure},
          {"true_positives", prf.true_positives}};
}

}  // namespace invizo::metrics
