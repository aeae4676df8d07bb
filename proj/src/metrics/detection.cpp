#include <algorithm>
#include <tuple>

#include "invizo/metrics/metrics.hpp"

namespace invizo::metrics {

Prf detection_prf(const std::vector<Quad>& gt, const std::vector<Quad>& pred, double iou_thresh) {
  std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < gt.size(); ++i)
    for (std::size_t j = 0; j < pred.size(); ++j) {
      const double iou = quad_iou(gt[i], pred[j]);
      if (iou >= iou_thresh && iou > 0.0) pairs.emplace_back(iou, i, j);
    }
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const auto& a, const auto& b) { return std::get<0>(a) > std::get<0>(b); });
  std::vector<bool> gt_used(gt.size()), pred_used(pred.size());
  Prf r;
  for (const auto& [iou, i, j] : pairs) {
    if (gt_used[i] || pred_used[j]) continue;
    gt_used[i] = pred_used[j] = true;
    ++r.true_positives;
  }
  const double tp = static_cast<double>(r.true_positives);
  r.precision = pred.empty() ? 0.0 : tp / static_cast<double>(pred.size());
  r.recall = gt.empty() ? 0.0 : tp / static_cast<double>(gt.size());
  r.f_measure = r.precision + r.recall > 0.0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
  return r;
}

}  // namespace invizo::metrics
