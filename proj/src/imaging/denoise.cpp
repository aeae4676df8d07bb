#include "invizo/imaging/denoise.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "invizo/core/error.hpp"
#include "invizo/simd/kernels.hpp"

namespace invizo {
namespace {

// Exact exp(-ssd / (n h^2)) for small integer patch sums, std::exp beyond.
class WeightTable {
 public:
  WeightTable(double patch_pixels, double h) : scale_(1.0 / (patch_pixels * h * h)) {
    const double limit = std::min(50.0 / scale_, static_cast<double>(1 << 20));
    table_.resize(static_cast<std::size_t>(limit) + 1);
    for (std::size_t i = 0; i < table_.size(); ++i)
      table_[i] = std::exp(-static_cast<double>(i) * scale_);
  }

  double operator()(std::int32_t ssd) const {
    const auto i = static_cast<std::size_t>(ssd);
    return i < table_.size() ? table_[i] : std::exp(-static_cast<double>(ssd) * scale_);
  }

 private:
  double scale_;
  std::vector<double> table_;
};

}  // namespace

RasterImage fnlm_denoise(const RasterImage& gray, const FnlmParams& params, FnlmProbe* probe) {
  if (!(params.h > 0.0)) fail(ErrorCode::Parameter, "FNLM filter strength h must be > 0");
  require(params.patch_radius >= 1, "FNLM patch_radius must be >= 1");
  require(params.search_radius >= params.patch_radius, "FNLM search_radius must be >= patch_radius");
  require(gray.channels() == 1, "FNLM expects a single-channel image");

  const int w = gray.width();
  const int h = gray.height();
  const int pr = params.patch_radius;
  const int sr = params.search_radius;
  const int pad = pr + sr;
  const int pw = w + 2 * pad;
  const int ph = h + 2 * pad;

  std::vector<std::int32_t> padded(static_cast<std::size_t>(pw) * ph);
  for (int y = 0; y < ph; ++y)
    for (int x = 0; x < pw; ++x)
      padded[static_cast<std::size_t>(y) * pw + x] =
          gray.at(std::clamp(x - pad, 0, w - 1), std::clamp(y - pad, 0, h - 1));
  const auto px = [&](int x, int y) {  // image coordinates, may be negative
    return padded.data() + static_cast<std::size_t>(y + pad) * pw + (x + pad);
  };

  const std::size_t n = gray.pixel_count();
  std::vector<double> acc(n, 0.0), wsum(n, 0.0), wmax(n, 0.0);
  std::vector<std::vector<double>> raw_weights;
  if (probe) raw_weights.assign(n, {});

  const int span_w = w + 2 * pr;  // sq-diff row covers [-pr, w + pr)
  const int rows = h + 2 * pr;    // rows [-pr, h + pr)
  std::vector<std::int32_t> sq(span_w);
  std::vector<std::int32_t> hsum(static_cast<std::size_t>(rows) * w);
  std::vector<std::int32_t> box(w);
  const WeightTable weight(static_cast<double>((2 * pr + 1) * (2 * pr + 1)), params.h);
  const auto& kt = simd::active();

  for (int dy = -sr; dy <= sr; ++dy) {
    for (int dx = -sr; dx <= sr; ++dx) {
      if (dx == 0 && dy == 0) continue;
      // Offsets that leave the image for every pixel contribute nothing.
      if (std::abs(dx) >= w || std::abs(dy) >= h) continue;

      for (int r = 0; r < rows; ++r) {
        const int y = r - pr;
        kt.sq_diff_i32(px(-pr, y), px(-pr + dx, y + dy), sq.data(), sq.size());
        std::int32_t* out = hsum.data() + static_cast<std::size_t>(r) * w;
        std::int32_t run = 0;
        for (int u = 0; u < 2 * pr + 1; ++u) run += sq[u];
        out[0] = run;
        for (int x = 1; x < w; ++x) {
          run += sq[x + 2 * pr] - sq[x - 1];
          out[x] = run;
        }
      }

      std::fill(box.begin(), box.end(), 0);
      for (int r = 0; r < 2 * pr + 1; ++r) {
        const std::int32_t* row = hsum.data() + static_cast<std::size_t>(r) * w;
        for (int x = 0; x < w; ++x) box[x] += row[x];
      }
      for (int y = 0; y < h; ++y) {
        if (y > 0)
          kt.add_sub_i32(box.data(), hsum.data() + static_cast<std::size_t>(y + 2 * pr) * w,
                         hsum.data() + static_cast<std::size_t>(y - 1) * w, w);
        const int sy = y + dy;
        if (sy < 0 || sy >= h) continue;
        const int x_lo = std::max(0, -dx);
        const int x_hi = std::min(w, w - dx);
        for (int x = x_lo; x < x_hi; ++x) {
          const double k = weight(box[x]);
          const std::size_t i = static_cast<std::size_t>(y) * w + x;
          acc[i] += k * gray.at(x + dx, sy);
          wsum[i] += k;
          wmax[i] = std::max(wmax[i], k);
          if (probe) raw_weights[i].push_back(k);
        }
      }
    }
  }

  RasterImage out(w, h, 1);
  auto dst = out.data();
  const auto src = gray.data();
  if (probe) probe->normalized_weight_sum.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double centre = wmax[i] > 0.0 ? wmax[i] : 1.0;
    const double c = wsum[i] + centre;
    const double value = (acc[i] + centre * src[i]) / c;
    dst[i] = static_cast<std::uint8_t>(std::clamp(std::nearbyint(value), 0.0, 255.0));
    if (probe) {
      double s = centre / c;
      for (double k : raw_weights[i]) s += k / c;
      probe->normalized_weight_sum[i] = s;
    }
  }
  return out;
}

}  // namespace invizo
