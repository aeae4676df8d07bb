#include "invizo/registration/register.hpp"

#include <string>
#include <vector>

#include "invizo/core/error.hpp"
#include "invizo/imaging/color.hpp"
#include "invizo/registration/descriptors.hpp"
#include "invizo/registration/matching.hpp"

namespace invizo::registration {
namespace {

struct Features {
  std::vector<Keypoint> keypoints;
  DescriptorSet descriptors;
};

Features extract(const RasterImage& img, const ScaleSpaceParams& params) {
  const RasterImage gray = to_grayscale(img);
  const ScaleSpace space = build_scale_space(gray, params);
  Features f;
  f.keypoints = detect_keypoints(space);
  f.descriptors = compute_descriptors(space, f.keypoints);
  return f;
}

Point2 centre(const Keypoint& k) { return {k.x + 0.5, k.y + 0.5}; }

}  // namespace

RegistrationResult register_images(const RasterImage& template_gray, const RasterImage& test_gray,
                                   const RegistrationParams& params) {
  const Features a = extract(template_gray, params.scale_space);
  const Features b = extract(test_gray, params.scale_space);
  RegistrationResult result;
  result.template_keypoints = a.descriptors.descriptors.size();
  result.test_keypoints = b.descriptors.descriptors.size();

  const auto matches = match_bruteforce(a.descriptors.descriptors, b.descriptors.descriptors, true);
  result.matches = matches.size();
  std::vector<Correspondence> pairs;
  pairs.reserve(matches.size());
  for (const Match& m : matches)
    pairs.push_back({centre(a.keypoints[a.descriptors.keypoint_index[m.index_a]]),
                     centre(b.keypoints[b.descriptors.keypoint_index[m.index_b]])});
  if (pairs.size() < 4)
    fail(ErrorCode::RegistrationFailed, "only " + std::to_string(pairs.size()) + " descriptor matches");

  const HomographyEstimate est = estimate_homography(pairs, params.ransac);
  result.h = est.h;
  result.inliers = est.inlier_count;
  return result;
}

}  // namespace invizo::registration
