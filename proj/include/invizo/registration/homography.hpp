#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "invizo/core/geometry.hpp"
#include "invizo/imaging/resample.hpp"

namespace invizo::registration {

// 3x3 projective transform, row-major, scaled so h33 = 1 (or to unit
// Frobenius norm when h33 vanishes).
class Homography {
 public:
  Homography() : m_(kIdentity3) {}
  explicit Homography(const Mat3& m);

  const Mat3& matrix() const noexcept { return m_; }
  double operator()(int row, int col) const noexcept { return m_[row * 3 + col]; }

  Homography inverse() const;
  double determinant() const noexcept;

  // Throws PointAtInfinity when |w'| < 1e-12.
  Point2 apply(const Point2& p) const;

  friend Homography operator*(const Homography& a, const Homography& b);

 private:
  Mat3 m_;
};

struct Correspondence {
  Point2 a;  // source (template) position
  Point2 b;  // destination (test image) position
};

struct RansacParams {
  int iterations = 2000;
  double inlier_px = 3.0;
  std::size_t min_inliers = 8;
  std::uint64_t seed = 42;
  // Stop early once this confidence of having drawn an all-inlier sample is
  // reached; 1.0 always runs every iteration.
  double confidence = 0.999;
};

struct HomographyEstimate {
  Homography h;
  std::vector<bool> inliers;
  std::size_t inlier_count = 0;
  int iterations_run = 0;
};

// Least-squares DLT on Hartley-normalized points (>= 4 correspondences).
// Throws InsufficientCorrespondences for fewer than 4 and DegenerateRegion
// when the system has no proper solution.
Homography fit_homography_dlt(const std::vector<Correspondence>& pairs);

// Forward and backward transfer distances combined as their RMS.
double symmetric_transfer_error(const Homography& h, const Homography& h_inv,
                                const Correspondence& c);

// RANSAC over 4-point minimal samples (collinear triples rejected), refit on
// all inliers until the inlier set stops changing. Throws
// InsufficientCorrespondences (< 4 pairs) or RegistrationFailed (fewer than
// min_inliers inliers).
HomographyEstimate estimate_homography(const std::vector<Correspondence>& pairs,
                                       const RansacParams& params = {});

std::vector<Point2> project_points(const Homography& h, const std::vector<Point2>& pts);
Quad project_quad(const Homography& h, const Quad& quad);

}  // namespace invizo::registration
