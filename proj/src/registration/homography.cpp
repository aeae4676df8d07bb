#include "invizo/registration/homography.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "invizo/core/error.hpp"

namespace invizo::registration {
namespace {

Mat3 normalized(const Mat3& m) {
  double frob = 0.0;
  for (double v : m) frob += v * v;
  frob = std::sqrt(frob);
  if (frob == 0.0 || !std::isfinite(frob)) fail(ErrorCode::DegenerateRegion, "homography is zero or non-finite");
  Mat3 out = m;
  if (std::abs(m[8]) > 1e-12 * frob) {
    for (double& v : out) v /= m[8];
  } else {
    // Largest-magnitude entry made positive so the representative is unique.
    const auto it = std::max_element(m.begin(), m.end(),
                                     [](double a, double b) { return std::abs(a) < std::abs(b); });
    const double s = (*it < 0 ? -1.0 : 1.0) / frob;
    for (double& v : out) v *= s;
  }
  return out;
}

double det3(const Mat3& m) {
  return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
         m[2] * (m[3] * m[7] - m[4] * m[6]);
}

Eigen::Matrix3d to_eigen(const Mat3& m) {
  Eigen::Matrix3d e;
  e << m[0], m[1], m[2], m[3], m[4], m[5], m[6], m[7], m[8];
  return e;
}

Mat3 from_eigen(const Eigen::Matrix3d& e) {
  return {e(0, 0), e(0, 1), e(0, 2), e(1, 0), e(1, 1), e(1, 2), e(2, 0), e(2, 1), e(2, 2)};
}

// Similarity moving the centroid to the origin with mean distance sqrt(2).
Eigen::Matrix3d hartley_transform(const std::vector<Point2>& pts) {
  double cx = 0.0, cy = 0.0;
  for (const auto& p : pts) {
    cx += p.x;
    cy += p.y;
  }
  cx /= static_cast<double>(pts.size());
  cy /= static_cast<double>(pts.size());
  double mean = 0.0;
  for (const auto& p : pts) mean += std::hypot(p.x - cx, p.y - cy);
  mean /= static_cast<double>(pts.size());
  const double s = mean > 0.0 ? std::sqrt(2.0) / mean : 1.0;
  Eigen::Matrix3d t;
  t << s, 0, -s * cx, 0, s, -s * cy, 0, 0, 1;
  return t;
}

double triangle_area2(const Point2& a, const Point2& b, const Point2& c) {
  return std::abs((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x));
}

// Any three of the four points (nearly) collinear.
bool degenerate_sample(const std::array<Point2, 4>& p) {
  double extent = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) extent = std::max(extent, std::hypot(p[i].x - p[j].x, p[i].y - p[j].y));
  if (extent == 0.0) return true;
  const double tol = 1e-6 * extent * extent;
  static constexpr int kTriples[4][3] = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
  for (const auto& t : kTriples)
    if (triangle_area2(p[t[0]], p[t[1]], p[t[2]]) < tol) return true;
  return false;
}

}  // namespace

Homography::Homography(const Mat3& m) : m_(normalized(m)) {
  double frob = 0.0;
  for (double v : m_) frob += v * v;
  if (std::abs(det3(m_)) <= 1e-12 * std::pow(frob, 1.5))
    fail(ErrorCode::DegenerateRegion, "homography is singular");
}

double Homography::determinant() const noexcept { return det3(m_); }

Homography Homography::inverse() const { return Homography(from_eigen(to_eigen(m_).inverse())); }

Point2 Homography::apply(const Point2& p) const {
  const double x = m_[0] * p.x + m_[1] * p.y + m_[2];
  const double y = m_[3] * p.x + m_[4] * p.y + m_[5];
  const double w = m_[6] * p.x + m_[7] * p.y + m_[8];
  if (std::abs(w) < 1e-12) fail(ErrorCode::PointAtInfinity, "point maps to infinity");
  return {x / w, y / w};
}

Homography operator*(const Homography& a, const Homography& b) {
  return Homography(from_eigen(to_eigen(a.m_) * to_eigen(b.m_)));
}

Homography fit_homography_dlt(const std::vector<Correspondence>& pairs) {
  if (pairs.size() < 4)
    fail(ErrorCode::InsufficientCorrespondences,
         "homography needs at least 4 correspondences, got " + std::to_string(pairs.size()));
  std::vector<Point2> src, dst;
  src.reserve(pairs.size());
  dst.reserve(pairs.size());
  for (const auto& c : pairs) {
    src.push_back(c.a);
    dst.push_back(c.b);
  }
  const Eigen::Matrix3d ta = hartley_transform(src);
  const Eigen::Matrix3d tb = hartley_transform(dst);

  Eigen::MatrixXd a(2 * pairs.size(), 9);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const Eigen::Vector3d p = ta * Eigen::Vector3d(src[i].x, src[i].y, 1.0);
    const Eigen::Vector3d q = tb * Eigen::Vector3d(dst[i].x, dst[i].y, 1.0);
    const double x = p.x(), y = p.y(), u = q.x(), v = q.y();
    a.row(2 * i) << 0, 0, 0, -x, -y, -1, v * x, v * y, v;
    a.row(2 * i + 1) << x, y, 1, 0, 0, 0, -u * x, -u * y, -u;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const Eigen::VectorXd h = svd.matrixV().col(8);
  Eigen::Matrix3d hn;
  hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  const Eigen::Matrix3d full = tb.inverse() * hn * ta;
  return Homography(from_eigen(full));
}

double symmetric_transfer_error(const Homography& h, const Homography& h_inv, const Correspondence& c) {
  try {
    const Point2 fwd = h.apply(c.a);
    const Point2 bwd = h_inv.apply(c.b);
    const double df = std::hypot(fwd.x - c.b.x, fwd.y - c.b.y);
    const double db = std::hypot(bwd.x - c.a.x, bwd.y - c.a.y);
    return std::sqrt(0.5 * (df * df + db * db));
  } catch (const Error&) {
    return std::numeric_limits<double>::infinity();
  }
}

namespace {

struct Score {
  std::size_t count = 0;
  double error = std::numeric_limits<double>::infinity();
};

Score score(const Homography& h, const std::vector<Correspondence>& pairs, double threshold,
            std::vector<bool>* mask) {
  Homography inv;
  try {
    inv = h.inverse();
  } catch (const Error&) {
    if (mask) mask->assign(pairs.size(), false);
    return {};
  }
  Score s{0, 0.0};
  if (mask) mask->assign(pairs.size(), false);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double e = symmetric_transfer_error(h, inv, pairs[i]);
    if (e <= threshold) {
      ++s.count;
      s.error += e;
      if (mask) (*mask)[i] = true;
    }
  }
  return s;
}

std::vector<Correspondence> select(const std::vector<Correspondence>& pairs, const std::vector<bool>& mask) {
  std::vector<Correspondence> out;
  for (std::size_t i = 0; i < pairs.size(); ++i)
    if (mask[i]) out.push_back(pairs[i]);
  return out;
}

}  // namespace

HomographyEstimate estimate_homography(const std::vector<Correspondence>& pairs, const RansacParams& params) {
  if (pairs.size() < 4)
    fail(ErrorCode::InsufficientCorrespondences,
         "homography needs at least 4 correspondences, got " + std::to_string(pairs.size()));
  require(params.iterations > 0, "RANSAC iterations must be positive");
  require(params.inlier_px > 0.0, "RANSAC inlier threshold must be positive");

  // mt19937_64 output is fully specified by the standard; indices are drawn
  // by modulo so the sample sequence is the same on every platform.
  std::mt19937_64 rng(params.seed);
  const std::size_t n = pairs.size();
  Homography best_h;
  Score best;
  bool found = false;
  long budget = params.iterations;
  int it = 0;
  for (; it < budget; ++it) {
    std::array<std::size_t, 4> idx{};
    for (int k = 0; k < 4; ++k) {
      for (;;) {
        idx[k] = static_cast<std::size_t>(rng() % n);
        if (std::find(idx.begin(), idx.begin() + k, idx[k]) == idx.begin() + k) break;
      }
    }
    std::array<Point2, 4> pa{}, pb{};
    std::vector<Correspondence> sample;
    for (int k = 0; k < 4; ++k) {
      pa[k] = pairs[idx[k]].a;
      pb[k] = pairs[idx[k]].b;
      sample.push_back(pairs[idx[k]]);
    }
    if (degenerate_sample(pa) || degenerate_sample(pb)) continue;
    Homography h;
    try {
      h = fit_homography_dlt(sample);
    } catch (const Error&) {
      continue;
    }
    const Score s = score(h, pairs, params.inlier_px, nullptr);
    if (s.count > best.count || (s.count == best.count && s.count > 0 && s.error < best.error)) {
      best = s;
      best_h = h;
      found = true;
      if (params.confidence < 1.0) {
        const double w = static_cast<double>(s.count) / static_cast<double>(n);
        const double p_good = std::pow(w, 4.0);
        if (p_good >= 1.0) {
          budget = std::min<long>(budget, it + 1);
        } else if (p_good > 0.0) {
          const double needed = std::log(1.0 - params.confidence) / std::log(1.0 - p_good);
          if (std::isfinite(needed)) budget = std::min<long>(budget, static_cast<long>(std::ceil(needed)));
        }
      }
    }
  }

  if (!found || best.count < 4)
    fail(ErrorCode::RegistrationFailed, "RANSAC found no consistent homography");

  HomographyEstimate result;
  result.iterations_run = it;
  std::vector<bool> mask;
  score(best_h, pairs, params.inlier_px, &mask);
  Homography h = best_h;
  for (int round = 0; round < 10; ++round) {
    const auto inliers = select(pairs, mask);
    if (inliers.size() < 4) break;
    Homography refit;
    try {
      refit = fit_homography_dlt(inliers);
    } catch (const Error&) {
      break;
    }
    std::vector<bool> next;
    score(refit, pairs, params.inlier_px, &next);
    const std::size_t next_count = static_cast<std::size_t>(std::count(next.begin(), next.end(), true));
    if (next_count < inliers.size()) break;
    h = refit;
    const bool stable = next == mask;
    mask = std::move(next);
    if (stable) break;
  }
  result.h = h;
  result.inliers = mask;
  result.inlier_count = static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true));
  if (result.inlier_count < params.min_inliers)
    fail(ErrorCode::RegistrationFailed, "only " + std::to_string(result.inlier_count) +
                                            " inliers, need " + std::to_string(params.min_inliers));
  return result;
}

std::vector<Point2> project_points(const Homography& h, const std::vector<Point2>& pts) {
  std::vector<Point2> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back(h.apply(p));
  return out;
}

Quad project_quad(const Homography& h, const Quad& quad) {
  Quad out;
  for (std::size_t i = 0; i < 4; ++i) out[i] = h.apply(quad[i]);
  return out;
}

}  // namespace invizo::registration
