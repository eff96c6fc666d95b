// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mmsense/common.hpp"

namespace mmsense::metrics {

inline constexpr std::size_t kJointCount = 22;

using Mat3 = Eigen::Matrix3d;
using Vec3d = Eigen::Vector3d;

struct BodyFrame {
  std::vector<Vec3d> joints = std::vector<Vec3d>(kJointCount, Vec3d::Zero());
  std::optional<std::vector<Vec3d>> vertices;
  std::vector<Mat3> rotations = std::vector<Mat3>(kJointCount, Mat3::Identity());
  Vec3d translation = Vec3d::Zero();
};

/// Distances in cm, rotation error in degrees. MVE is absent when either
/// side carries no vertices.
struct MetricsRecord {
  double mpjpe_cm = 0;
  std::optional<double> mve_cm;
  double mre_deg = 0;
  double mle_cm = 0;
};

inline bool is_rotation(const Mat3& r, double tol = 1e-6) {
  if (!r.allFinite()) return false;
  return (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() <= tol && std::abs(r.determinant() - 1.0) <= tol;
}

/// Gram–Schmidt map of the continuous 6-D representation (a1, a2) to the
/// rotation with columns (b1, b2, b1 x b2).
inline Mat3 rot6d_to_matrix(const std::array<double, 6>& p) {
  const Vec3d a1(p[0], p[1], p[2]);
  const Vec3d a2(p[3], p[4], p[5]);
  const double n1 = a1.norm();
  if (!(n1 > 0.0) || !std::isfinite(n1)) throw std::invalid_argument("rot6d_to_matrix: first vector is zero");
  const Vec3d b1 = a1 / n1;
  const Vec3d r2 = a2 - b1.dot(a2) * b1;
  const double n2 = r2.norm();
  if (!(n2 > 1e-12 * std::max(1.0, a2.norm())) || !std::isfinite(n2))
    throw std::invalid_argument("rot6d_to_matrix: second vector is zero or parallel to the first");
  const Vec3d b2 = r2 / n2;
  Mat3 m;
  m.col(0) = b1;
  m.col(1) = b2;
  m.col(2) = b1.cross(b2);
  return m;
}

/// Minimum rotation angle of Ra^T Rb, in degrees within [0, 180].
inline double geodesic_angle(const Mat3& ra, const Mat3& rb) {
  if (!is_rotation(ra) || !is_rotation(rb)) throw std::invalid_argument("geodesic_angle: input is not a rotation matrix");
  // R = Ra^T Rb: |R - R^T|_F = 2 sqrt(2) sin t, trace R = 1 + 2 cos t.
  double skew2 = 0.0, trace = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double p = 0.0, q = 0.0;
      for (int k = 0; k < 3; ++k) {
        p += ra(k, i) * rb(k, j);
        q += ra(k, j) * rb(k, i);
      }
      skew2 += (p - q) * (p - q);
      if (i == j) trace += ra.col(i).dot(rb.col(i));
    }
  return rad2deg(std::atan2(std::sqrt(skew2) / (2.0 * std::sqrt(2.0)), 0.5 * (trace - 1.0)));
}

inline MetricsRecord evaluate(const BodyFrame& pred, const BodyFrame& gt) {
  if (pred.joints.size() != gt.joints.size() || pred.joints.empty())
    throw std::invalid_argument("evaluate: joint counts differ");
  if (pred.rotations.size() != gt.rotations.size() || pred.rotations.empty())
    throw std::invalid_argument("evaluate: rotation counts differ");
  MetricsRecord rec;
  double acc = 0;
  for (std::size_t j = 0; j < gt.joints.size(); ++j) acc += (pred.joints[j] - gt.joints[j]).norm();
  rec.mpjpe_cm = 100.0 * acc / static_cast<double>(gt.joints.size());
  if (pred.vertices && gt.vertices) {
    if (pred.vertices->size() != gt.vertices->size() || gt.vertices->empty())
      throw std::invalid_argument("evaluate: vertex counts differ");
    double v = 0;
    for (std::size_t i = 0; i < gt.vertices->size(); ++i) v += ((*pred.vertices)[i] - (*gt.vertices)[i]).norm();
    rec.mve_cm = 100.0 * v / static_cast<double>(gt.vertices->size());
  }
  double rot = 0;
  for (std::size_t j = 0; j < gt.rotations.size(); ++j) rot += geodesic_angle(pred.rotations[j], gt.rotations[j]);
  rec.mre_deg = rot / static_cast<double>(gt.rotations.size());
  // Ground plane of the body frame is x–z.
  rec.mle_cm = 100.0 * std::hypot(pred.translation.x() - gt.translation.x(), pred.translation.z() - gt.translation.z());
  return rec;
}

/// Frame mean per field; MVE averages only the records that carry it.
inline MetricsRecord aggregate(std::span<const MetricsRecord> records) {
  if (records.empty()) throw std::invalid_argument("aggregate: empty record list");
  MetricsRecord out;
  double mve = 0;
  std::size_t mve_n = 0;
  for (const auto& r : records) {
    out.mpjpe_cm += r.mpjpe_cm;
    out.mre_deg += r.mre_deg;
    out.mle_cm += r.mle_cm;
    if (r.mve_cm) {
      mve += *r.mve_cm;
      ++mve_n;
    }
  }
  const auto n = static_cast<double>(records.size());
  out.mpjpe_cm /= n;
  out.mre_deg /= n;
  out.mle_cm /= n;
  if (mve_n) out.mve_cm = mve / static_cast<double>(mve_n);
  return out;
}

inline void write_csv_row(std::ostream& os, const MetricsRecord& r) {
  os << r.mpjpe_cm << ',';
  if (r.mve_cm) os << *r.mve_cm;
  os << ',' << r.mre_deg << ',' << r.mle_cm << '\n';
}

/// Header, one row per frame, then the mean row.
inline void write_csv(std::ostream& os, std::span<const MetricsRecord> records) {
  os << "mpjpe_cm,mve_cm,mre_deg,mle_cm\n";
  for (const auto& r : records) write_csv_row(os, r);
  write_csv_row(os, aggregate(records));
}

}  // namespace mmsense::metrics
