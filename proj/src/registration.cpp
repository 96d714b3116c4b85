#include "pcmon/registration.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <Eigen/SVD>

#include "pcmon/errors.hpp"
#include "pcmon/kd_index.hpp"
#include "pcmon/parallel.hpp"

namespace pcmon {

RigidTransform::RigidTransform(const Eigen::Matrix3d& rotation, const Point3& translation)
    : rotation_(rotation), translation_(translation) {
  if (!rotation.allFinite() || !translation.allFinite()) {
    throw ValidationError("rigid transform has non-finite entries");
  }
  const double ortho_err =
      (rotation.transpose() * rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  if (ortho_err > kOrthonormalTolerance) {
    throw ValidationError("rotation is not orthonormal (max |RᵀR - I| = " +
                          std::to_string(ortho_err) + ")");
  }
  if (std::abs(rotation.determinant() - 1.0) > kOrthonormalTolerance) {
    throw ValidationError("rotation has determinant " + std::to_string(rotation.determinant()) +
                          ", expected +1");
  }
}

RigidTransform RigidTransform::from_quaternion(const Eigen::Quaterniond& q,
                                               const Point3& translation) {
  const double norm = q.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw ValidationError("zero or non-finite quaternion");
  return {q.normalized().toRotationMatrix(), translation};
}

RigidTransform RigidTransform::from_axis_angle(const Point3& axis, double angle_rad,
                                               const Point3& translation) {
  if (!(axis.norm() > 0.0)) throw ValidationError("rotation axis must be non-zero");
  return {Eigen::AngleAxisd(angle_rad, axis.normalized()).toRotationMatrix(), translation};
}

Eigen::Quaterniond RigidTransform::quaternion() const {
  Eigen::Quaterniond q(rotation_);
  q.normalize();
  if (q.w() < 0) q.coeffs() *= -1.0;
  return q;
}

RigidTransform RigidTransform::inverse() const {
  const Eigen::Matrix3d rt = rotation_.transpose();
  return {rt, -(rt * translation_)};
}

RigidTransform RigidTransform::compose(const RigidTransform& other) const {
  return {rotation_ * other.rotation_, rotation_ * other.translation_ + translation_};
}

double rotation_error_deg(const RigidTransform& a, const RigidTransform& b) {
  const Eigen::AngleAxisd delta(Eigen::Matrix3d(a.rotation() * b.rotation().transpose()));
  return delta.angle() * 180.0 / M_PI;
}

double translation_error(const RigidTransform& a, const RigidTransform& b) {
  return (a.translation() - b.translation()).norm();
}

CorrespondenceSet::CorrespondenceSet(std::vector<Correspondence> pairs) : pairs_(std::move(pairs)) {
  if (pairs_.size() < 3) {
    throw ValidationError("too few correspondences: " + std::to_string(pairs_.size()) +
                          " given, at least 3 required");
  }
  for (const auto& c : pairs_) {
    if (!c.reference.allFinite() || !c.floating.allFinite()) {
      throw ValidationError("correspondence has non-finite coordinates");
    }
  }
  Point3 centroid = Point3::Zero();
  for (const auto& c : pairs_) centroid += c.reference;
  centroid /= static_cast<double>(pairs_.size());
  Eigen::Matrix3Xd centered(3, pairs_.size());
  for (std::size_t i = 0; i < pairs_.size(); ++i) centered.col(i) = pairs_[i].reference - centroid;
  const Eigen::Vector3d sv = Eigen::JacobiSVD<Eigen::Matrix3Xd>(centered).singularValues();
  // A non-collinear set spans at least a plane: the second singular value
  // must be non-negligible (coplanar landmarks are fine).
  if (!(sv[1] > kCollinearityRatio * sv[0])) {
    throw ValidationError("degenerate correspondences: reference landmarks are collinear");
  }
}

CorrespondenceSet load_correspondences(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::vector<Correspondence> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream tokens(line);
    std::string first;
    if (!(tokens >> first) || first.front() == '#') continue;
    std::array<double, 6> v{};
    std::string token = first;
    for (int k = 0; k < 6; ++k) {
      if (k > 0 && !(tokens >> token)) {
        throw ParseError("expected 6 coordinates", ParseError::OffsetKind::Line, line_no);
      }
      auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v[k]);
      if (ec != std::errc{} || ptr != token.data() + token.size() || !std::isfinite(v[k])) {
        throw ParseError("invalid coordinate '" + token + "'", ParseError::OffsetKind::Line,
                         line_no);
      }
    }
    std::string label;
    std::getline(tokens >> std::ws, label);
    pairs.push_back({Point3(v[0], v[1], v[2]), Point3(v[3], v[4], v[5]), label});
  }
  return CorrespondenceSet(std::move(pairs));
}

PointCloud apply_transform(const PointCloud& cloud, const RigidTransform& transform) {
  std::vector<Point3> out(cloud.size());
  parallel_for(cloud.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out[i] = transform.apply(cloud.point(i));
  });
  return PointCloud(std::move(out), cloud.color_data(), cloud.label());
}

RigidFit fit_rigid(const std::vector<Point3>& reference, const std::vector<Point3>& floating) {
  if (reference.size() != floating.size() || reference.empty()) {
    throw ValidationError("fit_rigid: point lists must be non-empty and of equal size");
  }
  const auto n = static_cast<double>(reference.size());
  Point3 ref_centroid = Point3::Zero();
  Point3 flt_centroid = Point3::Zero();
  for (std::size_t i = 0; i < reference.size(); ++i) {
    ref_centroid += reference[i];
    flt_centroid += floating[i];
  }
  ref_centroid /= n;
  flt_centroid /= n;

  Eigen::Matrix3d cross = Eigen::Matrix3d::Zero();
  for (std::size_t i = 0; i < reference.size(); ++i) {
    cross += (floating[i] - flt_centroid) * (reference[i] - ref_centroid).transpose();
  }
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Matrix3d u = svd.matrixU();
  Eigen::Matrix3d v = svd.matrixV();
  Eigen::Matrix3d rotation = v * u.transpose();
  if (rotation.determinant() < 0) {
    v.col(2) *= -1.0;
    rotation = v * u.transpose();
  }
  const Point3 translation = ref_centroid - rotation * flt_centroid;

  RigidFit fit{RigidTransform(rotation, translation), 0.0};
  double sum2 = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    sum2 += (reference[i] - fit.transform.apply(floating[i])).squaredNorm();
  }
  fit.rmse = std::sqrt(sum2 / n);
  return fit;
}

RigidFit rough_align(const CorrespondenceSet& correspondences) {
  std::vector<Point3> reference;
  std::vector<Point3> floating;
  for (const auto& c : correspondences.pairs()) {
    reference.push_back(c.reference);
    floating.push_back(c.floating);
  }
  return fit_rigid(reference, floating);
}

IcpResult icp_refine(const PointCloud& reference, const PointCloud& floating,
                     const RigidTransform& initial, const IcpParams& params) {
  if (reference.empty() || floating.empty()) throw ValidationError("icp_refine: empty cloud");
  if (!(params.trim_fraction >= 0.5 && params.trim_fraction <= 1.0)) {
    throw ValidationError("icp_refine: trim_fraction must lie in [0.5, 1]");
  }
  if (params.max_iterations < 1) throw ValidationError("icp_refine: max_iterations must be >= 1");

  const KdIndex index(reference);
  const std::size_t n = floating.size();
  const auto keep = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(params.trim_fraction * static_cast<double>(n))));

  IcpResult result{initial, {}, 0, false};
  RigidTransform current = initial;
  std::vector<Point3> moved(n);
  std::vector<Neighbor> matches(n);
  std::vector<std::size_t> kept;

  for (int iter = 0; iter < params.max_iterations; ++iter) {
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        moved[i] = current.apply(floating.point(i));
        matches[i] = index.nearest(moved[i]);
      }
    });

    kept.resize(n);
    std::iota(kept.begin(), kept.end(), std::size_t{0});
    if (keep < n) {
      std::nth_element(kept.begin(), kept.begin() + keep, kept.end(),
                       [&](std::size_t a, std::size_t b) {
                         return matches[a].distance < matches[b].distance ||
                                (matches[a].distance == matches[b].distance && a < b);
                       });
      kept.resize(keep);
      std::sort(kept.begin(), kept.end());
    }
    double sum2 = 0.0;
    for (std::size_t i : kept) sum2 += matches[i].distance * matches[i].distance;
    const double rmse = std::sqrt(sum2 / static_cast<double>(kept.size()));

    if (!result.rmse_history.empty() && rmse > result.rmse_history.back()) {
      // Rounding noise at the optimum; the previous estimate is the best one.
      result.converged = true;
      break;
    }
    result.rmse_history.push_back(rmse);
    result.transform = current;
    const auto passes = result.rmse_history.size();
    if (rmse == 0.0 ||
        (passes >= 2 &&
         std::abs(result.rmse_history[passes - 2] - rmse) < params.rmse_delta_tol)) {
      result.converged = true;
      break;
    }

    std::vector<Point3> ref_pts;
    std::vector<Point3> flt_pts;
    ref_pts.reserve(kept.size());
    flt_pts.reserve(kept.size());
    for (std::size_t i : kept) {
      ref_pts.push_back(reference.point(matches[i].index));
      flt_pts.push_back(moved[i]);
    }
    current = fit_rigid(ref_pts, flt_pts).transform.compose(current);
  }
  result.iterations = static_cast<int>(result.rmse_history.size());
  return result;
}

}  // namespace pcmon
