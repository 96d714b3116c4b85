#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "pcmon/cloud.hpp"

namespace pcmon {

/// Proper rigid motion p -> R p + t.
///
/// Construction validates that R is orthonormal with det +1 (within 1e-9
/// per entry). All transforms in this library map the floating (later)
/// cloud into the reference (earlier) frame.
class RigidTransform {
 public:
  static constexpr double kOrthonormalTolerance = 1e-9;

  RigidTransform() : rotation_(Eigen::Matrix3d::Identity()), translation_(Point3::Zero()) {}
  /// Throws ValidationError if `rotation` is not a proper rotation.
  RigidTransform(const Eigen::Matrix3d& rotation, const Point3& translation);

  static RigidTransform identity() { return {}; }
  /// `q` need not be normalized; it must be non-zero.
  static RigidTransform from_quaternion(const Eigen::Quaterniond& q, const Point3& translation);
  static RigidTransform from_axis_angle(const Point3& axis, double angle_rad,
                                        const Point3& translation = Point3::Zero());

  const Eigen::Matrix3d& rotation() const { return rotation_; }
  const Point3& translation() const { return translation_; }
  /// Unit quaternion with w >= 0.
  Eigen::Quaterniond quaternion() const;

  Point3 apply(const Point3& p) const { return rotation_ * p + translation_; }
  RigidTransform inverse() const;
  /// (*this ∘ other)(p) = this->apply(other.apply(p)).
  RigidTransform compose(const RigidTransform& other) const;

 private:
  Eigen::Matrix3d rotation_;
  Point3 translation_;
};

/// Geodesic angle of R_a R_bᵀ, in degrees.
double rotation_error_deg(const RigidTransform& a, const RigidTransform& b);
double translation_error(const RigidTransform& a, const RigidTransform& b);

struct Correspondence {
  Point3 reference;
  Point3 floating;
  std::string label;
};

/// Manually picked landmark pairs (at least three, reference side not
/// collinear). Validated on construction.
class CorrespondenceSet {
 public:
  static constexpr double kCollinearityRatio = 1e-9;

  explicit CorrespondenceSet(std::vector<Correspondence> pairs);

  const std::vector<Correspondence>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }

 private:
  std::vector<Correspondence> pairs_;
};

/// Reads "xr yr zr xf yf zf [label]" lines; '#' starts a comment line.
CorrespondenceSet load_correspondences(const std::filesystem::path& path);

PointCloud apply_transform(const PointCloud& cloud, const RigidTransform& transform);

struct RigidFit {
  RigidTransform transform;
  double rmse = 0.0;
};

/// Least-squares rigid transform taking `floating[i]` onto `reference[i]`
/// (cross-covariance SVD with reflection correction). Requires equal, non-zero
/// sizes; does not check for degeneracy.
RigidFit fit_rigid(const std::vector<Point3>& reference, const std::vector<Point3>& floating);

/// Closed-form alignment from landmark pairs.
RigidFit rough_align(const CorrespondenceSet& correspondences);

struct IcpParams {
  int max_iterations = 50;
  double rmse_delta_tol = 1e-6;
  double trim_fraction = 1.0;
};

struct IcpResult {
  RigidTransform transform;
  /// RMSE over the kept matches, one entry per matching pass.
  std::vector<double> rmse_history;
  int iterations = 0;
  bool converged = false;

  double final_rmse() const { return rmse_history.empty() ? 0.0 : rmse_history.back(); }
};

/// Point-to-point ICP refining `initial`. Each pass transforms the floating
/// cloud, matches every point to its nearest reference point, keeps the
/// `trim_fraction` closest matches, solves the rigid fit and composes it.
/// Stops once the RMSE changes by less than `rmse_delta_tol`, when it stops
/// decreasing (numerical floor), or after `max_iterations` passes.
IcpResult icp_refine(const PointCloud& reference, const PointCloud& floating,
                     const RigidTransform& initial, const IcpParams& params = {});

}  // namespace pcmon
