#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <nlohmann/json.hpp>

#include "pcmon/cloud.hpp"
#include "pcmon/registration.hpp"

namespace pcmon {

/// Oriented box: a point p is inside iff every component of
/// orientationᵀ (p - center) lies within ±half_extents (boundary inclusive).
class ObbRegion {
 public:
  /// Boundary slack relative to each half extent, absorbing rounding in the
  /// local-frame transform so points constructed on a face stay inside.
  static constexpr double kBoundarySlack = 1e-12;

  /// Throws ValidationError on non-positive extents or an improper rotation.
  ObbRegion(const Point3& center, const Eigen::Vector3d& half_extents,
            const Eigen::Matrix3d& orientation = Eigen::Matrix3d::Identity());

  static ObbRegion axis_aligned(const Aabb& box);
  /// `q` must be a unit quaternion (w, x, y, z) within 1e-6.
  static ObbRegion from_quaternion(const Point3& center, const Eigen::Vector3d& half_extents,
                                   const Eigen::Quaterniond& q);

  const Point3& center() const { return center_; }
  const Eigen::Vector3d& half_extents() const { return half_extents_; }
  const Eigen::Matrix3d& orientation() const { return orientation_; }
  Eigen::Quaterniond quaternion() const;

  Point3 to_local(const Point3& p) const { return orientation_.transpose() * (p - center_); }
  bool contains(const Point3& p) const;

 private:
  Point3 center_;
  Eigen::Vector3d half_extents_;
  Eigen::Matrix3d orientation_;
};

/// Maps a region through a rigid motion, so that membership is equivariant.
ObbRegion transform_region(const ObbRegion& region, const RigidTransform& transform);

/// Points inside the region (boundary included), order preserved.
PointCloud crop(const PointCloud& cloud, const ObbRegion& region);
/// Points strictly outside the region; complements crop().
PointCloud exclude(const PointCloud& cloud, const ObbRegion& region);

struct RegionSet {
  std::optional<ObbRegion> roi;
  std::vector<ObbRegion> exclusions;
};

/// {"center":[x,y,z], "half_extents":[a,b,c], "quaternion":[w,x,y,z]};
/// "quaternion" defaults to identity when omitted.
ObbRegion region_from_json(const nlohmann::json& j);
nlohmann::json region_to_json(const ObbRegion& region);

/// Accepts a single region object (role "roi" unless stated otherwise) or
/// an array of objects each tagged with "role": "roi" | "exclude". At most
/// one ROI is allowed.
RegionSet load_regions(const std::filesystem::path& path);
RegionSet regions_from_json(const nlohmann::json& j);
nlohmann::json regions_to_json(const RegionSet& regions);

/// Applies every exclusion, then the ROI crop if present.
PointCloud apply_regions(const PointCloud& cloud, const RegionSet& regions);

}  // namespace pcmon
