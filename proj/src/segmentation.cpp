#include "pcmon/segmentation.hpp"

#include <cmath>
#include <fstream>

#include "pcmon/errors.hpp"

namespace pcmon {
namespace {

Eigen::Vector3d vec3_from_json(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw ValidationError(std::string("region lacks '") + key + "'");
  const auto& arr = j.at(key);
  if (!arr.is_array() || arr.size() != 3) {
    throw ValidationError(std::string("region '") + key + "' must be an array of 3 numbers");
  }
  Eigen::Vector3d v;
  for (int i = 0; i < 3; ++i) {
    if (!arr[i].is_number()) throw ValidationError(std::string("region '") + key + "' must be numeric");
    v[i] = arr[i].get<double>();
  }
  return v;
}

PointCloud partition(const PointCloud& cloud, const ObbRegion& region, bool keep_inside) {
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (region.contains(cloud.point(i)) == keep_inside) kept.push_back(i);
  }
  return select(cloud, kept);
}

}  // namespace

ObbRegion::ObbRegion(const Point3& center, const Eigen::Vector3d& half_extents,
                     const Eigen::Matrix3d& orientation)
    : center_(center), half_extents_(half_extents), orientation_(orientation) {
  if (!center.allFinite() || !half_extents.allFinite()) {
    throw ValidationError("region has non-finite center or extents");
  }
  if (!(half_extents.array() > 0.0).all()) {
    throw ValidationError("region half extents must be positive");
  }
  // Reuse the rigid-transform validation of the orientation.
  (void)RigidTransform(orientation, Point3::Zero());
}

ObbRegion ObbRegion::axis_aligned(const Aabb& box) {
  const Eigen::Vector3d half = (0.5 * box.extent()).cwiseMax(1e-12);
  return {0.5 * (box.min + box.max), half};
}

ObbRegion ObbRegion::from_quaternion(const Point3& center, const Eigen::Vector3d& half_extents,
                                     const Eigen::Quaterniond& q) {
  const double norm = q.norm();
  if (!(std::abs(norm - 1.0) <= 1e-6)) {
    throw ValidationError("region quaternion must have unit norm (got " + std::to_string(norm) +
                          ")");
  }
  return {center, half_extents, q.normalized().toRotationMatrix()};
}

Eigen::Quaterniond ObbRegion::quaternion() const {
  Eigen::Quaterniond q(orientation_);
  q.normalize();
  if (q.w() < 0) q.coeffs() *= -1.0;
  return q;
}

bool ObbRegion::contains(const Point3& p) const {
  const Eigen::Vector3d local = to_local(p);
  return (local.cwiseAbs().array() <= half_extents_.array() * (1.0 + kBoundarySlack)).all();
}

ObbRegion transform_region(const ObbRegion& region, const RigidTransform& transform) {
  return {transform.apply(region.center()), region.half_extents(),
          transform.rotation() * region.orientation()};
}

PointCloud crop(const PointCloud& cloud, const ObbRegion& region) {
  return partition(cloud, region, true);
}

PointCloud exclude(const PointCloud& cloud, const ObbRegion& region) {
  return partition(cloud, region, false);
}

ObbRegion region_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("region must be a JSON object");
  const Point3 center = vec3_from_json(j, "center");
  const Eigen::Vector3d half = vec3_from_json(j, "half_extents");
  Eigen::Quaterniond q = Eigen::Quaterniond::Identity();
  if (j.contains("quaternion")) {
    const auto& arr = j.at("quaternion");
    if (!arr.is_array() || arr.size() != 4) {
      throw ValidationError("region 'quaternion' must be [w, x, y, z]");
    }
    for (const auto& v : arr) {
      if (!v.is_number()) throw ValidationError("region 'quaternion' must be numeric");
    }
    q = Eigen::Quaterniond(arr[0].get<double>(), arr[1].get<double>(), arr[2].get<double>(),
                           arr[3].get<double>());
  }
  return ObbRegion::from_quaternion(center, half, q);
}

nlohmann::json region_to_json(const ObbRegion& region) {
  const auto q = region.quaternion();
  const auto& c = region.center();
  const auto& h = region.half_extents();
  return {{"center", {c.x(), c.y(), c.z()}},
          {"half_extents", {h.x(), h.y(), h.z()}},
          {"quaternion", {q.w(), q.x(), q.y(), q.z()}}};
}

RegionSet regions_from_json(const nlohmann::json& j) {
  RegionSet set;
  auto add = [&](const nlohmann::json& obj, bool default_roi) {
    std::string role = default_roi ? "roi" : "";
    if (obj.is_object() && obj.contains("role")) {
      if (!obj.at("role").is_string()) throw ValidationError("region 'role' must be a string");
      role = obj.at("role").get<std::string>();
    }
    if (role == "roi") {
      if (set.roi) throw ValidationError("region file defines more than one ROI");
      set.roi = region_from_json(obj);
    } else if (role == "exclude") {
      set.exclusions.push_back(region_from_json(obj));
    } else {
      throw ValidationError("region role must be \"roi\" or \"exclude\"");
    }
  };
  if (j.is_array()) {
    for (const auto& obj : j) add(obj, false);
  } else {
    add(j, true);
  }
  return set;
}

nlohmann::json regions_to_json(const RegionSet& regions) {
  nlohmann::json arr = nlohmann::json::array();
  if (regions.roi) {
    auto obj = region_to_json(*regions.roi);
    obj["role"] = "roi";
    arr.push_back(std::move(obj));
  }
  for (const auto& ex : regions.exclusions) {
    auto obj = region_to_json(ex);
    obj["role"] = "exclude";
    arr.push_back(std::move(obj));
  }
  return arr;
}

RegionSet load_regions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid region JSON: ") + e.what(),
                     ParseError::OffsetKind::Byte, e.byte);
  }
  return regions_from_json(j);
}

PointCloud apply_regions(const PointCloud& cloud, const RegionSet& regions) {
  PointCloud out = cloud;
  for (const auto& ex : regions.exclusions) out = exclude(out, ex);
  if (regions.roi) out = crop(out, *regions.roi);
  return out;
}

}  // namespace pcmon
