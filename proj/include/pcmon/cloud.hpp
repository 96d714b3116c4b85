#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace pcmon {

using Point3 = Eigen::Vector3d;

struct ColorRGB {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const ColorRGB&, const ColorRGB&) = default;
};

inline constexpr ColorRGB kDefaultMergeColor{128, 128, 128};

struct Aabb {
  Point3 min;
  Point3 max;

  Point3 extent() const { return max - min; }
  double diagonal() const { return extent().norm(); }
  bool contains(const Point3& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
  }
};

/// One epoch's scan: positions, optional per-point colors and a label.
///
/// Immutable once constructed. Every operation that "modifies" a cloud
/// returns a new one, so instances can be shared freely across threads.
class PointCloud {
 public:
  PointCloud() = default;

  /// Throws ValidationError if any coordinate is non-finite or if `colors`
  /// is present with a length different from `points`.
  explicit PointCloud(std::vector<Point3> points,
                      std::optional<std::vector<ColorRGB>> colors = std::nullopt,
                      std::string label = {});

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

  const std::vector<Point3>& points() const { return points_; }
  const Point3& point(std::size_t i) const { return points_[i]; }

  bool has_colors() const { return colors_.has_value(); }
  /// Precondition: has_colors().
  const std::vector<ColorRGB>& colors() const { return *colors_; }
  const std::optional<std::vector<ColorRGB>>& color_data() const { return colors_; }

  const std::string& label() const { return label_; }
  PointCloud with_label(std::string label) const;

 private:
  std::vector<Point3> points_;
  std::optional<std::vector<ColorRGB>> colors_;
  std::string label_;
};

/// Throws ValidationError on an empty cloud.
Aabb bounding_box(const PointCloud& cloud);

/// Concatenates `a` then `b`. If exactly one side carries colors, the other
/// side is filled with kDefaultMergeColor.
PointCloud merge(const PointCloud& a, const PointCloud& b);

/// Gathers the points at `indices` (in the given order), keeping colors.
PointCloud select(const PointCloud& cloud, const std::vector<std::size_t>& indices);

}  // namespace pcmon
