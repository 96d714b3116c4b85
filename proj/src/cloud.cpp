#include "pcmon/cloud.hpp"

#include <cmath>
#include <string>

#include "pcmon/errors.hpp"

namespace pcmon {

PointCloud::PointCloud(std::vector<Point3> points, std::optional<std::vector<ColorRGB>> colors,
                       std::string label)
    : points_(std::move(points)), colors_(std::move(colors)), label_(std::move(label)) {
  if (colors_ && colors_->size() != points_.size()) {
    throw ValidationError("color count " + std::to_string(colors_->size()) +
                          " does not match point count " + std::to_string(points_.size()));
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!points_[i].allFinite()) {
      throw ValidationError("non-finite coordinate at point " + std::to_string(i));
    }
  }
}

PointCloud PointCloud::with_label(std::string label) const {
  PointCloud copy = *this;
  copy.label_ = std::move(label);
  return copy;
}

Aabb bounding_box(const PointCloud& cloud) {
  if (cloud.empty()) throw ValidationError("bounding_box: empty cloud");
  Aabb box{cloud.point(0), cloud.point(0)};
  for (const auto& p : cloud.points()) {
    box.min = box.min.cwiseMin(p);
    box.max = box.max.cwiseMax(p);
  }
  return box;
}

PointCloud merge(const PointCloud& a, const PointCloud& b) {
  std::vector<Point3> points;
  points.reserve(a.size() + b.size());
  points.insert(points.end(), a.points().begin(), a.points().end());
  points.insert(points.end(), b.points().begin(), b.points().end());

  std::optional<std::vector<ColorRGB>> colors;
  if (a.has_colors() || b.has_colors()) {
    colors.emplace();
    colors->reserve(points.size());
    for (const PointCloud* side : {&a, &b}) {
      if (side->has_colors()) {
        colors->insert(colors->end(), side->colors().begin(), side->colors().end());
      } else {
        colors->insert(colors->end(), side->size(), kDefaultMergeColor);
      }
    }
  }
  std::string label = a.label().empty() ? b.label() : a.label();
  return PointCloud(std::move(points), std::move(colors), std::move(label));
}

PointCloud select(const PointCloud& cloud, const std::vector<std::size_t>& indices) {
  std::vector<Point3> points;
  points.reserve(indices.size());
  std::optional<std::vector<ColorRGB>> colors;
  if (cloud.has_colors()) colors.emplace().reserve(indices.size());
  for (std::size_t i : indices) {
    points.push_back(cloud.point(i));
    if (colors) colors->push_back(cloud.colors()[i]);
  }
  return PointCloud(std::move(points), std::move(colors), cloud.label());
}

}  // namespace pcmon
