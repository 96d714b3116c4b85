#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "pcmon/cloud.hpp"
#include "pcmon/segmentation.hpp"

namespace pcmon {

/// Narrow box delimiting a crack-shaped element: the two smaller half
/// extents must each be below 0.2 × the largest.
class SlenderElement {
 public:
  static constexpr double kSlenderness = 0.2;

  explicit SlenderElement(ObbRegion selection, std::string source_label = {});

  const ObbRegion& selection() const { return selection_; }
  const std::string& source_label() const { return source_label_; }

 private:
  ObbRegion selection_;
  std::string source_label_;
};

struct PlaneFit {
  Point3 centroid;
  Eigen::Vector3d unit_normal;
  double rms_residual = 0.0;
};

/// Least-squares plane through the centroid; the normal is the smallest
/// principal axis, oriented so z >= 0 (then y >= 0, then x >= 0 on ties).
/// Throws ValidationError on fewer than 3 points or collinear input.
PlaneFit fit_plane(const PointCloud& cloud);

/// Recolors the points inside the element. Positions are copied bit for bit;
/// a colorless input gets kDefaultMergeColor outside the element.
PointCloud simulate_crack_like_edge(const PointCloud& cloud, const SlenderElement& element,
                                    ColorRGB paint = {0, 0, 0});

enum class ShiftDirection { IntoWall, OutOfWall };

/// Displaces the points inside the element by depth along -normal (IntoWall)
/// or +normal (OutOfWall). Without an explicit normal, the plane fitted to the
/// selected points supplies it. Colors and unselected points are untouched.
PointCloud simulate_true_crack(const PointCloud& cloud, const SlenderElement& element,
                               double depth, std::optional<Eigen::Vector3d> normal = std::nullopt,
                               ShiftDirection direction = ShiftDirection::IntoWall);

enum class SimulationMode { Recolor, Shift };

struct SimulationSpec {
  SlenderElement element;
  SimulationMode mode = SimulationMode::Recolor;
  double depth = 0.0;
  ColorRGB paint{0, 0, 0};
  std::optional<Eigen::Vector3d> normal;
  ShiftDirection direction = ShiftDirection::IntoWall;
};

/// {"element": <region>, "mode": "recolor"|"shift", "depth": d,
///  "paint": [r,g,b], "normal": [x,y,z], "direction": "into"|"out"}
SimulationSpec simulation_spec_from_json(const nlohmann::json& j);
SimulationSpec load_simulation_spec(const std::filesystem::path& path);
PointCloud run_simulation(const PointCloud& cloud, const SimulationSpec& spec);

}  // namespace pcmon
