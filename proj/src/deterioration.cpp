#include "pcmon/deterioration.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <Eigen/Eigenvalues>

#include "pcmon/errors.hpp"

namespace pcmon {
namespace {

std::vector<std::size_t> selected_indices(const PointCloud& cloud, const SlenderElement& element) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (element.selection().contains(cloud.point(i))) idx.push_back(i);
  }
  if (idx.empty()) throw ValidationError("slender element selects no points");
  return idx;
}

Eigen::Vector3d unit_normal_from(const Eigen::Vector3d& n) {
  const double norm = n.norm();
  if (!std::isfinite(norm) || std::abs(norm - 1.0) > 1e-6) {
    throw ValidationError("normal must be a unit vector (norm " + std::to_string(norm) + ")");
  }
  return n / norm;
}

ColorRGB color_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) throw ValidationError("'paint' must be [r, g, b]");
  std::array<std::uint8_t, 3> c{};
  for (int i = 0; i < 3; ++i) {
    if (!j[i].is_number_integer()) throw ValidationError("'paint' channels must be integers");
    const auto v = j[i].get<long long>();
    if (v < 0 || v > 255) throw ValidationError("'paint' channel outside [0, 255]");
    c[i] = static_cast<std::uint8_t>(v);
  }
  return {c[0], c[1], c[2]};
}

}  // namespace

SlenderElement::SlenderElement(ObbRegion selection, std::string source_label)
    : selection_(std::move(selection)), source_label_(std::move(source_label)) {
  Eigen::Vector3d h = selection_.half_extents();
  std::sort(h.data(), h.data() + 3);
  if (!(h[0] < kSlenderness * h[2] && h[1] < kSlenderness * h[2])) {
    throw ValidationError(
        "element is not slender: the two smaller half extents must be < 0.2 x the largest");
  }
}

PlaneFit fit_plane(const PointCloud& cloud) {
  if (cloud.size() < 3) throw ValidationError("fit_plane: at least 3 points required");
  const auto n = static_cast<double>(cloud.size());
  Point3 centroid = Point3::Zero();
  for (const auto& p : cloud.points()) centroid += p;
  centroid /= n;
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : cloud.points()) {
    const Eigen::Vector3d d = p - centroid;
    cov.noalias() += d * d.transpose();
  }
  cov /= n;

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
  const Eigen::Vector3d lambda = eig.eigenvalues();  // ascending
  if (!(lambda[2] > 0.0) || !(lambda[1] > 1e-12 * lambda[2])) {
    throw ValidationError("fit_plane: degenerate (collinear or coincident) points");
  }
  Eigen::Vector3d normal = eig.eigenvectors().col(0).normalized();
  const bool flip = normal.z() < 0 || (normal.z() == 0 && normal.y() < 0) ||
                    (normal.z() == 0 && normal.y() == 0 && normal.x() < 0);
  if (flip) normal = -normal;

  double sum2 = 0.0;
  for (const auto& p : cloud.points()) {
    const double r = (p - centroid).dot(normal);
    sum2 += r * r;
  }
  return {centroid, normal, std::sqrt(sum2 / n)};
}

PointCloud simulate_crack_like_edge(const PointCloud& cloud, const SlenderElement& element,
                                    ColorRGB paint) {
  const auto selected = selected_indices(cloud, element);
  std::vector<ColorRGB> colors =
      cloud.has_colors() ? cloud.colors() : std::vector<ColorRGB>(cloud.size(), kDefaultMergeColor);
  for (std::size_t i : selected) colors[i] = paint;
  return PointCloud(cloud.points(), std::move(colors), cloud.label());
}

PointCloud simulate_true_crack(const PointCloud& cloud, const SlenderElement& element,
                               double depth, std::optional<Eigen::Vector3d> normal,
                               ShiftDirection direction) {
  if (!(depth > 0.0) || !std::isfinite(depth)) {
    throw ValidationError("crack depth must be positive and finite");
  }
  const auto selected = selected_indices(cloud, element);
  Eigen::Vector3d unit;
  if (normal) {
    unit = unit_normal_from(*normal);
  } else {
    unit = fit_plane(select(cloud, selected)).unit_normal;
  }
  const Eigen::Vector3d offset =
      (direction == ShiftDirection::IntoWall ? -depth : depth) * unit;

  std::vector<Point3> points = cloud.points();
  for (std::size_t i : selected) points[i] += offset;
  return PointCloud(std::move(points), cloud.color_data(), cloud.label());
}

SimulationSpec simulation_spec_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("element")) {
    throw ValidationError("simulation spec needs an 'element' region");
  }
  SimulationSpec spec{SlenderElement(region_from_json(j.at("element"))), SimulationMode::Recolor,
                      0.0, {0, 0, 0}, std::nullopt, ShiftDirection::IntoWall};
  const std::string mode = j.value("mode", std::string("recolor"));
  if (mode == "recolor") {
    spec.mode = SimulationMode::Recolor;
  } else if (mode == "shift") {
    spec.mode = SimulationMode::Shift;
  } else {
    throw ValidationError("simulation 'mode' must be \"recolor\" or \"shift\"");
  }
  if (j.contains("depth")) {
    if (!j.at("depth").is_number()) throw ValidationError("'depth' must be a number");
    spec.depth = j.at("depth").get<double>();
  }
  if (spec.mode == SimulationMode::Shift && !(spec.depth > 0.0)) {
    throw ValidationError("shift simulation needs a positive 'depth'");
  }
  if (j.contains("paint")) spec.paint = color_from_json(j.at("paint"));
  if (j.contains("normal") && !j.at("normal").is_null()) {
    const auto& arr = j.at("normal");
    if (!arr.is_array() || arr.size() != 3) throw ValidationError("'normal' must be [x, y, z]");
    spec.normal = unit_normal_from(
        Eigen::Vector3d(arr[0].get<double>(), arr[1].get<double>(), arr[2].get<double>()));
  }
  const std::string direction = j.value("direction", std::string("into"));
  if (direction == "into") {
    spec.direction = ShiftDirection::IntoWall;
  } else if (direction == "out") {
    spec.direction = ShiftDirection::OutOfWall;
  } else {
    throw ValidationError("simulation 'direction' must be \"into\" or \"out\"");
  }
  return spec;
}

SimulationSpec load_simulation_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid simulation JSON: ") + e.what(),
                     ParseError::OffsetKind::Byte, e.byte);
  }
  return simulation_spec_from_json(j);
}

PointCloud run_simulation(const PointCloud& cloud, const SimulationSpec& spec) {
  if (spec.mode == SimulationMode::Recolor) {
    return simulate_crack_like_edge(cloud, spec.element, spec.paint);
  }
  return simulate_true_crack(cloud, spec.element, spec.depth, spec.normal, spec.direction);
}

}  // namespace pcmon
