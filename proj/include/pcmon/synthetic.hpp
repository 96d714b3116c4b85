#pragma once

#include <cstdint>
#include <optional>

#include "pcmon/cloud.hpp"
#include "pcmon/deterioration.hpp"

namespace pcmon {

/// Axis-aligned rectangle in wall coordinates (x along the wall, y up).
struct Rect2 {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  double area() const { return (x1 - x0) * (y1 - y0); }
  bool contains(double x, double y) const { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
};

/// Uniformly sampled rectangular wall in the z = relief(x, y) surface, with
/// optional Gaussian out-of-plane noise and an optional void (a window).
struct WallParams {
  double width = 4.0;
  double height = 3.0;
  /// Points per unit area; ignored when point_count > 0.
  double density = 10000.0;
  std::size_t point_count = 0;
  double noise_sigma = 0.0;
  std::optional<Rect2> void_rect;
  /// Masonry-like relief: amplitude * sin(2πx/λ) * sin(2πy/λ). Zero keeps
  /// the wall planar.
  double relief_amplitude = 0.0;
  double relief_wavelength = 0.5;
  bool colors = true;
  std::uint64_t seed = 1;
  std::string label = "wall";
};

PointCloud generate_wall(const WallParams& params);

/// Two visits of one wall: independent samplings with the same noise level.
/// The second visit carries a recolored strip (crack-like edge) and a strip
/// shifted into the wall (true crack).
struct CrackSceneParams {
  WallParams wall;
  double depth = 0.0;  ///< defaults to 10 × noise_sigma when zero
  ColorRGB paint{0, 0, 0};
};

struct CrackScene {
  PointCloud first_visit;
  PointCloud second_visit;
  SlenderElement recolor_strip;
  SlenderElement shift_strip;
  double depth = 0.0;
};

/// Strip geometry is fixed relative to the wall size: both strips run
/// horizontally, at 30% and 70% of the wall height.
CrackScene generate_crack_scene(const CrackSceneParams& params);

}  // namespace pcmon
