#include "pcmon/synthetic.hpp"

#include <cmath>
#include <random>

#include "pcmon/errors.hpp"

namespace pcmon {

PointCloud generate_wall(const WallParams& params) {
  if (!(params.width > 0.0) || !(params.height > 0.0)) {
    throw ValidationError("wall width and height must be positive");
  }
  if (params.noise_sigma < 0.0) throw ValidationError("noise sigma must be non-negative");
  double usable_area = params.width * params.height;
  if (params.void_rect) usable_area -= params.void_rect->area();
  if (!(usable_area > 0.0)) throw ValidationError("void covers the whole wall");
  const std::size_t count =
      params.point_count > 0
          ? params.point_count
          : static_cast<std::size_t>(std::llround(params.density * usable_area));

  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> ux(0.0, params.width);
  std::uniform_real_distribution<double> uy(0.0, params.height);
  std::normal_distribution<double> noise(0.0, params.noise_sigma > 0 ? params.noise_sigma : 1.0);
  std::uniform_int_distribution<int> jitter(-20, 20);

  const double k = 2.0 * M_PI / params.relief_wavelength;
  std::vector<Point3> points;
  std::vector<ColorRGB> colors;
  points.reserve(count);
  if (params.colors) colors.reserve(count);
  while (points.size() < count) {
    const double x = ux(rng);
    const double y = uy(rng);
    if (params.void_rect && params.void_rect->contains(x, y)) continue;
    double z = params.relief_amplitude * std::sin(k * x) * std::sin(k * y);
    if (params.noise_sigma > 0.0) z += noise(rng);
    points.emplace_back(x, y, z);
    if (params.colors) {
      const int shade = jitter(rng);
      colors.push_back({static_cast<std::uint8_t>(150 + shade),
                        static_cast<std::uint8_t>(138 + shade),
                        static_cast<std::uint8_t>(118 + shade)});
    }
  }
  std::optional<std::vector<ColorRGB>> color_data;
  if (params.colors) color_data = std::move(colors);
  return PointCloud(std::move(points), std::move(color_data), params.label);
}

CrackScene generate_crack_scene(const CrackSceneParams& params) {
  const WallParams& wall = params.wall;
  const double depth = params.depth > 0.0 ? params.depth : 10.0 * wall.noise_sigma;
  if (!(depth > 0.0)) throw ValidationError("crack scene needs a positive depth or noise sigma");

  WallParams first = wall;
  first.label = wall.label + "_visit1";
  WallParams second = wall;
  second.seed = wall.seed + 1;
  second.label = wall.label + "_visit2";

  // Strips span 40% of the width, 1% of the height; the depth half extent
  // covers the noise band and the shift with margin.
  const double half_len = 0.2 * wall.width;
  const double half_thick = 0.005 * wall.height;
  const double half_depth = std::max(6.0 * wall.noise_sigma + depth, 0.01 * half_len) +
                            std::abs(wall.relief_amplitude);
  const Eigen::Vector3d half(half_len, half_thick, half_depth);
  SlenderElement recolor(ObbRegion(Point3(0.5 * wall.width, 0.3 * wall.height, 0.0), half),
                         second.label);
  SlenderElement shift(ObbRegion(Point3(0.5 * wall.width, 0.7 * wall.height, 0.0), half),
                       second.label);

  PointCloud visit2 = generate_wall(second);
  visit2 = simulate_crack_like_edge(visit2, recolor, params.paint);
  visit2 = simulate_true_crack(visit2, shift, depth, Eigen::Vector3d::UnitZ());
  return {generate_wall(first), std::move(visit2), std::move(recolor), std::move(shift), depth};
}

}  // namespace pcmon
