#include <doctest.h>

#include <cmath>

#include "pcmon/deterioration.hpp"
#include "pcmon/distances.hpp"
#include "pcmon/errors.hpp"
#include "pcmon/synthetic.hpp"
#include "support.hpp"

using namespace pcmon;
namespace t = pcmon::testing;

namespace {

PointCloud flat_wall(std::size_t n, std::uint64_t seed, double sigma = 0.0) {
  WallParams p;
  p.width = 2.0;
  p.height = 1.0;
  p.point_count = n;
  p.noise_sigma = sigma;
  p.seed = seed;
  return generate_wall(p);
}

SlenderElement strip() {
  return SlenderElement(ObbRegion(Point3(1.0, 0.5, 0.0), Eigen::Vector3d(0.5, 0.01, 0.05)));
}

}  // namespace

TEST_CASE("plane fitting") {
  SUBCASE("z = 0") {
    const auto fit = fit_plane(flat_wall(500, 1));
    CHECK(fit.unit_normal == Eigen::Vector3d(0, 0, 1));
    CHECK(fit.rms_residual == 0.0);
    CHECK(fit.centroid.z() == 0.0);
  }
  SUBCASE("x + y + z = 1") {
    std::mt19937_64 rng(3);
    std::vector<Point3> pts;
    for (const auto& p : t::random_points(200, rng)) pts.emplace_back(p.x(), p.y(), 1.0 - p.x() - p.y());
    const auto fit = fit_plane(PointCloud(pts));
    const Eigen::Vector3d expected = Eigen::Vector3d(1, 1, 1).normalized();
    CHECK((fit.unit_normal - expected).norm() < 1e-12);
    CHECK(fit.rms_residual < 1e-12);
  }
  SUBCASE("noise level is recovered") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const double sigma = 0.002;
      const auto fit = fit_plane(flat_wall(5000, seed, sigma));
      CHECK(std::abs(fit.rms_residual - sigma) < 0.2 * sigma);
      CHECK(fit.unit_normal.z() > 0.999);
    }
  }
  SUBCASE("degenerate input") {
    CHECK_THROWS_AS(fit_plane(PointCloud({Point3(0, 0, 0), Point3(1, 0, 0)})), ValidationError);
    CHECK_THROWS_AS(fit_plane(PointCloud({Point3(0, 0, 0), Point3(1, 1, 1), Point3(2, 2, 2),
                                          Point3(3, 3, 3)})),
                    ValidationError);
    CHECK_THROWS_AS(fit_plane(PointCloud(std::vector<Point3>(5, Point3(1, 2, 3)))),
                    ValidationError);
  }
}

TEST_CASE("slender element validation") {
  CHECK_NOTHROW(strip());
  CHECK_THROWS_AS(SlenderElement(ObbRegion(Point3::Zero(), Eigen::Vector3d(1, 1, 0.01))),
                  ValidationError);
  CHECK_THROWS_AS(SlenderElement(ObbRegion(Point3::Zero(), Eigen::Vector3d(1, 0.2, 0.01))),
                  ValidationError);
}

TEST_CASE("recolor keeps geometry") {
  const PointCloud tiny({Point3(0, 0, 0), Point3(1, 0, 0), Point3(5, 5, 5)},
                        std::vector<ColorRGB>{{10, 10, 10}, {20, 20, 20}, {30, 30, 30}});
  const SlenderElement e(ObbRegion(Point3(0.5, 0, 0), Eigen::Vector3d(1, 0.1, 0.1)));
  const auto out = simulate_crack_like_edge(tiny, e, ColorRGB{0, 0, 0});
  CHECK(t::bitwise_equal(out.points(), tiny.points()));
  CHECK(out.colors()[0] == ColorRGB{0, 0, 0});
  CHECK(out.colors()[1] == ColorRGB{0, 0, 0});
  CHECK(out.colors()[2] == ColorRGB{30, 30, 30});
  const auto field = c2c_distances(tiny, out);
  for (double d : field.distances) CHECK(d == 0.0);

  const PointCloud bare(tiny.points());
  const auto painted = simulate_crack_like_edge(bare, e, ColorRGB{1, 2, 3});
  REQUIRE(painted.has_colors());
  CHECK(painted.colors()[2] == kDefaultMergeColor);

  const SlenderElement nowhere(ObbRegion(Point3(50, 0, 0), Eigen::Vector3d(1, 0.1, 0.1)));
  CHECK_THROWS_AS(simulate_crack_like_edge(tiny, nowhere), ValidationError);
}

TEST_CASE("shift moves only the selection by the depth") {
  const auto wall = flat_wall(20000, 7);
  const auto e = strip();
  const double depth = 0.01;
  const auto shifted = simulate_true_crack(wall, e, depth, Eigen::Vector3d::UnitZ());
  std::size_t moved = 0;
  for (std::size_t i = 0; i < wall.size(); ++i) {
    if (e.selection().contains(wall.point(i))) {
      ++moved;
      CHECK(shifted.point(i).z() == -0.01);
      CHECK(shifted.point(i).x() == wall.point(i).x());
    } else {
      CHECK(shifted.point(i) == wall.point(i));
    }
  }
  REQUIRE(moved > 0);
  CHECK(shifted.colors() == wall.colors());

  const auto field = c2c_distances(wall, shifted);
  double strip_max = 0.0;
  for (std::size_t i = 0; i < wall.size(); ++i) {
    if (e.selection().contains(wall.point(i))) {
      CHECK(field.distances[i] <= depth * (1.0 + 1e-12));
      strip_max = std::max(strip_max, field.distances[i]);
    } else {
      CHECK(field.distances[i] == 0.0);
    }
  }
  CHECK(strip_max == doctest::Approx(depth).epsilon(1e-9));

  SUBCASE("fitted normal and outward direction") {
    const auto out = simulate_true_crack(wall, e, depth, std::nullopt, ShiftDirection::OutOfWall);
    for (std::size_t i = 0; i < wall.size(); ++i) {
      if (e.selection().contains(wall.point(i))) CHECK(out.point(i).z() == 0.01);
    }
  }
  SUBCASE("tiny depth is numerically the identity") {
    const auto same = simulate_true_crack(wall, e, 1e-300, Eigen::Vector3d::UnitZ());
    const auto f = c2c_distances(wall, same);
    for (double d : f.distances) CHECK(d <= 1e-300);
  }
  SUBCASE("invalid arguments") {
    CHECK_THROWS_AS(simulate_true_crack(wall, e, 0.0), ValidationError);
    CHECK_THROWS_AS(simulate_true_crack(wall, e, -1.0), ValidationError);
    CHECK_THROWS_AS(simulate_true_crack(wall, e, 0.01, Eigen::Vector3d(0, 0, 2)), ValidationError);
  }
}

TEST_CASE("property: recolor is invisible to geometry, shift is not") {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 10; ++k) {
    const double sigma = 0.0005 * static_cast<double>(rng() % 4);
    const auto wall = flat_wall(8000, 100 + k, sigma);
    const auto e = strip();
    CHECK(hausdorff(wall, simulate_crack_like_edge(wall, e)).hausdorff == 0.0);
    const double depth = 0.02;
    const auto shifted = simulate_true_crack(wall, e, depth, Eigen::Vector3d::UnitZ());
    const auto field = c2c_distances(wall, shifted);
    for (std::size_t i = 0; i < wall.size(); ++i) {
      CHECK(field.distances[i] <= depth * (1.0 + 1e-12));
      if (!e.selection().contains(wall.point(i))) CHECK(field.distances[i] == 0.0);
    }
    CHECK(directed_hausdorff(field) > 0.0);
  }
}

TEST_CASE("simulation spec JSON") {
  const auto spec = simulation_spec_from_json(nlohmann::json::parse(R"({
    "element": {"center":[1,0.5,0],"half_extents":[0.5,0.01,0.05]},
    "mode": "shift", "depth": 0.02, "normal": [0,0,1], "direction": "out"})"));
  CHECK(spec.mode == SimulationMode::Shift);
  CHECK(spec.depth == 0.02);
  CHECK(spec.direction == ShiftDirection::OutOfWall);
  const auto wall = flat_wall(5000, 2);
  const auto out = run_simulation(wall, spec);
  for (std::size_t i = 0; i < wall.size(); ++i) {
    if (spec.element.selection().contains(wall.point(i))) CHECK(out.point(i).z() == 0.02);
  }
  CHECK_THROWS_AS(simulation_spec_from_json(nlohmann::json::parse(R"({
    "element": {"center":[1,0.5,0],"half_extents":[0.5,0.01,0.05]}, "mode": "shift"})")),
                  ValidationError);
  CHECK_THROWS_AS(simulation_spec_from_json(nlohmann::json::parse(R"({
    "element": {"center":[1,0.5,0],"half_extents":[0.5,0.01,0.05]}, "mode": "melt"})")),
                  ValidationError);
  CHECK_THROWS_AS(simulation_spec_from_json(nlohmann::json::parse(R"({
    "element": {"center":[1,0.5,0],"half_extents":[0.5,0.01,0.05]}, "paint": [0, 0, 256]})")),
                  ValidationError);
}
