#include <doctest.h>

#include <cmath>

#include "pcmon/errors.hpp"
#include "pcmon/segmentation.hpp"
#include "pcmon/synthetic.hpp"
#include "support.hpp"

using namespace pcmon;
namespace t = pcmon::testing;

namespace {

// Oracle: project onto each box axis explicitly.
bool inside_oracle(const ObbRegion& r, const Point3& p) {
  const Point3 d = p - r.center();
  for (int k = 0; k < 3; ++k) {
    const double s = d.dot(r.orientation().col(k));
    if (std::abs(s) > r.half_extents()[k] * (1.0 + 1e-12)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("containment examples") {
  const ObbRegion unit(Point3::Zero(), Eigen::Vector3d(1, 1, 1));
  CHECK(unit.contains(Point3(0, 0, 0)));
  CHECK(unit.contains(Point3(1, 1, 1)));
  CHECK(unit.contains(Point3(-1, 0.5, 1)));
  CHECK_FALSE(unit.contains(Point3(1.0001, 0, 0)));

  const auto rotated = ObbRegion::from_quaternion(
      Point3::Zero(), Eigen::Vector3d(1, 1, 1),
      Eigen::Quaterniond(Eigen::AngleAxisd(M_PI / 4, Eigen::Vector3d::UnitZ())));
  CHECK_FALSE(rotated.contains(Point3(1, 1, 0)));
  CHECK(rotated.contains(Point3(std::sqrt(2.0), 0, 0)));
  CHECK(rotated.contains(Point3(0.7, 0.7, 0)));
  // A point placed exactly on a rotated face through the box's own frame.
  const Point3 on_face = rotated.orientation() * Point3(1, 0.3, -0.2);
  CHECK(rotated.contains(on_face));
}

TEST_CASE("region validation") {
  CHECK_THROWS_AS(ObbRegion(Point3::Zero(), Eigen::Vector3d(1, 0, 1)), ValidationError);
  CHECK_THROWS_AS(ObbRegion(Point3::Zero(), Eigen::Vector3d(1, -1, 1)), ValidationError);
  CHECK_THROWS_AS(ObbRegion::from_quaternion(Point3::Zero(), Eigen::Vector3d(1, 1, 1),
                                             Eigen::Quaterniond(2, 0, 0, 0)),
                  ValidationError);
}

TEST_CASE("crop with the bounding box keeps everything") {
  std::mt19937_64 rng(2);
  const auto c = t::random_cloud(2000, rng);
  const auto cropped = crop(c, ObbRegion::axis_aligned(bounding_box(c)));
  CHECK(t::bitwise_equal(cropped.points(), c.points()));
  CHECK(exclude(c, ObbRegion::axis_aligned(bounding_box(c))).empty());
}

TEST_CASE("property: crop and exclude partition the cloud") {
  std::mt19937_64 rng(44);
  for (int k = 0; k < 40; ++k) {
    const auto c = t::random_cloud(800, rng);
    const auto q = t::random_transform(rng).rotation();
    const auto half = t::random_points(1, rng, 0.5, 4.0)[0];
    const ObbRegion r(t::random_points(1, rng, -2.0, 2.0)[0], half, q);
    const auto in = crop(c, r);
    const auto out = exclude(c, r);
    CHECK(in.size() + out.size() == c.size());
    std::size_t oracle_in = 0;
    for (const auto& p : c.points()) oracle_in += inside_oracle(r, p) ? 1 : 0;
    CHECK(in.size() == oracle_in);
    for (const auto& p : in.points()) CHECK(r.contains(p));
    for (const auto& p : out.points()) CHECK_FALSE(r.contains(p));
    CHECK(t::bitwise_equal(crop(in, r).points(), in.points()));
    CHECK(t::bitwise_equal(exclude(out, r).points(), out.points()));
  }
}

TEST_CASE("property: cropping commutes with rigid motion") {
  std::mt19937_64 rng(45);
  for (int k = 0; k < 20; ++k) {
    const auto c = t::random_cloud(600, rng);
    const ObbRegion r(Point3::Zero(), Eigen::Vector3d(2.0, 1.5, 3.0), t::random_transform(rng).rotation());
    const auto g = t::random_transform(rng);
    const auto lhs = crop(apply_transform(c, g), transform_region(r, g));
    const auto rhs = apply_transform(crop(c, r), g);
    // Points near a face may flip under rounding; require near-equality.
    CHECK(std::abs(static_cast<long>(lhs.size()) - static_cast<long>(rhs.size())) <= 1);
  }
}

TEST_CASE("window void leaves the region empty") {
  WallParams p;
  p.point_count = 20000;
  p.void_rect = Rect2{1.0, 1.0, 2.0, 2.0};
  const auto wall = generate_wall(p);
  CHECK(wall.size() == 20000);
  const ObbRegion window(Point3(1.5, 1.5, 0.0), Eigen::Vector3d(0.49, 0.49, 0.1));
  CHECK(crop(wall, window).empty());
}

TEST_CASE("region JSON") {
  const auto single = regions_from_json(nlohmann::json::parse(
      R"({"center":[1,2,3],"half_extents":[1,1,1]})"));
  REQUIRE(single.roi);
  CHECK(single.roi->center() == Point3(1, 2, 3));
  CHECK(single.exclusions.empty());

  const auto both = regions_from_json(nlohmann::json::parse(R"([
    {"role":"roi","center":[0,0,0],"half_extents":[5,5,5],"quaternion":[1,0,0,0]},
    {"role":"exclude","center":[1,0,0],"half_extents":[0.5,0.5,0.5]}
  ])"));
  REQUIRE(both.roi);
  REQUIRE(both.exclusions.size() == 1);
  const auto back = regions_from_json(regions_to_json(both));
  CHECK(back.exclusions.size() == 1);
  CHECK(back.roi->half_extents() == both.roi->half_extents());

  const PointCloud pts({Point3(0, 0, 0), Point3(1, 0, 0), Point3(4, 0, 0), Point3(9, 0, 0)});
  const auto kept = apply_regions(pts, both);
  REQUIRE(kept.size() == 2);
  CHECK(kept.point(0) == Point3(0, 0, 0));
  CHECK(kept.point(1) == Point3(4, 0, 0));

  CHECK_THROWS_AS(regions_from_json(nlohmann::json::parse(
                      R"([{"center":[0,0,0],"half_extents":[1,1,1]}])")),
                  ValidationError);
  CHECK_THROWS_AS(regions_from_json(nlohmann::json::parse(R"([
    {"role":"roi","center":[0,0,0],"half_extents":[1,1,1]},
    {"role":"roi","center":[0,0,0],"half_extents":[1,1,1]}])")),
                  ValidationError);
  CHECK_THROWS_AS(region_from_json(nlohmann::json::parse(R"({"center":[0,0],"half_extents":[1,1,1]})")),
                  ValidationError);
  CHECK_THROWS_AS(region_from_json(nlohmann::json::parse(
                      R"({"center":[0,0,0],"half_extents":[1,1,1],"quaternion":[0.5,0,0,0]})")),
                  ValidationError);

  t::TempDir dir;
  t::write_file(dir / "r.json", "{\"center\": [0, 0");
  CHECK_THROWS_AS(load_regions(dir / "r.json"), ParseError);
  CHECK_THROWS_AS(load_regions(dir / "none.json"), IoError);
}
