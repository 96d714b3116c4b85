#include <doctest.h>

#include <cmath>

#include "pcmon/errors.hpp"
#include "pcmon/kd_index.hpp"
#include "support.hpp"

using namespace pcmon;
namespace t = pcmon::testing;

TEST_CASE("single point index") {
  const KdIndex index(PointCloud({Point3(1, 2, 3)}));
  const auto nb = index.nearest(Point3(1, 2, 4));
  CHECK(nb.index == 0);
  CHECK(nb.distance == 1.0);
  CHECK(index.size() == 1);
  CHECK(index.depth() == 1);
}

TEST_CASE("empty cloud is rejected") {
  CHECK_THROWS_AS(build_index(PointCloud()), ValidationError);
}

TEST_CASE("3-4-5 example") {
  const KdIndex index(PointCloud({Point3(0, 0, 0), Point3(10, 0, 0)}));
  const auto nb = index.nearest(Point3(3, 4, 0));
  CHECK(nb.index == 0);
  CHECK(nb.distance == 5.0);
}

TEST_CASE("every point finds itself") {
  std::mt19937_64 rng(11);
  const auto cloud = t::random_cloud(1000, rng);
  const KdIndex index(cloud);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto nb = index.nearest(cloud.point(i));
    CHECK(nb.index == i);
    CHECK(nb.distance == 0.0);
  }
}

TEST_CASE("matches brute force on random queries") {
  std::mt19937_64 rng(5);
  const auto cloud = t::random_cloud(2000, rng);
  const KdIndex index(cloud);
  const auto queries = t::random_points(500, rng, -7.0, 7.0);
  for (const auto& q : queries) {
    const auto nb = index.nearest(q);
    const auto oracle = t::brute_nearest(cloud.points(), q);
    CHECK(nb.index == oracle.index);
    CHECK(nb.distance == oracle.distance);
  }
}

TEST_CASE("property: nearest neighbour agrees with exhaustive scan, ties included") {
  std::mt19937_64 rng(2024);
  std::size_t queries = 0;
  while (queries < 100000) {
    const std::size_t n = 1 + rng() % 400;
    const bool lattice = rng() % 2 == 0;
    const auto cloud = lattice ? t::lattice_cloud(n, rng, 3) : t::random_cloud(n, rng);
    const std::size_t leaf = 1 + rng() % 20;
    const KdIndex index(cloud, leaf);
    for (int k = 0; k < 200; ++k, ++queries) {
      Point3 q;
      if (lattice) {
        std::uniform_int_distribution<int> u(-4, 4);
        q = Point3(u(rng), u(rng), u(rng)) * 0.5;
      } else {
        q = t::random_points(1, rng, -6.0, 6.0)[0];
      }
      const auto nb = index.nearest(q);
      const auto oracle = t::brute_nearest(cloud.points(), q);
      if (nb.index != oracle.index || nb.distance != oracle.distance) {
        FAIL("mismatch at query " << queries << " (n=" << n << ", leaf=" << leaf << ")");
      }
    }
  }
  CHECK(queries >= 100000);
}

TEST_CASE("structure invariants") {
  std::mt19937_64 rng(9);
  for (std::size_t n : {1u, 15u, 16u, 17u, 100u, 1000u, 5000u}) {
    const auto cloud = t::random_cloud(n, rng);
    const KdIndex index(cloud, 16);
    const double bound = std::ceil(std::log2(std::max<double>(1.0, n / 16.0))) + 2.0;
    CHECK(static_cast<double>(index.depth()) <= bound);

    std::vector<int> seen(n, 0);
    for (const auto& leaf : index.leaves()) {
      CHECK(leaf.size() <= 16);
      CHECK_FALSE(leaf.empty());
      for (std::size_t i : leaf) ++seen[i];
    }
    CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
    CHECK(index.leaf_count() == index.leaves().size());
  }
}

TEST_CASE("construction is deterministic") {
  std::mt19937_64 rng(77);
  const auto cloud = t::lattice_cloud(3000, rng, 4);
  const KdIndex a(cloud);
  const KdIndex b(cloud);
  CHECK(a.leaves() == b.leaves());
  const auto qs = t::random_points(200, rng);
  for (const auto& q : qs) {
    const auto na = a.nearest(q);
    const auto nb = b.nearest(q);
    CHECK(na.index == nb.index);
    CHECK(na.distance == nb.distance);
  }
}

TEST_CASE("adding points never increases the nearest distance") {
  std::mt19937_64 rng(31);
  auto pts = t::random_points(300, rng);
  const auto extra = t::random_points(300, rng);
  const auto queries = t::random_points(200, rng);
  const KdIndex small((PointCloud(pts)));
  pts.insert(pts.end(), extra.begin(), extra.end());
  const KdIndex large((PointCloud(pts)));
  for (const auto& q : queries) CHECK(large.nearest(q).distance <= small.nearest(q).distance);
}
