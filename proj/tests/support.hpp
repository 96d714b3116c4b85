#pragma once

// Test-only generators and brute-force oracles. Nothing here calls into the
// spatial index, so the oracles stay independent of the code under test.

#include <atomic>
#include <cstring>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "pcmon/cloud.hpp"
#include "pcmon/registration.hpp"

namespace pcmon::testing {

inline std::vector<Point3> random_points(std::size_t n, std::mt19937_64& rng, double lo = -5.0,
                                         double hi = 5.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<Point3> pts(n);
  for (auto& p : pts) p = Point3(u(rng), u(rng), u(rng));
  return pts;
}

inline PointCloud random_cloud(std::size_t n, std::mt19937_64& rng, double lo = -5.0,
                               double hi = 5.0) {
  return PointCloud(random_points(n, rng, lo, hi));
}

/// Points on a coarse integer lattice: plenty of exact distance ties.
inline PointCloud lattice_cloud(std::size_t n, std::mt19937_64& rng, int extent = 6) {
  std::uniform_int_distribution<int> u(-extent, extent);
  std::vector<Point3> pts(n);
  for (auto& p : pts) p = Point3(u(rng), u(rng), u(rng));
  return PointCloud(std::move(pts));
}

struct BruteNeighbor {
  std::size_t index = 0;
  double distance = 0.0;
};

/// Exhaustive scan; ties resolve to the smallest index.
inline BruteNeighbor brute_nearest(const std::vector<Point3>& pts, const Point3& q) {
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_i = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double dx = q.x() - pts[i].x();
    const double dy = q.y() - pts[i].y();
    const double dz = q.z() - pts[i].z();
    const double d2 = dx * dx + dy * dy + dz * dz;
    if (d2 < best) {
      best = d2;
      best_i = i;
    }
  }
  return {best_i, std::sqrt(best)};
}

/// min over B of |a - b| for each a, computed with Eigen's norm (a different
/// evaluation path than the index).
inline std::vector<double> brute_min_distances(const std::vector<Point3>& from,
                                               const std::vector<Point3>& to) {
  std::vector<double> out(from.size());
  for (std::size_t i = 0; i < from.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& b : to) best = std::min(best, (from[i] - b).norm());
    out[i] = best;
  }
  return out;
}

inline double brute_directed_hausdorff(const std::vector<Point3>& a,
                                       const std::vector<Point3>& b) {
  double h = 0.0;
  for (double d : brute_min_distances(a, b)) h = std::max(h, d);
  return h;
}

inline RigidTransform random_transform(std::mt19937_64& rng, double max_translation = 5.0) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::Quaterniond q(g(rng), g(rng), g(rng), g(rng));
  std::uniform_real_distribution<double> u(-max_translation, max_translation);
  return RigidTransform::from_quaternion(q, Point3(u(rng), u(rng), u(rng)));
}

inline bool bitwise_equal(const std::vector<Point3>& a, const std::vector<Point3>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (int k = 0; k < 3; ++k) {
      if (std::memcmp(&a[i][k], &b[i][k], sizeof(double)) != 0) return false;
    }
  }
  return true;
}

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("pcmon_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace pcmon::testing
