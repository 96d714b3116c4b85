#pragma once

#include <cstdint>
#include <vector>

#include "pcmon/cloud.hpp"

namespace pcmon {

struct Neighbor {
  std::size_t index = 0;
  double distance = 0.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Static balanced 3-d tree answering exact nearest-neighbor queries.
///
/// Splits at the median of the axis with the widest spread until a node
/// holds at most `leaf_capacity` points. Ties between equidistant points
/// resolve to the smallest source index. The index copies the positions it
/// needs, so it does not keep the source cloud alive. Queries are const and
/// safe to issue concurrently.
class KdIndex {
 public:
  static constexpr std::size_t kDefaultLeafCapacity = 16;

  /// Throws ValidationError on an empty cloud or a zero leaf capacity.
  explicit KdIndex(const PointCloud& cloud, std::size_t leaf_capacity = kDefaultLeafCapacity);

  Neighbor nearest(const Point3& query) const;

  std::size_t size() const { return points_.size(); }
  std::size_t leaf_capacity() const { return leaf_capacity_; }

  // Structural introspection, used by tests.
  std::size_t depth() const;
  std::size_t leaf_count() const;
  /// Source indices stored in each leaf, in tree order.
  std::vector<std::vector<std::size_t>> leaves() const;

 private:
  struct Node {
    // Leaf: [begin, end) range into the permuted arrays, left == -1.
    // Inner: split axis/value and child node ids.
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    double split = 0.0;
    int axis = 0;
    bool is_leaf() const { return left < 0; }
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end);
  std::size_t depth_of(std::int32_t node) const;

  std::size_t leaf_capacity_;
  std::vector<Node> nodes_;
  std::vector<Point3> points_;          // positions in leaf order
  std::vector<std::uint32_t> indices_;  // source index for each permuted slot
};

/// Convenience wrapper matching the free-function style of the other modules.
inline KdIndex build_index(const PointCloud& cloud,
                           std::size_t leaf_capacity = KdIndex::kDefaultLeafCapacity) {
  return KdIndex(cloud, leaf_capacity);
}

}  // namespace pcmon
