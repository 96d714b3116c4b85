#include "pcmon/kd_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pcmon/errors.hpp"

namespace pcmon {
namespace {

struct Best {
  double dist2 = std::numeric_limits<double>::infinity();
  std::uint32_t index = std::numeric_limits<std::uint32_t>::max();

  void offer(double d2, std::uint32_t idx) {
    if (d2 < dist2 || (d2 == dist2 && idx < index)) {
      dist2 = d2;
      index = idx;
    }
  }
};

}  // namespace

KdIndex::KdIndex(const PointCloud& cloud, std::size_t leaf_capacity)
    : leaf_capacity_(leaf_capacity) {
  if (cloud.empty()) throw ValidationError("build_index: empty cloud");
  if (leaf_capacity == 0) throw ValidationError("build_index: leaf capacity must be positive");
  if (cloud.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw ValidationError("build_index: cloud exceeds 2^32 points");
  }
  const auto n = static_cast<std::uint32_t>(cloud.size());
  indices_.resize(n);
  std::iota(indices_.begin(), indices_.end(), 0u);
  points_ = cloud.points();  // temporarily in source order, used by build()
  nodes_.reserve(2 * (n / leaf_capacity + 1));
  build(0, n);

  std::vector<Point3> ordered(n);
  for (std::uint32_t i = 0; i < n; ++i) ordered[i] = points_[indices_[i]];
  points_ = std::move(ordered);
}

std::int32_t KdIndex::build(std::uint32_t begin, std::uint32_t end) {
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(Node{begin, end, -1, -1, 0.0, 0});
  if (end - begin <= leaf_capacity_) return id;

  Point3 lo = points_[indices_[begin]];
  Point3 hi = lo;
  for (std::uint32_t i = begin + 1; i < end; ++i) {
    lo = lo.cwiseMin(points_[indices_[i]]);
    hi = hi.cwiseMax(points_[indices_[i]]);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);

  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(indices_.begin() + begin, indices_.begin() + mid, indices_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     const double ca = points_[a][axis];
                     const double cb = points_[b][axis];
                     return ca < cb || (ca == cb && a < b);
                   });
  const double split = points_[indices_[mid]][axis];

  const std::int32_t left = build(begin, mid);
  const std::int32_t right = build(mid, end);
  Node& node = nodes_[id];
  node.axis = axis;
  node.split = split;
  node.left = left;
  node.right = right;
  return id;
}

Neighbor KdIndex::nearest(const Point3& query) const {
  Best best;
  // Explicit stack of (node, lower bound on squared distance).
  struct Pending {
    std::int32_t node;
    double bound2;
  };
  Pending stack[128];
  int top = 0;
  stack[top++] = {0, 0.0};
  while (top > 0) {
    const Pending cur = stack[--top];
    if (cur.bound2 > best.dist2) continue;
    const Node* node = &nodes_[cur.node];
    while (!node->is_leaf()) {
      const double diff = query[node->axis] - node->split;
      const std::int32_t near_child = diff < 0 ? node->left : node->right;
      const std::int32_t far_child = diff < 0 ? node->right : node->left;
      const double far_bound = diff * diff;
      // `<=` keeps equidistant candidates with smaller indices reachable.
      if (far_bound <= best.dist2) stack[top++] = {far_child, far_bound};
      node = &nodes_[near_child];
    }
    for (std::uint32_t i = node->begin; i < node->end; ++i) {
      const Point3& p = points_[i];
      const double dx = query.x() - p.x();
      const double dy = query.y() - p.y();
      const double dz = query.z() - p.z();
      best.offer(dx * dx + dy * dy + dz * dz, indices_[i]);
    }
  }
  return {best.index, std::sqrt(best.dist2)};
}

std::size_t KdIndex::depth_of(std::int32_t node) const {
  const Node& n = nodes_[node];
  if (n.is_leaf()) return 1;
  return 1 + std::max(depth_of(n.left), depth_of(n.right));
}

std::size_t KdIndex::depth() const { return depth_of(0); }

std::size_t KdIndex::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.is_leaf(); }));
}

std::vector<std::vector<std::size_t>> KdIndex::leaves() const {
  std::vector<std::vector<std::size_t>> out;
  for (const Node& n : nodes_) {
    if (!n.is_leaf()) continue;
    out.emplace_back(indices_.begin() + n.begin, indices_.begin() + n.end);
  }
  return out;
}

}  // namespace pcmon
