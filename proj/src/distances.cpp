#include "pcmon/distances.hpp"

#include <algorithm>
#include <cmath>

#include "pcmon/errors.hpp"
#include "pcmon/parallel.hpp"

namespace pcmon {

DistanceField c2c_distances(const KdIndex& reference_index, const PointCloud& floating) {
  if (floating.empty()) throw ValidationError("c2c_distances: empty floating cloud");
  DistanceField field;
  field.distances.resize(floating.size());
  field.floating_label = floating.label();
  parallel_for(floating.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      field.distances[i] = reference_index.nearest(floating.point(i)).distance;
    }
  });
  return field;
}

DistanceField c2c_distances(const PointCloud& reference, const PointCloud& floating) {
  if (reference.empty() || floating.empty()) throw ValidationError("c2c_distances: empty cloud");
  DistanceField field = c2c_distances(KdIndex(reference), floating);
  field.reference_label = reference.label();
  return field;
}

double directed_hausdorff(const DistanceField& field) {
  if (field.distances.empty()) throw ValidationError("directed_hausdorff: empty field");
  return *std::max_element(field.distances.begin(), field.distances.end());
}

double percentile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw ValidationError("percentile of empty data");
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0) return sorted[lo];
  return std::clamp(sorted[lo] + frac * (sorted[hi] - sorted[lo]), sorted[lo], sorted[hi]);
}

DistanceSummary summarize(const DistanceField& floating_to_reference, double directed_h_ab) {
  if (floating_to_reference.distances.empty()) throw ValidationError("summarize: empty field");
  std::vector<double> sorted = floating_to_reference.distances;
  std::sort(sorted.begin(), sorted.end());

  DistanceSummary s;
  s.count = sorted.size();
  s.directed_h_ab = directed_h_ab;
  s.directed_h_ba = sorted.back();
  s.hausdorff = std::max(s.directed_h_ab, s.directed_h_ba);
  double sum = 0.0;
  for (double d : floating_to_reference.distances) sum += d;
  s.mean = sum / static_cast<double>(s.count);
  s.p50 = percentile_sorted(sorted, 0.50);
  s.median = s.p50;
  s.p90 = percentile_sorted(sorted, 0.90);
  s.p95 = percentile_sorted(sorted, 0.95);
  s.p99 = percentile_sorted(sorted, 0.99);
  s.max = sorted.back();
  return s;
}

DistanceSummary hausdorff(const PointCloud& reference, const PointCloud& floating) {
  if (reference.empty() || floating.empty()) throw ValidationError("hausdorff: empty cloud");
  const DistanceField ba = c2c_distances(reference, floating);
  const DistanceField ab = c2c_distances(floating, reference);
  return summarize(ba, directed_hausdorff(ab));
}

}  // namespace pcmon
