#pragma once

#include <string>
#include <vector>

#include "pcmon/cloud.hpp"
#include "pcmon/kd_index.hpp"

namespace pcmon {

/// Nearest-neighbor distance of every floating (query) point into the
/// reference cloud, in floating-point order.
struct DistanceField {
  std::vector<double> distances;
  std::string reference_label;
  std::string floating_label;

  std::size_t size() const { return distances.size(); }
};

struct DistanceSummary {
  double directed_h_ab = 0.0;  ///< max over reference points of distance into floating
  double directed_h_ba = 0.0;  ///< max over floating points of distance into reference
  double hausdorff = 0.0;
  // Statistics of the floating -> reference field.
  double mean = 0.0;
  double median = 0.0;
  double p50 = 0.0;
  double p90 = 0.0;
  double p95 = 0.0;
  double p99 = 0.0;
  double max = 0.0;
  std::size_t count = 0;

  friend bool operator==(const DistanceSummary&, const DistanceSummary&) = default;
};

/// Throws ValidationError if either cloud is empty.
DistanceField c2c_distances(const PointCloud& reference, const PointCloud& floating);
/// Reuses a prebuilt index over the reference cloud.
DistanceField c2c_distances(const KdIndex& reference_index, const PointCloud& floating);

/// h(A, B) over an already computed field. Throws on an empty field.
double directed_hausdorff(const DistanceField& field);

/// Both directed distances plus statistics of the floating -> reference field.
DistanceSummary hausdorff(const PointCloud& reference, const PointCloud& floating);

/// Builds the summary from the floating -> reference field and the opposite
/// directed distance.
DistanceSummary summarize(const DistanceField& floating_to_reference, double directed_h_ab);

/// Linear interpolation between order statistics (q in [0, 1]); `sorted`
/// must be ascending and non-empty.
double percentile_sorted(const std::vector<double>& sorted, double q);

}  // namespace pcmon
