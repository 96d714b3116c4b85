#include "pcmon/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "pcmon/cloud_io.hpp"
#include "pcmon/errors.hpp"
#include "pcmon/kd_index.hpp"

namespace pcmon {
namespace {

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  return percentile_sorted(values, 0.5);
}

PointCloud load_epoch_cloud(const EpochRecord& record) {
  if (!std::filesystem::exists(record.cloud_path)) {
    throw IoError("cloud of epoch '" + record.epoch_id + "' not found: " + record.cloud_path);
  }
  PointCloud cloud = load_cloud(record.cloud_path, record.format).with_label(record.epoch_id);
  if (record.registered_transform) cloud = apply_transform(cloud, *record.registered_transform);
  return cloud;
}

}  // namespace

EpochRecord register_epoch(const std::filesystem::path& registry_path, EpochRecord record,
                           const std::optional<CorrespondenceSet>& correspondences,
                           const RegistrationOptions& options) {
  RegistryLock lock(registry_path);
  Registry registry = Registry::load(registry_path);
  if (record.epoch_id.empty()) throw ValidationError("epoch id must not be empty");
  if (registry.find(record.epoch_id)) {
    throw ValidationError("duplicate epoch id '" + record.epoch_id + "'");
  }
  if (!is_iso8601(record.captured_at)) {
    throw ValidationError("captured_at '" + record.captured_at + "' is not ISO-8601");
  }
  if (!std::filesystem::exists(record.cloud_path)) {
    throw IoError("cloud file not found: " + record.cloud_path);
  }
  record.cloud_path = std::filesystem::absolute(record.cloud_path).lexically_normal().string();
  const PointCloud floating = load_cloud(record.cloud_path, record.format);
  if (floating.empty()) throw ValidationError("epoch cloud is empty");

  if (registry.epochs().empty()) {
    record.registered_transform = RigidTransform::identity();
    record.registration_rmse = 0.0;
    record.registration_flagged = false;
  } else {
    const EpochRecord& reference_record = registry.epochs().front();
    const PointCloud reference = load_epoch_cloud(reference_record);
    RigidTransform initial;
    if (correspondences) {
      initial = rough_align(*correspondences).transform;
    } else if (record.registered_transform) {
      initial = *record.registered_transform;
    } else {
      throw ValidationError("epoch '" + record.epoch_id +
                            "' needs correspondences or a prior transform");
    }
    const IcpResult icp = icp_refine(reference, floating, initial, options.icp);
    record.registered_transform = icp.transform;
    record.registration_rmse = icp.final_rmse();
    record.registration_flagged = icp.final_rmse() > options.rmse_ceiling;
  }
  registry.add(record);
  registry.save();
  return record;
}

ChangeClassification classify_changes(const DistanceField& field, double threshold) {
  if (!(threshold >= 0.0)) throw ValidationError("threshold must be non-negative");
  ChangeClassification out;
  out.flags.resize(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) {
    out.flags[i] = field.distances[i] > threshold ? 1 : 0;
    out.changed_count += out.flags[i];
  }
  out.changed_fraction = field.size() == 0 ? 0.0
                                           : static_cast<double>(out.changed_count) /
                                                 static_cast<double>(field.size());
  return out;
}

double suggested_threshold(const std::vector<double>& distances) {
  if (distances.empty()) return 0.0;
  const double median = median_of(distances);
  std::vector<double> deviations(distances.size());
  std::transform(distances.begin(), distances.end(), deviations.begin(),
                 [median](double d) { return std::abs(d - median); });
  return median + 5.0 * median_of(std::move(deviations));
}

ComparisonReport compare_clouds(const PointCloud& reference, const PointCloud& floating,
                                const std::string& reference_id, const std::string& floating_id,
                                const RegionSet& regions, double threshold,
                                std::optional<double> ramp_max) {
  if (!(threshold >= 0.0)) throw ValidationError("threshold must be non-negative");
  const PointCloud reference_roi = apply_regions(reference, regions);
  const PointCloud floating_roi = apply_regions(floating, regions);
  if (reference_roi.empty() || floating_roi.empty()) {
    throw ValidationError("ROI is empty after cropping (reference " +
                          std::to_string(reference_roi.size()) + " points, floating " +
                          std::to_string(floating_roi.size()) + " points)");
  }

  ComparisonReport report;
  report.field = c2c_distances(KdIndex(reference_roi), floating_roi);
  report.field.reference_label = reference_id;
  report.field.floating_label = floating_id;
  const double h_ab = directed_hausdorff(c2c_distances(KdIndex(floating_roi), reference_roi));
  report.floating_roi = floating_roi;

  ReportSummary& s = report.summary;
  s.reference_epoch = reference_id;
  s.floating_epoch = floating_id;
  s.regions = regions_to_json(regions);
  s.distances = summarize(report.field, h_ab);
  const auto classification = classify_changes(report.field, threshold);
  s.changed_fraction = classification.changed_fraction;
  s.changed_count = classification.changed_count;
  s.reference_roi_count = reference_roi.size();
  s.floating_roi_count = floating_roi.size();
  s.threshold = threshold;
  s.suggested_threshold = suggested_threshold(report.field.distances);
  s.ramp_max = ramp_max.value_or(s.distances.p99);
  if (!(s.ramp_max >= 0.0)) throw ValidationError("color ramp maximum must be non-negative");
  return report;
}

ComparisonReport compare_epochs(const std::filesystem::path& registry_path,
                                const std::string& reference_id, const std::string& floating_id,
                                const RegionSet& regions, double threshold,
                                const CompareOptions& options) {
  if (!(threshold >= 0.0)) throw ValidationError("threshold must be non-negative");
  if (!std::filesystem::exists(registry_path)) {
    throw IoError("registry not found: " + registry_path.string());
  }
  RegistryLock lock(registry_path);
  const Registry registry = Registry::load(registry_path);
  const EpochRecord& reference_record = registry.at(reference_id);
  const EpochRecord& floating_record = registry.at(floating_id);

  ComparisonReport report =
      compare_clouds(load_epoch_cloud(reference_record), load_epoch_cloud(floating_record),
                     reference_id, floating_id, regions, threshold, options.ramp_max);
  if (options.out_dir) emit_report(report, *options.out_dir);
  return report;
}

}  // namespace pcmon
