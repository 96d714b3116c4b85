#pragma once

#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pcmon/distances.hpp"
#include "pcmon/registration.hpp"
#include "pcmon/registry.hpp"
#include "pcmon/segmentation.hpp"

namespace pcmon {

struct RegistrationOptions {
  IcpParams icp;
  /// Final ICP RMSE above this flags the stored record.
  double rmse_ceiling = std::numeric_limits<double>::infinity();
};

/// Adds an epoch to the registry at `registry_path` (created if missing).
///
/// The first epoch defines the reference frame and is stored with the
/// identity. Later epochs are aligned onto the first one: rough alignment
/// from `correspondences` (or `record.registered_transform` as the prior),
/// then ICP refinement. The registry is updated under an advisory lock with
/// an atomic replace; on any error it is left untouched.
EpochRecord register_epoch(const std::filesystem::path& registry_path, EpochRecord record,
                           const std::optional<CorrespondenceSet>& correspondences = std::nullopt,
                           const RegistrationOptions& options = {});

struct ChangeClassification {
  std::vector<std::uint8_t> flags;  ///< 1 where distance > threshold
  std::size_t changed_count = 0;
  double changed_fraction = 0.0;
};

/// Strict comparison: a distance equal to the threshold is not a change.
ChangeClassification classify_changes(const DistanceField& field, double threshold);

/// median + 5 × MAD of the distances; a noise-floor hint for picking a
/// threshold.
double suggested_threshold(const std::vector<double>& distances);

struct ReportArtifacts {
  // File names relative to the report directory.
  std::string colored_cloud;
  std::string csv;
  std::string json;
  std::string text;

  friend bool operator==(const ReportArtifacts&, const ReportArtifacts&) = default;
};

/// Serializable part of a comparison.
struct ReportSummary {
  std::string reference_epoch;
  std::string floating_epoch;
  nlohmann::json regions;  ///< as written by regions_to_json
  DistanceSummary distances;
  double changed_fraction = 0.0;
  std::size_t changed_count = 0;
  std::size_t reference_roi_count = 0;
  std::size_t floating_roi_count = 0;
  double threshold = 0.0;
  double suggested_threshold = 0.0;
  double ramp_max = 0.0;
  ReportArtifacts artifacts;

  friend bool operator==(const ReportSummary&, const ReportSummary&) = default;
};

struct ComparisonReport {
  ReportSummary summary;
  PointCloud floating_roi;  ///< in the reference frame
  DistanceField field;      ///< parallel to floating_roi
};

struct CompareOptions {
  /// Artifacts are written here when set.
  std::optional<std::filesystem::path> out_dir;
  /// Upper end of the color ramp; defaults to the p99 distance.
  std::optional<double> ramp_max;
};

/// Loads both epochs, maps them into the reference frame, applies the
/// exclusions and then the ROI to both, and measures floating -> reference
/// distances. Unknown ids or an empty ROI raise ValidationError before any
/// artifact is written.
ComparisonReport compare_epochs(const std::filesystem::path& registry_path,
                                const std::string& reference_id, const std::string& floating_id,
                                const RegionSet& regions, double threshold,
                                const CompareOptions& options = {});

/// Same comparison over clouds already in a common frame.
ComparisonReport compare_clouds(const PointCloud& reference, const PointCloud& floating,
                                const std::string& reference_id, const std::string& floating_id,
                                const RegionSet& regions, double threshold,
                                std::optional<double> ramp_max = std::nullopt);

/// Blue at 0, green at ramp_max / 2, red at and beyond ramp_max.
ColorRGB distance_color(double distance, double ramp_max);

/// Writes the distance-colored PLY, CSV table, JSON summary and text summary
/// into `out_dir` and records their names in report.summary.artifacts.
void emit_report(ComparisonReport& report, const std::filesystem::path& out_dir);

nlohmann::json summary_to_json(const ReportSummary& summary);
ReportSummary summary_from_json(const nlohmann::json& j);
std::string render_text_summary(const ReportSummary& summary);
/// "index,x,y,z,distance" table with shortest round-trip number formatting.
std::string distance_csv(const PointCloud& cloud, const DistanceField& field);

}  // namespace pcmon
