#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "pcmon/cloud.hpp"

namespace pcmon {

enum class CloudFormat { PlyAscii, PlyBinaryLe, Xyz };

std::string_view to_string(CloudFormat format);
/// Accepts "ply-ascii", "ply-binary-le" and "xyz".
CloudFormat parse_cloud_format(std::string_view name);

/// Inspects the file: PLY files are identified by their header, anything
/// else is treated as XYZ.
CloudFormat detect_format(const std::filesystem::path& path);

struct LoadOptions {
  /// Receives non-fatal diagnostics such as skipped PLY properties.
  /// Defaults to printing on stderr.
  std::function<void(std::string_view)> on_warning;
};

struct SaveOptions {
  /// Significant digits for ASCII formats. Unset writes the shortest
  /// representation that parses back to the identical double.
  std::optional<int> ascii_precision;
};

PointCloud load_cloud(const std::filesystem::path& path, CloudFormat format,
                      const LoadOptions& options = {});
PointCloud load_cloud(const std::filesystem::path& path);

void save_cloud(const PointCloud& cloud, const std::filesystem::path& path, CloudFormat format,
                const SaveOptions& options = {});

}  // namespace pcmon
