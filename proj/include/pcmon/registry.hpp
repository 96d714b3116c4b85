#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pcmon/cloud_io.hpp"
#include "pcmon/registration.hpp"

namespace pcmon {

struct EpochRecord {
  std::string epoch_id;
  std::string captured_at;  ///< ISO-8601
  std::string cloud_path;
  CloudFormat format = CloudFormat::PlyBinaryLe;
  std::string notes;
  /// Maps this epoch's cloud into the registry's reference frame (the first
  /// epoch). When passed to register_epoch it serves as the initial guess.
  std::optional<RigidTransform> registered_transform;
  std::optional<double> registration_rmse;
  /// Set when the final ICP RMSE exceeded the configured ceiling.
  bool registration_flagged = false;
};

/// Loose ISO-8601 check: date, optional time, optional fraction and zone.
bool is_iso8601(const std::string& timestamp);

nlohmann::json transform_to_json(const RigidTransform& transform);
RigidTransform transform_from_json(const nlohmann::json& j);

/// Ordered list of epochs persisted as a single JSON document.
class Registry {
 public:
  static constexpr int kVersion = 1;

  /// A missing file yields an empty registry bound to `path`.
  static Registry load(const std::filesystem::path& path);

  /// Writes to a temporary sibling and renames it over the target, so
  /// readers see either the old or the new document.
  void save() const;

  const std::filesystem::path& path() const { return path_; }
  const std::vector<EpochRecord>& epochs() const { return epochs_; }
  const EpochRecord* find(const std::string& epoch_id) const;
  /// Throws ValidationError on an unknown id.
  const EpochRecord& at(const std::string& epoch_id) const;
  /// Throws ValidationError on a duplicate id.
  void add(EpochRecord record);

  nlohmann::json to_json() const;

 private:
  std::filesystem::path path_;
  std::vector<EpochRecord> epochs_;
};

/// Exclusive advisory lock (flock) on "<registry>.lock", held for the
/// object's lifetime. Concurrent CLI invocations serialize on it.
class RegistryLock {
 public:
  explicit RegistryLock(const std::filesystem::path& registry_path);
  ~RegistryLock();
  RegistryLock(const RegistryLock&) = delete;
  RegistryLock& operator=(const RegistryLock&) = delete;

 private:
  int fd_ = -1;
};

}  // namespace pcmon
