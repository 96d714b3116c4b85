#include "pcmon/registry.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <fstream>
#include <regex>

#include "pcmon/errors.hpp"

namespace pcmon {
namespace {

Eigen::Vector3d vec3(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) {
    throw ValidationError(std::string(what) + " must be an array of 3 numbers");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

nlohmann::json record_to_json(const EpochRecord& r) {
  nlohmann::json j = {{"epoch_id", r.epoch_id},
                      {"captured_at", r.captured_at},
                      {"cloud_path", r.cloud_path},
                      {"format", std::string(to_string(r.format))},
                      {"notes", r.notes}};
  j["transform"] = r.registered_transform ? transform_to_json(*r.registered_transform)
                                          : nlohmann::json(nullptr);
  j["registration_rmse"] =
      r.registration_rmse ? nlohmann::json(*r.registration_rmse) : nlohmann::json(nullptr);
  j["registration_flagged"] = r.registration_flagged;
  return j;
}

EpochRecord record_from_json(const nlohmann::json& j) {
  EpochRecord r;
  r.epoch_id = j.at("epoch_id").get<std::string>();
  r.captured_at = j.value("captured_at", std::string());
  r.cloud_path = j.at("cloud_path").get<std::string>();
  r.format = parse_cloud_format(j.at("format").get<std::string>());
  r.notes = j.value("notes", std::string());
  if (j.contains("transform") && !j.at("transform").is_null()) {
    r.registered_transform = transform_from_json(j.at("transform"));
  }
  if (j.contains("registration_rmse") && !j.at("registration_rmse").is_null()) {
    r.registration_rmse = j.at("registration_rmse").get<double>();
  }
  r.registration_flagged = j.value("registration_flagged", false);
  return r;
}

}  // namespace

bool is_iso8601(const std::string& timestamp) {
  static const std::regex pattern(
      R"(^\d{4}-\d{2}-\d{2}(T\d{2}:\d{2}(:\d{2}(\.\d+)?)?(Z|[+-]\d{2}:?\d{2})?)?$)");
  return std::regex_match(timestamp, pattern);
}

nlohmann::json transform_to_json(const RigidTransform& transform) {
  const auto q = transform.quaternion();
  const auto& t = transform.translation();
  return {{"quaternion", {q.w(), q.x(), q.y(), q.z()}}, {"translation", {t.x(), t.y(), t.z()}}};
}

RigidTransform transform_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("transform must be a JSON object");
  const auto& q = j.at("quaternion");
  if (!q.is_array() || q.size() != 4) throw ValidationError("quaternion must be [w, x, y, z]");
  return RigidTransform::from_quaternion(
      Eigen::Quaterniond(q[0].get<double>(), q[1].get<double>(), q[2].get<double>(),
                         q[3].get<double>()),
      vec3(j.at("translation"), "translation"));
}

Registry Registry::load(const std::filesystem::path& path) {
  Registry reg;
  reg.path_ = path;
  if (!std::filesystem::exists(path)) return reg;
  std::ifstream in(path);
  if (!in) throw IoError("cannot open registry '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid registry JSON: ") + e.what(),
                     ParseError::OffsetKind::Byte, e.byte);
  }
  try {
    if (j.at("version").get<int>() != kVersion) {
      throw ValidationError("unsupported registry version");
    }
    for (const auto& e : j.at("epochs")) reg.epochs_.push_back(record_from_json(e));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed registry: ") + e.what());
  }
  return reg;
}

void Registry::save() const {
  const std::string text = to_json().dump(2) + "\n";
  auto tmp = path_;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write registry temp file '" + tmp.string() + "'");
    out << text;
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp);
      throw IoError("write failure on '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path_, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw IoError("cannot replace registry '" + path_.string() + "': " + ec.message());
  }
}

const EpochRecord* Registry::find(const std::string& epoch_id) const {
  for (const auto& e : epochs_) {
    if (e.epoch_id == epoch_id) return &e;
  }
  return nullptr;
}

const EpochRecord& Registry::at(const std::string& epoch_id) const {
  const auto* rec = find(epoch_id);
  if (!rec) throw ValidationError("unknown epoch id '" + epoch_id + "'");
  return *rec;
}

void Registry::add(EpochRecord record) {
  if (record.epoch_id.empty()) throw ValidationError("epoch id must not be empty");
  if (find(record.epoch_id)) {
    throw ValidationError("duplicate epoch id '" + record.epoch_id + "'");
  }
  epochs_.push_back(std::move(record));
}

nlohmann::json Registry::to_json() const {
  nlohmann::json epochs = nlohmann::json::array();
  for (const auto& e : epochs_) epochs.push_back(record_to_json(e));
  return {{"version", kVersion}, {"epochs", std::move(epochs)}};
}

RegistryLock::RegistryLock(const std::filesystem::path& registry_path) {
  auto lock_path = registry_path;
  lock_path += ".lock";
  fd_ = ::open(lock_path.c_str(), O_RDWR | O_CREAT, 0644);
  if (fd_ < 0) throw IoError("cannot open lock file '" + lock_path.string() + "'");
  if (::flock(fd_, LOCK_EX) != 0) {
    ::close(fd_);
    throw IoError("cannot lock '" + lock_path.string() + "'");
  }
}

RegistryLock::~RegistryLock() {
  if (fd_ >= 0) {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
}

}  // namespace pcmon
