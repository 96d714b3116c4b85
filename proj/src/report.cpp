#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pcmon/cloud_io.hpp"
#include "pcmon/errors.hpp"
#include "pcmon/pipeline.hpp"

namespace pcmon {
namespace {

void append_shortest(std::string& out, double value) {
  std::array<char, 32> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  out.append(buf.data(), res.ptr);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  out.close();
  if (!out) throw IoError("write failure on '" + path.string() + "'");
}

std::uint8_t channel(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

}  // namespace

ColorRGB distance_color(double distance, double ramp_max) {
  double t;
  if (ramp_max > 0.0) {
    t = std::clamp(distance / ramp_max, 0.0, 1.0);
  } else {
    t = distance > 0.0 ? 1.0 : 0.0;
  }
  if (t <= 0.5) {
    const double u = 2.0 * t;
    return {0, channel(u), channel(1.0 - u)};
  }
  const double u = 2.0 * t - 1.0;
  return {channel(u), channel(1.0 - u), 0};
}

std::string distance_csv(const PointCloud& cloud, const DistanceField& field) {
  if (cloud.size() != field.size()) {
    throw ValidationError("distance field does not match cloud size");
  }
  std::string out = "index,x,y,z,distance\n";
  out.reserve(out.size() + cloud.size() * 80);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto& p = cloud.point(i);
    out += std::to_string(i);
    for (double v : {p.x(), p.y(), p.z(), field.distances[i]}) {
      out += ',';
      append_shortest(out, v);
    }
    out += '\n';
  }
  return out;
}

nlohmann::json summary_to_json(const ReportSummary& s) {
  const DistanceSummary& d = s.distances;
  return {
      {"reference_epoch", s.reference_epoch},
      {"floating_epoch", s.floating_epoch},
      {"regions", s.regions},
      {"distances",
       {{"directed_h_ab", d.directed_h_ab},
        {"directed_h_ba", d.directed_h_ba},
        {"hausdorff", d.hausdorff},
        {"mean", d.mean},
        {"median", d.median},
        {"p50", d.p50},
        {"p90", d.p90},
        {"p95", d.p95},
        {"p99", d.p99},
        {"max", d.max},
        {"count", d.count}}},
      {"changed_fraction", s.changed_fraction},
      {"changed_count", s.changed_count},
      {"reference_roi_count", s.reference_roi_count},
      {"floating_roi_count", s.floating_roi_count},
      {"threshold", s.threshold},
      {"suggested_threshold", s.suggested_threshold},
      {"ramp_max", s.ramp_max},
      {"artifacts",
       {{"colored_cloud", s.artifacts.colored_cloud},
        {"csv", s.artifacts.csv},
        {"json", s.artifacts.json},
        {"text", s.artifacts.text}}},
  };
}

ReportSummary summary_from_json(const nlohmann::json& j) {
  try {
    ReportSummary s;
    s.reference_epoch = j.at("reference_epoch").get<std::string>();
    s.floating_epoch = j.at("floating_epoch").get<std::string>();
    s.regions = j.at("regions");
    const auto& d = j.at("distances");
    s.distances.directed_h_ab = d.at("directed_h_ab").get<double>();
    s.distances.directed_h_ba = d.at("directed_h_ba").get<double>();
    s.distances.hausdorff = d.at("hausdorff").get<double>();
    s.distances.mean = d.at("mean").get<double>();
    s.distances.median = d.at("median").get<double>();
    s.distances.p50 = d.at("p50").get<double>();
    s.distances.p90 = d.at("p90").get<double>();
    s.distances.p95 = d.at("p95").get<double>();
    s.distances.p99 = d.at("p99").get<double>();
    s.distances.max = d.at("max").get<double>();
    s.distances.count = d.at("count").get<std::size_t>();
    s.changed_fraction = j.at("changed_fraction").get<double>();
    s.changed_count = j.at("changed_count").get<std::size_t>();
    s.reference_roi_count = j.at("reference_roi_count").get<std::size_t>();
    s.floating_roi_count = j.at("floating_roi_count").get<std::size_t>();
    s.threshold = j.at("threshold").get<double>();
    s.suggested_threshold = j.at("suggested_threshold").get<double>();
    s.ramp_max = j.at("ramp_max").get<double>();
    const auto& a = j.at("artifacts");
    s.artifacts.colored_cloud = a.at("colored_cloud").get<std::string>();
    s.artifacts.csv = a.at("csv").get<std::string>();
    s.artifacts.json = a.at("json").get<std::string>();
    s.artifacts.text = a.at("text").get<std::string>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed report JSON: ") + e.what());
  }
}

std::string render_text_summary(const ReportSummary& s) {
  const DistanceSummary& d = s.distances;
  std::ostringstream out;
  out.precision(6);
  out << "Change report: " << s.floating_epoch << " vs reference " << s.reference_epoch << "\n\n";
  out << "ROI points: reference " << s.reference_roi_count << ", floating "
      << s.floating_roi_count << "\n";
  out << "Hausdorff distance H: " << d.hausdorff << " (h_ab " << d.directed_h_ab << ", h_ba "
      << d.directed_h_ba << ")\n";
  out << "Floating -> reference distances:\n";
  out << "  mean   " << d.mean << "\n";
  out << "  median " << d.median << "\n";
  out << "  p90    " << d.p90 << "\n";
  out << "  p95    " << d.p95 << "\n";
  out << "  p99    " << d.p99 << "\n";
  out << "  max    " << d.max << "\n";
  out << "Threshold " << s.threshold << ": " << s.changed_count << " of " << d.count
      << " points changed (" << 100.0 * s.changed_fraction << "%)\n";
  out << "Suggested threshold (median + 5 MAD): " << s.suggested_threshold << "\n";
  out << "Color ramp: blue 0 -> green " << 0.5 * s.ramp_max << " -> red " << s.ramp_max << "\n";
  if (!s.artifacts.csv.empty()) {
    out << "\nArtifacts:\n";
    out << "  colored cloud " << s.artifacts.colored_cloud << "\n";
    out << "  distances     " << s.artifacts.csv << "\n";
    out << "  summary       " << s.artifacts.json << "\n";
  }
  return out.str();
}

void emit_report(ComparisonReport& report, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create report directory '" + out_dir.string() + "'");

  ReportSummary& s = report.summary;
  const std::string stem = s.reference_epoch + "_vs_" + s.floating_epoch;
  s.artifacts = {stem + "_distances.ply", stem + "_distances.csv", stem + "_summary.json",
                 stem + "_summary.txt"};

  std::vector<ColorRGB> colors(report.floating_roi.size());
  for (std::size_t i = 0; i < colors.size(); ++i) {
    colors[i] = distance_color(report.field.distances[i], s.ramp_max);
  }
  const PointCloud colored(report.floating_roi.points(), std::move(colors), stem);
  save_cloud(colored, out_dir / s.artifacts.colored_cloud, CloudFormat::PlyBinaryLe);
  write_text(out_dir / s.artifacts.csv, distance_csv(report.floating_roi, report.field));
  write_text(out_dir / s.artifacts.json, summary_to_json(s).dump(2) + "\n");
  write_text(out_dir / s.artifacts.text, render_text_summary(s));
}

}  // namespace pcmon
