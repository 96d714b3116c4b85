#include "pcmon/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <iostream>
#include <optional>

#include "pcmon/cloud_io.hpp"
#include "pcmon/deterioration.hpp"
#include "pcmon/distances.hpp"
#include "pcmon/errors.hpp"
#include "pcmon/parallel.hpp"
#include "pcmon/pipeline.hpp"
#include "pcmon/registration.hpp"
#include "pcmon/registry.hpp"
#include "pcmon/segmentation.hpp"
#include "pcmon/synthetic.hpp"

namespace pcmon::cli {
namespace {

constexpr const char* kCloudFormats = R"(Cloud formats:
  PLY  "ply" / "format ascii 1.0" or "format binary_little_endian 1.0";
       element vertex with properties x, y, z (float or double) and optional
       red, green, blue (uchar). Unknown properties are skipped with a warning.
       Written files use double x, y, z and uchar colors.
  XYZ  one point per line: "x y z" or "x y z r g b", whitespace separated;
       lines starting with '#' are ignored.
  Output format follows the file extension (.xyz, otherwise binary PLY)
  unless --format is given.)";

constexpr const char* kRegionFormat = R"(Region file (JSON):
  {"center":[x,y,z], "half_extents":[a,b,c], "quaternion":[w,x,y,z]}
  or an array of such objects, each with "role": "roi" | "exclude".
  A point is inside when |Rᵀ(p - center)| <= half_extents on every axis.)";

constexpr const char* kCorrespondenceFormat = R"(Correspondence file:
  one pair per line "xr yr zr xf yf zf [label]" (reference point, then the
  matching floating point); lines starting with '#' are ignored.)";

constexpr const char* kTransformFormat = R"(Transform file (JSON):
  {"quaternion":[w,x,y,z], "translation":[x,y,z]} mapping floating points
  into the reference frame: p_ref = R p_float + t.)";

constexpr const char* kSimulationFormat = R"(Simulation spec (JSON):
  {"element": <region>, "mode": "recolor"|"shift", "depth": d,
   "paint": [r,g,b], "normal": [x,y,z], "direction": "into"|"out"}
  The element region must be slender (two smaller half extents < 0.2 x the
  largest).)";

constexpr const char* kRegistryFormat = R"(Registry file (JSON):
  {"version":1, "epochs":[{"epoch_id", "captured_at", "cloud_path", "format",
   "notes", "transform":{"quaternion":[w,x,y,z], "translation":[x,y,z]},
   "registration_rmse", "registration_flagged"}]})";

constexpr const char* kReportFormat = R"(Report artifacts in --out-dir:
  <ref>_vs_<float>_distances.ply   floating ROI points colored blue (0) ->
                                   green (ramp/2) -> red (>= ramp max)
  <ref>_vs_<float>_distances.csv   "index,x,y,z,distance"
  <ref>_vs_<float>_summary.json    distance summary, changed fraction,
                                   threshold, epoch ids, regions, artifacts
  <ref>_vs_<float>_summary.txt     human-readable summary)";

CloudFormat output_format(const std::string& path, const std::string& forced) {
  if (!forced.empty()) return parse_cloud_format(forced);
  return std::filesystem::path(path).extension() == ".xyz" ? CloudFormat::Xyz
                                                           : CloudFormat::PlyBinaryLe;
}

PointCloud load_input(const std::string& path, const std::string& forced) {
  if (!std::filesystem::exists(path)) throw IoError("input file not found: " + path);
  return forced.empty() ? load_cloud(path) : load_cloud(path, parse_cloud_format(forced));
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON in '") + path + "': " + e.what(),
                     ParseError::OffsetKind::Byte, e.byte);
  }
}

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failure on '" + path + "'");
}

void print_transform(std::ostream& out, const RigidTransform& t) {
  const auto q = t.quaternion();
  out << "quaternion (w x y z): " << q.w() << ' ' << q.x() << ' ' << q.y() << ' ' << q.z()
      << '\n';
  out << "translation: " << t.translation().transpose() << '\n';
  out << "rotation:\n" << t.rotation() << '\n';
}

void print_summary(std::ostream& out, const DistanceSummary& s) {
  out << "count: " << s.count << '\n'
      << "mean: " << s.mean << '\n'
      << "median: " << s.median << '\n'
      << "p90: " << s.p90 << '\n'
      << "p95: " << s.p95 << '\n'
      << "p99: " << s.p99 << '\n'
      << "max: " << s.max << '\n';
}

struct IcpFlags {
  int max_iterations = 50;
  double tolerance = 1e-6;
  double trim = 1.0;

  void attach(CLI::App* app) {
    app->add_option("--max-iter", max_iterations, "ICP iteration cap")->capture_default_str();
    app->add_option("--tol", tolerance, "stop when |ΔRMSE| falls below this")
        ->capture_default_str();
    app->add_option("--trim", trim, "fraction of closest matches kept, in [0.5, 1]")
        ->capture_default_str();
  }
  IcpParams params() const { return {max_iterations, tolerance, trim}; }
};

struct WallFlags {
  double width = 4.0;
  double height = 3.0;
  std::size_t points = 0;
  double density = 10000.0;
  double sigma = 0.0;
  std::vector<double> void_rect;
  double relief = 0.0;
  double wavelength = 0.5;
  bool no_colors = false;

  void attach(CLI::App* app) {
    app->add_option("--width", width, "wall width (x)")->capture_default_str();
    app->add_option("--height", height, "wall height (y)")->capture_default_str();
    app->add_option("--points", points, "exact point count (overrides --density)");
    app->add_option("--density", density, "points per unit area")->capture_default_str();
    app->add_option("--sigma", sigma, "Gaussian out-of-plane noise")->capture_default_str();
    app->add_option("--void", void_rect, "window void x0,y0,x1,y1")
        ->delimiter(',')
        ->expected(4);
    app->add_option("--relief", relief, "masonry relief amplitude")->capture_default_str();
    app->add_option("--wavelength", wavelength, "relief wavelength")->capture_default_str();
    app->add_flag("--no-colors", no_colors, "omit RGB colors");
  }
  WallParams params(std::uint64_t seed) const {
    WallParams p;
    p.width = width;
    p.height = height;
    p.point_count = points;
    p.density = density;
    p.noise_sigma = sigma;
    if (!void_rect.empty()) p.void_rect = Rect2{void_rect[0], void_rect[1], void_rect[2], void_rect[3]};
    p.relief_amplitude = relief;
    p.relief_wavelength = wavelength;
    p.colors = !no_colors;
    p.seed = seed;
    return p;
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"pcmon: point-cloud change detection for monitored structures"};
  app.name("pcmon");
  app.fallthrough();
  app.require_subcommand(1);
  app.footer("Exit codes: 0 success, 1 usage error, 2 data/validation error, 3 I/O error.");

  std::uint64_t seed = 1;
  unsigned threads = 0;
  app.add_option("--seed", seed, "seed for all randomized data generation")->capture_default_str();
  app.add_option("--threads", threads, "cap on worker threads (0 = all cores)");

  // info
  std::string info_path, info_format;
  auto* info = app.add_subcommand("info", "print point count, colors and bounding box");
  info->add_option("cloud", info_path, "input cloud")->required();
  info->add_option("--format", info_format, "ply-ascii | ply-binary-le | xyz (default: detect)");
  info->footer(kCloudFormats);

  // crop / exclude
  std::string seg_in, seg_out, seg_region, seg_format;
  auto* crop_cmd = app.add_subcommand("crop", "keep points inside the ROI (after exclusions)");
  auto* exclude_cmd = app.add_subcommand("exclude", "remove points inside every listed region");
  for (auto* cmd : {crop_cmd, exclude_cmd}) {
    cmd->add_option("input", seg_in, "input cloud")->required();
    cmd->add_option("output", seg_out, "output cloud")->required();
    cmd->add_option("--region", seg_region, "region JSON file")->required();
    cmd->add_option("--format", seg_format, "output format");
    cmd->footer(std::string(kRegionFormat) + "\n\n" + kCloudFormats);
  }

  // align
  std::string align_corr, align_output, align_in, align_out;
  auto* align = app.add_subcommand("align", "rigid transform from landmark correspondences");
  align->add_option("correspondences", align_corr, "correspondence file")->required();
  align->add_option("--output", align_output, "write the transform as JSON");
  align->add_option("--apply", align_in, "floating cloud to transform");
  align->add_option("--aligned", align_out, "where to write the transformed cloud");
  align->footer(std::string(kCorrespondenceFormat) + "\n\n" + kTransformFormat);

  // icp
  std::string icp_ref, icp_flt, icp_init, icp_corr, icp_output, icp_aligned;
  IcpFlags icp_flags;
  auto* icp = app.add_subcommand("icp", "refine an alignment with point-to-point ICP");
  icp->add_option("reference", icp_ref, "reference (first visit) cloud")->required();
  icp->add_option("floating", icp_flt, "floating (second visit) cloud")->required();
  auto* init_opt = icp->add_option("--init", icp_init, "initial transform JSON");
  icp->add_option("--corr", icp_corr, "correspondence file for the initial transform")
      ->excludes(init_opt);
  icp->add_option("--output", icp_output, "write the refined transform as JSON");
  icp->add_option("--aligned", icp_aligned, "write the aligned floating cloud");
  icp_flags.attach(icp);
  icp->footer(std::string(kTransformFormat) + "\n\n" + kCorrespondenceFormat);

  // c2c
  std::string c2c_ref, c2c_flt, c2c_csv, c2c_ply;
  std::optional<double> c2c_ramp;
  auto* c2c = app.add_subcommand("c2c", "cloud-to-cloud distances of floating points");
  c2c->add_option("reference", c2c_ref, "reference cloud")->required();
  c2c->add_option("floating", c2c_flt, "floating cloud")->required();
  c2c->add_option("--csv", c2c_csv, "write \"index,x,y,z,distance\" table");
  c2c->add_option("--ply", c2c_ply, "write distance-colored binary PLY");
  c2c->add_option("--ramp-max", c2c_ramp, "color ramp maximum (default: p99)");
  c2c->footer(kCloudFormats);

  // hausdorff
  std::string h_a, h_b;
  auto* haus = app.add_subcommand("hausdorff", "directed and symmetric Hausdorff distances");
  haus->add_option("a", h_a, "cloud A (reference)")->required();
  haus->add_option("b", h_b, "cloud B (floating)")->required();

  // simulate
  std::string sim_in, sim_out, sim_spec, sim_element, sim_mode = "recolor", sim_direction = "into",
                                                     sim_format;
  double sim_depth = 0.0;
  std::vector<int> sim_paint;
  std::vector<double> sim_normal;
  auto* sim = app.add_subcommand("simulate", "inject a crack-like edge or a true crack");
  sim->add_option("input", sim_in, "input cloud")->required();
  sim->add_option("output", sim_out, "output cloud")->required();
  auto* spec_opt = sim->add_option("--spec", sim_spec, "simulation spec JSON");
  sim->add_option("--element", sim_element, "element region JSON")->excludes(spec_opt);
  sim->add_option("--mode", sim_mode, "recolor | shift")
      ->check(CLI::IsMember({"recolor", "shift"}))
      ->capture_default_str();
  sim->add_option("--depth", sim_depth, "shift depth (mode shift)");
  sim->add_option("--paint", sim_paint, "recolor paint r,g,b")->delimiter(',')->expected(3);
  sim->add_option("--normal", sim_normal, "shift normal x,y,z (default: fitted plane)")
      ->delimiter(',')
      ->expected(3);
  sim->add_option("--direction", sim_direction, "into | out")
      ->check(CLI::IsMember({"into", "out"}))
      ->capture_default_str();
  sim->add_option("--format", sim_format, "output format");
  sim->footer(std::string(kSimulationFormat) + "\n\n" + kRegionFormat);

  // generate
  auto* gen = app.add_subcommand("generate", "synthetic test data (uses --seed)");
  gen->require_subcommand(1);
  std::string gen_wall_out, gen_wall_format, gen_scene_dir;
  WallFlags wall_flags, scene_flags;
  double scene_depth = 0.0;
  auto* gen_wall = gen->add_subcommand("wall", "uniformly sampled wall in the z = 0 plane");
  gen_wall->add_option("output", gen_wall_out, "output cloud")->required();
  gen_wall->add_option("--format", gen_wall_format, "output format");
  wall_flags.attach(gen_wall);
  auto* gen_scene = gen->add_subcommand(
      "scene", "two visits of a wall; the second has a recolored and a shifted strip");
  gen_scene->add_option("out_dir", gen_scene_dir, "output directory")->required();
  gen_scene->add_option("--depth", scene_depth, "crack depth (default 10 x sigma)");
  scene_flags.attach(gen_scene);
  gen_scene->footer(
      "Writes visit1.ply, visit2.ply, recolor_element.json, shift_element.json and "
      "scene.json (depth and strip point counts).");

  // epoch
  auto* epoch = app.add_subcommand("epoch", "epoch registry operations");
  epoch->require_subcommand(1);
  std::string reg_path;
  std::string add_id, add_cloud, add_captured, add_notes, add_corr, add_init, add_format;
  double add_ceiling = std::numeric_limits<double>::infinity();
  IcpFlags add_icp;
  auto* epoch_add = epoch->add_subcommand("add", "register a new epoch");
  epoch_add->add_option("--registry", reg_path, "registry JSON file")->required();
  epoch_add->add_option("--id", add_id, "unique epoch id")->required();
  epoch_add->add_option("--cloud", add_cloud, "epoch cloud file")->required();
  epoch_add->add_option("--captured-at", add_captured, "ISO-8601 timestamp (default: now, UTC)");
  epoch_add->add_option("--notes", add_notes, "free text");
  epoch_add->add_option("--format", add_format, "cloud format (default: detect)");
  auto* add_corr_opt = epoch_add->add_option("--corr", add_corr, "correspondence file");
  epoch_add->add_option("--init", add_init, "prior transform JSON")->excludes(add_corr_opt);
  epoch_add->add_option("--rmse-ceiling", add_ceiling, "flag registrations above this RMSE");
  add_icp.attach(epoch_add);
  epoch_add->footer(std::string(kRegistryFormat) + "\n\n" + kCorrespondenceFormat + "\n\n" +
                    kTransformFormat);

  auto* epoch_list = epoch->add_subcommand("list", "list registered epochs");
  epoch_list->add_option("--registry", reg_path, "registry JSON file")->required();

  std::string cmp_ref, cmp_flt, cmp_roi, cmp_out_dir;
  double cmp_threshold = 0.0;
  std::optional<double> cmp_ramp;
  auto* epoch_cmp = epoch->add_subcommand("compare", "compare two registered epochs");
  epoch_cmp->add_option("--registry", reg_path, "registry JSON file")->required();
  epoch_cmp->add_option("--ref", cmp_ref, "reference epoch id")->required();
  epoch_cmp->add_option("--float", cmp_flt, "floating epoch id")->required();
  epoch_cmp->add_option("--roi", cmp_roi, "region JSON (ROI and exclusions)");
  epoch_cmp->add_option("--threshold", cmp_threshold, "change threshold (scene units)")
      ->required();
  epoch_cmp->add_option("--out-dir", cmp_out_dir, "directory for report artifacts");
  epoch_cmp->add_option("--ramp-max", cmp_ramp, "color ramp maximum (default: p99)");
  epoch_cmp->footer(std::string(kRegionFormat) + "\n\n" + kReportFormat);

  // report
  std::string report_json;
  auto* report = app.add_subcommand("report", "print the text summary of a report JSON");
  report->add_option("summary", report_json, "report summary JSON")->required();
  report->footer(kReportFormat);

  std::vector<const char*> argv{"pcmon"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kSuccess;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return kUsageError;
  }

  set_max_threads(threads);
  try {
    if (info->parsed()) {
      const PointCloud cloud = load_input(info_path, info_format);
      out << "points: " << cloud.size() << '\n';
      out << "colors: " << (cloud.has_colors() ? "yes" : "no") << '\n';
      if (!cloud.empty()) {
        const Aabb box = bounding_box(cloud);
        out << std::setprecision(17);
        out << "bbox_min: " << box.min.x() << ' ' << box.min.y() << ' ' << box.min.z() << '\n';
        out << "bbox_max: " << box.max.x() << ' ' << box.max.y() << ' ' << box.max.z() << '\n';
        out << "diagonal: " << box.diagonal() << '\n';
      }
    } else if (crop_cmd->parsed() || exclude_cmd->parsed()) {
      const PointCloud cloud = load_input(seg_in, "");
      const RegionSet regions = load_regions(seg_region);
      PointCloud result = cloud;
      if (crop_cmd->parsed()) {
        if (!regions.roi) throw ValidationError("region file has no ROI to crop to");
        result = apply_regions(cloud, regions);
      } else {
        if (regions.roi) result = exclude(result, *regions.roi);
        for (const auto& ex : regions.exclusions) result = exclude(result, ex);
      }
      save_cloud(result, seg_out, output_format(seg_out, seg_format));
      out << "kept " << result.size() << " of " << cloud.size() << " points\n";
    } else if (align->parsed()) {
      const RigidFit fit = rough_align(load_correspondences(align_corr));
      out << std::setprecision(12);
      print_transform(out, fit.transform);
      out << "rmse: " << fit.rmse << '\n';
      if (!align_output.empty()) write_json(align_output, transform_to_json(fit.transform));
      if (!align_in.empty()) {
        if (align_out.empty()) throw ValidationError("--apply needs --aligned <output>");
        save_cloud(apply_transform(load_input(align_in, ""), fit.transform), align_out,
                   output_format(align_out, ""));
      }
    } else if (icp->parsed()) {
      const PointCloud reference = load_input(icp_ref, "");
      const PointCloud floating = load_input(icp_flt, "");
      RigidTransform initial;
      if (!icp_init.empty()) initial = transform_from_json(read_json(icp_init));
      if (!icp_corr.empty()) initial = rough_align(load_correspondences(icp_corr)).transform;
      const IcpResult result = icp_refine(reference, floating, initial, icp_flags.params());
      out << std::setprecision(12);
      print_transform(out, result.transform);
      out << "iterations: " << result.iterations << '\n';
      out << "converged: " << (result.converged ? "yes" : "no") << '\n';
      out << "final_rmse: " << result.final_rmse() << '\n';
      if (!icp_output.empty()) write_json(icp_output, transform_to_json(result.transform));
      if (!icp_aligned.empty()) {
        save_cloud(apply_transform(floating, result.transform), icp_aligned,
                   output_format(icp_aligned, ""));
      }
    } else if (c2c->parsed()) {
      const PointCloud reference = load_input(c2c_ref, "");
      const PointCloud floating = load_input(c2c_flt, "");
      ComparisonReport cmp = compare_clouds(reference, floating, reference.label(),
                                            floating.label(), {}, 0.0, c2c_ramp);
      out << std::setprecision(12);
      print_summary(out, cmp.summary.distances);
      if (!c2c_csv.empty()) {
        std::ofstream csv(c2c_csv, std::ios::binary | std::ios::trunc);
        if (!csv) throw IoError("cannot open '" + c2c_csv + "' for writing");
        csv << distance_csv(cmp.floating_roi, cmp.field);
        if (!csv) throw IoError("write failure on '" + c2c_csv + "'");
      }
      if (!c2c_ply.empty()) {
        std::vector<ColorRGB> colors;
        colors.reserve(cmp.field.size());
        for (double d : cmp.field.distances) colors.push_back(distance_color(d, cmp.summary.ramp_max));
        save_cloud(PointCloud(cmp.floating_roi.points(), std::move(colors)), c2c_ply,
                   CloudFormat::PlyBinaryLe);
      }
    } else if (haus->parsed()) {
      const DistanceSummary s = hausdorff(load_input(h_a, ""), load_input(h_b, ""));
      out << std::setprecision(17);
      out << "h(A,B): " << s.directed_h_ab << '\n';
      out << "h(B,A): " << s.directed_h_ba << '\n';
      out << "H(A,B): " << s.hausdorff << '\n';
    } else if (sim->parsed()) {
      const PointCloud cloud = load_input(sim_in, "");
      std::optional<SimulationSpec> spec;
      if (!sim_spec.empty()) {
        spec = load_simulation_spec(sim_spec);
      } else {
        if (sim_element.empty()) throw ValidationError("simulate needs --spec or --element");
        nlohmann::json j = {{"element", read_json(sim_element)},
                            {"mode", sim_mode},
                            {"direction", sim_direction},
                            {"depth", sim_depth}};
        if (!sim_paint.empty()) j["paint"] = sim_paint;
        if (!sim_normal.empty()) j["normal"] = sim_normal;
        spec = simulation_spec_from_json(j);
      }
      const PointCloud result = run_simulation(cloud, *spec);
      save_cloud(result, sim_out, output_format(sim_out, sim_format));
      out << "wrote " << result.size() << " points to " << sim_out << '\n';
    } else if (gen_wall->parsed()) {
      const PointCloud wall = generate_wall(wall_flags.params(seed));
      save_cloud(wall, gen_wall_out, output_format(gen_wall_out, gen_wall_format));
      out << "wrote " << wall.size() << " points to " << gen_wall_out << '\n';
    } else if (gen_scene->parsed()) {
      CrackSceneParams params;
      params.wall = scene_flags.params(seed);
      params.depth = scene_depth;
      const CrackScene scene = generate_crack_scene(params);
      const std::filesystem::path dir(gen_scene_dir);
      std::filesystem::create_directories(dir);
      save_cloud(scene.first_visit, dir / "visit1.ply", CloudFormat::PlyBinaryLe);
      save_cloud(scene.second_visit, dir / "visit2.ply", CloudFormat::PlyBinaryLe);
      write_json((dir / "recolor_element.json").string(),
                 region_to_json(scene.recolor_strip.selection()));
      write_json((dir / "shift_element.json").string(),
                 region_to_json(scene.shift_strip.selection()));
      const auto shifted = crop(scene.second_visit, scene.shift_strip.selection()).size();
      const auto recolored = crop(scene.second_visit, scene.recolor_strip.selection()).size();
      write_json((dir / "scene.json").string(), {{"depth", scene.depth},
                                                 {"second_visit_points", scene.second_visit.size()},
                                                 {"shift_strip_points", shifted},
                                                 {"recolor_strip_points", recolored}});
      out << "wrote scene to " << dir.string() << " (depth " << scene.depth << ")\n";
    } else if (epoch_add->parsed()) {
      EpochRecord record;
      record.epoch_id = add_id;
      record.cloud_path = add_cloud;
      if (!std::filesystem::exists(add_cloud)) throw IoError("cloud file not found: " + add_cloud);
      record.format = add_format.empty() ? detect_format(add_cloud) : parse_cloud_format(add_format);
      record.notes = add_notes;
      if (add_captured.empty()) {
        const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
        const std::time_t tt = std::chrono::system_clock::to_time_t(now);
        std::tm tm{};
        gmtime_r(&tt, &tm);
        std::ostringstream ts;
        ts << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
        add_captured = ts.str();
      }
      record.captured_at = add_captured;
      std::optional<CorrespondenceSet> corr;
      if (!add_corr.empty()) corr = load_correspondences(add_corr);
      if (!add_init.empty()) record.registered_transform = transform_from_json(read_json(add_init));
      RegistrationOptions options{add_icp.params(), add_ceiling};
      const EpochRecord stored = register_epoch(reg_path, record, corr, options);
      out << std::setprecision(12);
      out << "registered epoch '" << stored.epoch_id << "'\n";
      print_transform(out, *stored.registered_transform);
      out << "registration_rmse: " << stored.registration_rmse.value_or(0.0) << '\n';
      if (stored.registration_flagged) {
        out << "WARNING: registration RMSE exceeds the ceiling; record flagged\n";
      }
    } else if (epoch_list->parsed()) {
      if (!std::filesystem::exists(reg_path)) throw IoError("registry not found: " + reg_path);
      const Registry registry = Registry::load(reg_path);
      for (const auto& e : registry.epochs()) {
        out << e.epoch_id << '\t' << e.captured_at << '\t' << e.cloud_path << '\t'
            << to_string(e.format) << (e.registration_flagged ? "\tFLAGGED" : "") << '\n';
      }
    } else if (epoch_cmp->parsed()) {
      RegionSet regions;
      if (!cmp_roi.empty()) regions = load_regions(cmp_roi);
      CompareOptions options;
      if (!cmp_out_dir.empty()) options.out_dir = cmp_out_dir;
      options.ramp_max = cmp_ramp;
      const ComparisonReport result =
          compare_epochs(reg_path, cmp_ref, cmp_flt, regions, cmp_threshold, options);
      out << render_text_summary(result.summary);
    } else if (report->parsed()) {
      out << render_text_summary(summary_from_json(read_json(report_json)));
    }
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "I/O error: " << e.what() << '\n';
    return kIoError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kSuccess;
}

}  // namespace pcmon::cli
