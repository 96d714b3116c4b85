#include <doctest.h>

#include <sstream>

#include <nlohmann/json.hpp>

#include "pcmon/cli.hpp"
#include "support.hpp"

using namespace pcmon;
namespace t = pcmon::testing;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("help and usage errors") {
  CHECK(run({"--help"}).code == cli::kSuccess);
  CHECK(run({"c2c", "--help"}).code == cli::kSuccess);
  CHECK(run({"frobnicate"}).code == cli::kUsageError);
  CHECK(run({}).code == cli::kUsageError);
  CHECK(run({"c2c", "only_one.ply"}).code == cli::kUsageError);
  CHECK(run({"epoch", "compare", "--registry", "r.json", "--ref", "a", "--float", "b"}).code ==
        cli::kUsageError);
}

TEST_CASE("info and I/O errors") {
  t::TempDir dir;
  t::write_file(dir / "p.xyz", "0 0 0\n1 0 0\n0 1 0\n");
  const auto r = run({"info", (dir / "p.xyz").string()});
  CHECK(r.code == cli::kSuccess);
  CHECK(r.out.find("points: 3\n") != std::string::npos);
  CHECK(r.out.find("colors: no\n") != std::string::npos);
  CHECK(r.out.find("bbox_max: 1 1 0\n") != std::string::npos);

  CHECK(run({"info", (dir / "missing.ply").string()}).code == cli::kIoError);
  t::write_file(dir / "bad.xyz", "0 0 nope\n");
  const auto bad = run({"info", (dir / "bad.xyz").string()});
  CHECK(bad.code == cli::kDataError);
  CHECK_FALSE(bad.err.empty());
}

TEST_CASE("c2c on identical files") {
  t::TempDir dir;
  t::write_file(dir / "a.xyz", "0 0 0\n1 0 0\n0 1 0\n0 0 1\n");
  const auto csv = dir / "d.csv";
  const auto r = run({"c2c", (dir / "a.xyz").string(), (dir / "a.xyz").string(), "--csv",
                      csv.string(), "--ply", (dir / "d.ply").string()});
  REQUIRE(r.code == cli::kSuccess);
  CHECK(t::read_file(csv) ==
        "index,x,y,z,distance\n0,0,0,0,0\n1,1,0,0,0\n2,0,1,0,0\n3,0,0,1,0\n");
  const auto h = run({"hausdorff", (dir / "a.xyz").string(), (dir / "a.xyz").string()});
  CHECK(h.out.find("H(A,B): 0\n") != std::string::npos);
}

TEST_CASE("simulate, align and icp") {
  t::TempDir dir;
  REQUIRE(run({"--seed", "3", "generate", "wall", (dir / "w.ply").string(), "--points", "3000",
               "--width", "2", "--height", "1", "--relief", "0.05"})
              .code == cli::kSuccess);
  t::write_file(dir / "e.json", R"({"center":[1,0.5,0],"half_extents":[0.5,0.01,0.08]})");
  CHECK(run({"simulate", (dir / "w.ply").string(), (dir / "r.ply").string(), "--element",
             (dir / "e.json").string(), "--mode", "recolor", "--paint", "0,0,0"})
            .code == cli::kSuccess);
  const auto h = run({"hausdorff", (dir / "w.ply").string(), (dir / "r.ply").string()});
  CHECK(h.out.find("H(A,B): 0\n") != std::string::npos);
  CHECK(run({"simulate", (dir / "w.ply").string(), (dir / "s.ply").string(), "--element",
             (dir / "e.json").string(), "--mode", "shift"})
            .code == cli::kDataError);

  t::write_file(dir / "c.txt",
                "0 0 0 1 0 0\n1 0 0 2 0 0\n0 1 0 1 1 0\n0 0 1 1 0 1\n");
  const auto a = run({"align", (dir / "c.txt").string(), "--output", (dir / "t.json").string()});
  REQUIRE(a.code == cli::kSuccess);
  const auto tj = nlohmann::json::parse(t::read_file(dir / "t.json"));
  CHECK(tj.at("translation")[0].get<double>() == doctest::Approx(-1.0));
  CHECK(run({"icp", (dir / "w.ply").string(), (dir / "w.ply").string(), "--init",
             (dir / "t.json").string(), "--trim", "0.3"})
            .code == cli::kDataError);
}

TEST_CASE("epoch workflow on a generated scene") {
  t::TempDir dir;
  const auto scene = dir / "scene";
  REQUIRE(run({"--seed", "7", "generate", "scene", scene.string(), "--width", "1", "--height",
               "0.5", "--points", "30000", "--sigma", "0.002"})
              .code == cli::kSuccess);
  const auto meta = nlohmann::json::parse(t::read_file(scene / "scene.json"));
  const double depth = meta.at("depth").get<double>();
  const double share = meta.at("shift_strip_points").get<double>() /
                       meta.at("second_visit_points").get<double>();

  t::write_file(dir / "identity.json", R"({"quaternion":[1,0,0,0],"translation":[0,0,0]})");
  const auto reg = (dir / "registry.json").string();
  CHECK(run({"epoch", "add", "--registry", reg, "--id", "v1", "--cloud",
             (scene / "visit1.ply").string(), "--captured-at", "2023-03-01T09:00:00Z"})
            .code == cli::kSuccess);
  CHECK(run({"epoch", "add", "--registry", reg, "--id", "v2", "--cloud",
             (scene / "visit2.ply").string(), "--init", (dir / "identity.json").string()})
            .code == cli::kSuccess);
  CHECK(run({"epoch", "add", "--registry", reg, "--id", "v2", "--cloud",
             (scene / "visit2.ply").string(), "--init", (dir / "identity.json").string()})
            .code == cli::kDataError);
  const auto list = run({"epoch", "list", "--registry", reg});
  CHECK(list.out.rfind("v1\t2023-03-01T09:00:00Z", 0) == 0);

  const auto out = dir / "report";
  const auto cmp = run({"epoch", "compare", "--registry", reg, "--ref", "v1", "--float", "v2",
                        "--threshold", std::to_string(depth / 2), "--out-dir", out.string()});
  REQUIRE(cmp.code == cli::kSuccess);
  const auto summary = nlohmann::json::parse(t::read_file(out / "v1_vs_v2_summary.json"));
  CHECK(std::abs(summary.at("changed_fraction").get<double>() - share) <= 0.02);
  CHECK(run({"report", (out / "v1_vs_v2_summary.json").string()}).out == cmp.out);

  CHECK(run({"epoch", "compare", "--registry", reg, "--ref", "v1", "--float", "v9",
             "--threshold", "0.01"})
            .code == cli::kDataError);
  CHECK(run({"epoch", "compare", "--registry", (dir / "none.json").string(), "--ref", "v1",
             "--float", "v2", "--threshold", "0.01"})
            .code == cli::kIoError);
}
