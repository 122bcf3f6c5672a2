#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <sstream>

#include "contacttrees/cli.hpp"
#include "contacttrees/render.hpp"
#include "contacttrees/service.hpp"
#include "support.hpp"

using namespace contacttrees;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "contacttrees");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(int(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / "contacttrees_unit";
  fs::create_directories(dir);
  return dir / name;
}

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
  return n;
}

const std::string kSmall = testing::fixture_path("diary_small.json");

}  // namespace

TEST_CASE("render writes the tree and reports counts") {
  const auto out = scratch("e1.svg").string();
  auto r = run({"render", "--data", kSmall, "--ego", "E1", "--out", out});
  REQUIRE(r.code == 0);
  const auto report = json::parse(r.out);
  CHECK(report["included"] == 4);
  CHECK(report["excluded"].empty());
  CHECK(report["timing_ms"]["layout"].get<double>() > 0);
  CHECK(count(testing::slurp(out), "data-contact=") == 11);

  const auto base = scratch("both.out").string();
  r = run({"render", "--data", kSmall, "--ego", "E1", "--out", base, "--format", "both"});
  REQUIRE(r.code == 0);
  const auto svg = testing::slurp(scratch("both.svg").string());
  const auto scene = json::parse(testing::slurp(scratch("both.json").string()));
  CHECK(scene["leaves"].size() == count(svg, "data-contact="));

  // The CSV directory gives the same picture.
  const auto csv_out = scratch("csv.svg").string();
  r = run({"render", "--data", testing::fixture_path("diary_small_csv"), "--ego", "E1", "--out",
           csv_out});
  REQUIRE(r.code == 0);
  CHECK(testing::slurp(csv_out) == testing::slurp(out));
}

TEST_CASE("exit codes partition the error classes") {
  const auto out = scratch("x.svg").string();
  auto r = run({"render", "--data", kSmall, "--ego", "E99", "--out", out});
  CHECK(r.code == 3);
  CHECK(r.err.find("E99") != std::string::npos);

  CHECK(run({"render", "--data", kSmall, "--out", out}).code == 2);
  CHECK(run({"render", "--data", kSmall, "--ego", "E1", "--out", out, "--format", "png"}).code == 2);
  CHECK(run({"render", "--data", kSmall, "--ego", "E1", "--out", out, "--period", "soon"}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"--help"}).code == 0);

  CHECK(run({"render", "--data", "/nonexistent.json", "--ego", "E1", "--out", out}).code == 3);
  CHECK(run({"render", "--data", kSmall, "--ego", "E1", "--out", out, "--mapping", "oak"}).code == 4);
  CHECK(run({"render", "--data", kSmall, "--ego", "E1", "--out", "/nonexistent/dir/x.svg"}).code ==
        1);

  // A mapping reading an attribute the schema lacks.
  auto spec = json::parse(serialize_mapping_json(preset_mapping(kPresetDiaryDefault)));
  spec["leaf_size"]["source"] = "loudness";
  const auto mapping = scratch("bad_mapping.json");
  cli::write_file(mapping.string(), spec.dump());
  r = run({"render", "--data", kSmall, "--ego", "E1", "--out", out, "--mapping", mapping.string()});
  CHECK(r.code == 4);
  CHECK(r.err.find("missing-source") != std::string::npos);

  const auto params = scratch("bad_params.json");
  cli::write_file(params.string(), R"({"line_spacing": -1})");
  CHECK(run({"render", "--data", kSmall, "--ego", "E1", "--out", out, "--params", params.string()})
            .code == 2);
}

TEST_CASE("compare draws two or three panels") {
  const auto out = scratch("cmp.svg").string();
  auto r = run({"compare", "--data", kSmall, "--ego", "E1", "--period", "2008", "--period", "2004",
                "--out", out});
  REQUIRE(r.code == 0);
  const auto svg = testing::slurp(out);
  CHECK(count(svg, "class=\"panel\"") == 2);
  CHECK(svg.find("E1 2004") < svg.find("E1 2008"));
  CHECK(json::parse(r.out)["panels"].size() == 2);

  r = run({"compare", "--data", kSmall, "--ego", "E1", "--period", "2004", "--period", "2008",
           "--period", "2012", "--out", out, "--shared-norm"});
  CHECK(r.code == 0);
  CHECK(count(testing::slurp(out), "class=\"panel\"") == 3);

  CHECK(run({"compare", "--data", kSmall, "--ego", "E1", "--period", "2004", "--out", out}).code ==
        2);
  CHECK(run({"compare", "--data", kSmall, "--ego", "E1", "--period", "2004", "--period", "2005",
             "--period", "2006", "--period", "2007", "--out", out})
            .code == 5);
}

TEST_CASE("validate, synth and stats") {
  auto r = run({"validate", "--data", kSmall});
  CHECK(r.code == 0);
  CHECK(json::parse(r.out)["errors"].empty());

  const auto broken = scratch("broken.json");
  cli::write_file(broken.string(),
                  R"({"egos":[{"id":"E1"}],"ties":[{"id":"T1","ego_id":"E9"}],"contacts":[]})");
  r = run({"validate", "--data", broken.string()});
  CHECK(r.code == 3);
  CHECK_FALSE(json::parse(r.out)["errors"].empty());

  const auto synth = scratch("stress.json").string();
  r = run({"synth", "--seed", "7", "--profile", "stress", "--out", synth});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["ties"] == 819);
  r = run({"stats", "--data", synth});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["totals"]["contacts"] == 4091);

  r = run({"presets"});
  CHECK(json::parse(r.out)["presets"].size() == 2);
  r = run({"presets", "--name", "liking-tenure"});
  CHECK(parse_mapping_json(r.out).name == "liking-tenure");
}

TEST_CASE("layout service routes") {
  LayoutService service;
  service.add_dataset("small", testing::small_diary());
  CHECK_THROWS_AS(service.add_dataset("small", testing::small_diary()), Error);
  const auto before = service.datasets().at("small");

  auto r = service.handle("GET", "/api/health", "");
  CHECK(r.status == 200);
  CHECK(json::parse(r.body)["status"] == "ok");
  CHECK(json::parse(service.handle("GET", "/api/datasets", "").body)["datasets"][0] == "small");
  r = service.handle("GET", "/api/datasets/small/egos", "");
  CHECK(r.status == 200);
  CHECK(json::parse(r.body)["egos"].size() == 3);
  CHECK(service.handle("GET", "/api/datasets/big/egos", "").status == 404);
  CHECK(json::parse(service.handle("GET", "/api/mappings", "").body)["presets"].size() == 2);
  CHECK(service.handle("GET", "/api/nothing", "").status == 404);
  CHECK(service.handle("GET", "/api/layout", "").status == 405);

  const std::string body = R"({"dataset":"small","ego":"E1","mapping":"diary-default"})";
  r = service.handle("POST", "/api/layout", body);
  REQUIRE(r.status == 200);
  const auto scene = json::parse(r.body);
  CHECK(scene["curves"].size() == 4);
  CHECK(service.handle("POST", "/api/layout", body).body == r.body);

  CHECK(service.handle("POST", "/api/layout", R"({"dataset":"small","ego":"E99","mapping":"diary-default"})")
            .status == 404);
  CHECK(service.handle("POST", "/api/layout", "{not json").status == 400);
  CHECK(service.handle("POST", "/api/layout", R"({"dataset":"small"})").status == 400);
  r = service.handle("POST", "/api/layout", R"({"dataset":"small","ego":"E1","mapping":"oak"})");
  CHECK(r.status == 422);
  CHECK(json::parse(r.body)["errors"][0]["rule"] == "unknown-preset");

  auto spec = json::parse(serialize_mapping_json(preset_mapping(kPresetDiaryDefault)));
  spec["trunk_position"]["source"] = "gender";
  json req = {{"dataset", "small"}, {"ego", "E1"}, {"mapping", spec}};
  r = service.handle("POST", "/api/layout", req.dump());
  CHECK(r.status == 422);

  req = {{"dataset", "small"}, {"ego", "E1"}, {"mapping", "liking-tenure"}, {"period", "2008"},
         {"params", {{"line_spacing", 3}}}};
  r = service.handle("POST", "/api/layout", req.dump());
  CHECK(r.status == 200);
  CHECK(json::parse(r.body)["meta"]["period"] == "2008");
  req["params"] = {{"line_spacing", "wide"}};
  CHECK(service.handle("POST", "/api/layout", req.dump()).status == 400);

  // Requests never touch the loaded data.
  CHECK(service.datasets().at("small") == before);
}

TEST_CASE("dataset ids come from the data path") {
  CHECK(dataset_id_for("/data/diary_small.json") == "diary_small");
  CHECK(dataset_id_for("/data/wave1/ties.csv,/data/wave1/contacts.csv") == "wave1");
  CHECK(dataset_id_for(testing::fixture_path("diary_small_csv") + "/") == "diary_small_csv");
}
