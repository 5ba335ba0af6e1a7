#include "dirackit/analysis.hpp"
#include "dirackit/catalog.hpp"
#include "dirackit/config.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace dk;

namespace {

const char* kFreeParticle = R"({
  "name": "free_line",
  "chart": ["x"],
  "box": [[-1, 1]],
  "metric": [["1"]],
  "hamiltonian": "p_x^2/2",
  "expected": {"brackets": [{"f": "x", "g": "p_x", "value": "1"}, {"f": "p_x", "g": "x", "value": "-1"}]}
})";

std::filesystem::path temp_file(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST_CASE("catalog lists the five systems and their actions") {
  const std::vector<std::string> names = catalog_names();
  CHECK(names.size() == 5);
  CHECK(catalog_spec("vertical_disk").actions.size() == 4);
  CHECK(catalog_spec("chaplygin_skate").action("SE2").generators.size() == 3);
  CHECK_THROWS_AS(catalog_spec("pendulum"), InputError);
  CHECK_THROWS_AS(catalog_spec("vertical_disk").action("SO3"), InputError);
}

TEST_CASE("physical parameters are validated") {
  CHECK(catalog_spec("vertical_disk", {{"R", 2.0}}).params.at("R") == 2.0);
  CHECK(catalog_spec("vertical_disk").params.at("mu") == 1.0);
  CHECK_THROWS_AS(catalog_spec("vertical_disk", {{"R", 0.0}}), InputError);
  CHECK_THROWS_AS(catalog_spec("vertical_disk", {{"R", -1.0}}), InputError);
  CHECK_THROWS_AS(catalog_spec("vertical_disk", {{"mass", 1.0}}), InputError);
  CHECK_THROWS_AS(catalog_spec("constrained_particle", {{"m", 1.0}}), InputError);
}

TEST_CASE("specs survive a JSON round trip") {
  for (const auto& name : catalog_names()) {
    CAPTURE(name);
    const nlohmann::json j = to_json(catalog_spec(name));
    const nlohmann::json back = to_json(system_from_json(j));
    CHECK(j == back);
  }
}

TEST_CASE("an exported system analyzes the same through the file path") {
  const SystemSpec spec = catalog_spec("heisenberg_particle");
  const auto path = temp_file("dirackit_heisenberg.json", to_json(spec).dump(2));
  const SystemSpec loaded = load_system_file(path.string());
  const AnalysisOptions opt{24, 5, 1e-9};
  const AnalysisReport a = run_analysis(build_entry(spec), {}, opt);
  const AnalysisReport b = run_analysis(build_entry(loaded), {}, opt);
  CHECK(report_text(a) == report_text(b));
  std::filesystem::remove(path);
}

TEST_CASE("malformed system documents are input errors") {
  const nlohmann::json good = nlohmann::json::parse(kFreeParticle);
  auto broken = [&](auto edit) {
    nlohmann::json j = good;
    edit(j);
    return j;
  };
  CHECK_THROWS_AS(system_from_json(nlohmann::json::array()), InputError);
  CHECK_THROWS_AS(system_from_json(broken([](auto& j) { j.erase("chart"); })), InputError);
  CHECK_THROWS_AS(system_from_json(broken([](auto& j) { j["metric"] = {{"1", "0"}}; })), InputError);
  CHECK_THROWS_AS(system_from_json(broken([](auto& j) { j["box"] = {{1, -1}}; })), InputError);
  CHECK_THROWS_AS(system_from_json(broken([](auto& j) { j["chart"] = {"x", "x"}; })), InputError);
  CHECK_THROWS_AS(system_from_json(broken([](auto& j) { j["leaf"] = nlohmann::json::object(); })), InputError);
  CHECK_THROWS_AS(load_system_file("/nonexistent/system.json"), InputError);
  const auto bad = temp_file("dirackit_bad.json", "{ not json");
  CHECK_THROWS_AS(load_system_file(bad.string()), InputError);
  std::filesystem::remove(bad);
  SystemSpec s = system_from_json(good);
  s.potential = "x +";
  CHECK_THROWS_AS(build_entry(s), InputError);
}

TEST_CASE("an unconstrained system without symmetry is canonical") {
  const AnalysisReport r = run_analysis(build_entry(system_from_json(nlohmann::json::parse(kFreeParticle))), {},
                                        {32, 1, 1e-9});
  CHECK(r.all_passed());
  REQUIRE(r.find("system/expected.bracket[x,p_x]") != nullptr);
  CHECK(r.find("system/expected.bracket[x,p_x]")->status == CheckStatus::Pass);
  CHECK(r.find("system/expected.bracket[p_x,x]")->status == CheckStatus::Pass);
  CHECK(r.find("system/dirac.closed")->detail.find("not") == std::string::npos);
}

TEST_CASE("reports carry the schema and are deterministic") {
  const CatalogEntry e = load("constrained_particle");
  const AnalysisReport a = run_analysis(e, {}, {16, 3, 1e-9});
  const AnalysisReport b = run_analysis(e, {}, {16, 3, 1e-9});
  CHECK(report_text(a) == report_text(b));
  const nlohmann::ordered_json j = to_json(a);
  CHECK(j.at("schema") == "dirac-kit/1");
  CHECK(j.at("seed") == 3);
  CHECK(j.at("samples") == 16);
  const AnalysisReport c = run_analysis(e, {}, {16, 4, 1e-9});
  CHECK(report_text(a) != report_text(c));
  CHECK_THROWS_AS(run_analysis(e, {"SO3"}, {16, 3, 1e-9}), InputError);
}
