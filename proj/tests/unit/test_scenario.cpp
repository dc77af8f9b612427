#include <gtest/gtest.h>

#include <string>

#include "hadamard/random.hpp"
#include "hadamard/scenario.hpp"
#include "hadamard/suites.hpp"
#include "json.hpp"

using namespace hadamard;
using json = nlohmann::json;

namespace {

json base(const std::string& task, json params) {
  return {{"schema_version", 1},
          {"name", "t"},
          {"seed", 4},
          {"space", {{"type", "euclidean"}, {"dim", 1}}},
          {"task", task},
          {"params", params}};
}

std::string error_of(const std::string& text) {
  try {
    run_scenario_text(text);
  } catch (const SchemaError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Scenario, SqintReport) {
  const Report r = run_scenario_text(base("sqint", {{"N", 8}, {"g", {0, 2.5}}}).dump());
  EXPECT_TRUE(r.all_passed());
  const json out = json::parse(report_json(r));
  EXPECT_EQ(out["schema_version"], 1);
  EXPECT_EQ(out["summary"]["failed"], 0);
  EXPECT_EQ(out["results"]["estimates"][0], 0.0);
  EXPECT_DOUBLE_EQ(out["results"]["estimates"][1].get<double>(), 6.5);
  EXPECT_FALSE(out["environment"].contains("threads"));
}

TEST(Scenario, MalformedJsonNamesLineAndColumn) {
  const std::string e = error_of("{\n  \"schema_version\": 1,\n  oops\n}");
  EXPECT_NE(e.find("line 3"), std::string::npos) << e;
  EXPECT_NE(e.find("column"), std::string::npos) << e;
}

TEST(Scenario, MissingFieldIsNamed) {
  json s = base("sqint", {{"N", 8}, {"g", {0}}});
  s.erase("space");
  EXPECT_NE(error_of(s.dump()).find("space"), std::string::npos);
}

TEST(Scenario, BadPointNamesItsPath) {
  json s = base("barycenter", {{"points", {{0}, {"x"}}}});
  EXPECT_NE(error_of(s.dump()).find("params.points[1]"), std::string::npos) << error_of(s.dump());
}

TEST(Scenario, UnknownKeysAndVersionsAreRejected) {
  json s = base("sqint", {{"N", 8}, {"g", {0}}});
  s["extra"] = true;
  EXPECT_FALSE(error_of(s.dump()).empty());
  json v = base("sqint", {{"N", 8}, {"g", {0}}});
  v["schema_version"] = 99;
  EXPECT_FALSE(error_of(v.dump()).empty());
  json t = base("nonsense", json::object());
  EXPECT_FALSE(error_of(t.dump()).empty());
}

TEST(Scenario, OffGridElementIsASchemaError) {
  EXPECT_NE(error_of(base("sqint", {{"N", 8}, {"g", {0.3}}}).dump()).find("params.g[0]"), std::string::npos);
}

TEST(Scenario, ToleranceOverrideCanForceFailure) {
  const json s = {{"schema_version", 1},
                  {"name", "rotation"},
                  {"seed", 1},
                  {"space", {{"type", "euclidean"}, {"dim", 2}}},
                  {"actions", {{{"name", "R"}, {"generators", {{{"name", "r"}, {"isometry", {{"type", "rotation"}, {"angle", 1.0}}}}}}}}},
                  {"task", "evanescence"},
                  {"params", {{"action", "R"}, {"lambda_expected", 0.958851077208406}}}};
  EXPECT_TRUE(run_scenario_text(s.dump()).all_passed());
  RunOptions o;
  parse_tolerance_override("evanescence_lambda=0", o.tolerances);
  const Report r = run_scenario_text(s.dump(), o);
  EXPECT_EQ(r.failed_count(), 1u);
  std::map<std::string, double> m;
  EXPECT_THROW(parse_tolerance_override("novalue", m), SchemaError);
  EXPECT_THROW(parse_tolerance_override("x=-1", m), SchemaError);
}

TEST(Scenario, ReportsAreDeterministic) {
  const std::string text = base("barycenter", {{"points", {{0}, {3}}}, {"weights", {0.5, 0.5}}}).dump();
  EXPECT_EQ(report_json(run_scenario_text(text)), report_json(run_scenario_text(text)));
  const std::string csv = report_csv(run_scenario_text(text));
  EXPECT_EQ(csv.rfind("name,status,defect,tolerance,trials\n", 0), 0u);
}

TEST(Fuzz, SameSeedSameReport) {
  const std::string a = report_json(run_fuzz({"tree_tripod"}, 20, 5));
  EXPECT_EQ(a, report_json(run_fuzz({"tree_tripod"}, 20, 5)));
  EXPECT_THROW(run_fuzz({"no_such_space"}, 1, 0), SchemaError);
}

TEST(Suites, EverySuitePassesOnEveryStandardSpace) {
  for (const auto& s : standard_spaces()) {
    for (const Check& c : fuzz_space(s, 100, 13)) EXPECT_TRUE(c.passed()) << s.label << "/" << c.name << " " << c.defect;
  }
}

TEST(Rng, StreamsAreReproducibleAndDistinct) {
  Rng a(1, 2, 3), b(1, 2, 3), c(1, 2, 4);
  const auto x = a();
  EXPECT_EQ(x, b());
  EXPECT_NE(x, c());
}
