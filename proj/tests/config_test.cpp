#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "test_util.hpp"

using namespace frrsim;
namespace fs = std::filesystem;

namespace {

fs::path scenario_dir() {
  if (const char* d = std::getenv("FRRSIM_SCENARIO_DIR")) return d;
  return fs::path(__FILE__).parent_path().parent_path() / "scenarios";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string error_of(const std::string& text) {
  try {
    parse_config(text, "cfg.json");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("frrsim_config_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(Config, ShippedScenariosRoundTrip) {
  int seen = 0;
  for (const auto& entry : fs::directory_iterator(scenario_dir())) {
    if (entry.path().extension() != ".json") continue;
    ++seen;
    const ScenarioConfig c = load_config(entry.path().string());
    const std::string once = config_to_json(c).dump();
    const ScenarioConfig again = parse_config(once);
    EXPECT_EQ(again, c) << entry.path();
    EXPECT_EQ(config_to_json(again).dump(), once);
    EXPECT_NO_THROW(resolve(c, entry.path().parent_path())) << entry.path();
  }
  EXPECT_GE(seen, 4);
}

TEST(Config, RoundTripCoversEveryField) {
  ScenarioConfig c;
  c.name = "full";
  c.topology = {.kind = TopologyKind::kRandom, .n = 9, .p = 0.5, .seed = 4, .min_edge_connectivity = 3};
  c.seed = 4;
  c.flows = {{"x", "0", "1"}, {"y", "2", "3"}};
  c.scheme = {SchemeKind::kPartition, 2, {{"x", {{"0", "1"}, {"0", "2", "1"}}}}};
  c.failures = {FailureKind::kExplicit, {{"0", "1"}}, {"5"}};
  c.throughput = ThroughputSpec{0.5, {{{"0", "1"}, 2.0}}, {}};
  c.throughput->timeline.control_plane_delay = 1.25;
  c.output_dir = "somewhere";
  EXPECT_EQ(parse_config(config_to_json(c).dump()), c);

  ScenarioConfig inl;
  inl.topology = {.kind = TopologyKind::kInline, .nodes = {"a", "b"}, .links = {{"a", "b"}}};
  inl.all_pairs = true;
  inl.failures.kind = FailureKind::kAllNodes;
  EXPECT_EQ(parse_config(config_to_json(inl).dump()), inl);
}

TEST(Config, SyntaxErrorsCarryLineAndColumn) {
  const std::string msg = error_of("{\n  \"name\": \"x\",\n  \"topology\": {,}\n}");
  EXPECT_EQ(msg.rfind("cfg.json:3:", 0), 0u) << msg;
  EXPECT_NE(msg.find("syntax error"), std::string::npos);
}

TEST(Config, ValidationErrorsCarryLineAndPointer) {
  const std::string text =
      "{\n"
      "  \"topology\": {\"kind\": \"complete\", \"n\": 5},\n"
      "  \"flows\": \"all_pairs\",\n"
      "  \"scheme\": {\n"
      "    \"kind\": \"arborescence\",\n"
      "    \"k\": 0\n"
      "  }\n"
      "}\n";
  const std::string msg = error_of(text);
  EXPECT_EQ(msg.rfind("cfg.json:6: /scheme/k:", 0), 0u) << msg;
}

TEST(Config, RejectsBadDocuments) {
  EXPECT_NE(error_of(R"({"topology":{"kind":"figure1"},"flows":"all_pairs","scheme":{"kind":"x"}})")
                .find("/scheme/kind"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"topology":{"kind":"figure1"},"flows":"all_pairs","scheme":{"kind":"greedy"},"bogus":1})")
                .find("/bogus: unknown key"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"topology":{"kind":"random","n":8,"p":0.5},"flows":"all_pairs","scheme":{"kind":"greedy"}})")
                .find("seed"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"topology":{"kind":"torus","rows":2,"cols":3},"flows":"all_pairs","scheme":{"kind":"greedy"}})")
                .find("/topology/rows"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"topology":{"kind":"figure1"},"flows":[],"scheme":{"kind":"greedy"}})")
                .find("/flows"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"topology":{"kind":"figure1"},"flows":"all_pairs","scheme":{"kind":"greedy","paths":{}}})")
                .find("/scheme/paths"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"topology":{"kind":"figure1"},"flows":"all_pairs","scheme":{"kind":"greedy"},
                        "throughput":{"control_plane_delay":-1}})")
                .find("/throughput/control_plane_delay"),
            std::string::npos);
}

TEST(Config, ResolveChecksNamesAgainstTopology) {
  auto resolve_text = [](const std::string& text) -> std::string {
    try {
      resolve(parse_config(text));
    } catch (const ConfigError& e) {
      return e.what();
    }
    return "";
  };
  const std::string head = R"({"topology":{"kind":"figure1"},)";
  EXPECT_NE(resolve_text(head + R"("flows":[{"source":"S","destination":"Q"}],"scheme":{"kind":"greedy"}})")
                .find("/flows/0/destination"),
            std::string::npos);
  EXPECT_NE(resolve_text(head + R"("flows":[{"source":"S","destination":"D"}],"scheme":{"kind":"greedy"},
                           "failures":{"kind":"explicit","links":[["S","D"]]}})")
                .find("/failures/links/0"),
            std::string::npos);
  EXPECT_NE(resolve_text(head + R"("flows":[{"source":"S","destination":"D"}],
                           "scheme":{"kind":"partition","paths":{"nope":[["S","D"]]}}})")
                .find("no such flow"),
            std::string::npos);
}

TEST(Config, OutputDirectoryPrecedence) {
  ScenarioConfig c;
  c.output_dir = "from-config";
  ::unsetenv(kOutputDirEnv);
  EXPECT_EQ(output_dir(c, std::nullopt), fs::path("from-config"));
  ::setenv(kOutputDirEnv, "from-env", 1);
  EXPECT_EQ(output_dir(c, std::nullopt), fs::path("from-env"));
  EXPECT_EQ(output_dir(c, std::string("from-cli")), fs::path("from-cli"));
  ::unsetenv(kOutputDirEnv);
  c.output_dir.clear();
  EXPECT_EQ(output_dir(c, std::nullopt), fs::path("out"));
}

TEST(Reports, Figure1Row) {
  const Scenario s = resolve(load_config((scenario_dir() / "figure1.json").string()));
  const ScenarioReport r = run_verifier(s);
  const std::string csv = report_csv(r);
  EXPECT_NE(csv.find("red,S2-S4,delivered,6,4,1.5,1,1,\n"), std::string::npos) << csv;
  EXPECT_NE(csv.find("blue,S2-S4,delivered,2,2,1,1,0,\n"), std::string::npos) << csv;
  const std::string audit = audit_jsonl(s.topology, r);
  EXPECT_NE(audit.find(R"("node":"S1","inport":"S->S1","old_j":1,"new_j":2)"), std::string::npos)
      << audit;
}

TEST(Reports, NoFailuresMeansNoRuleChanges) {
  ScenarioConfig c = load_config((scenario_dir() / "figure1.json").string());
  c.failures = {FailureKind::kNone, {}, {}};
  const Scenario s = resolve(c);
  const ScenarioReport r = run_verifier(s);
  EXPECT_EQ(r.cases.size(), 2u);
  EXPECT_EQ(audit_jsonl(s.topology, r), "");
}

TEST(Reports, TorusSweepHasEighteenDeliveredRows) {
  const Scenario s = resolve(load_config((scenario_dir() / "torus_sweep.json").string()));
  const ScenarioReport r = run_verifier(s);
  ASSERT_EQ(r.cases.size(), 18u);
  for (const auto& c : r.cases) EXPECT_EQ(c.verdict(), "delivered");
  EXPECT_EQ(r.violation_count(), 0u);
}

TEST(Reports, OutputsAreByteIdenticalAcrossRuns) {
  const Scenario s = resolve(load_config((scenario_dir() / "figure1.json").string()));
  const fs::path a = scratch("a");
  const fs::path b = scratch("b");
  write_run_outputs(a, s, run_verifier(s));
  write_run_outputs(b, resolve(load_config((scenario_dir() / "figure1.json").string())),
                    run_verifier(s));
  write_file(a / "timeline.csv", timeline_csv(run_timeline(s)));
  write_file(b / "timeline.csv", timeline_csv(run_timeline(s)));
  for (const char* name : {"traces.json", "audit.jsonl", "report.csv", "report.json", "timeline.csv"}) {
    EXPECT_EQ(slurp(a / name), slurp(b / name)) << name;
    EXPECT_FALSE(slurp(a / name).empty() && std::string(name) != "audit.jsonl") << name;
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Reports, TracesJsonHasHopTriples) {
  const Scenario s = resolve(load_config((scenario_dir() / "figure1.json").string()));
  const auto j = nlohmann::json::parse(traces_json(s.topology, run_verifier(s)));
  const auto& first = j.at(0).at("traces").at(0);
  EXPECT_EQ(first.at("path"), "S-S1-S2-S1-S3-S4-D");
  EXPECT_EQ(first.at("hops").at(0), nlohmann::json({"S", "inject", "S->S1"}));
}
