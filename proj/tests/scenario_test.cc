// Copyright 2026 The polsynth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "polsynth/scenario.h"

#include "gtest/gtest.h"
#include "polsynth/pipeline.h"
#include "support/case_study.h"
#include "support/iptables_parser.h"
#include "support/test_templates.h"

namespace polsynth {
namespace {

using ::polsynth::testing::CaseStudy;
using ::polsynth::testing::NormalizeRules;
using ::polsynth::testing::ReadFile;
using ::polsynth::testing::SourcePath;

Scenario CaseStudyScenario() {
  return LoadScenarioFile(SourcePath("data/case_study.json"));
}

Error ErrorOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "no error raised";
  return Error(ErrorKind::kUsage, "none");
}

TEST(ParseTest, CaseStudyFile) {
  Scenario s = CaseStudyScenario();
  EXPECT_EQ(s.entities.size(), 5u);
  ASSERT_EQ(s.invariants.size(), 4u);
  EXPECT_EQ(s.invariants[3].template_id, "comm_partners");
  ASSERT_EQ(s.refinements.size(), 1u);
  EXPECT_EQ(s.refinements[0].op, RefinementEdit::Op::kRemove);
  ASSERT_TRUE(s.deployment.has_value());
  EXPECT_TRUE(s.deployment->at("INET").external);
}

TEST(ParseTest, EntitiesOnly) {
  Scenario s = ParseScenario(R"({"entities": ["A", "B"]})");
  EXPECT_EQ(s.entities, (std::vector<std::string>{"A", "B"}));
  EXPECT_TRUE(s.invariants.empty());
  EXPECT_FALSE(s.deployment.has_value());
}

TEST(ParseTest, UndeclaredEntityInAttributeCarriesPath) {
  std::string text = ReadFile(SourcePath("data/case_study.json"));
  auto doc = nlohmann::json::parse(text);
  doc["invariants"][3]["attrs"]["DB"]["allowed_senders"][0] = "Mallory";
  Error e = ErrorOf([&] { Instantiate(ParseScenarioJson(doc)); });
  EXPECT_EQ(e.kind(), ErrorKind::kScenario);
  EXPECT_EQ(e.path(), "/invariants/3/attrs/DB/allowed_senders/0");
}

TEST(ParseTest, Rejections) {
  struct Case {
    const char* text;
    std::string path;
  };
  const Case cases[] = {
      {R"({"entities": ["A", "A"]})", "/entities/1"},
      {R"({"entities": ["A"], "extra": 1})", "/extra"},
      {R"({"entities": ["A"], "invariants": [{"template": "nope"}]})",
       "/invariants/0/template"},
      {R"({"entities": ["A"], "invariants": [{"template": "sink", "attrs": {"A": "x"}}]})",
       "/invariants/0/attrs/A"},
      {R"({"entities": ["A"], "invariants": [{"template": "sink", "attrs": {"B": "sink"}}]})",
       "/invariants/0/attrs/B"},
      {R"({"entities": ["A"], "refinements": [{"op": "flip", "from": "A", "to": "A"}]})",
       "/refinements/0/op"},
  };
  for (const Case& c : cases) {
    Error e = ErrorOf([&] { Instantiate(ParseScenario(c.text)); });
    EXPECT_EQ(e.kind(), ErrorKind::kScenario) << c.text;
    EXPECT_EQ(e.path(), c.path) << c.text << ": " << e.what();
  }
  EXPECT_EQ(ErrorOf([] { ParseScenario("{not json"); }).kind(), ErrorKind::kScenario);
}

TEST(ParseTest, WriteRoundTrip) {
  for (const char* file : {"data/case_study.json", "data/case_study_sdn.json"}) {
    Scenario s = LoadScenarioFile(SourcePath(file));
    EXPECT_EQ(ParseScenario(WriteScenario(s)), s) << file;
  }
  Scenario s = CaseStudyScenario();
  s.stateful_preferences.push_back({"WebApp", "INET"});
  s.invariants[0].label.reset();
  EXPECT_EQ(ParseScenario(WriteScenario(s)), s);
}

TEST(InstantiateTest, MatchesTypedConstruction) {
  CaseStudy cs;
  ScenarioInstance inst = Instantiate(CaseStudyScenario());
  EXPECT_EQ(*inst.entities, *cs.entities);
  ASSERT_EQ(inst.invariants.size(), cs.invariants.size());
  PolicyGraph all = PolicyGraph::Complete(inst.entities);
  for (std::size_t i = 0; i < cs.invariants.size(); ++i) {
    EXPECT_EQ(inst.invariants[i]->label(), cs.invariants[i]->label());
    for (const Edge& x : all.edges()) {
      EXPECT_EQ(inst.invariants[i]->Holds(PolicyGraph(inst.entities, {x})),
                cs.invariants[i]->Holds(PolicyGraph(cs.entities, {x})));
    }
  }
}

TEST(InstantiateTest, DefaultLabels) {
  ScenarioInstance inst = Instantiate(ParseScenario(
      R"({"entities": ["A", "B"], "invariants": [
           {"template": "sink"}, {"template": "blp"}, {"template": "sink"}]})"));
  EXPECT_EQ(inst.invariants[0]->label(), "sink#0");
  EXPECT_EQ(inst.invariants[1]->label(), "blp");
  EXPECT_EQ(inst.invariants[2]->label(), "sink#2");
}

TEST(PipelineTest, CaseStudy) {
  CaseStudy cs;
  PipelineResult r = RunPipeline(CaseStudyScenario());
  EXPECT_EQ(r.constructed.edges(), cs.constructed());
  EXPECT_EQ(r.policy, cs.refined());
  EXPECT_TRUE(r.report_policy.overall);
  ASSERT_TRUE(r.stateful.has_value());
  EXPECT_EQ(r.stateful->stateful(), cs.stateful().stateful());
  EXPECT_TRUE(r.report_stateful->overall);
  EXPECT_FALSE(r.serialization_withheld);
  EXPECT_TRUE(r.configs.contains("dot"));
  EXPECT_FALSE(r.configs.contains("openflow"));
  EXPECT_EQ(NormalizeRules(r.configs.at("iptables")),
            NormalizeRules(ReadFile(SourcePath("tests/fixtures/case_study.rules"))));
}

TEST(PipelineTest, SwitchedDeploymentEmitsFlows) {
  PipelineResult r = RunPipeline(LoadScenarioFile(SourcePath("data/case_study_sdn.json")));
  EXPECT_TRUE(r.configs.contains("openflow"));
  EXPECT_TRUE(r.configs.contains("iptables"));
  CaseStudy cs;
  EXPECT_EQ(r.configs.at("openflow"), EmitOpenFlow(cs.stateful(), cs.switched()));
}

TEST(PipelineTest, ViolatingRefinementWithholdsConfigs) {
  Scenario s = CaseStudyScenario();
  s.refinements.push_back(RefinementEdit::Add("Log", "INET"));
  PipelineResult r = RunPipeline(s);
  EXPECT_FALSE(r.report_policy.overall);
  EXPECT_TRUE(r.serialization_withheld);
  EXPECT_TRUE(r.configs.empty());
  EXPECT_FALSE(r.stateful.has_value());

  PipelineResult forced = RunPipeline(s, {.formats = {}, .force = true});
  EXPECT_TRUE(forced.forced);
  ASSERT_TRUE(forced.configs.contains("iptables"));
  EXPECT_EQ(forced.configs.at("iptables").rfind("# WARNING", 0), 0u);
  EXPECT_NE(forced.configs.at("iptables").find("Sink"), std::string::npos);
  EXPECT_EQ(forced.configs.at("dot").rfind("// WARNING", 0), 0u);
  EXPECT_TRUE(forced.stateful->stateful().empty());
}

TEST(PipelineTest, EntitiesOnlyAllowsEverything) {
  PipelineResult r = RunPipeline(ParseScenario(R"({"entities": ["A", "B", "C"]})"));
  EXPECT_EQ(r.policy, PolicyGraph::Complete(r.instance.entities));
  // Every pair is bidirectional, so nothing needs a stateful upgrade.
  EXPECT_TRUE(r.stateful->stateful().empty());
  EXPECT_EQ(r.configs.size(), 1u);
}

TEST(PipelineTest, ErrorsNameTheirStage) {
  // Built directly: the parser would already reject it.
  Scenario bad{{"A"}, {{"sink", std::nullopt, {{"B", "sink"}}}}, std::nullopt, {}, {}};
  Error inst = ErrorOf([&] { RunPipeline(bad); });
  EXPECT_EQ(inst.stage(), "instantiate");
  EXPECT_EQ(inst.path(), "/invariants/0/attrs/B");

  Scenario s = CaseStudyScenario();
  s.refinements.push_back(RefinementEdit::Remove("Nobody", "DB"));
  Error refine = ErrorOf([&] { RunPipeline(s); });
  EXPECT_EQ(refine.stage(), "refine");
  EXPECT_EQ(refine.kind(), ErrorKind::kEdit);
  EXPECT_EQ(refine.path(), "/1/from");

  Error ser = ErrorOf([] {
    RunPipeline(ParseScenario(R"({"entities": ["A"]})"), {.formats = {"iptables"}});
  });
  EXPECT_EQ(ser.stage(), "serialize");
  EXPECT_EQ(ser.kind(), ErrorKind::kSerialization);
}

TEST(PipelineTest, Deterministic) {
  Scenario s = LoadScenarioFile(SourcePath("data/case_study_sdn.json"));
  PipelineResult a = RunPipeline(s);
  PipelineResult b = RunPipeline(s);
  EXPECT_EQ(a.configs, b.configs);
  EXPECT_EQ(PipelineResultToJson(a), PipelineResultToJson(b));
}

TEST(RegistryTest, CustomTemplateRunsThroughPipeline) {
  auto& registry = TemplateRegistry::Default();
  registry.Register("requires_an_edge",
                    [](const EntitiesPtr& e, const nlohmann::json&, std::string label,
                       const std::string&) -> InvariantPtr {
                      return std::make_shared<testing::RequiresAnEdge>(e, std::move(label));
                    });
  EXPECT_TRUE(registry.Contains("requires_an_edge"));
  Scenario s = ParseScenario(
      R"({"entities": ["A", "B"], "invariants": [{"template": "requires_an_edge"}]})");
  Error e = ErrorOf([&] { RunPipeline(s); });
  EXPECT_EQ(e.stage(), "deny_all");
  EXPECT_EQ(e.kind(), ErrorKind::kSynthesis);
  EXPECT_NE(std::string(e.what()).find("requires_an_edge"), std::string::npos);
}

}  // namespace
}  // namespace polsynth
