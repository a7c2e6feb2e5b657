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

#ifndef POLSYNTH_SCENARIO_H_
#define POLSYNTH_SCENARIO_H_

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "polsynth/backends.h"
#include "polsynth/graph.h"
#include "polsynth/invariants.h"
#include "polsynth/synthesis.h"

namespace polsynth {

struct InvariantSpec {
  std::string template_id;
  std::optional<std::string> label;
  nlohmann::json attrs = nlohmann::json::object();  // as declared

  friend bool operator==(const InvariantSpec&, const InvariantSpec&) = default;
};

struct EdgeRef {
  std::string from;
  std::string to;
  friend bool operator==(const EdgeRef&, const EdgeRef&) = default;
};

// A parsed and validated scenario document. Attributes are kept as
// declared; auto-completion happens in Instantiate.
struct Scenario {
  std::vector<std::string> entities;
  std::vector<InvariantSpec> invariants;
  std::optional<std::map<std::string, HostBinding>> deployment;
  std::vector<RefinementEdit> refinements;
  std::vector<EdgeRef> stateful_preferences;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

// Maps template ids to attribute parsers. The shipped templates are
// registered in Default(); further templates can be added without touching
// the synthesis code.
class TemplateRegistry {
 public:
  // Builds an instance from the declared attribute object. `path` points at
  // that object; errors must carry paths below it.
  using Factory = std::function<InvariantPtr(
      const EntitiesPtr& entities, const nlohmann::json& attrs,
      std::string label, const std::string& path)>;

  static TemplateRegistry& Default();

  void Register(std::string id, Factory factory);
  bool Contains(std::string_view id) const;
  std::vector<std::string> Ids() const;

  InvariantPtr Instantiate(std::string_view id, const EntitiesPtr& entities,
                           const nlohmann::json& attrs, std::string label,
                           const std::string& path) const;

 private:
  std::map<std::string, Factory, std::less<>> factories_;
};

// Throws ErrorKind::kScenario with a JSON-pointer path on schema
// violations, unknown templates, and unknown entity references.
Scenario ParseScenario(std::string_view text);
Scenario ParseScenarioJson(const nlohmann::json& doc);
Scenario LoadScenarioFile(const std::string& path);

nlohmann::json ScenarioToJson(const Scenario& scenario);
std::string WriteScenario(const Scenario& scenario);

// A scenario with auto-completed invariants and resolved references.
struct ScenarioInstance {
  EntitiesPtr entities;
  InvariantList invariants;
  std::optional<DeploymentMap> deployment;
  std::vector<Edge> preferences;
};

ScenarioInstance Instantiate(const Scenario& scenario);

}  // namespace polsynth

#endif  // POLSYNTH_SCENARIO_H_
