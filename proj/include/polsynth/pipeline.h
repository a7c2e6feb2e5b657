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

#ifndef POLSYNTH_PIPELINE_H_
#define POLSYNTH_PIPELINE_H_

#include <map>
#include <optional>
#include <set>
#include <string>

#include "json.hpp"
#include "polsynth/scenario.h"
#include "polsynth/stateful.h"
#include "polsynth/synthesis.h"

namespace polsynth {

inline constexpr std::string_view kFormatIptables = "iptables";
inline constexpr std::string_view kFormatOpenFlow = "openflow";
inline constexpr std::string_view kFormatDot = "dot";

struct PipelineOptions {
  // Formats to serialize. Empty means every format the deployment map can
  // express: dot always, iptables when every entity has an interface,
  // openflow when every entity has a switch port. Explicitly requested
  // formats that cannot be expressed raise a serialization error.
  std::set<std::string> formats;
  // Serialize even when the refined policy fails verification.
  bool force = false;
};

struct PipelineResult {
  ScenarioInstance instance;
  PolicyGraph constructed;  // before refinements
  PolicyGraph policy;       // after refinements
  VerificationReport report_policy;
  std::optional<StatefulPolicy> stateful;
  std::optional<VerificationReport> report_stateful;
  std::map<std::string, std::string> configs;  // format -> text
  bool serialization_withheld = false;
  bool forced = false;
};

// Runs auto-completion, deny-all checks, policy construction, refinements
// with re-verification, stateful upgrade, and serialization. Errors are
// rethrown with Error::stage() naming the failing stage.
PipelineResult RunPipeline(const Scenario& scenario,
                           const PipelineOptions& options = {});

// Comment block prepended to configs serialized from a failing policy.
std::string ForcedWarningHeader(const VerificationReport& report,
                                const Entities& entities);

nlohmann::json ReportToJson(const VerificationReport& report,
                            const Entities& entities);
nlohmann::json EdgesToJson(const Entities& entities, const EdgeSet& edges);
nlohmann::json PipelineResultToJson(const PipelineResult& result);

}  // namespace polsynth

#endif  // POLSYNTH_PIPELINE_H_
