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

#include "polsynth/pipeline.h"

#include <algorithm>

#include "polsynth/backends.h"
#include "polsynth/error.h"

namespace polsynth {

using nlohmann::json;

namespace {

template <typename F>
auto InStage(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (Error& e) {
    if (e.stage().empty()) e.set_stage(stage);
    throw;
  }
}

bool AllHave(const DeploymentMap& dep, std::size_t n, bool (*has)(const HostBinding&)) {
  for (EntityId i = 0; i < n; ++i) {
    if (!has(dep.at(i))) return false;
  }
  return true;
}

}  // namespace

std::string ForcedWarningHeader(const VerificationReport& report,
                                const Entities& entities) {
  std::string out =
      "# WARNING: generated with --force from a policy that FAILS "
      "verification.\n";
  for (const auto& r : report.per_invariant) {
    if (r.holds) continue;
    out += "# WARNING: " + r.label + " violated by " +
           FormatEdges(entities, r.offending) + "\n";
  }
  return out;
}

PipelineResult RunPipeline(const Scenario& scenario,
                           const PipelineOptions& options) {
  ScenarioInstance instance =
      InStage("instantiate", [&] { return Instantiate(scenario); });
  const InvariantList& invariants = instance.invariants;

  InStage("deny_all", [&] {
    for (const auto& inv : invariants) {
      if (!CheckDenyAll(*inv)) {
        throw Error(ErrorKind::kSynthesis,
                    "invariant '" + inv->label() +
                        "' does not hold for the deny-all policy");
      }
    }
  });
  PolicyGraph constructed = InStage("construct", [&] {
    return ConstructPolicy(instance.entities, invariants);
  });
  auto [policy, report] = InStage("refine", [&] {
    return Refine(constructed, scenario.refinements, invariants);
  });

  PipelineResult result{std::move(instance), std::move(constructed),
                        std::move(policy), std::move(report),
                        std::nullopt, std::nullopt, {}};
  result.forced = options.force && !result.report_policy.overall;
  if (!result.report_policy.overall && !options.force) {
    result.serialization_withheld = true;
    return result;
  }

  const InvariantList& checked = result.instance.invariants;
  result.stateful = InStage("stateful", [&] {
    if (!result.report_policy.overall) {
      // Forced: no stateful upgrade is sound for a failing policy.
      return StatefulPolicy(result.policy, {});
    }
    return ComputeStateful(result.policy, checked, result.instance.preferences);
  });
  result.report_stateful = VerifyStateful(*result.stateful, checked);

  InStage("serialize", [&] {
    const StatefulPolicy& sp = *result.stateful;
    const auto& dep = result.instance.deployment;
    const std::size_t n = result.instance.entities->size();
    std::set<std::string> formats = options.formats;
    if (formats.empty()) {
      formats.insert(std::string(kFormatDot));
      if (dep && AllHave(*dep, n, [](const HostBinding& b) { return b.iface.has_value(); })) {
        formats.insert(std::string(kFormatIptables));
      }
      if (dep && AllHave(*dep, n, [](const HostBinding& b) {
            return b.switch_port.has_value();
          })) {
        formats.insert(std::string(kFormatOpenFlow));
      }
    }
    const std::string header =
        result.forced ? ForcedWarningHeader(result.report_policy,
                                            *result.instance.entities)
                      : "";
    for (const std::string& format : formats) {
      if (format == kFormatDot) {
        std::string dot = EmitDot(sp);
        if (result.forced) dot = "// WARNING: policy fails verification\n" + dot;
        result.configs[format] = std::move(dot);
        continue;
      }
      if (format != kFormatIptables && format != kFormatOpenFlow) {
        throw Error(ErrorKind::kSerialization, "unknown format '" + format + "'");
      }
      if (!dep) {
        throw Error(ErrorKind::kSerialization,
                    "format '" + format + "' needs a deployment map");
      }
      result.configs[format] =
          header + (format == kFormatIptables ? EmitIptables(sp, *dep)
                                              : EmitOpenFlow(sp, *dep));
    }
  });
  return result;
}

json EdgesToJson(const Entities& entities, const EdgeSet& edges) {
  json out = json::array();
  for (const Edge& e : edges) {
    out.push_back({{"from", entities.name(e.sender)},
                   {"to", entities.name(e.receiver)}});
  }
  return out;
}

json ReportToJson(const VerificationReport& report, const Entities& entities) {
  json per = json::array();
  for (const auto& r : report.per_invariant) {
    per.push_back({{"index", r.index},
                   {"label", r.label},
                   {"template", r.template_id},
                   {"kind", SecurityKindName(r.kind)},
                   {"criterion", CriterionName(r.criterion)},
                   {"holds", r.holds},
                   {"offending", EdgesToJson(entities, r.offending)}});
  }
  return {{"overall", report.overall}, {"per_invariant", std::move(per)}};
}

json PipelineResultToJson(const PipelineResult& result) {
  const Entities& entities = *result.instance.entities;
  json out;
  out["entities"] = entities.names();
  out["constructed_policy"] = EdgesToJson(entities, result.constructed.edges());
  out["policy"] = EdgesToJson(entities, result.policy.edges());
  out["report_policy"] = ReportToJson(result.report_policy, entities);
  if (result.stateful) {
    out["stateful"] = EdgesToJson(entities, result.stateful->stateful());
    out["report_stateful"] = ReportToJson(*result.report_stateful, entities);
  } else {
    out["stateful"] = nullptr;
    out["report_stateful"] = nullptr;
  }
  out["serialization_withheld"] = result.serialization_withheld;
  out["forced"] = result.forced;
  out["formats"] = json::array();
  for (const auto& [format, _] : result.configs) out["formats"].push_back(format);
  return out;
}

}  // namespace polsynth
