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

// Command-line driver: synth, verify, stateful, report, serve.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "polsynth/error.h"
#include "polsynth/pipeline.h"
#include "polsynth/scenario.h"
#include "polsynth/service.h"

namespace {

using namespace polsynth;

constexpr int kExitOk = 0;
constexpr int kExitVerification = 2;
constexpr int kExitScenario = 3;
constexpr int kExitSerialization = 4;

int ExitCodeFor(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::kSerialization: return kExitSerialization;
    case ErrorKind::kPrecondition: return kExitVerification;
    default: return kExitScenario;
  }
}

std::string FileNameFor(const std::string& format) {
  if (format == kFormatIptables) return "iptables.rules";
  if (format == kFormatOpenFlow) return "openflow.flows";
  return "policy.dot";
}

void PrintPolicy(const std::string& title, const PolicyGraph& graph) {
  std::cout << title << " (" << graph.edges().size() << " edges)\n";
  for (const Edge& e : graph.edges()) std::cout << "  " << graph.EdgeName(e) << "\n";
}

int RunSynth(const std::string& scenario_path, const std::string& out_dir,
             const std::vector<std::string>& formats, bool force) {
  PipelineOptions options;
  options.force = force;
  for (const auto& f : formats) {
    if (f == "all") {
      options.formats = {std::string(kFormatIptables),
                         std::string(kFormatOpenFlow), std::string(kFormatDot)};
      break;
    }
    options.formats.insert(f);
  }
  PipelineResult result = RunPipeline(LoadScenarioFile(scenario_path), options);
  const Entities& entities = *result.instance.entities;

  std::filesystem::create_directories(out_dir);
  std::ofstream(std::filesystem::path(out_dir) / "report.json")
      << PipelineResultToJson(result).dump(2) << "\n";
  if (result.serialization_withheld) {
    std::cerr << "verification failed; serialization withheld (use --force)\n"
              << result.report_policy.ToString(entities);
    return kExitVerification;
  }
  if (result.forced) {
    std::cerr << "WARNING: policy fails verification; writing configs anyway\n"
              << result.report_policy.ToString(entities);
  }
  for (const auto& [format, text] : result.configs) {
    const auto path = std::filesystem::path(out_dir) / FileNameFor(format);
    std::ofstream(path) << text;
    std::cout << "wrote " << path.string() << "\n";
  }
  return result.report_policy.overall ? kExitOk : kExitVerification;
}

int RunVerify(const std::string& scenario_path) {
  const Scenario scenario = LoadScenarioFile(scenario_path);
  PipelineResult result = RunPipeline(scenario, {{std::string(kFormatDot)}, false});
  PrintPolicy("constructed policy", result.constructed);
  if (!scenario.refinements.empty()) PrintPolicy("refined policy", result.policy);
  std::cout << "verification: "
            << result.report_policy.ToString(*result.instance.entities);
  return result.report_policy.overall ? kExitOk : kExitVerification;
}

int RunStateful(const std::string& scenario_path) {
  PipelineResult result =
      RunPipeline(LoadScenarioFile(scenario_path), {{std::string(kFormatDot)}, false});
  const Entities& entities = *result.instance.entities;
  if (!result.stateful) {
    std::cerr << "policy fails verification; no stateful policy\n"
              << result.report_policy.ToString(entities);
    return kExitVerification;
  }
  PrintPolicy("policy", result.policy);
  std::cout << "stateful edges: " << FormatEdges(entities, result.stateful->stateful())
            << "\nstateful verification: "
            << result.report_stateful->ToString(entities);
  return result.report_stateful->overall ? kExitOk : kExitVerification;
}

int RunReport(const std::string& scenario_path, bool as_json) {
  PipelineResult result =
      RunPipeline(LoadScenarioFile(scenario_path), {{std::string(kFormatDot)}, false});
  const Entities& entities = *result.instance.entities;
  if (as_json) {
    std::cout << PipelineResultToJson(result).dump(2) << "\n";
  } else {
    PrintPolicy("policy", result.policy);
    std::cout << "verification: " << result.report_policy.ToString(entities);
    if (result.stateful) {
      std::cout << "stateful edges: "
                << FormatEdges(entities, result.stateful->stateful())
                << "\nstateful verification: "
                << result.report_stateful->ToString(entities);
    }
  }
  return result.report_policy.overall ? kExitOk : kExitVerification;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthesize firewall and OpenFlow configurations from security invariants"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir, host = "127.0.0.1", snapshot_dir;
  std::vector<std::string> formats;
  bool force = false, as_json = false;
  int port = 8080;

  auto* synth = app.add_subcommand("synth", "run the full pipeline and write configs");
  synth->add_option("scenario", scenario_path, "scenario JSON file")->required();
  synth->add_option("--out", out_dir, "output directory")->required();
  synth->add_option("--format", formats, "iptables,openflow,dot,all")
      ->delimiter(',')
      ->check(CLI::IsMember({"iptables", "openflow", "dot", "all"}));
  synth->add_flag("--force", force, "serialize even if verification fails");

  auto* verify = app.add_subcommand("verify", "construct, refine and verify the policy");
  verify->add_option("scenario", scenario_path)->required();

  auto* stateful = app.add_subcommand("stateful", "compute the stateful policy");
  stateful->add_option("scenario", scenario_path)->required();

  auto* report = app.add_subcommand("report", "print all pipeline artifacts");
  report->add_option("scenario", scenario_path)->required();
  report->add_flag("--json", as_json, "machine-readable output");

  auto* serve = app.add_subcommand("serve", "start the HTTP service");
  serve->add_option("--port", port)->required();
  serve->add_option("--host", host);
  serve->add_option("--snapshots", snapshot_dir, "directory for session snapshots");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) return RunSynth(scenario_path, out_dir, formats, force);
    if (*verify) return RunVerify(scenario_path);
    if (*stateful) return RunStateful(scenario_path);
    if (*report) return RunReport(scenario_path, as_json);
    if (*serve) {
      PolicyService service(snapshot_dir.empty()
                                ? std::nullopt
                                : std::optional<std::filesystem::path>(snapshot_dir));
      std::cout << "listening on " << host << ":" << port << std::endl;
      ServeHttp(service, host, port);
    }
  } catch (const Error& e) {
    std::cerr << "error";
    if (!e.stage().empty()) std::cerr << " [" << e.stage() << "]";
    std::cerr << " (" << ErrorKindName(e.kind()) << ")";
    if (!e.path().empty()) std::cerr << " at " << e.path();
    std::cerr << ": " << e.what() << "\n";
    return ExitCodeFor(e);
  }
  return kExitOk;
}
