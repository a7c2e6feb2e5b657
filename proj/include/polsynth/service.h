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

#ifndef POLSYNTH_SERVICE_H_
#define POLSYNTH_SERVICE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>

#include "json.hpp"
#include "polsynth/scenario.h"
#include "polsynth/stateful.h"
#include "polsynth/synthesis.h"

namespace httplib {
class Server;
}

namespace polsynth {

struct HttpRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
};

struct HttpResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

// One committed revision of a session. Never mutated once published.
struct SessionSnapshot {
  std::string id;
  std::uint64_t revision = 0;
  Scenario scenario;
  std::shared_ptr<const ScenarioInstance> instance;
  PolicyGraph policy;
  VerificationReport report;
  std::optional<StatefulPolicy> stateful;
  std::optional<VerificationReport> stateful_report;
};

// Session store and request router behind the HTTP API used by the
// refinement UI. Mutations of one session are serialized; readers work on
// the last committed snapshot.
class PolicyService {
 public:
  // When `snapshot_dir` is set, every committed revision is written there
  // as <id>.json and existing snapshots are loaded on construction.
  explicit PolicyService(std::optional<std::filesystem::path> snapshot_dir = {});
  ~PolicyService();

  PolicyService(const PolicyService&) = delete;
  PolicyService& operator=(const PolicyService&) = delete;

  HttpResponse Handle(const HttpRequest& request);

  // Installs routes forwarding to Handle.
  void Mount(httplib::Server& server);

  std::shared_ptr<const SessionSnapshot> Snapshot(const std::string& id) const;

 private:
  struct Session;

  std::shared_ptr<Session> Find(const std::string& id) const;
  std::string NewId();
  void Persist(const SessionSnapshot& snapshot) const;
  void LoadSnapshots();

  HttpResponse CreateSession(const HttpRequest& request);
  HttpResponse GetPolicy(Session& session);
  HttpResponse PostEdits(Session& session, const HttpRequest& request);
  HttpResponse PostStateful(Session& session, const HttpRequest& request);
  HttpResponse GetConfigs(Session& session, const HttpRequest& request);
  HttpResponse PostWhatIf(Session& session, const HttpRequest& request);

  std::optional<std::filesystem::path> snapshot_dir_;
  mutable std::shared_mutex sessions_mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::mutex rng_mu_;
  std::uint64_t rng_state_;
};

nlohmann::json SnapshotToJson(const SessionSnapshot& snapshot);

// Blocks serving `service` on host:port until the process is stopped.
void ServeHttp(PolicyService& service, const std::string& host, int port);

}  // namespace polsynth

#endif  // POLSYNTH_SERVICE_H_
