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

#include "polsynth/service.h"

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "httplib.h"
#include "polsynth/backends.h"
#include "polsynth/error.h"
#include "polsynth/pipeline.h"

namespace polsynth {

using nlohmann::json;

struct PolicyService::Session {
  std::mutex write_mu;  // single writer
  mutable std::mutex snapshot_mu;  // guards the pointer swap only
  std::shared_ptr<const SessionSnapshot> current;

  std::shared_ptr<const SessionSnapshot> Load() const {
    std::lock_guard lock(snapshot_mu);
    return current;
  }
  void Commit(std::shared_ptr<const SessionSnapshot> next) {
    std::lock_guard lock(snapshot_mu);
    current = std::move(next);
  }
};

namespace {

HttpResponse JsonResponse(int status, const json& body) {
  return {status, "application/json", body.dump()};
}

HttpResponse ErrorResponse(int status, std::string_view stage,
                           std::string_view kind, std::string_view path,
                           std::string_view message) {
  return JsonResponse(status, {{"error",
                                {{"status", status},
                                 {"stage", stage},
                                 {"kind", kind},
                                 {"path", path},
                                 {"message", message}}}});
}

HttpResponse ErrorResponse(int status, const Error& e,
                           std::string_view fallback_stage) {
  return ErrorResponse(status, e.stage().empty() ? fallback_stage : e.stage(),
                       ErrorKindName(e.kind()), e.path(), e.what());
}

int StatusFor(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::kPrecondition: return 409;
    case ErrorKind::kLookup: return 404;
    default: return 422;
  }
}

json ParseBody(const std::string& body, std::string_view stage) {
  if (body.empty()) return json::object();
  try {
    return json::parse(body);
  } catch (const json::parse_error& e) {
    Error err(ErrorKind::kScenario, std::string("invalid JSON body: ") + e.what());
    err.set_stage(std::string(stage));
    throw err;
  }
}

std::vector<RefinementEdit> ParseEdits(const json& body) {
  std::vector<RefinementEdit> edits;
  if (!body.is_object() || !body.contains("edits") || !body["edits"].is_array()) {
    throw Error(ErrorKind::kEdit, "body must be {\"edits\": [...]}", "/edits");
  }
  const json& list = body["edits"];
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string path = "/edits/" + std::to_string(i);
    const json& item = list[i];
    if (!item.is_object() || !item.contains("op") || !item.contains("from") ||
        !item.contains("to") || !item["op"].is_string() ||
        !item["from"].is_string() || !item["to"].is_string()) {
      throw Error(ErrorKind::kEdit, "edit needs string op, from and to", path);
    }
    const std::string op = item["op"];
    if (op != "add" && op != "remove") {
      throw Error(ErrorKind::kEdit, "op must be \"add\" or \"remove\"",
                  path + "/op");
    }
    edits.push_back({op == "add" ? RefinementEdit::Op::kAdd
                                 : RefinementEdit::Op::kRemove,
                     item["from"], item["to"]});
  }
  return edits;
}

// Re-anchors ApplyEdits paths ("/3/from") under "/edits".
PolicyGraph ApplyRequestEdits(const PolicyGraph& graph,
                              const std::vector<RefinementEdit>& edits) {
  try {
    return ApplyEdits(graph, edits);
  } catch (const Error& e) {
    throw Error(e.kind(), e.what(), "/edits" + e.path());
  }
}

json AttributesJson(const ScenarioInstance& instance) {
  json out = json::array();
  for (const auto& inv : instance.invariants) {
    json hosts = json::object();
    for (EntityId i = 0; i < instance.entities->size(); ++i) {
      hosts[instance.entities->name(i)] = {{"value", inv->DescribeAttribute(i)},
                                           {"declared", inv->IsDeclared(i)}};
    }
    out.push_back({{"label", inv->label()},
                   {"template", inv->template_id()},
                   {"kind", SecurityKindName(inv->kind())},
                   {"phi_structured", inv->phi_structured()},
                   {"hosts", std::move(hosts)}});
  }
  return out;
}

std::string SnapshotFile(const std::string& id) { return id + ".json"; }

}  // namespace

json SnapshotToJson(const SessionSnapshot& s) {
  const Entities& entities = *s.instance->entities;
  json out{{"id", s.id},
           {"revision", s.revision},
           {"entities", entities.names()},
           {"policy", EdgesToJson(entities, s.policy.edges())},
           {"report", ReportToJson(s.report, entities)},
           {"attributes", AttributesJson(*s.instance)}};
  if (s.stateful) {
    out["stateful"] = EdgesToJson(entities, s.stateful->stateful());
    out["stateful_report"] = ReportToJson(*s.stateful_report, entities);
  } else {
    out["stateful"] = nullptr;
    out["stateful_report"] = nullptr;
  }
  return out;
}

PolicyService::PolicyService(std::optional<std::filesystem::path> snapshot_dir)
    : snapshot_dir_(std::move(snapshot_dir)), rng_state_(std::random_device{}()) {
  rng_state_ = (rng_state_ << 32) ^ std::random_device{}();
  if (snapshot_dir_) {
    std::filesystem::create_directories(*snapshot_dir_);
    LoadSnapshots();
  }
}

PolicyService::~PolicyService() = default;

std::string PolicyService::NewId() {
  std::lock_guard lock(rng_mu_);
  // splitmix64
  std::uint64_t z = (rng_state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  z ^= z >> 31;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(z));
  return buf;
}

std::shared_ptr<PolicyService::Session> PolicyService::Find(
    const std::string& id) const {
  std::shared_lock lock(sessions_mu_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

std::shared_ptr<const SessionSnapshot> PolicyService::Snapshot(
    const std::string& id) const {
  auto session = Find(id);
  return session ? session->Load() : nullptr;
}

void PolicyService::Persist(const SessionSnapshot& s) const {
  if (!snapshot_dir_) return;
  const Entities& entities = *s.instance->entities;
  json doc{{"id", s.id},
           {"revision", s.revision},
           {"scenario", ScenarioToJson(s.scenario)},
           {"policy", EdgesToJson(entities, s.policy.edges())}};
  doc["stateful"] = s.stateful ? EdgesToJson(entities, s.stateful->stateful())
                               : json(nullptr);
  const auto final_path = *snapshot_dir_ / SnapshotFile(s.id);
  const auto tmp_path = final_path.string() + ".tmp";
  {
    std::ofstream out(tmp_path);
    out << doc.dump(2) << "\n";
  }
  std::filesystem::rename(tmp_path, final_path);
}

namespace {

EdgeSet EdgesFromJson(const Entities& entities, const json& list) {
  EdgeSet edges;
  for (const json& e : list) {
    edges.insert({entities.Lookup(e.at("from").get<std::string>()),
                  entities.Lookup(e.at("to").get<std::string>())});
  }
  return edges;
}

}  // namespace

void PolicyService::LoadSnapshots() {
  for (const auto& entry : std::filesystem::directory_iterator(*snapshot_dir_)) {
    if (entry.path().extension() != ".json") continue;
    std::ifstream in(entry.path());
    json doc = json::parse(in, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded()) continue;
    Scenario scenario = ParseScenarioJson(doc.at("scenario"));
    auto instance = std::make_shared<const ScenarioInstance>(Instantiate(scenario));
    PolicyGraph policy(instance->entities,
                       EdgesFromJson(*instance->entities, doc.at("policy")));
    VerificationReport report = Verify(policy, instance->invariants);
    auto snap = std::make_shared<SessionSnapshot>(SessionSnapshot{
        doc.at("id").get<std::string>(), doc.at("revision").get<std::uint64_t>(),
        std::move(scenario), instance, std::move(policy), std::move(report),
        std::nullopt, std::nullopt});
    if (!doc.at("stateful").is_null()) {
      snap->stateful = StatefulPolicy(
          snap->policy, EdgesFromJson(*instance->entities, doc.at("stateful")));
      snap->stateful_report = VerifyStateful(*snap->stateful, instance->invariants);
    }
    auto session = std::make_shared<Session>();
    session->current = std::move(snap);
    sessions_[session->current->id] = std::move(session);
  }
}

HttpResponse PolicyService::Handle(const HttpRequest& request) {
  // Routes: /sessions and /sessions/{id}/{action}
  std::vector<std::string> parts;
  std::stringstream ss(request.path);
  for (std::string part; std::getline(ss, part, '/');) {
    if (!part.empty()) parts.push_back(part);
  }
  if (parts.empty() || parts[0] != "sessions") {
    return ErrorResponse(404, "route", "not_found", request.path, "no such route");
  }
  if (parts.size() == 1) {
    if (request.method != "POST") {
      return ErrorResponse(405, "route", "method", request.path,
                           "method not allowed");
    }
    return CreateSession(request);
  }
  auto session = Find(parts[1]);
  if (!session) {
    return ErrorResponse(404, "session", "not_found", "/sessions/" + parts[1],
                         "unknown session '" + parts[1] + "'");
  }
  const std::string action = parts.size() == 3 ? parts[2] : "";
  const std::string route = request.method + " " + action;
  if (route == "GET policy") return GetPolicy(*session);
  if (route == "POST edits") return PostEdits(*session, request);
  if (route == "POST stateful") return PostStateful(*session, request);
  if (route == "GET configs") return GetConfigs(*session, request);
  if (route == "POST whatif") return PostWhatIf(*session, request);
  return ErrorResponse(404, "route", "not_found", request.path, "no such route");
}

HttpResponse PolicyService::CreateSession(const HttpRequest& request) {
  const char* stage = "parse";
  std::shared_ptr<SessionSnapshot> snap;
  try {
    Scenario scenario = ParseScenarioJson(ParseBody(request.body, stage));
    stage = "instantiate";
    auto instance =
        std::make_shared<const ScenarioInstance>(Instantiate(scenario));
    stage = "deny_all";
    for (const auto& inv : instance->invariants) {
      if (!CheckDenyAll(*inv)) {
        throw Error(ErrorKind::kSynthesis,
                    "invariant '" + inv->label() +
                        "' does not hold for the deny-all policy");
      }
    }
    stage = "construct";
    PolicyGraph policy = ConstructPolicy(instance->entities, instance->invariants);
    VerificationReport report = Verify(policy, instance->invariants);
    snap = std::make_shared<SessionSnapshot>(
        SessionSnapshot{NewId(), 1, std::move(scenario), std::move(instance),
                        std::move(policy), std::move(report), std::nullopt,
                        std::nullopt});
  } catch (const Error& e) {
    return ErrorResponse(422, e, stage);
  }
  auto session = std::make_shared<Session>();
  session->current = snap;
  {
    std::unique_lock lock(sessions_mu_);
    sessions_[snap->id] = session;
  }
  Persist(*snap);
  return JsonResponse(201, {{"id", snap->id}, {"revision", snap->revision}});
}

HttpResponse PolicyService::GetPolicy(Session& session) {
  return JsonResponse(200, SnapshotToJson(*session.Load()));
}

HttpResponse PolicyService::PostEdits(Session& session,
                                      const HttpRequest& request) {
  std::lock_guard write(session.write_mu);
  auto current = session.Load();
  auto next = std::make_shared<SessionSnapshot>(*current);
  try {
    const auto edits = ParseEdits(ParseBody(request.body, "refine"));
    next->policy = ApplyRequestEdits(current->policy, edits);
  } catch (const Error& e) {
    return ErrorResponse(422, e, "refine");
  }
  next->report = Verify(next->policy, current->instance->invariants);
  next->stateful.reset();
  next->stateful_report.reset();
  next->revision = current->revision + 1;
  session.Commit(next);
  Persist(*next);
  const Entities& entities = *next->instance->entities;
  return JsonResponse(200, {{"revision", next->revision},
                            {"policy", EdgesToJson(entities, next->policy.edges())},
                            {"report", ReportToJson(next->report, entities)}});
}

namespace {

std::vector<Edge> ParsePreferences(const json& body, const Entities& entities) {
  std::vector<Edge> prefs;
  if (!body.is_object() || !body.contains("preferences")) return prefs;
  const json& list = body["preferences"];
  if (!list.is_array()) {
    throw Error(ErrorKind::kScenario, "preferences must be an array",
                "/preferences");
  }
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string path = "/preferences/" + std::to_string(i);
    const json& item = list[i];
    if (!item.is_object() || !item.contains("from") || !item.contains("to") ||
        !item["from"].is_string() || !item["to"].is_string()) {
      throw Error(ErrorKind::kScenario, "preference needs from and to", path);
    }
    auto from = entities.Find(item["from"].get<std::string>());
    auto to = entities.Find(item["to"].get<std::string>());
    if (!from || !to) {
      throw Error(ErrorKind::kScenario, "unknown entity in preference", path);
    }
    prefs.push_back({*from, *to});
  }
  return prefs;
}

}  // namespace

HttpResponse PolicyService::PostStateful(Session& session,
                                         const HttpRequest& request) {
  std::lock_guard write(session.write_mu);
  auto current = session.Load();
  if (!current->report.overall) {
    return ErrorResponse(409, "stateful", "precondition", "",
                         "current policy fails verification");
  }
  const ScenarioInstance& instance = *current->instance;
  auto next = std::make_shared<SessionSnapshot>(*current);
  try {
    auto prefs = ParsePreferences(ParseBody(request.body, "stateful"),
                                  *instance.entities);
    if (prefs.empty()) prefs = instance.preferences;
    next->stateful = ComputeStateful(current->policy, instance.invariants, prefs);
  } catch (const Error& e) {
    return ErrorResponse(StatusFor(e), e, "stateful");
  }
  next->stateful_report = VerifyStateful(*next->stateful, instance.invariants);
  next->revision = current->revision + 1;
  session.Commit(next);
  Persist(*next);
  const Entities& entities = *instance.entities;
  return JsonResponse(
      200, {{"revision", next->revision},
            {"stateful", EdgesToJson(entities, next->stateful->stateful())},
            {"report", ReportToJson(*next->stateful_report, entities)}});
}

HttpResponse PolicyService::GetConfigs(Session& session,
                                       const HttpRequest& request) {
  auto snap = session.Load();
  auto it = request.query.find("format");
  const std::string format = it == request.query.end() ? "" : it->second;
  auto force_it = request.query.find("force");
  const bool force = force_it != request.query.end() &&
                     (force_it->second == "true" || force_it->second == "1");
  if (format != kFormatIptables && format != kFormatOpenFlow &&
      format != kFormatDot) {
    return ErrorResponse(422, "serialize", "serialization", "/format",
                         "format must be iptables, openflow or dot");
  }
  if (!snap->report.overall && !force) {
    return ErrorResponse(409, "serialize", "verification", "",
                         "current policy fails verification; pass force=true");
  }
  const ScenarioInstance& instance = *snap->instance;
  std::string text;
  try {
    StatefulPolicy sp =
        snap->stateful ? *snap->stateful
        : snap->report.overall
            ? ComputeStateful(snap->policy, instance.invariants, instance.preferences)
            : StatefulPolicy(snap->policy, {});
    if (format == kFormatDot) {
      text = EmitDot(sp);
    } else {
      if (!instance.deployment) {
        throw Error(ErrorKind::kSerialization,
                    "scenario has no deployment map", "/deployment");
      }
      text = format == kFormatIptables ? EmitIptables(sp, *instance.deployment)
                                       : EmitOpenFlow(sp, *instance.deployment);
      if (!snap->report.overall) {
        text = ForcedWarningHeader(snap->report, *instance.entities) + text;
      }
    }
  } catch (const Error& e) {
    return ErrorResponse(422, e, "serialize");
  }
  HttpResponse response{200, "text/plain", std::move(text)};
  return response;
}

HttpResponse PolicyService::PostWhatIf(Session& session,
                                       const HttpRequest& request) {
  auto snap = session.Load();
  PolicyGraph hypothetical = snap->policy;
  try {
    hypothetical = ApplyRequestEdits(
        snap->policy, ParseEdits(ParseBody(request.body, "whatif")));
  } catch (const Error& e) {
    return ErrorResponse(422, e, "whatif");
  }
  const VerificationReport report =
      Verify(hypothetical, snap->instance->invariants);
  const Entities& entities = *snap->instance->entities;
  return JsonResponse(200, {{"revision", snap->revision},
                            {"policy", EdgesToJson(entities, hypothetical.edges())},
                            {"report", ReportToJson(report, entities)}});
}

void PolicyService::Mount(httplib::Server& server) {
  auto forward = [this](const httplib::Request& req, httplib::Response& res) {
    HttpRequest request{req.method, req.path, {}, req.body};
    for (const auto& [k, v] : req.params) request.query[k] = v;
    HttpResponse response = Handle(request);
    res.status = response.status;
    res.set_content(response.body, response.content_type.c_str());
  };
  const std::string pattern = R"(/sessions(/.*)?)";
  server.Get(pattern, forward);
  server.Post(pattern, forward);
}

void ServeHttp(PolicyService& service, const std::string& host, int port) {
  httplib::Server server;
  service.Mount(server);
  if (!server.listen(host, port)) {
    throw Error(ErrorKind::kUsage,
                "cannot listen on " + host + ":" + std::to_string(port));
  }
}

}  // namespace polsynth
