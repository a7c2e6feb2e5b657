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

#include <fstream>
#include <set>
#include <sstream>

#include "polsynth/error.h"

namespace polsynth {

using nlohmann::json;

namespace {

[[noreturn]] void Fail(const std::string& message, const std::string& path) {
  throw Error(ErrorKind::kScenario, message, path);
}

const json& Require(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) Fail(std::string("missing key '") + key + "'", path);
  return *it;
}

std::string AsString(const json& j, const std::string& path) {
  if (!j.is_string()) Fail("expected a string", path);
  return j.get<std::string>();
}

void RequireObject(const json& j, const std::string& path) {
  if (!j.is_object()) Fail("expected an object", path);
}

void RequireArray(const json& j, const std::string& path) {
  if (!j.is_array()) Fail("expected an array", path);
}

void RejectUnknownKeys(const json& obj, std::initializer_list<const char*> keys,
                       const std::string& path) {
  for (const auto& [key, _] : obj.items()) {
    bool known = false;
    for (const char* k : keys) known = known || key == k;
    if (!known) Fail("unknown key '" + key + "'", path + "/" + key);
  }
}

std::set<std::string> NameList(const json& j, const std::string& path) {
  RequireArray(j, path);
  std::set<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.insert(AsString(j[i], path + "/" + std::to_string(i)));
  }
  return out;
}

// Reports unknown names at their position in the source array, which the
// set-based attribute validation cannot do.
void CheckNamesInArray(const Entities& entities, const json& array,
                       const std::string& path) {
  for (std::size_t i = 0; i < array.size(); ++i) {
    const std::string name = array[i].get<std::string>();
    if (!entities.Find(name)) {
      Fail("unknown entity '" + name + "'", path + "/" + std::to_string(i));
    }
  }
}

template <typename T, typename ParseAttr>
TemplateRegistry::Factory MakeFactory(ParseAttr parse_attr) {
  return [parse_attr](const EntitiesPtr& entities, const json& attrs,
                      std::string label, const std::string& path) {
    RequireObject(attrs, path);
    DeclaredAttrs<typename T::attr_type> declared;
    for (const auto& [name, value] : attrs.items()) {
      const std::string attr_path = path + "/" + name;
      if (!entities->Find(name)) {
        Fail("attribute assigned to unknown entity '" + name + "'", attr_path);
      }
      declared.emplace(name, parse_attr(*entities, value, attr_path));
    }
    return MakeInvariant<T>(entities, std::move(declared), std::move(label),
                            path);
  };
}

TemplateRegistry MakeDefaultRegistry() {
  TemplateRegistry registry;
  registry.Register(
      std::string(SubnetsInvariant::kId),
      MakeFactory<SubnetsInvariant>(
          [](const Entities&, const json& v, const std::string& path) {
            const std::string s = AsString(v, path);
            if (s == "member") return SubnetsAttr::kMember;
            if (s == "inbound_gateway") return SubnetsAttr::kInboundGateway;
            Fail("subnets attribute must be \"member\" or \"inbound_gateway\"",
                 path);
          }));
  registry.Register(
      std::string(SinkInvariant::kId),
      MakeFactory<SinkInvariant>(
          [](const Entities&, const json& v, const std::string& path) {
            if (AsString(v, path) != "sink") {
              Fail("sink attribute must be \"sink\"", path);
            }
            return SinkAttr::kSink;
          }));
  registry.Register(
      std::string(BlpInvariant::kId),
      MakeFactory<BlpInvariant>(
          [](const Entities&, const json& v, const std::string& path) {
            RequireObject(v, path);
            RejectUnknownKeys(v, {"level", "trusted"}, path);
            BlpAttr attr;
            if (v.contains("level")) {
              const json& level = v["level"];
              if (!level.is_number_integer() || level.get<long long>() < 0) {
                Fail("level must be a non-negative integer", path + "/level");
              }
              attr.level = level.get<int>();
            }
            if (v.contains("trusted")) {
              if (!v["trusted"].is_boolean()) {
                Fail("trusted must be a boolean", path + "/trusted");
              }
              attr.trusted = v["trusted"].get<bool>();
            }
            return attr;
          }));
  registry.Register(
      std::string(CommPartnersInvariant::kId),
      MakeFactory<CommPartnersInvariant>(
          [](const Entities& entities, const json& v, const std::string& path) {
            RequireObject(v, path);
            RejectUnknownKeys(v, {"allowed_senders"}, path);
            const std::string list_path = path + "/allowed_senders";
            const json& list = Require(v, "allowed_senders", path);
            CommPartnersAttr attr;
            attr.allowed_senders = NameList(list, list_path);
            CheckNamesInArray(entities, list, list_path);
            return attr;
          }));
  registry.Register(
      std::string(NotCommWithInvariant::kId),
      MakeFactory<NotCommWithInvariant>(
          [](const Entities& entities, const json& v, const std::string& path) {
            RequireObject(v, path);
            RejectUnknownKeys(v, {"forbidden"}, path);
            const std::string list_path = path + "/forbidden";
            const json& list = Require(v, "forbidden", path);
            NotCommWithAttr attr;
            attr.forbidden = NameList(list, list_path);
            CheckNamesInArray(entities, list, list_path);
            return attr;
          }));
  return registry;
}

}  // namespace

TemplateRegistry& TemplateRegistry::Default() {
  static TemplateRegistry registry = MakeDefaultRegistry();
  return registry;
}

void TemplateRegistry::Register(std::string id, Factory factory) {
  factories_[std::move(id)] = std::move(factory);
}

bool TemplateRegistry::Contains(std::string_view id) const {
  return factories_.find(id) != factories_.end();
}

std::vector<std::string> TemplateRegistry::Ids() const {
  std::vector<std::string> ids;
  for (const auto& [id, _] : factories_) ids.push_back(id);
  return ids;
}

InvariantPtr TemplateRegistry::Instantiate(std::string_view id,
                                           const EntitiesPtr& entities,
                                           const json& attrs, std::string label,
                                           const std::string& path) const {
  auto it = factories_.find(id);
  if (it == factories_.end()) {
    Fail("unknown template '" + std::string(id) + "'", path);
  }
  return it->second(entities, attrs, std::move(label), path);
}

namespace {

std::vector<std::string> ParseEntities(const json& doc) {
  const json& list = Require(doc, "entities", "");
  RequireArray(list, "/entities");
  std::vector<std::string> names;
  for (std::size_t i = 0; i < list.size(); ++i) {
    names.push_back(AsString(list[i], "/entities/" + std::to_string(i)));
  }
  return names;
}

std::string DefaultLabel(const std::vector<InvariantSpec>& specs,
                         std::size_t index) {
  const std::string& id = specs[index].template_id;
  std::size_t same = 0;
  for (const auto& s : specs) same += s.template_id == id;
  return same == 1 ? id : id + "#" + std::to_string(index);
}

std::pair<std::string, std::string> ParseEdgeRef(const json& j,
                                                 const std::string& path,
                                                 const Entities& entities) {
  RequireObject(j, path);
  std::string from = AsString(Require(j, "from", path), path + "/from");
  std::string to = AsString(Require(j, "to", path), path + "/to");
  if (!entities.Find(from)) Fail("unknown entity '" + from + "'", path + "/from");
  if (!entities.Find(to)) Fail("unknown entity '" + to + "'", path + "/to");
  if (from == to) Fail("self-loop on '" + from + "'", path);
  return {std::move(from), std::move(to)};
}

HostBinding ParseBinding(const json& j, const std::string& path) {
  RequireObject(j, path);
  RejectUnknownKeys(j, {"ipv4", "mac", "port", "iface", "external"}, path);
  HostBinding b;
  if (j.contains("ipv4")) b.ipv4 = AsString(j["ipv4"], path + "/ipv4");
  if (j.contains("mac")) b.mac = AsString(j["mac"], path + "/mac");
  if (j.contains("iface")) b.iface = AsString(j["iface"], path + "/iface");
  if (j.contains("port")) {
    const json& p = j["port"];
    if (!p.is_number_integer() || p.get<long long>() < 0 ||
        p.get<long long>() > 0xFFFFFFFFLL) {
      Fail("port must be a non-negative integer", path + "/port");
    }
    b.switch_port = p.get<std::uint32_t>();
  }
  if (j.contains("external")) {
    if (!j["external"].is_boolean()) {
      Fail("external must be a boolean", path + "/external");
    }
    b.external = j["external"].get<bool>();
  }
  return b;
}

}  // namespace

Scenario ParseScenarioJson(const json& doc) {
  RequireObject(doc, "");
  RejectUnknownKeys(doc,
                    {"entities", "invariants", "deployment", "refinements",
                     "stateful_preferences"},
                    "");
  Scenario scenario;
  scenario.entities = ParseEntities(doc);
  const EntitiesPtr entities = Entities::Create(scenario.entities);

  if (doc.contains("invariants")) {
    const json& list = doc["invariants"];
    RequireArray(list, "/invariants");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string path = "/invariants/" + std::to_string(i);
      const json& item = list[i];
      RequireObject(item, path);
      RejectUnknownKeys(item, {"template", "label", "attrs"}, path);
      InvariantSpec spec;
      spec.template_id =
          AsString(Require(item, "template", path), path + "/template");
      if (!TemplateRegistry::Default().Contains(spec.template_id)) {
        Fail("unknown template '" + spec.template_id + "'", path + "/template");
      }
      if (item.contains("label")) {
        spec.label = AsString(item["label"], path + "/label");
      }
      if (item.contains("attrs")) spec.attrs = item["attrs"];
      // Instantiating validates attribute values and entity references.
      TemplateRegistry::Default().Instantiate(spec.template_id, entities,
                                              spec.attrs, "", path + "/attrs");
      scenario.invariants.push_back(std::move(spec));
    }
  }

  if (doc.contains("deployment")) {
    const json& dep = doc["deployment"];
    RequireObject(dep, "/deployment");
    std::map<std::string, HostBinding> bindings;
    for (const auto& [name, value] : dep.items()) {
      bindings.emplace(name, ParseBinding(value, "/deployment/" + name));
    }
    DeploymentMap::Create(entities, bindings);  // validation only
    scenario.deployment = std::move(bindings);
  }

  if (doc.contains("refinements")) {
    const json& list = doc["refinements"];
    RequireArray(list, "/refinements");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string path = "/refinements/" + std::to_string(i);
      RequireObject(list[i], path);
      RejectUnknownKeys(list[i], {"op", "from", "to"}, path);
      const std::string op =
          AsString(Require(list[i], "op", path), path + "/op");
      if (op != "add" && op != "remove") {
        Fail("op must be \"add\" or \"remove\"", path + "/op");
      }
      auto [from, to] = ParseEdgeRef(list[i], path, *entities);
      scenario.refinements.push_back(
          {op == "add" ? RefinementEdit::Op::kAdd : RefinementEdit::Op::kRemove,
           std::move(from), std::move(to)});
    }
  }

  if (doc.contains("stateful_preferences")) {
    const json& list = doc["stateful_preferences"];
    RequireArray(list, "/stateful_preferences");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string path = "/stateful_preferences/" + std::to_string(i);
      RejectUnknownKeys(list[i], {"from", "to"}, path);
      auto [from, to] = ParseEdgeRef(list[i], path, *entities);
      scenario.stateful_preferences.push_back({std::move(from), std::move(to)});
    }
  }
  return scenario;
}

Scenario ParseScenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    Fail(std::string("invalid JSON: ") + e.what(), "");
  }
  return ParseScenarioJson(doc);
}

Scenario LoadScenarioFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::kScenario, "cannot read scenario file '" + path + "'");
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseScenario(buffer.str());
}

json ScenarioToJson(const Scenario& scenario) {
  json doc;
  doc["entities"] = scenario.entities;
  json invariants = json::array();
  for (const auto& spec : scenario.invariants) {
    json item{{"template", spec.template_id}, {"attrs", spec.attrs}};
    if (spec.label) item["label"] = *spec.label;
    invariants.push_back(std::move(item));
  }
  doc["invariants"] = std::move(invariants);
  if (scenario.deployment) {
    json dep = json::object();
    for (const auto& [name, b] : *scenario.deployment) {
      json rec = json::object();
      if (b.ipv4) rec["ipv4"] = *b.ipv4;
      if (b.mac) rec["mac"] = *b.mac;
      if (b.switch_port) rec["port"] = *b.switch_port;
      if (b.iface) rec["iface"] = *b.iface;
      if (b.external) rec["external"] = true;
      dep[name] = std::move(rec);
    }
    doc["deployment"] = std::move(dep);
  }
  if (!scenario.refinements.empty()) {
    json list = json::array();
    for (const auto& edit : scenario.refinements) {
      list.push_back({{"op", edit.op == RefinementEdit::Op::kAdd ? "add" : "remove"},
                      {"from", edit.from},
                      {"to", edit.to}});
    }
    doc["refinements"] = std::move(list);
  }
  if (!scenario.stateful_preferences.empty()) {
    json list = json::array();
    for (const auto& e : scenario.stateful_preferences) {
      list.push_back({{"from", e.from}, {"to", e.to}});
    }
    doc["stateful_preferences"] = std::move(list);
  }
  return doc;
}

std::string WriteScenario(const Scenario& scenario) {
  return ScenarioToJson(scenario).dump(2) + "\n";
}

ScenarioInstance Instantiate(const Scenario& scenario) {
  ScenarioInstance instance;
  instance.entities = Entities::Create(scenario.entities);
  for (std::size_t i = 0; i < scenario.invariants.size(); ++i) {
    const InvariantSpec& spec = scenario.invariants[i];
    instance.invariants.push_back(TemplateRegistry::Default().Instantiate(
        spec.template_id, instance.entities, spec.attrs,
        spec.label.value_or(DefaultLabel(scenario.invariants, i)),
        "/invariants/" + std::to_string(i) + "/attrs"));
  }
  if (scenario.deployment) {
    instance.deployment =
        DeploymentMap::Create(instance.entities, *scenario.deployment);
  }
  for (const auto& pref : scenario.stateful_preferences) {
    instance.preferences.push_back({instance.entities->Lookup(pref.from),
                                    instance.entities->Lookup(pref.to)});
  }
  return instance;
}

}  // namespace polsynth
