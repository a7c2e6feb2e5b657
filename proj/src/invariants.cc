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

#include "polsynth/invariants.h"

#include <string>

namespace polsynth {

std::string_view SecurityKindName(SecurityKind kind) {
  return kind == SecurityKind::kInformationFlow ? "IFS" : "ACS";
}

bool Invariant::Allows(EntityId, EntityId) const {
  throw Error(ErrorKind::kUsage, "template '" + std::string(template_id()) +
                                     "' is not Φ-structured");
}

void Invariant::CheckGraph(const PolicyGraph& graph) const {
  if (graph.entities_ptr() == entities_ || graph.entities() == *entities_) {
    return;
  }
  for (const std::string& name : graph.entities().names()) {
    if (!entities_->Find(name)) {
      throw Error(ErrorKind::kScenario, "entity '" + name +
                                            "' has no attribute in invariant '" +
                                            label_ + "'");
    }
  }
  throw Error(ErrorKind::kScenario,
              "graph and invariant '" + label_ + "' disagree on entities");
}

bool Invariant::Holds(const PolicyGraph& graph) const {
  CheckGraph(graph);
  for (const Edge& e : graph.edges()) {
    if (!Allows(e.sender, e.receiver)) return false;
  }
  return true;
}

std::vector<EdgeSet> Invariant::OffendingFlows(const PolicyGraph& graph) const {
  CheckGraph(graph);
  EdgeSet offending;
  for (const Edge& e : graph.edges()) {
    if (!Allows(e.sender, e.receiver)) offending.insert(offending.end(), e);
  }
  if (offending.empty()) return {};
  return {std::move(offending)};
}

bool CheckDenyAll(const Invariant& invariant) {
  return invariant.Holds(PolicyGraph::Empty(invariant.entities_ptr()));
}

// Unassigned hosts may not reach members; gateways are reachable by all and
// may reach anyone.
bool SubnetsAllows(SubnetsAttr sender, SubnetsAttr receiver) {
  return !(sender == SubnetsAttr::kUnassigned &&
           receiver == SubnetsAttr::kMember);
}

bool SinkAllows(SinkAttr sender, SinkAttr) { return sender != SinkAttr::kSink; }

// Trusted hosts receive at any level and emit at level 0.
bool BlpAllows(const BlpAttr& sender, const BlpAttr& receiver) {
  if (receiver.trusted) return true;
  const int effective = sender.trusted ? 0 : sender.level;
  return effective <= receiver.level;
}

bool CommPartnersAllows(std::string_view sender_name,
                        const CommPartnersAttr& receiver) {
  if (!receiver.allowed_senders) return true;
  return receiver.allowed_senders->contains(std::string(sender_name));
}

std::string DescribeAttr(SubnetsAttr attr) {
  switch (attr) {
    case SubnetsAttr::kMember: return "member";
    case SubnetsAttr::kInboundGateway: return "inbound_gateway";
    case SubnetsAttr::kUnassigned: break;
  }
  return "unassigned";
}

std::string DescribeAttr(SinkAttr attr) {
  return attr == SinkAttr::kSink ? "sink" : "unassigned";
}

std::string DescribeAttr(const BlpAttr& attr) {
  std::string out = "level " + std::to_string(attr.level);
  if (attr.trusted) out += " (trusted)";
  return out;
}

namespace {

std::string JoinNames(const std::set<std::string>& names) {
  std::string out;
  for (const auto& n : names) {
    if (!out.empty()) out += ", ";
    out += n;
  }
  return out;
}

void ValidateNames(const Entities& entities, const std::set<std::string>& names,
                   const std::string& path) {
  std::size_t i = 0;
  for (const auto& n : names) {
    if (!entities.Find(n)) {
      throw Error(ErrorKind::kScenario, "unknown entity '" + n + "'",
                  path + "/" + std::to_string(i));
    }
    ++i;
  }
}

}  // namespace

std::string DescribeAttr(const CommPartnersAttr& attr) {
  if (!attr.allowed_senders) return "dont_care";
  return "master {" + JoinNames(*attr.allowed_senders) + "}";
}

std::string DescribeAttr(const NotCommWithAttr& attr) {
  return "forbidden {" + JoinNames(attr.forbidden) + "}";
}

void ValidateAttr(const Entities&, SubnetsAttr, const std::string&) {}
void ValidateAttr(const Entities&, SinkAttr, const std::string&) {}

void ValidateAttr(const Entities&, const BlpAttr& attr,
                  const std::string& path) {
  if (attr.level < 0) {
    throw Error(ErrorKind::kScenario, "security level must be non-negative",
                path + "/level");
  }
}

void ValidateAttr(const Entities& entities, const CommPartnersAttr& attr,
                  const std::string& path) {
  if (attr.allowed_senders) {
    ValidateNames(entities, *attr.allowed_senders, path + "/allowed_senders");
  }
}

void ValidateAttr(const Entities& entities, const NotCommWithAttr& attr,
                  const std::string& path) {
  ValidateNames(entities, attr.forbidden, path + "/forbidden");
}

bool SubnetsInvariant::Allows(EntityId sender, EntityId receiver) const {
  return SubnetsAllows(attr(sender), attr(receiver));
}

bool SinkInvariant::Allows(EntityId sender, EntityId receiver) const {
  return SinkAllows(attr(sender), attr(receiver));
}

bool BlpInvariant::Allows(EntityId sender, EntityId receiver) const {
  return BlpAllows(attr(sender), attr(receiver));
}

bool CommPartnersInvariant::Allows(EntityId sender, EntityId receiver) const {
  return CommPartnersAllows(entities().name(sender), attr(receiver));
}

bool NotCommWithInvariant::Holds(const PolicyGraph& graph) const {
  CheckGraph(graph);
  for (EntityId v = 0; v < attrs().size(); ++v) {
    if (attr(v).forbidden.empty()) continue;
    const auto reach = Reachable(graph, v);
    for (const auto& target : attr(v).forbidden) {
      if (reach.contains(entities().Lookup(target))) return false;
    }
  }
  return true;
}

std::vector<EdgeSet> NotCommWithInvariant::OffendingFlows(
    const PolicyGraph& graph) const {
  CheckGraph(graph);
  const PolicyGraph reversed(graph.entities_ptr(), ReverseEdges(graph.edges()));
  const std::size_t n = graph.num_nodes();
  EdgeSet offending;
  for (EntityId v = 0; v < n; ++v) {
    if (attr(v).forbidden.empty()) continue;
    auto from = Reachable(graph, v);
    for (const auto& target_name : attr(v).forbidden) {
      const EntityId t = entities().Lookup(target_name);
      if (!from.contains(t)) continue;
      // (u, w) lies on a walk v ~> t iff u is v or reachable from v, and
      // t is w or reachable from w.
      std::vector<bool> head(n, false), tail(n, false);
      head[v] = true;
      for (EntityId u : from) head[u] = true;
      tail[t] = true;
      for (EntityId w : Reachable(reversed, t)) tail[w] = true;
      for (const Edge& e : graph.edges()) {
        if (head[e.sender] && tail[e.receiver]) offending.insert(e);
      }
    }
  }
  if (offending.empty()) return {};
  return {std::move(offending)};
}

}  // namespace polsynth
