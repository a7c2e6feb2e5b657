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

#include "polsynth/graph.h"

#include <algorithm>
#include <deque>
#include <iterator>

#include "polsynth/error.h"

namespace polsynth {

std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kScenario: return "scenario";
    case ErrorKind::kLookup: return "lookup";
    case ErrorKind::kUsage: return "usage";
    case ErrorKind::kSynthesis: return "synthesis";
    case ErrorKind::kEdit: return "edit";
    case ErrorKind::kStructural: return "structural";
    case ErrorKind::kPrecondition: return "precondition";
    case ErrorKind::kOracle: return "oracle";
    case ErrorKind::kSerialization: return "serialization";
  }
  return "unknown";
}

Entities::Entities(std::vector<std::string> names) : names_(std::move(names)) {
  for (EntityId i = 0; i < names_.size(); ++i) index_.emplace(names_[i], i);
}

std::shared_ptr<const Entities> Entities::Create(std::vector<std::string> names) {
  if (names.empty()) {
    throw Error(ErrorKind::kScenario, "scenario declares no entities",
                "/entities");
  }
  std::set<std::string_view> seen;
  for (std::size_t i = 0; i < names.size(); ++i) {
    const std::string path = "/entities/" + std::to_string(i);
    if (names[i].empty()) {
      throw Error(ErrorKind::kScenario, "entity name must not be empty", path);
    }
    if (!seen.insert(names[i]).second) {
      throw Error(ErrorKind::kScenario,
                  "duplicate entity name '" + names[i] + "'", path);
    }
  }
  return std::shared_ptr<const Entities>(new Entities(std::move(names)));
}

const std::string& Entities::name(EntityId id) const {
  if (id >= names_.size()) {
    throw Error(ErrorKind::kLookup, "entity id " + std::to_string(id) +
                                        " out of range");
  }
  return names_[id];
}

std::optional<EntityId> Entities::Find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

EntityId Entities::Lookup(std::string_view name) const {
  if (auto id = Find(name)) return *id;
  throw Error(ErrorKind::kLookup, "unknown entity '" + std::string(name) + "'");
}

PolicyGraph::PolicyGraph(EntitiesPtr entities, EdgeSet edges)
    : entities_(std::move(entities)), edges_(std::move(edges)) {
  for (const Edge& e : edges_) {
    if (e.sender >= entities_->size() || e.receiver >= entities_->size()) {
      throw Error(ErrorKind::kScenario, "edge endpoint is not a policy entity");
    }
    if (e.sender == e.receiver) {
      throw Error(ErrorKind::kScenario,
                  "self-loop on '" + entities_->name(e.sender) + "'");
    }
  }
}

PolicyGraph PolicyGraph::Empty(EntitiesPtr entities) {
  return PolicyGraph(std::move(entities), {});
}

PolicyGraph PolicyGraph::Complete(EntitiesPtr entities) {
  EdgeSet all;
  const auto n = static_cast<EntityId>(entities->size());
  for (EntityId s = 0; s < n; ++s) {
    for (EntityId r = 0; r < n; ++r) {
      if (s != r) all.insert(all.end(), Edge{s, r});
    }
  }
  return PolicyGraph(std::move(entities), std::move(all));
}

std::string PolicyGraph::EdgeName(Edge e) const {
  return entities_->name(e.sender) + "->" + entities_->name(e.receiver);
}

PolicyGraph PolicyGraph::WithEdges(const EdgeSet& added) const {
  return PolicyGraph(entities_, Union(edges_, added));
}

PolicyGraph PolicyGraph::WithoutEdges(const EdgeSet& removed) const {
  return PolicyGraph(entities_, Difference(edges_, removed));
}

std::vector<std::vector<EntityId>> PolicyGraph::Successors() const {
  std::vector<std::vector<EntityId>> succ(num_nodes());
  for (const Edge& e : edges_) succ[e.sender].push_back(e.receiver);
  return succ;
}

PolicyGraph CompleteGraph(std::vector<std::string> names) {
  return PolicyGraph::Complete(Entities::Create(std::move(names)));
}

std::set<EntityId> Reachable(const PolicyGraph& graph, EntityId start) {
  if (start >= graph.num_nodes()) {
    throw Error(ErrorKind::kLookup,
                "entity id " + std::to_string(start) + " is not in the graph");
  }
  const auto succ = graph.Successors();
  std::vector<bool> seen(graph.num_nodes(), false);
  std::deque<EntityId> queue(succ[start].begin(), succ[start].end());
  std::set<EntityId> result;
  while (!queue.empty()) {
    EntityId v = queue.front();
    queue.pop_front();
    if (seen[v]) continue;
    seen[v] = true;
    result.insert(v);
    for (EntityId w : succ[v]) {
      if (!seen[w]) queue.push_back(w);
    }
  }
  return result;
}

std::set<EntityId> Reachable(const PolicyGraph& graph, std::string_view start) {
  return Reachable(graph, graph.entities().Lookup(start));
}

EdgeSet ReverseEdges(const EdgeSet& edges) {
  EdgeSet out;
  for (const Edge& e : edges) out.insert(e.reversed());
  return out;
}

EdgeSet Union(const EdgeSet& a, const EdgeSet& b) {
  EdgeSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                 std::inserter(out, out.end()));
  return out;
}

EdgeSet Difference(const EdgeSet& a, const EdgeSet& b) {
  EdgeSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::inserter(out, out.end()));
  return out;
}

std::string FormatEdges(const Entities& entities, const EdgeSet& edges) {
  std::string out;
  for (const Edge& e : edges) {
    if (!out.empty()) out += ", ";
    out += entities.name(e.sender) + "->" + entities.name(e.receiver);
  }
  return out;
}

}  // namespace polsynth
