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

#ifndef POLSYNTH_GRAPH_H_
#define POLSYNTH_GRAPH_H_

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace polsynth {

// Index of an entity within its `Entities` table. Ids follow declaration
// order, which is also the canonical order of every serialized edge list.
using EntityId = std::uint32_t;

// A directed flow from `sender` to `receiver`. Ordering is (sender, receiver)
// by declaration index.
struct Edge {
  EntityId sender = 0;
  EntityId receiver = 0;

  Edge reversed() const { return {receiver, sender}; }
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

using EdgeSet = std::set<Edge>;

// The named policy entities of a scenario. Immutable; shared between every
// graph and invariant built from the same scenario.
class Entities {
 public:
  // Throws ErrorKind::kScenario on an empty list, an empty name, or a
  // duplicate name.
  static std::shared_ptr<const Entities> Create(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  const std::string& name(EntityId id) const;
  const std::vector<std::string>& names() const { return names_; }

  std::optional<EntityId> Find(std::string_view name) const;
  // Throws ErrorKind::kLookup for unknown names.
  EntityId Lookup(std::string_view name) const;

  bool operator==(const Entities& other) const { return names_ == other.names_; }

 private:
  explicit Entities(std::vector<std::string> names);

  std::vector<std::string> names_;
  std::unordered_map<std::string, EntityId> index_;
};

using EntitiesPtr = std::shared_ptr<const Entities>;

// A directed, irreflexive graph over a scenario's entities: the access
// control matrix.
class PolicyGraph {
 public:
  // Throws ErrorKind::kScenario if an edge is a self-loop or references an
  // id outside `entities`.
  PolicyGraph(EntitiesPtr entities, EdgeSet edges);

  // Deny-all policy.
  static PolicyGraph Empty(EntitiesPtr entities);
  // Allow-all policy: every ordered pair of distinct entities.
  static PolicyGraph Complete(EntitiesPtr entities);

  const EntitiesPtr& entities_ptr() const { return entities_; }
  const Entities& entities() const { return *entities_; }
  const EdgeSet& edges() const& { return edges_; }
  // By value on temporaries so `for (e : MakeGraph().edges())` is safe.
  EdgeSet edges() && { return std::move(edges_); }
  std::size_t num_nodes() const { return entities_->size(); }

  bool Contains(Edge e) const { return edges_.contains(e); }
  std::string EdgeName(Edge e) const;

  PolicyGraph WithEdges(const EdgeSet& added) const;
  PolicyGraph WithoutEdges(const EdgeSet& removed) const;

  // Out-neighbour lists indexed by sender id, in canonical order.
  std::vector<std::vector<EntityId>> Successors() const;

  friend bool operator==(const PolicyGraph& a, const PolicyGraph& b) {
    return *a.entities_ == *b.entities_ && a.edges_ == b.edges_;
  }

 private:
  EntitiesPtr entities_;
  EdgeSet edges_;
};

// Allow-all policy over freshly validated entity names.
PolicyGraph CompleteGraph(std::vector<std::string> names);

// Entities reachable from `start` over one or more edges. `start` itself is
// included only when it lies on a cycle. Throws ErrorKind::kLookup if
// `start` is not a node of `graph`.
std::set<EntityId> Reachable(const PolicyGraph& graph, EntityId start);
std::set<EntityId> Reachable(const PolicyGraph& graph, std::string_view start);

// {(r, s) : (s, r) in edges}.
EdgeSet ReverseEdges(const EdgeSet& edges);

EdgeSet Union(const EdgeSet& a, const EdgeSet& b);
EdgeSet Difference(const EdgeSet& a, const EdgeSet& b);

// "A->B, B->C" style rendering with entity names, canonical order.
std::string FormatEdges(const Entities& entities, const EdgeSet& edges);

}  // namespace polsynth

#endif  // POLSYNTH_GRAPH_H_
