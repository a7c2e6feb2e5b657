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

#ifndef POLSYNTH_INVARIANTS_H_
#define POLSYNTH_INVARIANTS_H_

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "polsynth/error.h"
#include "polsynth/graph.h"

namespace polsynth {

// Information-flow invariants constrain who may learn data, so answer flows
// matter. Access-control invariants constrain who may initiate access.
enum class SecurityKind { kInformationFlow, kAccessControl };

std::string_view SecurityKindName(SecurityKind kind);

// A security invariant instantiated for one scenario: a template plus a
// total, auto-completed attribute map over the scenario's entities.
//
// Templates whose semantics are a per-edge predicate over sender and
// receiver attributes are Φ-structured; they override `Allows` and inherit
// `Holds` and `OffendingFlows`. Other templates override those two.
class Invariant {
 public:
  Invariant(EntitiesPtr entities, std::string label)
      : entities_(std::move(entities)), label_(std::move(label)) {}
  virtual ~Invariant() = default;

  virtual std::string_view template_id() const = 0;
  virtual SecurityKind kind() const = 0;
  virtual bool phi_structured() const = 0;

  // The per-edge predicate. Throws ErrorKind::kUsage on non-Φ templates.
  virtual bool Allows(EntityId sender, EntityId receiver) const;

  // Throws ErrorKind::kScenario if `graph` is over different entities.
  virtual bool Holds(const PolicyGraph& graph) const;

  // Candidate edge sets whose removal restores the invariant. Empty iff the
  // invariant holds.
  virtual std::vector<EdgeSet> OffendingFlows(const PolicyGraph& graph) const;

  // Human-readable completed attribute of `id`.
  virtual std::string DescribeAttribute(EntityId id) const = 0;
  // False when the attribute came from auto-completion.
  virtual bool IsDeclared(EntityId id) const = 0;

  const std::string& label() const { return label_; }
  const Entities& entities() const { return *entities_; }
  const EntitiesPtr& entities_ptr() const { return entities_; }

 protected:
  void CheckGraph(const PolicyGraph& graph) const;

 private:
  EntitiesPtr entities_;
  std::string label_;
};

using InvariantPtr = std::shared_ptr<const Invariant>;
using InvariantList = std::vector<InvariantPtr>;

// True iff `invariant` holds for the deny-all policy over its entities.
bool CheckDenyAll(const Invariant& invariant);

// Template attributes. Value-initialized attributes are the secure defaults
// given to hosts the user left unlabeled.

enum class SubnetsAttr { kUnassigned, kMember, kInboundGateway };

enum class SinkAttr { kUnassigned, kSink };

struct BlpAttr {
  int level = 0;  // 0 unclassified, 1 confidential, ...
  bool trusted = false;
  friend bool operator==(const BlpAttr&, const BlpAttr&) = default;
};

// nullopt: DontCare. Otherwise the host is a master accepting only the
// listed senders.
struct CommPartnersAttr {
  std::optional<std::set<std::string>> allowed_senders;
  friend bool operator==(const CommPartnersAttr&,
                         const CommPartnersAttr&) = default;
};

struct NotCommWithAttr {
  std::set<std::string> forbidden;
  friend bool operator==(const NotCommWithAttr&,
                         const NotCommWithAttr&) = default;
};

// Per-edge predicates of the Φ-structured templates.
bool SubnetsAllows(SubnetsAttr sender, SubnetsAttr receiver);
bool SinkAllows(SinkAttr sender, SinkAttr receiver);
bool BlpAllows(const BlpAttr& sender, const BlpAttr& receiver);
bool CommPartnersAllows(std::string_view sender_name,
                        const CommPartnersAttr& receiver);

std::string DescribeAttr(SubnetsAttr attr);
std::string DescribeAttr(SinkAttr attr);
std::string DescribeAttr(const BlpAttr& attr);
std::string DescribeAttr(const CommPartnersAttr& attr);
std::string DescribeAttr(const NotCommWithAttr& attr);

// Attribute values naming other hosts must name scenario entities.
void ValidateAttr(const Entities&, SubnetsAttr, const std::string&);
void ValidateAttr(const Entities&, SinkAttr, const std::string&);
void ValidateAttr(const Entities&, const BlpAttr& attr, const std::string& path);
void ValidateAttr(const Entities& entities, const CommPartnersAttr& attr,
                  const std::string& path);
void ValidateAttr(const Entities& entities, const NotCommWithAttr& attr,
                  const std::string& path);

// Partial attribute map as written by the user, keyed by entity name.
template <typename Attr>
using DeclaredAttrs = std::map<std::string, Attr, std::less<>>;

// Extends `declared` to every entity, giving unlabeled hosts the secure
// default. Throws ErrorKind::kScenario (with a path below `path_prefix`) on
// keys or attribute values that name unknown entities.
template <typename Attr>
std::vector<Attr> AutoComplete(const Entities& entities,
                               const DeclaredAttrs<Attr>& declared,
                               const std::string& path_prefix = "") {
  std::vector<Attr> total(entities.size(), Attr{});
  for (const auto& [name, attr] : declared) {
    const std::string path = path_prefix + "/" + name;
    auto id = entities.Find(name);
    if (!id) {
      throw Error(ErrorKind::kScenario,
                  "attribute assigned to unknown entity '" + name + "'", path);
    }
    ValidateAttr(entities, attr, path);
    total[*id] = attr;
  }
  return total;
}

// Attribute-map view of an auto-completed instance.
template <typename Attr>
class AttributedInvariant : public Invariant {
 public:
  using attr_type = Attr;

  AttributedInvariant(EntitiesPtr entities, DeclaredAttrs<Attr> declared,
                      std::string label, const std::string& path_prefix)
      : Invariant(std::move(entities), std::move(label)),
        attrs_(AutoComplete(this->entities(), declared, path_prefix)),
        declared_(std::move(declared)) {}

  const std::vector<Attr>& attrs() const { return attrs_; }
  const Attr& attr(EntityId id) const { return attrs_.at(id); }
  const DeclaredAttrs<Attr>& declared() const { return declared_; }

  std::string DescribeAttribute(EntityId id) const override {
    return DescribeAttr(attrs_.at(id));
  }
  bool IsDeclared(EntityId id) const override {
    return declared_.contains(entities().name(id));
  }

 private:
  std::vector<Attr> attrs_;
  DeclaredAttrs<Attr> declared_;
};

class SubnetsInvariant final : public AttributedInvariant<SubnetsAttr> {
 public:
  static constexpr std::string_view kId = "subnets";
  using AttributedInvariant::AttributedInvariant;
  std::string_view template_id() const override { return kId; }
  SecurityKind kind() const override { return SecurityKind::kAccessControl; }
  bool phi_structured() const override { return true; }
  bool Allows(EntityId sender, EntityId receiver) const override;
};

class SinkInvariant final : public AttributedInvariant<SinkAttr> {
 public:
  static constexpr std::string_view kId = "sink";
  using AttributedInvariant::AttributedInvariant;
  std::string_view template_id() const override { return kId; }
  SecurityKind kind() const override { return SecurityKind::kInformationFlow; }
  bool phi_structured() const override { return true; }
  bool Allows(EntityId sender, EntityId receiver) const override;
};

class BlpInvariant final : public AttributedInvariant<BlpAttr> {
 public:
  static constexpr std::string_view kId = "blp";
  using AttributedInvariant::AttributedInvariant;
  std::string_view template_id() const override { return kId; }
  SecurityKind kind() const override { return SecurityKind::kInformationFlow; }
  bool phi_structured() const override { return true; }
  bool Allows(EntityId sender, EntityId receiver) const override;
};

class CommPartnersInvariant final
    : public AttributedInvariant<CommPartnersAttr> {
 public:
  static constexpr std::string_view kId = "comm_partners";
  using AttributedInvariant::AttributedInvariant;
  std::string_view template_id() const override { return kId; }
  SecurityKind kind() const override { return SecurityKind::kAccessControl; }
  bool phi_structured() const override { return true; }
  bool Allows(EntityId sender, EntityId receiver) const override;
};

// Transitive blacklist: no host may reach (over any path) a host in its
// forbidden set.
class NotCommWithInvariant final : public AttributedInvariant<NotCommWithAttr> {
 public:
  static constexpr std::string_view kId = "not_comm_with";
  using AttributedInvariant::AttributedInvariant;
  std::string_view template_id() const override { return kId; }
  SecurityKind kind() const override { return SecurityKind::kAccessControl; }
  bool phi_structured() const override { return false; }
  bool Holds(const PolicyGraph& graph) const override;
  // A single candidate: every edge lying on a walk from a restricted host to
  // one of its forbidden targets.
  std::vector<EdgeSet> OffendingFlows(const PolicyGraph& graph) const override;
};

template <typename T>
InvariantPtr MakeInvariant(EntitiesPtr entities,
                           DeclaredAttrs<typename T::attr_type> declared,
                           std::string label = "",
                           const std::string& path_prefix = "") {
  return std::make_shared<const T>(std::move(entities), std::move(declared),
                                   std::move(label), path_prefix);
}

}  // namespace polsynth

#endif  // POLSYNTH_INVARIANTS_H_
