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

#ifndef POLSYNTH_BACKENDS_H_
#define POLSYNTH_BACKENDS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "polsynth/graph.h"
#include "polsynth/stateful.h"

namespace polsynth {

// Network identity of one policy entity. Unset addresses are wildcards for
// external entities and `$<Name>_ipv4` placeholders in iptables output.
struct HostBinding {
  std::optional<std::string> ipv4;
  std::optional<std::string> mac;
  std::optional<std::uint32_t> switch_port;
  std::optional<std::string> iface;
  bool external = false;

  friend bool operator==(const HostBinding&, const HostBinding&) = default;
};

// One-to-one binding of policy entities to network identities.
class DeploymentMap {
 public:
  // Throws ErrorKind::kScenario when an entity lacks a record, a record names
  // an unknown entity, an address is malformed, an external entity carries
  // a concrete address, or two entities share an address.
  static DeploymentMap Create(EntitiesPtr entities,
                              std::map<std::string, HostBinding> bindings);

  const HostBinding& at(EntityId id) const { return bindings_.at(id); }
  const Entities& entities() const { return *entities_; }

 private:
  DeploymentMap(EntitiesPtr entities, std::vector<HostBinding> bindings)
      : entities_(std::move(entities)), bindings_(std::move(bindings)) {}

  EntitiesPtr entities_;
  std::vector<HostBinding> bindings_;
};

bool IsValidIpv4(std::string_view text);
bool IsValidMac(std::string_view text);

// iptables FORWARD rules: the DROP policy, one ACCEPT per policy edge, and
// one ESTABLISHED ACCEPT per stateful edge with reversed endpoints. Throws
// ErrorKind::kSerialization if an endpoint has no interface.
std::string EmitIptables(const StatefulPolicy& policy, const DeploymentMap& dep);

struct FlowEntry {
  std::string match;  // everything before priority=
  int priority = 0;
  std::string action;  // everything after action=

  std::string ToString() const;
};

inline constexpr int kInternalPriority = 40000;
inline constexpr int kOneExternalPriority = 30000;
inline constexpr int kBothExternalPriority = 20000;

// Flow entries for one directed flow: ARP request, ARP reply, and IPv4, the
// ARP pair omitted when either endpoint is external.
std::vector<FlowEntry> FlowEntriesFor(Edge flow, const DeploymentMap& dep);

// All entries: every policy edge in canonical order, then the swapped
// direction of every stateful edge. Throws ErrorKind::kSerialization when a
// non-external endpoint lacks mac, ipv4, or switch port, or any endpoint
// lacks a switch port.
std::vector<FlowEntry> OpenFlowEntries(const StatefulPolicy& policy,
                                       const DeploymentMap& dep);

// add-flows text with `#` comments.
std::string EmitOpenFlow(const StatefulPolicy& policy, const DeploymentMap& dep);

std::string EmitDot(const StatefulPolicy& policy);

}  // namespace polsynth

#endif  // POLSYNTH_BACKENDS_H_
