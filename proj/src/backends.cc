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

#include "polsynth/backends.h"

#include <charconv>
#include <set>
#include <sstream>

#include "polsynth/error.h"

namespace polsynth {

bool IsValidIpv4(std::string_view text) {
  int octets = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('.', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view part = text.substr(pos, end - pos);
    if (part.empty() || part.size() > 3) return false;
    unsigned value = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
    if (ec != std::errc() || ptr != part.data() + part.size() || value > 255) {
      return false;
    }
    ++octets;
    pos = end + 1;
  }
  return octets == 4;
}

bool IsValidMac(std::string_view text) {
  if (text.size() != 17) return false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (i % 3 == 2) {
      if (c != ':') return false;
    } else if (!std::isxdigit(static_cast<unsigned char>(c))) {
      return false;
    }
  }
  return true;
}

namespace {

bool IsWildcard(const std::optional<std::string>& value) {
  return !value || *value == "*";
}

}  // namespace

DeploymentMap DeploymentMap::Create(EntitiesPtr entities,
                                    std::map<std::string, HostBinding> bindings) {
  std::vector<HostBinding> by_id(entities->size());
  std::vector<bool> seen(entities->size(), false);
  std::map<std::string, std::string> ip_owner, mac_owner;

  for (auto& [name, binding] : bindings) {
    const std::string path = "/deployment/" + name;
    auto id = entities->Find(name);
    if (!id) {
      throw Error(ErrorKind::kScenario,
                  "deployment record for unknown entity '" + name + "'", path);
    }
    if (IsWildcard(binding.ipv4)) binding.ipv4.reset();
    if (IsWildcard(binding.mac)) binding.mac.reset();

    if (binding.external && (binding.ipv4 || binding.mac)) {
      throw Error(ErrorKind::kScenario,
                  "external entity '" + name + "' must use wildcard addresses",
                  path);
    }
    if (binding.ipv4) {
      if (!IsValidIpv4(*binding.ipv4)) {
        throw Error(ErrorKind::kScenario,
                    "malformed ipv4 '" + *binding.ipv4 + "'", path + "/ipv4");
      }
      auto [it, fresh] = ip_owner.emplace(*binding.ipv4, name);
      if (!fresh) {
        throw Error(ErrorKind::kScenario,
                    "ipv4 " + *binding.ipv4 + " bound to both '" + it->second +
                        "' and '" + name + "'",
                    path + "/ipv4");
      }
    }
    if (binding.mac) {
      if (!IsValidMac(*binding.mac)) {
        throw Error(ErrorKind::kScenario, "malformed mac '" + *binding.mac + "'",
                    path + "/mac");
      }
      auto [it, fresh] = mac_owner.emplace(*binding.mac, name);
      if (!fresh) {
        throw Error(ErrorKind::kScenario,
                    "mac " + *binding.mac + " bound to both '" + it->second +
                        "' and '" + name + "'",
                    path + "/mac");
      }
    }
    by_id[*id] = std::move(binding);
    seen[*id] = true;
  }
  for (EntityId i = 0; i < seen.size(); ++i) {
    if (!seen[i]) {
      throw Error(ErrorKind::kScenario,
                  "entity '" + entities->name(i) + "' has no deployment record",
                  "/deployment");
    }
  }
  return DeploymentMap(std::move(entities), std::move(by_id));
}

namespace {

std::string IptablesAddress(const DeploymentMap& dep, EntityId id) {
  const auto& ip = dep.at(id).ipv4;
  return ip ? *ip : "$" + dep.entities().name(id) + "_ipv4";
}

const std::string& Iface(const DeploymentMap& dep, EntityId id) {
  const auto& iface = dep.at(id).iface;
  if (!iface || iface->empty()) {
    throw Error(ErrorKind::kSerialization,
                "entity '" + dep.entities().name(id) + "' has no interface");
  }
  return *iface;
}

}  // namespace

std::string EmitIptables(const StatefulPolicy& policy, const DeploymentMap& dep) {
  std::ostringstream out;
  out << "FORWARD DROP\n";
  for (const Edge& e : policy.graph().edges()) {
    out << "-A FORWARD -i " << Iface(dep, e.sender) << " -s "
        << IptablesAddress(dep, e.sender) << " -o " << Iface(dep, e.receiver)
        << " -d " << IptablesAddress(dep, e.receiver) << " -j ACCEPT\n";
  }
  for (const Edge& e : policy.stateful()) {
    out << "-I FORWARD -m state --state ESTABLISHED -i "
        << Iface(dep, e.receiver) << " -s " << IptablesAddress(dep, e.receiver)
        << " -o " << Iface(dep, e.sender) << " -d "
        << IptablesAddress(dep, e.sender) << " -j ACCEPT\n";
  }
  return out.str();
}

std::string FlowEntry::ToString() const {
  return match + " priority=" + std::to_string(priority) + " action=" + action;
}

namespace {

struct Endpoint {
  std::string mac;  // "*" when external
  std::string ip;   // "*" when external
  std::string port;
  bool external = false;
};

Endpoint ResolveEndpoint(const DeploymentMap& dep, EntityId id) {
  const HostBinding& b = dep.at(id);
  const std::string& name = dep.entities().name(id);
  if (!b.switch_port) {
    throw Error(ErrorKind::kSerialization,
                "entity '" + name + "' has no switch port");
  }
  Endpoint ep;
  ep.port = std::to_string(*b.switch_port);
  ep.external = b.external;
  if (b.external) {
    ep.mac = "*";
    ep.ip = "*";
    return ep;
  }
  if (!b.mac || !b.ipv4) {
    throw Error(ErrorKind::kSerialization,
                "entity '" + name + "' needs a concrete mac and ipv4");
  }
  ep.mac = *b.mac;
  ep.ip = *b.ipv4;
  return ep;
}

std::string ForwardAction(const Endpoint& dst) {
  if (dst.external) return "output:" + dst.port;
  return "mod_dl_dst:" + dst.mac + ",output:" + dst.port;
}

}  // namespace

std::vector<FlowEntry> FlowEntriesFor(Edge flow, const DeploymentMap& dep) {
  const Endpoint src = ResolveEndpoint(dep, flow.sender);
  const Endpoint dst = ResolveEndpoint(dep, flow.receiver);
  const int externals = int{src.external} + int{dst.external};
  const int priority = externals == 0   ? kInternalPriority
                       : externals == 1 ? kOneExternalPriority
                                        : kBothExternalPriority;
  std::vector<FlowEntry> entries;
  if (externals == 0) {
    entries.push_back({"in_port=" + src.port + " dl_src=" + src.mac +
                           " dl_dst=ff:ff:ff:ff:ff:ff arp arp_sha=" + src.mac +
                           " arp_spa=" + src.ip + " arp_tpa=" + dst.ip,
                       priority, ForwardAction(dst)});
    entries.push_back({"dl_src=" + dst.mac + " dl_dst=" + src.mac +
                           " arp arp_sha=" + dst.mac + " arp_spa=" + dst.ip +
                           " arp_tpa=" + src.ip,
                       priority, "output:" + src.port});
  }
  entries.push_back({"in_port=" + src.port + " dl_src=" + src.mac +
                         " ip nw_src=" + src.ip + " nw_dst=" + dst.ip,
                     priority, ForwardAction(dst)});
  return entries;
}

std::vector<FlowEntry> OpenFlowEntries(const StatefulPolicy& policy,
                                       const DeploymentMap& dep) {
  std::vector<FlowEntry> entries;
  auto append = [&](Edge flow) {
    for (auto& entry : FlowEntriesFor(flow, dep)) entries.push_back(std::move(entry));
  };
  for (const Edge& e : policy.graph().edges()) append(e);
  for (const Edge& e : policy.stateful()) append(e.reversed());
  return entries;
}

std::string EmitOpenFlow(const StatefulPolicy& policy, const DeploymentMap& dep) {
  const Entities& names = policy.graph().entities();
  std::ostringstream out;
  out << "# Load with: ovs-vsctl set-fail-mode $switch secure && "
         "ovs-ofctl add-flows $switch <this file>\n"
      << "# No table-miss entry: unmatched packets are dropped.\n"
      << "# Note: ARP is answered by the hosts themselves, which leaves a small\n"
      << "# hidden channel through ARP responses. Answering ARP from a\n"
      << "# controller removes it.\n";
  auto emit_flow = [&](Edge flow, const std::string& note) {
    out << "# " << names.name(flow.sender) << " -> " << names.name(flow.receiver)
        << note << "\n";
    for (const FlowEntry& entry : FlowEntriesFor(flow, dep)) {
      out << entry.ToString() << "\n";
    }
  };
  for (const Edge& e : policy.graph().edges()) emit_flow(e, "");
  for (const Edge& e : policy.stateful()) {
    emit_flow(e.reversed(), " (answers to stateful " + names.name(e.sender) +
                                " -> " + names.name(e.receiver) + ")");
  }
  return out.str();
}

namespace {

std::string DotId(const std::string& name) {
  std::string out = "\"";
  for (char c : name) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string EmitDot(const StatefulPolicy& policy) {
  const Entities& names = policy.graph().entities();
  std::ostringstream out;
  out << "digraph policy {\n";
  for (const std::string& n : names.names()) out << "  " << DotId(n) << ";\n";
  for (const Edge& e : policy.graph().edges()) {
    out << "  " << DotId(names.name(e.sender)) << " -> "
        << DotId(names.name(e.receiver));
    if (policy.stateful().contains(e)) out << " [dir=both]";
    out << ";\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace polsynth
