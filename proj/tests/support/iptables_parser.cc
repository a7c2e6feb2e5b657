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

#include "support/iptables_parser.h"

#include <map>
#include <sstream>
#include <stdexcept>

namespace polsynth::testing {

std::vector<std::string> NormalizeRules(std::string_view text) {
  std::vector<std::string> joined;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (line.front() == '#') continue;
    if ((line.front() == ' ' || line.front() == '\t') && !joined.empty()) {
      joined.back() += " " + line;
    } else {
      joined.push_back(line);
    }
  }
  for (auto& line : joined) {
    std::istringstream words(line);
    std::string out, w;
    while (words >> w) out += (out.empty() ? "" : " ") + w;
    line = out;
  }
  return joined;
}

namespace {

std::map<std::string, std::string> Options(const std::vector<std::string>& words,
                                           std::size_t start) {
  std::map<std::string, std::string> opts;
  for (std::size_t i = start; i + 1 < words.size(); i += 2) {
    if (!opts.emplace(words[i], words[i + 1]).second) {
      throw std::runtime_error("repeated option " + words[i]);
    }
  }
  if ((words.size() - start) % 2 != 0) throw std::runtime_error("dangling option");
  return opts;
}

}  // namespace

ParsedRuleset ParseIptables(std::string_view text, const DeploymentMap& dep) {
  const Entities& entities = dep.entities();
  std::map<std::string, EntityId> by_address;
  for (EntityId i = 0; i < entities.size(); ++i) {
    const auto& ip = dep.at(i).ipv4;
    by_address[ip ? *ip : "$" + entities.name(i) + "_ipv4"] = i;
  }
  auto resolve = [&](const std::string& addr, const std::string& iface) {
    auto it = by_address.find(addr);
    if (it == by_address.end()) throw std::runtime_error("unknown address " + addr);
    if (dep.at(it->second).iface != iface) {
      throw std::runtime_error("interface mismatch for " + addr);
    }
    return it->second;
  };

  ParsedRuleset out;
  for (const std::string& line : NormalizeRules(text)) {
    std::istringstream in(line);
    std::vector<std::string> words;
    for (std::string w; in >> w;) words.push_back(w);
    if (words == std::vector<std::string>{"FORWARD", "DROP"}) {
      out.drop_policy = true;
      continue;
    }
    if (words.size() < 2 || words[1] != "FORWARD") {
      throw std::runtime_error("unexpected line: " + line);
    }
    if (words[0] == "-A") {
      auto o = Options(words, 2);
      if (o.size() != 5 || o.at("-j") != "ACCEPT") {
        throw std::runtime_error("malformed -A rule: " + line);
      }
      Edge e{resolve(o.at("-s"), o.at("-i")), resolve(o.at("-d"), o.at("-o"))};
      if (!out.edges.insert(e).second) throw std::runtime_error("duplicate rule");
    } else if (words[0] == "-I") {
      auto o = Options(words, 2);
      if (o.size() != 7 || o.at("-m") != "state" ||
          o.at("--state") != "ESTABLISHED" || o.at("-j") != "ACCEPT") {
        throw std::runtime_error("malformed -I rule: " + line);
      }
      // The answer flow runs receiver -> sender of the stateful edge.
      Edge e{resolve(o.at("-d"), o.at("-o")), resolve(o.at("-s"), o.at("-i"))};
      if (!out.stateful.insert(e).second) throw std::runtime_error("duplicate rule");
    } else {
      throw std::runtime_error("unexpected line: " + line);
    }
  }
  for (const Edge& e : out.stateful) {
    if (!out.edges.contains(e)) {
      throw std::runtime_error("ESTABLISHED rule without ACCEPT rule");
    }
  }
  return out;
}

}  // namespace polsynth::testing
