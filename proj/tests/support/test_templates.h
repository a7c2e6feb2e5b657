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

#ifndef POLSYNTH_TESTS_SUPPORT_TEST_TEMPLATES_H_
#define POLSYNTH_TESTS_SUPPORT_TEST_TEMPLATES_H_

#include "polsynth/invariants.h"

namespace polsynth::testing {

// Holds only when at least one edge exists; violates the deny-all
// precondition on purpose.
class RequiresAnEdge final : public Invariant {
 public:
  using Invariant::Invariant;
  std::string_view template_id() const override { return "requires_an_edge"; }
  SecurityKind kind() const override { return SecurityKind::kAccessControl; }
  bool phi_structured() const override { return false; }
  bool Holds(const PolicyGraph& g) const override { return !g.edges().empty(); }
  std::vector<EdgeSet> OffendingFlows(const PolicyGraph&) const override {
    return {};
  }
  std::string DescribeAttribute(EntityId) const override { return ""; }
  bool IsDeclared(EntityId) const override { return false; }
};

}  // namespace polsynth::testing

#endif  // POLSYNTH_TESTS_SUPPORT_TEST_TEMPLATES_H_
