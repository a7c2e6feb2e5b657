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

#ifndef POLSYNTH_SYNTHESIS_H_
#define POLSYNTH_SYNTHESIS_H_

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "polsynth/graph.h"
#include "polsynth/invariants.h"

namespace polsynth {

// Which check a report entry describes. Plain policy verification uses
// kPolicy; stateful verification reports one of the two consistency
// criteria depending on the invariant's SecurityKind.
enum class Criterion {
  kPolicy,
  kNoInformationFlowViolation,
  kNoAccessControlSideEffects,
};

std::string_view CriterionName(Criterion criterion);

struct InvariantResult {
  std::size_t index = 0;  // position in the invariant list
  std::string label;
  std::string template_id;
  SecurityKind kind = SecurityKind::kAccessControl;
  Criterion criterion = Criterion::kPolicy;
  bool holds = true;
  EdgeSet offending;  // empty whenever holds
};

struct VerificationReport {
  bool overall = true;  // conjunction of per_invariant[i].holds
  std::vector<InvariantResult> per_invariant;

  // Multi-line, human-readable rendering.
  std::string ToString(const Entities& entities) const;
};

struct RefinementEdit {
  enum class Op { kAdd, kRemove };
  Op op = Op::kAdd;
  std::string from;
  std::string to;

  static RefinementEdit Add(std::string from, std::string to) {
    return {Op::kAdd, std::move(from), std::move(to)};
  }
  static RefinementEdit Remove(std::string from, std::string to) {
    return {Op::kRemove, std::move(from), std::move(to)};
  }
  friend bool operator==(const RefinementEdit&, const RefinementEdit&) = default;
};

// Maximum-permissive policy satisfying `invariants`.
//
// Starts from allow-all. Φ-structured invariants are applied in a single
// pass over all pairs; the remaining invariants are then processed in list
// order, repeatedly removing the first offending set of the first violated
// invariant until every invariant holds. With only Φ-structured invariants
// the result is the unique maximum.
//
// Throws ErrorKind::kSynthesis when an invariant fails for the deny-all
// policy.
PolicyGraph ConstructPolicy(const EntitiesPtr& entities,
                            std::span<const InvariantPtr> invariants);

VerificationReport Verify(const PolicyGraph& graph,
                          std::span<const InvariantPtr> invariants);

// Applies `edits` in order (adding a present edge or removing an absent one
// is a no-op) and re-verifies. A failing result is returned, not rejected.
// Throws ErrorKind::kEdit for self-loops or unknown entities.
std::pair<PolicyGraph, VerificationReport> Refine(
    const PolicyGraph& graph, std::span<const RefinementEdit> edits,
    std::span<const InvariantPtr> invariants);

PolicyGraph ApplyEdits(const PolicyGraph& graph,
                       std::span<const RefinementEdit> edits);

}  // namespace polsynth

#endif  // POLSYNTH_SYNTHESIS_H_
