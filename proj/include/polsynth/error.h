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

#ifndef POLSYNTH_ERROR_H_
#define POLSYNTH_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace polsynth {

enum class ErrorKind {
  kScenario,       // malformed or inconsistent scenario input
  kLookup,         // unknown entity
  kUsage,          // API misuse, e.g. Phi on a non-Φ template
  kSynthesis,      // deny-all precondition violated
  kEdit,           // invalid refinement edit
  kStructural,     // stateful set not a subset of the policy edges
  kPrecondition,   // input policy fails verification
  kOracle,         // brute-force guard exceeded
  kSerialization,  // deployment map cannot express the policy
};

std::string_view ErrorKindName(ErrorKind kind);

// All errors raised by the library. `path` is a JSON pointer into the
// scenario document when the error originates there, empty otherwise.
// `stage` names the pipeline stage and is filled in by the pipeline driver.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message, std::string path = "")
      : std::runtime_error(std::move(message)),
        kind_(kind),
        path_(std::move(path)) {}

  ErrorKind kind() const { return kind_; }
  const std::string& path() const { return path_; }
  const std::string& stage() const { return stage_; }
  void set_stage(std::string stage) { stage_ = std::move(stage); }

 private:
  ErrorKind kind_;
  std::string path_;
  std::string stage_;
};

}  // namespace polsynth

#endif  // POLSYNTH_ERROR_H_
