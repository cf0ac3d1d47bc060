// Copyright 2026 The GETF Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GETF_ERROR_H_
#define GETF_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace getf {

enum class ErrorKind {
  kShape,
  kBounds,
  kMode,
  kPermutation,
  kArity,
  kParameter,
  kPrecondition,
  kEmptyTensor,
  kNoRegion,
  kDegenerateFiber,
  kBudget,
  kSpec,
  kParse,
  kIo,
};

std::string_view ErrorKindName(ErrorKind kind);

// Every failure raised by the library carries a kind so callers (and the
// CLI exit-code mapping) can branch without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(ErrorKindName(kind)) + " error: " +
                           message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace getf

#endif  // GETF_ERROR_H_
