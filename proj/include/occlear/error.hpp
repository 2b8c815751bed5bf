// Copyright 2026 The occlear Authors
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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace occlear {

// Broad failure categories. The CLI maps each to a distinct exit status.
enum class ErrorCode {
  kInvalidArgument = 2,  // bad config value, precondition violated by caller
  kInvalidData = 3,      // malformed or inconsistent input file contents
  kNotFound = 4,         // unknown token / class / missing file
  kIo = 5,               // read or write failure
  kNumeric = 6,          // divergence, degenerate statistics
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace occlear
