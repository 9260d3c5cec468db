// Copyright 2026 The ChoiceBound Authors
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

#ifndef CHOICEBOUND_ERROR_HPP_
#define CHOICEBOUND_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace cb {

enum class ErrorCode {
  InvalidArgument,   // malformed input, bad flag combination
  Dimension,         // sizes that must agree do not
  TooLarge,          // an operation guarded by a size cap (e.g. N! enumeration)
  Numerical,         // solver gave up (iteration limit, pivot breakdown)
  Io,                // file not found / unreadable / unwritable
  Parse,             // malformed JSON/CSV content
};

/// Exception carrying a machine-readable code alongside the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace cb

#endif  // CHOICEBOUND_ERROR_HPP_
