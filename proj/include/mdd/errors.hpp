// Copyright 2026 The MDD Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mdd {

/// Invalid argument or violated precondition.
struct ArgumentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A numerical routine failed to reach its tolerance.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Requested point or constraint set has no feasible solution.
struct FeasibilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed text input. `line()` is 1-based, 0 when unknown.
class ParseError : public std::runtime_error {
   public:
    ParseError(std::size_t line, const std::string &what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {
    }
    std::size_t line() const {
        return line_;
    }

   private:
    std::size_t line_;
};

}  // namespace mdd
