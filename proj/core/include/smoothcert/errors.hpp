// Copyright 2026 The Smoothcert Authors
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
#ifndef SMOOTHCERT_ERRORS_HPP_
#define SMOOTHCERT_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace smoothcert {

// Invalid parameters, malformed descriptors, empty inputs.
class DomainError : public std::invalid_argument {
 public:
  explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

// Distribution pair combination for which no divergence routine exists.
class UnsupportedPairError : public DomainError {
 public:
  explicit UnsupportedPairError(const std::string& what) : DomainError(what) {}
};

// Mechanism/relation combination without a known dominating pair.
class NoDominatingPairError : public DomainError {
 public:
  explicit NoDominatingPairError(const std::string& what) : DomainError(what) {}
};

// PLDs on different loss grids cannot be composed directly.
class IncompatibleGridError : public DomainError {
 public:
  explicit IncompatibleGridError(const std::string& what) : DomainError(what) {}
};

// Requested loss range truncates more probability mass than allowed.
class RangeTooSmallError : public DomainError {
 public:
  explicit RangeTooSmallError(const std::string& what) : DomainError(what) {}
};

// Profile queried outside the epsilon range it is defined on.
class ExtrapolationError : public DomainError {
 public:
  explicit ExtrapolationError(const std::string& what) : DomainError(what) {}
};

// A numeric routine failed to reach its accuracy target. Carries the error
// bound that was actually achieved.
class NumericFailureError : public std::runtime_error {
 public:
  NumericFailureError(const std::string& what, double achieved_error)
      : std::runtime_error(what), achieved_error_(achieved_error) {}
  double achieved_error() const { return achieved_error_; }

 private:
  double achieved_error_;
};

}  // namespace smoothcert

#endif  // SMOOTHCERT_ERRORS_HPP_
