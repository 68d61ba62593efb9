// Copyright 2026 The ECQP Authors
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

#ifndef ECQP_ERROR_HPP_
#define ECQP_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace ecqp {

enum class ErrorKind {
  kInput,      // malformed or assumption-violating input
  kNumerical,  // factorization breakdown or solver failure
  kInvariant,  // a certified property did not hold
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error InputError(const std::string& what) {
  return Error(ErrorKind::kInput, what);
}
inline Error NumericalError(const std::string& what) {
  return Error(ErrorKind::kNumerical, what);
}
inline Error InvariantError(const std::string& what) {
  return Error(ErrorKind::kInvariant, what);
}

}  // namespace ecqp

#endif  // ECQP_ERROR_HPP_
