// Copyright 2026 The kbilqr Authors
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

#ifndef KBILQR_COMMON_H_
#define KBILQR_COMMON_H_

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace kbilqr {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// failure categories; the CLI maps each one to an exit code
enum class ErrorKind {
  kInvalidInput,
  kDimensionMismatch,
  kDegenerateData,
  kDivergence,
  kStalled,
  kGeneration,
  kIo,
  kUsage,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void Fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void CheckDims(bool ok, const std::string& what) {
  if (!ok) Fail(ErrorKind::kDimensionMismatch, what);
}

}  // namespace kbilqr

#endif  // KBILQR_COMMON_H_
