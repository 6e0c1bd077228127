// Copyright 2026 idprice authors
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

namespace idprice {

// Error categories map 1:1 onto process exit codes and C API status values:
// usage/config = 1, data = 2, numerical divergence/quality = 3.
enum class ErrorKind { usage = 1, data = 2, numeric = 3 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  static Error usage(const std::string& message) {
    return Error(ErrorKind::usage, message);
  }
  static Error data(const std::string& message) {
    return Error(ErrorKind::data, message);
  }
  static Error numeric(const std::string& message) {
    return Error(ErrorKind::numeric, message);
  }

 private:
  ErrorKind kind_;
};

}  // namespace idprice
