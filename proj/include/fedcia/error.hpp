//
// Copyright 2026 The fedcia Authors
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
//
#ifndef FEDCIA_ERROR_HPP_
#define FEDCIA_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace fedcia {

// Raised for invalid experiment configurations and manifests. The CLI maps
// this to exit code 1; every other exception is a runtime failure (exit 2).
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// Unreadable or malformed input data.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Mismatched matrix shapes, including embedding tables of different
// dimensionality handed to weighted summation.
class ShapeError : public std::invalid_argument {
 public:
  explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace fedcia

#endif  // FEDCIA_ERROR_HPP_
