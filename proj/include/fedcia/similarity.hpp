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
#ifndef FEDCIA_SIMILARITY_HPP_
#define FEDCIA_SIMILARITY_HPP_

#include <cstdint>
#include <optional>
#include <utility>

#include "fedcia/matrixkit.hpp"

namespace fedcia {

// M x M item-item matrix exchanged between clients and the server. Both
// kinds are symmetric; they differ only in where they come from (Gram of
// item embeddings vs. normalized co-occurrence).
template <typename Tag>
struct SymmetricItemMatrix {
  DenseMatrix values;
  std::optional<std::int32_t> client_id;

  SymmetricItemMatrix() = default;
  explicit SymmetricItemMatrix(DenseMatrix v, std::optional<std::int32_t> client = std::nullopt)
      : values(std::move(v)), client_id(client) {}

  std::int32_t num_items() const { return static_cast<std::int32_t>(values.rows()); }
  bool is_symmetric(double tolerance = kDefaultTolerance) const {
    return values.rows() == values.cols() && max_asymmetry(values) <= tolerance;
  }
};

struct SimilarityTag {};
struct FilterTag {};

// C = E^T E of a parameter-based model (C_k on clients, C_s on the server).
using ItemSimilarityMatrix = SymmetricItemMatrix<SimilarityTag>;
// F = A~^T A~ of the parameter-free model (F_k, F_agg, F_ideal).
using LinearFilter = SymmetricItemMatrix<FilterTag>;

}  // namespace fedcia

#endif  // FEDCIA_SIMILARITY_HPP_
