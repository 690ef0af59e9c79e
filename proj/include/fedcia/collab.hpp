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
// Server/client exchange of collaborative information: local noise,
// averaging of item matrices, the weighted-summation baseline, upload
// compression and the L1 information-loss diagnostic.

#ifndef FEDCIA_COLLAB_HPP_
#define FEDCIA_COLLAB_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fedcia/error.hpp"
#include "fedcia/matrixkit.hpp"
#include "fedcia/rng.hpp"
#include "fedcia/similarity.hpp"

namespace fedcia {

// Laplace mechanism settings. With epsilon set, the scale is derived as
// 2 * clip_bound / epsilon and `delta` is ignored.
struct LdpConfig {
  double delta = 0.0;
  std::optional<double> clip_bound;
  std::optional<double> epsilon;

  // Throws ConfigError on negative scale, non-positive epsilon or bound, or
  // epsilon without a clip bound.
  void validate() const;
  double scale() const;
  bool enabled() const { return scale() > 0.0 || clip_bound.has_value(); }
};

// Clips to [-clip_bound, clip_bound] when set, then adds i.i.d. Laplace noise
// to the upper triangle (diagonal included) and mirrors it, so the output is
// exactly symmetric. Scale 0 without clipping returns the input unchanged.
DenseMatrix add_symmetric_laplace_noise(const DenseMatrix& c, const LdpConfig& cfg, Rng& rng);

template <typename Tag>
SymmetricItemMatrix<Tag> add_laplace_noise(const SymmetricItemMatrix<Tag>& c, const LdpConfig& cfg,
                                           Rng& rng) {
  return SymmetricItemMatrix<Tag>(add_symmetric_laplace_noise(c.values, cfg, rng), c.client_id);
}

// Entrywise noise for embedding uploads of the weighted-summation baseline.
DenseMatrix add_laplace_noise_entrywise(const DenseMatrix& m, const LdpConfig& cfg, Rng& rng);

// Running sum of uploaded item matrices. The mean divides by the number of
// matrices received. Summation follows call order.
class MatrixAverager {
 public:
  void add(const DenseMatrix& m);
  std::size_t count() const { return count_; }
  // Throws std::invalid_argument if nothing was added.
  DenseMatrix mean() const;

 private:
  DenseMatrix sum_;
  std::size_t count_ = 0;
};

// Element-wise mean. Throws std::invalid_argument on an empty list and
// ShapeError on mismatched shapes.
template <typename Tag>
SymmetricItemMatrix<Tag> aggregate_cia(std::span<const SymmetricItemMatrix<Tag>> matrices) {
  MatrixAverager acc;
  for (const auto& m : matrices) acc.add(m.values);
  return SymmetricItemMatrix<Tag>(acc.mean());
}

template <typename Tag>
SymmetricItemMatrix<Tag> aggregate_cia(const std::vector<SymmetricItemMatrix<Tag>>& matrices) {
  return aggregate_cia(std::span<const SymmetricItemMatrix<Tag>>(matrices));
}

// Centralized filter over the full interaction matrix. With
// equal_popularity the item degree matrix is taken as N*I, giving
// (1/N) A^T D_u^{-1} A; otherwise the true item degrees are used.
LinearFilter ideal_global_filter(const SparseInteractionMatrix& a, bool equal_popularity);

// Weighted element-wise sum of d x M item tables. Weights must be
// non-negative and sum to 1 within 1e-9. Tables of different shapes cannot
// be combined: throws ShapeError ("incompatible architectures").
DenseMatrix aggregate_wsa(std::span<const DenseMatrix> embeddings, std::span<const double> weights);

// Rank-L factorization of a client upload.
TruncatedSVD compress(const ItemSimilarityMatrix& c, std::int32_t rank);
TruncatedSVD compress(const LinearFilter& f, std::int32_t rank);

inline std::size_t dense_payload_values(std::int32_t num_items) {
  const auto m = static_cast<std::size_t>(num_items);
  return m * (m + 1) / 2;
}

struct InformationGap {
  double collaborative = 0.0;   // S_CI
  double weighted_sum = 0.0;    // S_WS
};

// L1 item-pair separation kept by similarity averaging vs. by embedding
// summation, for two clients' d x M tables.
InformationGap l1_information_gap(const DenseMatrix& client_a, const DenseMatrix& client_b,
                                  std::int32_t item_i, std::int32_t item_j);

}  // namespace fedcia

#endif  // FEDCIA_COLLAB_HPP_
