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
// Local recommendation models: BPR matrix factorization and the
// parameter-free linear item filter.

#ifndef FEDCIA_BACKBONES_HPP_
#define FEDCIA_BACKBONES_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "fedcia/matrixkit.hpp"
#include "fedcia/rng.hpp"
#include "fedcia/similarity.hpp"

namespace fedcia {

// Dot-product MF. Embeddings are stored one column per entity so that an
// item's vector is contiguous. Every client holds the full item table.
struct MfModel {
  DenseMatrix user_embeddings;  // d x N_local
  DenseMatrix item_embeddings;  // d x M

  std::int32_t dim() const { return static_cast<std::int32_t>(item_embeddings.rows()); }
  std::int32_t num_users() const { return static_cast<std::int32_t>(user_embeddings.cols()); }
  std::int32_t num_items() const { return static_cast<std::int32_t>(item_embeddings.cols()); }

  // N(0, init_std^2) entries. Item rows are drawn from `item_rng` so that
  // clients sharing it start from one item table.
  static MfModel initialize(std::int32_t dim, std::int32_t num_users, std::int32_t num_items,
                            double init_std, Rng& user_rng, Rng& item_rng);
};

// <e_u, e_i>. Throws std::out_of_range on bad indices.
double score(const MfModel& model, std::int32_t user, std::int32_t item);

struct BprTriple {
  std::int32_t user = 0;
  std::int32_t positive = 0;
  std::int32_t negative = 0;
};

struct BprGradient {
  Vector user;
  Vector positive;
  Vector negative;
};

// -ln sigmoid(s+ - s-) + l2 * (|e_u|^2 + |e_i+|^2 + |e_i-|^2)
double bpr_triple_loss(const MfModel& model, const BprTriple& t, double l2_reg);
BprGradient bpr_triple_gradient(const MfModel& model, const BprTriple& t, double l2_reg);

// One client's training positives: sorted item lists per local user.
struct ShardTrainData {
  std::vector<std::vector<std::int32_t>> items_by_user;

  std::size_t num_interactions() const;
};

// One SGD pass with a fresh uniform negative per positive (drawn from items
// outside the user's train list). Returns the mean triple loss, evaluated
// before each update. Users without positives are skipped. A zero
// learning rate leaves the model untouched.
double bpr_epoch(MfModel& model, const ShardTrainData& shard, double learning_rate,
                 double l2_reg, Rng& rng);

// F = A~^T A~ with the shard's own degrees. Accumulated from per-user
// outer products, so cost scales with sum of squared user degrees.
LinearFilter build_linear_filter(const SparseInteractionMatrix& a);

// A F, one score row per local user.
DenseMatrix filter_predict(const SparseInteractionMatrix& a, const LinearFilter& f);

}  // namespace fedcia

#endif  // FEDCIA_BACKBONES_HPP_
