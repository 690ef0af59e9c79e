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
// Simulated federated training. A round is: local training on every
// client, upload, server aggregation (a barrier), download and local
// alignment. Clients own their user embeddings and interactions; only the
// types in `Upload` ever reach the server.

#ifndef FEDCIA_ORCHESTRATOR_HPP_
#define FEDCIA_ORCHESTRATOR_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fedcia/backbones.hpp"
#include "fedcia/collab.hpp"
#include "fedcia/dataset.hpp"
#include "fedcia/eval.hpp"
#include "fedcia/matrixkit.hpp"
#include "fedcia/similarity.hpp"

namespace fedcia {

enum class Backbone { kMfBpr, kLinearFilter };
enum class Aggregator { kCia, kWsa, kIndependent };

struct DatasetSpec {
  std::string path;
  RatingFormat format = RatingFormat::kTabSeparated;
  std::optional<double> rating_threshold;
  double test_fraction = 0.2;
  double validation_fraction = 0.1;  // of the non-test part
};

struct ExperimentConfig {
  std::string name;
  DatasetSpec dataset;
  std::int32_t num_clients = 100;
  PartitionMode partition_mode = PartitionMode::kBalancedRandom;
  // Seed for splitting and partitioning; falls back to `seed`.
  std::optional<std::uint64_t> data_seed;

  Backbone backbone = Backbone::kMfBpr;
  Aggregator aggregator = Aggregator::kCia;

  std::int32_t com_num = 10;
  std::int32_t epoch_c = 5;
  std::int32_t epoch_i = 10;
  double learning_rate = 0.05;
  double item_align_learning_rate = 2000.0;
  double l2_reg = 1e-4;
  double init_std = 0.1;
  // Client k of K uses dims[k * dims.size() / K]: equal contiguous groups,
  // one per listed dimension.
  std::vector<std::int32_t> dims = {32};

  // Fixed blend weight for the linear filter; when unset it is chosen on
  // validation from beta_grid.
  std::optional<double> beta;
  std::vector<double> beta_grid = {0.1, 0.25, 0.5, 1.0};

  LdpConfig ldp;
  std::optional<std::int32_t> compression_rank;
  std::int32_t eval_cutoff = kDefaultEvalCutoff;
  std::uint64_t seed = 42;

  bool snapshot_embeddings = false;
  // Snapshot only the first n clients (all when unset).
  std::optional<std::int32_t> snapshot_clients;

  // Throws ConfigError. Weighted summation with mixed dims fails here with
  // "incompatible architectures".
  void validate() const;
  // `num_clients` is the effective count (num_users in one-user-per-client).
  std::int32_t dim_for_client(std::int32_t client, std::int32_t num_clients) const;
  std::uint64_t effective_data_seed() const { return data_seed.value_or(seed); }
};

struct RoundReport {
  std::int32_t round = 0;  // 1-based
  std::vector<double> client_l_pred;
  std::vector<double> client_l_item;
  double mean_l_pred = 0.0;
  double mean_l_item = 0.0;
  RankingMetrics validation;
  std::size_t payload_values = 0;  // reals uploaded by all clients this round
};

enum class SnapshotStage { kInit, kPostTrain, kPostAggregate };

struct EmbeddingSnapshot {
  SnapshotStage stage = SnapshotStage::kInit;
  std::int32_t client = 0;
  DenseMatrix item_embeddings;  // d x M
};

struct BetaScore {
  double beta = 0.0;
  RankingMetrics validation;
};

struct DatasetStats {
  std::int32_t num_users = 0;
  std::int32_t num_items = 0;
  std::size_t train = 0;
  std::size_t validation = 0;
  std::size_t test = 0;
};

struct ExperimentReport {
  ExperimentConfig config;
  DatasetStats data;
  RankingMetrics initial_validation;
  std::vector<RoundReport> rounds;
  std::int32_t best_round = 0;  // 0 = initial state
  RankingMetrics test;
  std::optional<double> selected_beta;
  std::vector<BetaScore> beta_validation;
  double wall_clock_seconds = 0.0;
  std::vector<EmbeddingSnapshot> snapshots;
};

// Everything a client may send to the server.
struct ItemEmbeddingUpload {
  DenseMatrix item_embeddings;  // d x M
  double weight = 0.0;          // |D_k| / |D|
};
using Upload = std::variant<ItemSimilarityMatrix, LinearFilter, TruncatedSVD, ItemEmbeddingUpload>;

struct RunOptions {
  std::int32_t threads = 1;
  // Called once per upload, in client order, before aggregation.
  std::function<void(std::int32_t round, std::int32_t client, const Upload&)> upload_observer;
};

// L_item = (1/M^2) sum_ij ((E^T E)_ij - target_ij)^2
double item_alignment_loss(const DenseMatrix& item_embeddings, const DenseMatrix& target);
// (4/M^2) E (E^T E - target)
DenseMatrix item_alignment_gradient(const DenseMatrix& item_embeddings, const DenseMatrix& target);

// Full-batch gradient descent on L_item, item embeddings only. A step that
// would raise the loss is halved and retried, for the rest of the call. Returns the
// loss after the last step; `trace` (if given) receives epochs + 1 values
// starting with the loss before the first step.
double align_items(MfModel& model, const ItemSimilarityMatrix& target, std::int32_t epochs,
                   double learning_rate, std::vector<double>* trace = nullptr);

// Parameter-based loop (MF + BPR) with CIA, WSA or no aggregation.
ExperimentReport run_federated(const ExperimentConfig& cfg, const InteractionDataset& data,
                               const RunOptions& options = {});
// Parameter-free linear filter, one round, scores A_k F_k + beta A_k F_agg.
ExperimentReport run_parameter_free(const ExperimentConfig& cfg, const InteractionDataset& data,
                                    const RunOptions& options = {});

// Dispatches on cfg.backbone; loads cfg.dataset when `data` is absent.
ExperimentReport run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});
ExperimentReport run_experiment(const ExperimentConfig& cfg, const InteractionDataset& data,
                                const RunOptions& options = {});

const char* to_string(Backbone b);
const char* to_string(Aggregator a);
const char* to_string(SnapshotStage s);

}  // namespace fedcia

#endif  // FEDCIA_ORCHESTRATOR_HPP_
