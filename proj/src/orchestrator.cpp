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
#include "fedcia/orchestrator.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>
#include <utility>

#include "fedcia/error.hpp"
#include "fedcia/rng.hpp"

namespace fedcia {
namespace {

// Stream tags for per-client generators.
constexpr std::uint64_t kUserInitTag = 0x75736572;   // "user"
constexpr std::uint64_t kItemInitTag = 0x6974656d;   // "item"
constexpr std::uint64_t kTrainTag = 0x74726169;      // "trai"
constexpr std::uint64_t kNoiseTag = 0x6e6f6973;      // "nois"

// Runs fn(0..n-1) on up to `threads` workers. The first exception is
// rethrown after all workers stop.
template <typename Fn>
void parallel_for(std::int32_t n, std::int32_t threads, Fn&& fn) {
  const auto workers = std::max(1, std::min(threads, n));
  if (workers <= 1) {
    for (std::int32_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::int32_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::int32_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::int32_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = n;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

std::vector<std::int32_t> sorted_union(const std::vector<std::int32_t>& a,
                                       const std::vector<std::int32_t>& b) {
  std::vector<std::int32_t> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

struct ClientData {
  std::vector<std::int32_t> users;  // global ids, ascending
  ShardTrainData train;
  std::vector<std::vector<std::int32_t>> validation;
  std::vector<std::vector<std::int32_t>> test;
  std::vector<std::vector<std::int32_t>> seen;  // train + validation
};

struct FederatedData {
  std::int32_t num_items = 0;
  std::vector<ClientData> clients;
  DatasetStats stats;
  std::size_t total_train = 0;
};

FederatedData prepare(const ExperimentConfig& cfg, const InteractionDataset& data) {
  const auto split = split_dataset(data, cfg.dataset.test_fraction, cfg.dataset.validation_fraction,
                                   cfg.effective_data_seed());
  ClientPartition partition;
  try {
    partition = partition_clients(data, cfg.num_clients, cfg.partition_mode, cfg.effective_data_seed());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const auto train = split.train.items_by_user();
  const auto validation = split.validation.items_by_user();
  const auto test = split.test.items_by_user();

  FederatedData out;
  out.num_items = data.num_items;
  out.stats = {data.num_users, data.num_items, split.train.interactions.size(),
               split.validation.interactions.size(), split.test.interactions.size()};
  out.total_train = split.train.interactions.size();
  for (const auto& users : partition.users_by_client()) {
    ClientData c;
    c.users = users;
    for (auto u : users) {
      c.train.items_by_user.push_back(train[u]);
      c.validation.push_back(validation[u]);
      c.test.push_back(test[u]);
      c.seen.push_back(sorted_union(train[u], validation[u]));
    }
    out.clients.push_back(std::move(c));
  }
  return out;
}

std::int32_t num_clients(const FederatedData& fd) { return static_cast<std::int32_t>(fd.clients.size()); }

// Per-client partial sums merged in client order, so the result does not
// depend on the thread count.
template <typename ScoreBlock>
RankingMetrics evaluate_clients(const FederatedData& fd, bool on_test, std::int32_t cutoff,
                                std::int32_t threads, ScoreBlock&& score_block) {
  std::vector<MetricAccumulator> partial(fd.clients.size(), MetricAccumulator(cutoff));
  parallel_for(num_clients(fd), threads, [&](std::int32_t k) {
    const auto& c = fd.clients[k];
    const DenseMatrix scores = score_block(k);  // N_local x M
    std::vector<double> row(scores.cols());
    for (std::size_t u = 0; u < c.users.size(); ++u) {
      const auto& relevant = on_test ? c.test[u] : c.validation[u];
      if (relevant.empty()) continue;
      const auto& excluded = on_test ? c.seen[u] : c.train.items_by_user[u];
      for (Eigen::Index i = 0; i < scores.cols(); ++i) row[i] = scores(static_cast<Eigen::Index>(u), i);
      partial[k].add(rank_items(row, excluded, cutoff), relevant);
    }
  });
  MetricAccumulator total(cutoff);
  for (const auto& p : partial) total.merge(p);
  return total.mean();
}

RankingMetrics evaluate_mf(const FederatedData& fd, const std::vector<MfModel>& models,
                           bool on_test, std::int32_t cutoff, std::int32_t threads) {
  return evaluate_clients(fd, on_test, cutoff, threads, [&](std::int32_t k) -> DenseMatrix {
    return models[k].user_embeddings.transpose() * models[k].item_embeddings;
  });
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

void take_snapshots(ExperimentReport& report, SnapshotStage stage,
                    const std::vector<MfModel>& models) {
  const auto& cfg = report.config;
  if (!cfg.snapshot_embeddings) return;
  const auto limit = std::min<std::size_t>(
      models.size(), cfg.snapshot_clients ? static_cast<std::size_t>(*cfg.snapshot_clients) : models.size());
  for (std::size_t k = 0; k < limit; ++k) {
    report.snapshots.push_back({stage, static_cast<std::int32_t>(k), models[k].item_embeddings});
  }
}

// Server side of one round: receives uploads in client order.
class AggregationServer {
 public:
  void receive(const Upload& upload) {
    std::visit(
        [this](const auto& u) {
          using T = std::decay_t<decltype(u)>;
          if constexpr (std::is_same_v<T, TruncatedSVD>) {
            averager_.add(reconstruct(u));
          } else if constexpr (std::is_same_v<T, ItemEmbeddingUpload>) {
            embeddings_.push_back(u.item_embeddings);
            weights_.push_back(u.weight);
          } else {
            averager_.add(u.values);
          }
        },
        upload);
  }

  DenseMatrix collaborative_mean() const { return averager_.mean(); }
  DenseMatrix weighted_sum() const { return aggregate_wsa(embeddings_, weights_); }

 private:
  MatrixAverager averager_;
  std::vector<DenseMatrix> embeddings_;
  std::vector<double> weights_;
};

std::size_t payload_of(const Upload& upload) {
  return std::visit(
      [](const auto& u) -> std::size_t {
        using T = std::decay_t<decltype(u)>;
        if constexpr (std::is_same_v<T, TruncatedSVD>) {
          return u.payload_values();
        } else if constexpr (std::is_same_v<T, ItemEmbeddingUpload>) {
          return static_cast<std::size_t>(u.item_embeddings.size());
        } else {
          return dense_payload_values(u.num_items());
        }
      },
      upload);
}

// Builds uploads for all clients in chunks of `threads`, handing each chunk
// to the server in client order. At most `threads` dense M x M uploads are
// alive at once.
template <typename MakeUpload>
std::size_t collect_uploads(std::int32_t round, std::int32_t clients, const RunOptions& options,
                            AggregationServer& server, MakeUpload&& make_upload) {
  const auto chunk = std::max(1, options.threads);
  std::size_t payload = 0;
  for (std::int32_t first = 0; first < clients; first += chunk) {
    const auto count = std::min(chunk, clients - first);
    std::vector<std::optional<Upload>> batch(count);
    parallel_for(count, options.threads, [&](std::int32_t j) { batch[j] = make_upload(first + j); });
    for (std::int32_t j = 0; j < count; ++j) {
      if (options.upload_observer) options.upload_observer(round, first + j, *batch[j]);
      payload += payload_of(*batch[j]);
      server.receive(*batch[j]);
    }
  }
  return payload;
}

template <typename Tag>
Upload package(SymmetricItemMatrix<Tag> m, const ExperimentConfig& cfg, Rng& noise_rng) {
  if (cfg.ldp.enabled()) m = add_laplace_noise(m, cfg.ldp, noise_rng);
  if (cfg.compression_rank) return compress(m, *cfg.compression_rank);
  return m;
}

}  // namespace

const char* to_string(Backbone b) {
  switch (b) {
    case Backbone::kMfBpr: return "mf_bpr";
    case Backbone::kLinearFilter: return "linear_filter";
  }
  return "?";
}

const char* to_string(Aggregator a) {
  switch (a) {
    case Aggregator::kCia: return "cia";
    case Aggregator::kWsa: return "wsa";
    case Aggregator::kIndependent: return "independent";
  }
  return "?";
}

const char* to_string(SnapshotStage s) {
  switch (s) {
    case SnapshotStage::kInit: return "init";
    case SnapshotStage::kPostTrain: return "post_train";
    case SnapshotStage::kPostAggregate: return "post_aggregate";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  const auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (partition_mode == PartitionMode::kBalancedRandom && num_clients < 1) fail("clients must be >= 1");
  if (com_num < 0) fail("com_num must be >= 0");
  if (epoch_c < 0 || epoch_i < 0) fail("epoch counts must be >= 0");
  if (!(learning_rate > 0.0)) fail("learning_rate must be > 0");
  if (!(item_align_learning_rate >= 0.0)) fail("item_align_learning_rate must be >= 0");
  if (!(l2_reg >= 0.0)) fail("l2_reg must be >= 0");
  if (!(init_std >= 0.0)) fail("init_std must be >= 0");
  if (dims.empty()) fail("dims must list at least one embedding dimension");
  for (auto d : dims) {
    if (d < 1) fail("dims must all be >= 1");
  }
  if (partition_mode == PartitionMode::kBalancedRandom &&
      static_cast<std::int32_t>(dims.size()) > num_clients) {
    fail("more dimension groups than clients");
  }
  if (beta && !(*beta >= 0.0)) fail("beta must be >= 0");
  if (beta_grid.empty()) fail("beta_grid must not be empty");
  for (double b : beta_grid) {
    if (!(b >= 0.0)) fail("beta_grid values must be >= 0");
  }
  ldp.validate();
  if (compression_rank && *compression_rank < 1) fail("compression_rank must be >= 1");
  if (eval_cutoff < 1) fail("eval_cutoff must be >= 1");
  if (!(dataset.test_fraction >= 0.0 && dataset.test_fraction <= 1.0) ||
      !(dataset.validation_fraction >= 0.0 && dataset.validation_fraction <= 1.0)) {
    fail("split fractions must lie in [0, 1]");
  }
  if (snapshot_clients && *snapshot_clients < 0) fail("snapshot_clients must be >= 0");
  if (aggregator == Aggregator::kWsa) {
    if (backbone == Backbone::kLinearFilter) {
      fail("incompatible architectures: weighted summation needs item parameters and the "
           "linear filter has none");
    }
    if (std::adjacent_find(dims.begin(), dims.end(), std::not_equal_to<>()) != dims.end()) {
      std::ostringstream msg;
      msg << "incompatible architectures: weighted summation requires one embedding dimension "
             "across clients, got {";
      for (std::size_t k = 0; k < dims.size(); ++k) msg << (k ? "," : "") << dims[k];
      msg << "}";
      fail(msg.str());
    }
  }
}

std::int32_t ExperimentConfig::dim_for_client(std::int32_t client, std::int32_t clients) const {
  const auto groups = static_cast<std::int64_t>(dims.size());
  const auto g = static_cast<std::int64_t>(client) * groups / std::max<std::int64_t>(1, clients);
  return dims[static_cast<std::size_t>(std::min(g, groups - 1))];
}

double item_alignment_loss(const DenseMatrix& item_embeddings, const DenseMatrix& target) {
  const auto m = static_cast<double>(item_embeddings.cols());
  if (target.rows() != item_embeddings.cols() || target.cols() != item_embeddings.cols()) {
    throw ShapeError("item alignment: target does not match the item count");
  }
  return (gram(item_embeddings) - target).squaredNorm() / (m * m);
}

DenseMatrix item_alignment_gradient(const DenseMatrix& item_embeddings, const DenseMatrix& target) {
  const auto m = static_cast<double>(item_embeddings.cols());
  if (target.rows() != item_embeddings.cols() || target.cols() != item_embeddings.cols()) {
    throw ShapeError("item alignment: target does not match the item count");
  }
  return (4.0 / (m * m)) * (item_embeddings * (gram(item_embeddings) - target));
}

double align_items(MfModel& model, const ItemSimilarityMatrix& target, std::int32_t epochs,
                   double learning_rate, std::vector<double>* trace) {
  auto& e = model.item_embeddings;
  const auto m = e.cols();
  if (target.values.rows() != m || target.values.cols() != m) {
    throw ShapeError("align_items: target is " + std::to_string(target.values.rows()) + "x" +
                     std::to_string(target.values.cols()) + " but the model has " +
                     std::to_string(m) + " items");
  }
  const double norm = 1.0 / (static_cast<double>(m) * static_cast<double>(m));
  // E (EᵀE − C) = (E Eᵀ) E − E C and ‖EᵀE − C‖² = ‖E Eᵀ‖² − 2⟨E C, E⟩ + ‖C‖²,
  // so each epoch needs one d×M by M×M product.
  const double target_sq = target.values.squaredNorm();
  DenseMatrix ec(e.rows(), m);
  DenseMatrix outer(e.rows(), e.rows());
  const auto loss_at = [&](const DenseMatrix& x) {
    ec.noalias() = x * target.values;
    outer.noalias() = x * x.transpose();
    const double value = (outer.squaredNorm() - 2.0 * ec.cwiseProduct(x).sum() + target_sq) * norm;
    if (!std::isfinite(value)) throw std::runtime_error("align_items: non-finite loss");
    return std::max(value, 0.0);
  };
  if (trace) trace->clear();
  double step = learning_rate * 4.0 * norm;
  double loss = loss_at(e);
  if (trace) trace->push_back(loss);
  DenseMatrix previous(e.rows(), m);
  for (std::int32_t t = 0; t < epochs; ++t) {
    ec.noalias() -= outer * e;  // -(1/4) M² ∇
    previous = e;
    double next = 0.0;
    // Halve the step until the loss does not increase.
    for (;;) {
      e.noalias() = previous + step * ec;
      next = loss_at(e);
      if (next <= loss || step < 1e-300) break;
      step *= 0.5;
      loss_at(previous);  // restores ec and outer
      ec.noalias() -= outer * previous;
    }
    loss = next;
    if (trace) trace->push_back(loss);
  }
  return loss;
}

ExperimentReport run_federated(const ExperimentConfig& cfg, const InteractionDataset& data,
                               const RunOptions& options) {
  cfg.validate();
  if (cfg.backbone != Backbone::kMfBpr) {
    throw ConfigError("run_federated requires the mf_bpr backbone");
  }
  const auto started = std::chrono::steady_clock::now();
  const auto fd = prepare(cfg, data);
  const auto k_clients = num_clients(fd);
  const auto m = fd.num_items;
  if (cfg.compression_rank && *cfg.compression_rank > m) {
    throw ConfigError("compression_rank exceeds the item count");
  }

  ExperimentReport report;
  report.config = cfg;
  report.data = fd.stats;

  // Item tables share one stream so that every client starts from the same
  // item embeddings; user tables are private per client.
  std::vector<MfModel> models;
  std::vector<Rng> train_rngs, noise_rngs;
  models.reserve(k_clients);
  for (std::int32_t k = 0; k < k_clients; ++k) {
    auto user_rng = make_rng(cfg.seed, static_cast<std::uint64_t>(k), kUserInitTag);
    auto item_rng = make_rng(cfg.seed, 0, kItemInitTag);
    models.push_back(MfModel::initialize(cfg.dim_for_client(k, k_clients),
                                         static_cast<std::int32_t>(fd.clients[k].users.size()), m,
                                         cfg.init_std, user_rng, item_rng));
    train_rngs.push_back(make_rng(cfg.seed, static_cast<std::uint64_t>(k), kTrainTag));
    noise_rngs.push_back(make_rng(cfg.seed, static_cast<std::uint64_t>(k), kNoiseTag));
  }
  take_snapshots(report, SnapshotStage::kInit, models);

  report.initial_validation = evaluate_mf(fd, models, false, cfg.eval_cutoff, options.threads);
  double best_ndcg = report.initial_validation.ndcg;
  std::vector<MfModel> best_models = models;
  report.best_round = 0;

  std::vector<double> weights(k_clients);
  for (std::int32_t k = 0; k < k_clients; ++k) {
    weights[k] = fd.total_train > 0 ? static_cast<double>(fd.clients[k].train.num_interactions()) /
                                          static_cast<double>(fd.total_train)
                                    : 1.0 / k_clients;
  }

  for (std::int32_t round = 1; round <= cfg.com_num; ++round) {
    RoundReport rr;
    rr.round = round;
    rr.client_l_pred.assign(k_clients, 0.0);

    parallel_for(k_clients, options.threads, [&](std::int32_t k) {
      double sum = 0.0;
      for (std::int32_t e = 0; e < cfg.epoch_c; ++e) {
        sum += bpr_epoch(models[k], fd.clients[k].train, cfg.learning_rate, cfg.l2_reg, train_rngs[k]);
      }
      rr.client_l_pred[k] = cfg.epoch_c > 0 ? sum / cfg.epoch_c : 0.0;
    });
    if (round == 1) take_snapshots(report, SnapshotStage::kPostTrain, models);

    if (cfg.aggregator == Aggregator::kWsa) {
      AggregationServer server;
      rr.payload_values = collect_uploads(round, k_clients, options, server, [&](std::int32_t k) {
        DenseMatrix e = models[k].item_embeddings;
        if (cfg.ldp.enabled()) e = add_laplace_noise_entrywise(e, cfg.ldp, noise_rngs[k]);
        return Upload(ItemEmbeddingUpload{std::move(e), weights[k]});
      });
      const DenseMatrix global = server.weighted_sum();
      for (auto& model : models) model.item_embeddings = global;
    } else if (cfg.aggregator == Aggregator::kCia) {
      AggregationServer server;
      rr.payload_values = collect_uploads(round, k_clients, options, server, [&](std::int32_t k) {
        return package(ItemSimilarityMatrix(gram(models[k].item_embeddings), k), cfg, noise_rngs[k]);
      });
      const ItemSimilarityMatrix global(server.collaborative_mean());
      rr.client_l_item.assign(k_clients, 0.0);
      parallel_for(k_clients, options.threads, [&](std::int32_t k) {
        rr.client_l_item[k] =
            align_items(models[k], global, cfg.epoch_i, cfg.item_align_learning_rate);
      });
    }
    if (round == 1) take_snapshots(report, SnapshotStage::kPostAggregate, models);

    rr.mean_l_pred = mean_of(rr.client_l_pred);
    rr.mean_l_item = mean_of(rr.client_l_item);
    rr.validation = evaluate_mf(fd, models, false, cfg.eval_cutoff, options.threads);
    if (rr.validation.ndcg > best_ndcg) {
      best_ndcg = rr.validation.ndcg;
      best_models = models;
      report.best_round = round;
    }
    report.rounds.push_back(std::move(rr));
  }

  report.test = evaluate_mf(fd, best_models, true, cfg.eval_cutoff, options.threads);
  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

ExperimentReport run_parameter_free(const ExperimentConfig& cfg, const InteractionDataset& data,
                                    const RunOptions& options) {
  cfg.validate();
  if (cfg.backbone != Backbone::kLinearFilter) {
    throw ConfigError("run_parameter_free requires the linear_filter backbone");
  }
  const auto started = std::chrono::steady_clock::now();
  const auto fd = prepare(cfg, data);
  const auto k_clients = num_clients(fd);
  const auto m = fd.num_items;
  if (cfg.compression_rank && *cfg.compression_rank > m) {
    throw ConfigError("compression_rank exceeds the item count");
  }

  ExperimentReport report;
  report.config = cfg;
  report.data = fd.stats;

  std::vector<SparseInteractionMatrix> local(k_clients);
  for (std::int32_t k = 0; k < k_clients; ++k) {
    local[k] = SparseInteractionMatrix(m, fd.clients[k].train.items_by_user);
  }

  // Client-side scores. Filters are rebuilt rather than kept, so that only
  // a few dense M x M matrices are alive at a time.
  std::vector<DenseMatrix> local_scores(k_clients), global_scores(k_clients);
  parallel_for(k_clients, options.threads, [&](std::int32_t k) {
    local_scores[k] = filter_predict(local[k], build_linear_filter(local[k]));
  });

  const bool share = cfg.aggregator == Aggregator::kCia;
  RoundReport rr;
  rr.round = 1;
  if (share) {
    AggregationServer server;
    rr.payload_values = collect_uploads(1, k_clients, options, server, [&](std::int32_t k) {
      auto rng = make_rng(cfg.seed, static_cast<std::uint64_t>(k), kNoiseTag);
      auto f = build_linear_filter(local[k]);
      f.client_id = k;
      return package(std::move(f), cfg, rng);
    });
    const LinearFilter global(server.collaborative_mean());
    parallel_for(k_clients, options.threads,
                 [&](std::int32_t k) { global_scores[k] = filter_predict(local[k], global); });
  }

  const auto evaluate_beta = [&](double beta, bool on_test) {
    return evaluate_clients(fd, on_test, cfg.eval_cutoff, options.threads,
                            [&](std::int32_t k) -> DenseMatrix {
                              if (!share || beta == 0.0) return local_scores[k];
                              return local_scores[k] + beta * global_scores[k];
                            });
  };

  report.initial_validation = evaluate_beta(0.0, false);
  std::vector<double> candidates;
  if (!share) {
    candidates = {0.0};
  } else if (cfg.beta) {
    candidates = {*cfg.beta};
  } else {
    candidates = cfg.beta_grid;
  }
  double best_beta = candidates.front();
  double best_ndcg = -1.0;
  for (double beta : candidates) {
    const auto metrics = evaluate_beta(beta, false);
    report.beta_validation.push_back({beta, metrics});
    if (metrics.ndcg > best_ndcg) {
      best_ndcg = metrics.ndcg;
      best_beta = beta;
      rr.validation = metrics;
    }
  }
  report.selected_beta = best_beta;
  report.rounds.push_back(rr);
  report.best_round = 1;
  report.test = evaluate_beta(best_beta, true);
  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg, const InteractionDataset& data,
                                const RunOptions& options) {
  return cfg.backbone == Backbone::kMfBpr ? run_federated(cfg, data, options)
                                          : run_parameter_free(cfg, data, options);
}

ExperimentReport run_experiment(const ExperimentConfig& cfg, const RunOptions& options) {
  cfg.validate();
  const auto data = load_interactions(cfg.dataset.path, cfg.dataset.format, cfg.dataset.rating_threshold);
  return run_experiment(cfg, data, options);
}

}  // namespace fedcia
