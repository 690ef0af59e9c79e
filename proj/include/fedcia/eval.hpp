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
#ifndef FEDCIA_EVAL_HPP_
#define FEDCIA_EVAL_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace fedcia {

inline constexpr std::int32_t kDefaultEvalCutoff = 10;

struct RankingResult {
  std::int32_t cutoff = kDefaultEvalCutoff;
  std::vector<std::vector<std::int32_t>> ranked;    // top-K per evaluable user
  std::vector<std::vector<std::int32_t>> relevant;  // sorted held-out items

  std::size_t num_users() const { return ranked.size(); }
};

struct RankingMetrics {
  double f1 = 0.0;
  double mrr = 0.0;
  double ndcg = 0.0;
};

// Top-`cutoff` items of one user: highest score first, ties by lower item
// index, skipping `excluded` (sorted).
std::vector<std::int32_t> rank_items(std::span<const double> scores,
                                     std::span<const std::int32_t> excluded, std::int32_t cutoff);

using ScoreFn = std::function<std::vector<double>(std::int32_t user)>;

// Ranks every user that has at least one relevant item; others are skipped.
RankingResult rank_top_k(const ScoreFn& score_fn,
                         const std::vector<std::vector<std::int32_t>>& exclusions,
                         const std::vector<std::vector<std::int32_t>>& relevant,
                         std::int32_t cutoff = kDefaultEvalCutoff);

// Per-user metrics for one ranked list.
double f1_for_user(std::span<const std::int32_t> ranked, std::span<const std::int32_t> relevant,
                   std::int32_t cutoff);
double reciprocal_rank_for_user(std::span<const std::int32_t> ranked,
                                std::span<const std::int32_t> relevant, std::int32_t cutoff);
double ndcg_for_user(std::span<const std::int32_t> ranked, std::span<const std::int32_t> relevant,
                     std::int32_t cutoff);

// Macro averages over the users in `result` (0 for an empty result).
double f1_at_k(const RankingResult& result);
double mrr_at_k(const RankingResult& result);
double ndcg_at_k(const RankingResult& result);
RankingMetrics evaluate(const RankingResult& result);

// Streaming form used by the orchestrator: add users one at a time.
class MetricAccumulator {
 public:
  explicit MetricAccumulator(std::int32_t cutoff = kDefaultEvalCutoff) : cutoff_(cutoff) {}
  void add(std::span<const std::int32_t> ranked, std::span<const std::int32_t> relevant);
  void merge(const MetricAccumulator& other);
  RankingMetrics mean() const;
  std::size_t num_users() const { return users_; }

 private:
  std::int32_t cutoff_;
  double f1_ = 0.0, mrr_ = 0.0, ndcg_ = 0.0;
  std::size_t users_ = 0;
};

}  // namespace fedcia

#endif  // FEDCIA_EVAL_HPP_
