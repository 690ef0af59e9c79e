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
#include "fedcia/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fedcia {
namespace {

bool contains(std::span<const std::int32_t> sorted, std::int32_t x) {
  return std::binary_search(sorted.begin(), sorted.end(), x);
}

std::size_t hits_in_top(std::span<const std::int32_t> ranked, std::span<const std::int32_t> relevant,
                        std::int32_t cutoff) {
  const auto n = std::min<std::size_t>(ranked.size(), static_cast<std::size_t>(cutoff));
  std::size_t hits = 0;
  for (std::size_t r = 0; r < n; ++r) hits += contains(relevant, ranked[r]) ? 1 : 0;
  return hits;
}

}  // namespace

std::vector<std::int32_t> rank_items(std::span<const double> scores,
                                     std::span<const std::int32_t> excluded, std::int32_t cutoff) {
  if (cutoff < 1) throw std::invalid_argument("rank_items: cutoff must be >= 1");
  std::vector<std::int32_t> candidates;
  candidates.reserve(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const auto item = static_cast<std::int32_t>(i);
    if (!contains(excluded, item)) candidates.push_back(item);
  }
  const auto better = [&](std::int32_t a, std::int32_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  };
  const auto k = std::min<std::size_t>(candidates.size(), static_cast<std::size_t>(cutoff));
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k),
                    candidates.end(), better);
  candidates.resize(k);
  return candidates;
}

RankingResult rank_top_k(const ScoreFn& score_fn,
                         const std::vector<std::vector<std::int32_t>>& exclusions,
                         const std::vector<std::vector<std::int32_t>>& relevant,
                         std::int32_t cutoff) {
  if (cutoff < 1) throw std::invalid_argument("rank_top_k: cutoff must be >= 1");
  RankingResult out;
  out.cutoff = cutoff;
  for (std::size_t u = 0; u < relevant.size(); ++u) {
    if (relevant[u].empty()) continue;
    const auto user = static_cast<std::int32_t>(u);
    const auto scores = score_fn(user);
    static const std::vector<std::int32_t> kNone;
    const auto& excl = u < exclusions.size() ? exclusions[u] : kNone;
    out.ranked.push_back(rank_items(scores, excl, cutoff));
    out.relevant.push_back(relevant[u]);
  }
  return out;
}

double f1_for_user(std::span<const std::int32_t> ranked, std::span<const std::int32_t> relevant,
                   std::int32_t cutoff) {
  if (relevant.empty()) return 0.0;
  const auto hits = static_cast<double>(hits_in_top(ranked, relevant, cutoff));
  const double precision = hits / static_cast<double>(cutoff);
  const double recall = hits / static_cast<double>(relevant.size());
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

double reciprocal_rank_for_user(std::span<const std::int32_t> ranked,
                                std::span<const std::int32_t> relevant, std::int32_t cutoff) {
  const auto n = std::min<std::size_t>(ranked.size(), static_cast<std::size_t>(cutoff));
  for (std::size_t r = 0; r < n; ++r) {
    if (contains(relevant, ranked[r])) return 1.0 / static_cast<double>(r + 1);
  }
  return 0.0;
}

double ndcg_for_user(std::span<const std::int32_t> ranked, std::span<const std::int32_t> relevant,
                     std::int32_t cutoff) {
  if (relevant.empty()) return 0.0;
  const auto n = std::min<std::size_t>(ranked.size(), static_cast<std::size_t>(cutoff));
  double dcg = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    if (contains(relevant, ranked[r])) dcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);
  }
  const auto ideal = std::min<std::size_t>(relevant.size(), static_cast<std::size_t>(cutoff));
  double idcg = 0.0;
  for (std::size_t r = 0; r < ideal; ++r) idcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);
  return dcg / idcg;
}

void MetricAccumulator::add(std::span<const std::int32_t> ranked,
                            std::span<const std::int32_t> relevant) {
  f1_ += f1_for_user(ranked, relevant, cutoff_);
  mrr_ += reciprocal_rank_for_user(ranked, relevant, cutoff_);
  ndcg_ += ndcg_for_user(ranked, relevant, cutoff_);
  ++users_;
}

void MetricAccumulator::merge(const MetricAccumulator& other) {
  f1_ += other.f1_;
  mrr_ += other.mrr_;
  ndcg_ += other.ndcg_;
  users_ += other.users_;
}

RankingMetrics MetricAccumulator::mean() const {
  if (users_ == 0) return {};
  const auto n = static_cast<double>(users_);
  return {f1_ / n, mrr_ / n, ndcg_ / n};
}

RankingMetrics evaluate(const RankingResult& result) {
  MetricAccumulator acc(result.cutoff);
  for (std::size_t u = 0; u < result.ranked.size(); ++u) acc.add(result.ranked[u], result.relevant[u]);
  return acc.mean();
}

double f1_at_k(const RankingResult& result) { return evaluate(result).f1; }
double mrr_at_k(const RankingResult& result) { return evaluate(result).mrr; }
double ndcg_at_k(const RankingResult& result) { return evaluate(result).ndcg; }

}  // namespace fedcia
