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
#include "fedcia/backbones.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "fedcia/error.hpp"

namespace fedcia {
namespace {

// log(1 + exp(-x)) without overflow for large |x|.
double softplus_neg(double x) {
  return x > 0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void check_triple(const MfModel& model, const BprTriple& t) {
  if (t.user < 0 || t.user >= model.num_users() || t.positive < 0 ||
      t.positive >= model.num_items() || t.negative < 0 || t.negative >= model.num_items()) {
    throw std::out_of_range("BPR triple index out of range");
  }
}

}  // namespace

MfModel MfModel::initialize(std::int32_t dim, std::int32_t num_users, std::int32_t num_items,
                            double init_std, Rng& user_rng, Rng& item_rng) {
  if (dim < 1) throw std::invalid_argument("embedding dimension must be >= 1");
  MfModel m;
  m.user_embeddings.resize(dim, num_users);
  m.item_embeddings.resize(dim, num_items);
  for (Eigen::Index c = 0; c < m.user_embeddings.cols(); ++c) {
    for (Eigen::Index r = 0; r < dim; ++r) m.user_embeddings(r, c) = init_std * standard_normal(user_rng);
  }
  for (Eigen::Index c = 0; c < m.item_embeddings.cols(); ++c) {
    for (Eigen::Index r = 0; r < dim; ++r) m.item_embeddings(r, c) = init_std * standard_normal(item_rng);
  }
  return m;
}

double score(const MfModel& model, std::int32_t user, std::int32_t item) {
  if (user < 0 || user >= model.num_users() || item < 0 || item >= model.num_items()) {
    throw std::out_of_range("score: index out of range");
  }
  return model.user_embeddings.col(user).dot(model.item_embeddings.col(item));
}

double bpr_triple_loss(const MfModel& model, const BprTriple& t, double l2_reg) {
  check_triple(model, t);
  const auto eu = model.user_embeddings.col(t.user);
  const auto ep = model.item_embeddings.col(t.positive);
  const auto en = model.item_embeddings.col(t.negative);
  const double gap = eu.dot(ep) - eu.dot(en);
  return softplus_neg(gap) + l2_reg * (eu.squaredNorm() + ep.squaredNorm() + en.squaredNorm());
}

BprGradient bpr_triple_gradient(const MfModel& model, const BprTriple& t, double l2_reg) {
  check_triple(model, t);
  const auto eu = model.user_embeddings.col(t.user);
  const auto ep = model.item_embeddings.col(t.positive);
  const auto en = model.item_embeddings.col(t.negative);
  // d/dx [-ln sigmoid(x)] = -sigmoid(-x)
  const double g = -sigmoid(-(eu.dot(ep) - eu.dot(en)));
  BprGradient out;
  out.user = g * (ep - en) + 2.0 * l2_reg * eu;
  out.positive = g * eu + 2.0 * l2_reg * ep;
  out.negative = -g * eu + 2.0 * l2_reg * en;
  if (t.positive == t.negative) {
    // Both terms land on the same column.
    out.positive += out.negative;
    out.negative = out.positive;
  }
  return out;
}

std::size_t ShardTrainData::num_interactions() const {
  std::size_t n = 0;
  for (const auto& items : items_by_user) n += items.size();
  return n;
}

double bpr_epoch(MfModel& model, const ShardTrainData& shard, double learning_rate,
                 double l2_reg, Rng& rng) {
  if (!(learning_rate >= 0.0)) throw std::invalid_argument("learning_rate must be >= 0");
  if (!(l2_reg >= 0.0)) throw std::invalid_argument("l2_reg must be >= 0");
  if (static_cast<std::int32_t>(shard.items_by_user.size()) != model.num_users()) {
    throw ShapeError("shard user count does not match model");
  }
  const std::int32_t m = model.num_items();

  std::vector<std::pair<std::int32_t, std::int32_t>> positives;
  positives.reserve(shard.num_interactions());
  for (std::int32_t u = 0; u < model.num_users(); ++u) {
    const auto& items = shard.items_by_user[u];
    if (static_cast<std::int32_t>(items.size()) >= m) continue;  // no negative exists
    for (auto i : items) positives.emplace_back(u, i);
  }
  shuffle(positives.begin(), positives.end(), rng);

  double total = 0.0;
  const auto d = model.dim();
  Vector eu(d), ep(d), en(d);
  for (const auto& [u, pos] : positives) {
    const auto& seen = shard.items_by_user[u];
    std::int32_t neg;
    do {
      neg = static_cast<std::int32_t>(uniform_index(rng, static_cast<std::uint64_t>(m)));
    } while (std::binary_search(seen.begin(), seen.end(), neg));

    eu = model.user_embeddings.col(u);
    ep = model.item_embeddings.col(pos);
    en = model.item_embeddings.col(neg);
    const double gap = eu.dot(ep) - eu.dot(en);
    total += softplus_neg(gap) + l2_reg * (eu.squaredNorm() + ep.squaredNorm() + en.squaredNorm());

    if (learning_rate == 0.0) continue;
    const double g = -sigmoid(-gap);
    model.user_embeddings.col(u) -= learning_rate * (g * (ep - en) + 2.0 * l2_reg * eu);
    model.item_embeddings.col(pos) -= learning_rate * (g * eu + 2.0 * l2_reg * ep);
    model.item_embeddings.col(neg) -= learning_rate * (-g * eu + 2.0 * l2_reg * en);
  }
  return positives.empty() ? 0.0 : total / static_cast<double>(positives.size());
}

LinearFilter build_linear_filter(const SparseInteractionMatrix& a) {
  const auto m = a.cols();
  const auto di = a.col_degrees();
  std::vector<double> item_scale(m);
  for (std::int32_t i = 0; i < m; ++i) item_scale[i] = di[i] > 0 ? 1.0 / std::sqrt(di[i]) : 0.0;

  // F = sum_u (1/d_u) x_u x_u^T with x_u = D_i^{-1/2} a_u; lower triangle only.
  DenseMatrix f = DenseMatrix::Zero(m, m);
  for (std::int32_t u = 0; u < a.rows(); ++u) {
    const auto& items = a.row(u);
    if (items.empty()) continue;
    const double wu = 1.0 / static_cast<double>(items.size());
    for (std::size_t q = 0; q < items.size(); ++q) {
      const auto j = items[q];
      const double sj = wu * item_scale[j];
      for (std::size_t p = q; p < items.size(); ++p) {
        const auto i = items[p];
        f(i, j) += sj * item_scale[i];
      }
    }
  }
  f.triangularView<Eigen::StrictlyUpper>() = f.transpose();
  return LinearFilter(std::move(f));
}

DenseMatrix filter_predict(const SparseInteractionMatrix& a, const LinearFilter& f) {
  if (f.values.rows() != a.cols() || f.values.cols() != a.cols()) {
    throw ShapeError("filter_predict: filter is " + std::to_string(f.values.rows()) + "x" +
                     std::to_string(f.values.cols()) + ", interactions have " +
                     std::to_string(a.cols()) + " items");
  }
  // Row u of A F is the sum of F's rows over u's items (F symmetric, so
  // columns are read instead for contiguity).
  DenseMatrix out = DenseMatrix::Zero(a.rows(), a.cols());
  Vector acc(a.cols());
  for (std::int32_t u = 0; u < a.rows(); ++u) {
    acc.setZero();
    for (auto i : a.row(u)) acc += f.values.col(i);
    out.row(u) = acc.transpose();
  }
  return out;
}

}  // namespace fedcia
