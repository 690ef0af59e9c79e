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

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "fedcia/backbones.hpp"
#include "fedcia/error.hpp"
#include "test_support.hpp"

namespace fedcia {
namespace {

using testing::random_normal;
using testing::random_rows;

MfModel model_from(const DenseMatrix& users, const DenseMatrix& items) {
  MfModel m;
  m.user_embeddings = users;
  m.item_embeddings = items;
  return m;
}

TEST(Score, DotProductOracles) {
  DenseMatrix u(2, 1), i(2, 1);
  u << 1, 2;
  i << 3, -1;
  EXPECT_DOUBLE_EQ(score(model_from(u, i), 0, 0), 1.0);
  DenseMatrix e1(2, 1), e2(2, 1);
  e1 << 1, 0;
  e2 << 0, 1;
  EXPECT_DOUBLE_EQ(score(model_from(e1, e1), 0, 0), 1.0);
  EXPECT_DOUBLE_EQ(score(model_from(e1, e2), 0, 0), 0.0);
  EXPECT_THROW(score(model_from(e1, e2), 1, 0), std::out_of_range);
  EXPECT_THROW(score(model_from(e1, e2), 0, -1), std::out_of_range);
}

TEST(Initialize, SharedItemStreamGivesSharedItemTable) {
  auto ua = make_rng(1, 1), ub = make_rng(1, 2);
  auto ia = make_rng(1, 0, 5), ib = make_rng(1, 0, 5);
  const auto a = MfModel::initialize(4, 3, 6, 0.1, ua, ia);
  const auto b = MfModel::initialize(4, 5, 6, 0.1, ub, ib);
  EXPECT_EQ(a.item_embeddings, b.item_embeddings);
  EXPECT_EQ(a.dim(), 4);
  EXPECT_EQ(b.num_users(), 5);
  EXPECT_EQ(a.num_items(), 6);
}

TEST(BprTripleLoss, EqualItemsGiveLog2) {
  auto rng = make_rng(2);
  DenseMatrix items = random_normal(3, 2, rng);
  items.col(1) = items.col(0);
  const auto m = model_from(random_normal(3, 1, rng), items);
  EXPECT_NEAR(bpr_triple_loss(m, {0, 0, 1}, 0.0), std::log(2.0), 1e-12);
}

TEST(BprTripleLoss, SaturatesToZero) {
  DenseMatrix u(1, 1), i(1, 2);
  u << 1;
  i << 800, -800;
  const double loss = bpr_triple_loss(model_from(u, i), {0, 0, 1}, 0.0);
  EXPECT_GE(loss, 0.0);
  EXPECT_LT(loss, 1e-300);
  EXPECT_TRUE(std::isfinite(bpr_triple_loss(model_from(u, i), {0, 1, 0}, 0.0)));
}

double relative_error(double a, double b) {
  return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

TEST(BprTripleGradient, MatchesCentralDifferences) {
  auto rng = make_rng(3);
  const double h = 1e-6;
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 2 + trial % 6;
    auto m = model_from(random_normal(d, 2, rng), random_normal(d, 4, rng));
    const BprTriple t{static_cast<std::int32_t>(trial % 2), trial % 4, (trial + 1) % 4};
    const double l2 = 0.01 * (trial % 3);
    const auto g = bpr_triple_gradient(m, t, l2);
    const auto check = [&](DenseMatrix& table, std::int32_t col, const Vector& analytic) {
      for (int k = 0; k < d; ++k) {
        const double saved = table(k, col);
        table(k, col) = saved + h;
        const double up = bpr_triple_loss(m, t, l2);
        table(k, col) = saved - h;
        const double down = bpr_triple_loss(m, t, l2);
        table(k, col) = saved;
        EXPECT_LE(relative_error((up - down) / (2 * h), analytic(k)), 1e-4);
      }
    };
    check(m.user_embeddings, t.user, g.user);
    check(m.item_embeddings, t.positive, g.positive);
    check(m.item_embeddings, t.negative, g.negative);
  }
}

ShardTrainData toy_shard() {
  ShardTrainData s;
  s.items_by_user = {{0, 2}, {1}, {}, {0, 1, 2, 3, 4}};
  return s;
}

TEST(BprEpoch, ZeroLearningRateIsIdentity) {
  auto ur = make_rng(4, 1), ir = make_rng(4, 2), er = make_rng(4, 3);
  auto m = MfModel::initialize(4, 4, 5, 0.1, ur, ir);
  const auto before = m;
  const double loss = bpr_epoch(m, toy_shard(), 0.0, 0.01, er);
  EXPECT_GT(loss, 0.0);
  EXPECT_EQ(m.user_embeddings, before.user_embeddings);
  EXPECT_EQ(m.item_embeddings, before.item_embeddings);
}

TEST(BprEpoch, SkipsEmptyAndSaturatedUsers) {
  auto ur = make_rng(5, 1), ir = make_rng(5, 2), er = make_rng(5, 3);
  auto m = MfModel::initialize(4, 4, 5, 0.1, ur, ir);
  const auto before = m;
  bpr_epoch(m, toy_shard(), 0.1, 0.0, er);
  EXPECT_EQ(m.user_embeddings.col(2), before.user_embeddings.col(2));
  EXPECT_EQ(m.user_embeddings.col(3), before.user_embeddings.col(3));
  EXPECT_NE(m.user_embeddings.col(0), before.user_embeddings.col(0));
}

TEST(BprEpoch, LossDecreasesOverEpochs) {
  auto rng = make_rng(6);
  ShardTrainData shard;
  shard.items_by_user = random_rows(20, 30, 0.2, rng);
  auto ur = make_rng(6, 1), ir = make_rng(6, 2), er = make_rng(6, 3);
  auto m = MfModel::initialize(8, 20, 30, 0.1, ur, ir);
  const double first = bpr_epoch(m, shard, 0.1, 1e-4, er);
  double last = first;
  for (int e = 0; e < 30; ++e) last = bpr_epoch(m, shard, 0.1, 1e-4, er);
  EXPECT_LT(last, 0.7 * first);
}

TEST(BprEpoch, DeterministicGivenSeed) {
  auto rng = make_rng(7);
  ShardTrainData shard;
  shard.items_by_user = random_rows(6, 10, 0.3, rng);
  const auto run = [&] {
    auto ur = make_rng(7, 1), ir = make_rng(7, 2), er = make_rng(7, 3);
    auto m = MfModel::initialize(3, 6, 10, 0.1, ur, ir);
    bpr_epoch(m, shard, 0.05, 1e-3, er);
    return m;
  };
  EXPECT_EQ(run().item_embeddings, run().item_embeddings);
}

TEST(BprEpoch, RejectsBadArguments) {
  auto ur = make_rng(8, 1), ir = make_rng(8, 2), er = make_rng(8, 3);
  auto m = MfModel::initialize(2, 4, 5, 0.1, ur, ir);
  EXPECT_THROW(bpr_epoch(m, toy_shard(), -0.1, 0.0, er), std::invalid_argument);
  EXPECT_THROW(bpr_epoch(m, toy_shard(), 0.1, -1.0, er), std::invalid_argument);
  ShardTrainData wrong;
  wrong.items_by_user = {{0}};
  EXPECT_THROW(bpr_epoch(m, wrong, 0.1, 0.0, er), ShapeError);
}

TEST(BuildLinearFilter, SingleUserOracle) {
  const SparseInteractionMatrix a(3, {{0, 1}});
  DenseMatrix expected = DenseMatrix::Zero(3, 3);
  expected.topLeftCorner(2, 2).setConstant(0.5);
  const auto f = build_linear_filter(a);
  EXPECT_LE((f.values - expected).cwiseAbs().maxCoeff(), 1e-15);
  Eigen::RowVectorXd want(3);
  want << 1, 1, 0;
  EXPECT_LE((filter_predict(a, f).row(0) - want).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(BuildLinearFilter, EmptyShardGivesZero) {
  const SparseInteractionMatrix a(4, {{}, {}});
  EXPECT_EQ(build_linear_filter(a).values, DenseMatrix::Zero(4, 4));
}

TEST(BuildLinearFilter, MatchesDenseFormulaAndIsSymmetric) {
  auto rng = make_rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const SparseInteractionMatrix a(12, random_rows(9, 12, 0.3, rng));
    const auto at = normalize_bipartite(a);
    const auto f = build_linear_filter(a);
    EXPECT_LE((f.values - at.transpose() * at).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(max_asymmetry(f.values), 0.0);
  }
}

TEST(FilterPredict, IdentityAndZeroFilters) {
  auto rng = make_rng(10);
  const SparseInteractionMatrix a(5, random_rows(4, 5, 0.5, rng));
  EXPECT_EQ(filter_predict(a, LinearFilter(DenseMatrix::Identity(5, 5))), a.to_dense());
  EXPECT_EQ(filter_predict(a, LinearFilter(DenseMatrix::Zero(5, 5))), DenseMatrix::Zero(4, 5));
  EXPECT_THROW(filter_predict(a, LinearFilter(DenseMatrix::Zero(4, 4))), ShapeError);
}

TEST(LinearFilter, EqualsGramOfSvdInitializedItems) {
  auto rng = make_rng(11);
  const SparseInteractionMatrix a(10, random_rows(8, 10, 0.35, rng));
  const auto at = normalize_bipartite(a);
  Eigen::JacobiSVD<DenseMatrix> svd(at, Eigen::ComputeThinV);
  const DenseMatrix items = svd.singularValues().asDiagonal() * svd.matrixV().transpose();
  EXPECT_LE((gram(items) - build_linear_filter(a).values).cwiseAbs().maxCoeff(), 1e-8);
}

}  // namespace
}  // namespace fedcia
