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

#include <algorithm>
#include <cstdio>
#include <string>

#include <gtest/gtest.h>

#include "fedcia/config_io.hpp"
#include "fedcia/error.hpp"
#include "test_support.hpp"

namespace fedcia {
namespace {

using testing::clustered_dataset;
using testing::TempDir;

TEST(ConfigJson, RoundTripPreservesEveryField) {
  ExperimentConfig cfg;
  cfg.name = "x";
  cfg.dataset.path = "/data/u.data";
  cfg.dataset.format = RatingFormat::kDoubleColonSeparated;
  cfg.dataset.rating_threshold = 4.0;
  cfg.num_clients = 7;
  cfg.data_seed = 3;
  cfg.backbone = Backbone::kLinearFilter;
  cfg.aggregator = Aggregator::kIndependent;
  cfg.dims = {4, 8};
  cfg.beta = 0.3;
  cfg.beta_grid = {0.5, 2.0};
  cfg.ldp = LdpConfig{.delta = 0.0, .clip_bound = 1.0, .epsilon = 2.0};
  cfg.compression_rank = 5;
  cfg.snapshot_clients = 2;
  const auto j = config_to_json(cfg);
  const auto back = config_from_json(j);
  EXPECT_EQ(config_to_json(back), j);
  EXPECT_EQ(config_hash(back), config_hash(cfg));
}

TEST(ConfigJson, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(config_from_json(json{{"bogus", 1}}), ConfigError);
  EXPECT_THROW(config_from_json(json{{"aggregator", "fedavg"}}), ConfigError);
  EXPECT_THROW(config_from_json(json{{"clients", "many"}}), ConfigError);
  EXPECT_THROW(config_from_json(json{{"learning_rate", -1.0}}), ConfigError);
  EXPECT_THROW(config_from_json(json::array()), ConfigError);
}

TEST(ConfigJson, WsaWithMixedDimsFailsOnLoad) {
  try {
    config_from_json(json{{"aggregator", "wsa"}, {"dims", {8, 16, 32}}});
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("incompatible architectures"), std::string::npos);
  }
}

TEST(Manifest, CartesianProductLastAxisFastest) {
  const json grid = {{"aggregator", {"cia", "wsa"}}, {"com_num", {1, 2, 3}}, {"seed", 9}};
  const auto cells = expand_manifest(grid);
  ASSERT_EQ(cells.size(), 6u);
  EXPECT_EQ(cells[0].aggregator, Aggregator::kCia);
  EXPECT_EQ(cells[0].com_num, 1);
  EXPECT_EQ(cells[1].com_num, 2);
  EXPECT_EQ(cells[3].aggregator, Aggregator::kWsa);
  for (const auto& c : cells) EXPECT_EQ(c.seed, 9u);
}

TEST(Manifest, ListValuedKeysNeedNestedListsToBecomeAxes) {
  EXPECT_EQ(expand_manifest(json{{"dims", {8, 16}}}).size(), 1u);
  const auto cells = expand_manifest(json{{"dims", {{8}, {16, 32}}}});
  ASSERT_EQ(cells.size(), 2u);
  EXPECT_EQ(cells[1].dims, (std::vector<std::int32_t>{16, 32}));
  EXPECT_EQ(expand_manifest(json::array({json{{"seed", 1}}, json{{"seed", {2, 3}}}})).size(), 3u);
  EXPECT_THROW(expand_manifest(json{{"com_num", json::array()}}), ConfigError);
}

TEST(Manifest, MissingFileIsConfigError) {
  try {
    load_manifest("/nonexistent/missing.json");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("config not found"), std::string::npos);
  }
}

TEST(Manifest, ResolvesRelativePathsAndSeedOverride) {
  TempDir dir;
  const auto p = dir.write("m.json", R"({"dataset_path": "data/u.data", "seed": 4, "out_dir": "o"})");
  const auto plain = load_manifest(p);
  ASSERT_EQ(plain.configs.size(), 1u);
  EXPECT_EQ(plain.configs[0].dataset.path, (dir.path() / "data/u.data").string());
  EXPECT_EQ(plain.out_dir, "o");
  EXPECT_EQ(plain.configs[0].seed, 4u);
  EXPECT_EQ(load_manifest(p, 77).configs[0].seed, 77u);
  const auto bad = dir.write("bad.json", "{not json");
  EXPECT_THROW(load_manifest(bad), ConfigError);
}

TEST(Report, SerializationIsDeterministicAndCurveHasAllRounds) {
  ExperimentConfig cfg;
  cfg.num_clients = 3;
  cfg.com_num = 2;
  cfg.epoch_c = 1;
  cfg.epoch_i = 2;
  cfg.dims = {4};
  cfg.item_align_learning_rate = 10;
  const auto data = clustered_dataset(20, 12, 5);
  const auto a = run_experiment(cfg, data);
  const auto b = run_experiment(cfg, data);
  EXPECT_EQ(report_to_string(a), report_to_string(b));
  const auto csv = learning_curve_csv(a);
  EXPECT_EQ(csv.rfind("round,f1,mrr,ndcg,mean_l_pred,mean_l_item,payload_values\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);  // header, round 0, two rounds
  const auto j = json::parse(report_to_string(a));
  EXPECT_EQ(j["rounds"].size(), 2u);
  EXPECT_FALSE(j.contains("wall_clock_seconds"));
}

TEST(Report, MatrixCsvRoundTripsDoubles) {
  DenseMatrix m(2, 2);
  m << 0.1, -1e-300, 3.0, 1.0 / 3.0;
  const auto text = matrix_csv(m);
  double a, b, c, d;
  ASSERT_EQ(std::sscanf(text.c_str(), "%lf,%lf\n%lf,%lf", &a, &b, &c, &d), 4);
  EXPECT_EQ(a, m(0, 0));
  EXPECT_EQ(b, m(0, 1));
  EXPECT_EQ(c, m(1, 0));
  EXPECT_EQ(d, m(1, 1));
}

}  // namespace
}  // namespace fedcia
