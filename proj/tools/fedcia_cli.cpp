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
// fedcia: run federated recommendation experiments.
//
//   fedcia run --config grid.json [--out-dir DIR] [--threads N] [--snapshot-embeddings]
//   fedcia compare --configs a.json b.json ... [--out-dir DIR]
//   fedcia theorem1 --users 20 --items 15 --seed 7
//   fedcia infogap --trials 10000
//
// Exit codes: 0 success, 1 configuration error, 2 runtime failure.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fedcia/collab.hpp"
#include "fedcia/config_io.hpp"
#include "fedcia/error.hpp"
#include "fedcia/orchestrator.hpp"
#include "fedcia/rng.hpp"

namespace fs = std::filesystem;
using namespace fedcia;

namespace {

std::optional<std::uint64_t> seed_from_env() {
  const char* raw = std::getenv("FEDCIA_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  try {
    std::size_t used = 0;
    const auto v = std::stoull(raw, &used);
    if (used != std::string(raw).size()) throw std::invalid_argument(raw);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(std::string("FEDCIA_SEED is not an unsigned integer: ") + raw);
  }
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_outputs(const ExperimentReport& report, const fs::path& dir) {
  fs::create_directories(dir);
  const auto hash = config_hash(report.config);
  write_file(dir / (hash + ".report.json"), report_to_string(report));
  write_file(dir / (hash + ".curve.csv"), learning_curve_csv(report));
  for (const auto& snap : report.snapshots) {
    write_file(dir / (hash + ".snap." + to_string(snap.stage) + "." + std::to_string(snap.client) +
                      ".csv"),
               matrix_csv(snap.item_embeddings));
  }
}

std::string label_of(const ExperimentConfig& cfg) {
  if (!cfg.name.empty()) return cfg.name;
  return std::string(to_string(cfg.backbone)) + "/" + to_string(cfg.aggregator);
}

void print_table(const std::vector<ExperimentReport>& reports) {
  std::printf("%-28s %-14s %-12s %9s %9s %9s\n", "Config", "Backbone", "Method", "F1@K",
              "MRR@K", "NDCG@K");
  for (const auto& r : reports) {
    std::printf("%-28s %-14s %-12s %9.4f %9.4f %9.4f\n", label_of(r.config).c_str(),
                to_string(r.config.backbone), to_string(r.config.aggregator), r.test.f1, r.test.mrr,
                r.test.ndcg);
  }
}

ExperimentReport run_one(ExperimentConfig cfg, std::int32_t threads, bool snapshots) {
  if (snapshots) cfg.snapshot_embeddings = true;
  RunOptions options;
  options.threads = threads;
  return run_experiment(cfg, options);
}

int cmd_run(const std::string& config, std::optional<std::string> out_dir, std::int32_t threads,
            bool snapshots) {
  const auto manifest = load_manifest(config, seed_from_env());
  const fs::path dir = out_dir ? *out_dir : manifest.out_dir.value_or("fedcia_out");
  for (const auto& cfg : manifest.configs) {
    const auto report = run_one(cfg, threads, snapshots);
    write_outputs(report, dir);
    std::cerr << config_hash(cfg) << " " << label_of(cfg) << ": test ndcg " << report.test.ndcg
              << " (" << report.wall_clock_seconds << " s)\n";
  }
  return 0;
}

int cmd_compare(const std::vector<std::string>& configs, std::optional<std::string> out_dir,
                std::int32_t threads) {
  std::vector<ExperimentConfig> all;
  for (const auto& path : configs) {
    auto manifest = load_manifest(path, seed_from_env());
    all.insert(all.end(), manifest.configs.begin(), manifest.configs.end());
  }
  std::vector<ExperimentReport> reports;
  for (const auto& cfg : all) {
    reports.push_back(run_one(cfg, threads, false));
    if (out_dir) write_outputs(reports.back(), *out_dir);
  }
  print_table(reports);
  return 0;
}

int cmd_theorem1(std::int32_t users, std::int32_t items, std::uint64_t seed) {
  if (users < 1 || items < 1) throw ConfigError("--users and --items must be >= 1");
  auto rng = make_rng(seed);
  std::vector<std::vector<std::int32_t>> rows(users);
  for (auto& row : rows) {
    for (std::int32_t i = 0; i < items; ++i) {
      if (uniform_open(rng) < 0.3) row.push_back(i);
    }
  }
  const SparseInteractionMatrix global(items, rows);
  std::vector<LinearFilter> local;
  for (const auto& row : rows) local.push_back(build_linear_filter(SparseInteractionMatrix(items, {row})));
  const auto aggregated = aggregate_cia(local);
  const auto ideal = ideal_global_filter(global, /*equal_popularity=*/true);
  const double deviation = (aggregated.values - ideal.values).cwiseAbs().maxCoeff();
  std::printf("users=%d items=%d seed=%llu\n", users, items, static_cast<unsigned long long>(seed));
  std::printf("max |F_agg - F_ideal| = %.3e\n", deviation);
  return deviation <= 1e-9 ? 0 : 2;
}

int cmd_infogap(std::int64_t trials, std::uint64_t seed) {
  if (trials < 1) throw ConfigError("--trials must be >= 1");
  auto rng = make_rng(seed);
  std::int64_t holds = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (std::int64_t t = 0; t < trials; ++t) {
    const auto d = static_cast<Eigen::Index>(1 + uniform_index(rng, 32));
    DenseMatrix a(d, 2), b(d, 2);
    for (Eigen::Index k = 0; k < a.size(); ++k) a.data()[k] = standard_normal(rng);
    for (Eigen::Index k = 0; k < b.size(); ++k) b.data()[k] = standard_normal(rng);
    const auto gap = l1_information_gap(a, b, 0, 1);
    const double slack = 1e-12 * (1.0 + gap.collaborative);
    holds += gap.collaborative >= gap.weighted_sum - slack ? 1 : 0;
    worst = std::max(worst, gap.weighted_sum - gap.collaborative);
  }
  std::printf("trials=%lld fraction(S_CI >= S_WS) = %.6f\n", static_cast<long long>(trials),
              static_cast<double>(holds) / static_cast<double>(trials));
  std::printf("max (S_WS - S_CI) = %.3e\n", worst);
  return holds == trials ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Federated recommendation with collaborative information aggregation"};
  app.require_subcommand(1);

  std::string config;
  std::vector<std::string> configs;
  std::string out_dir;
  std::int32_t threads = 1;
  bool snapshots = false;

  auto* run = app.add_subcommand("run", "Execute every config in a manifest");
  run->add_option("--config", config, "Manifest JSON")->required();
  run->add_option("--out-dir", out_dir, "Output directory");
  run->add_option("--threads", threads, "Client worker threads")->check(CLI::PositiveNumber);
  run->add_flag("--snapshot-embeddings", snapshots, "Dump per-client item embeddings");

  auto* compare = app.add_subcommand("compare", "Tabulate final test metrics across configs");
  compare->add_option("--configs", configs, "Manifest JSON files")->required();
  compare->add_option("--out-dir", out_dir, "Also write reports here");
  compare->add_option("--threads", threads, "Client worker threads")->check(CLI::PositiveNumber);

  std::int32_t users = 20, items = 15;
  std::uint64_t seed = 7;
  auto* theorem = app.add_subcommand("theorem1", "Check averaged local filters against the ideal filter");
  theorem->add_option("--users", users);
  theorem->add_option("--items", items);
  theorem->add_option("--seed", seed);

  std::int64_t trials = 10000;
  std::uint64_t gap_seed = 1;
  auto* infogap = app.add_subcommand("infogap", "Sample the L1 information gap inequality");
  infogap->add_option("--trials", trials);
  infogap->add_option("--seed", gap_seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  const auto maybe_dir = [&]() -> std::optional<std::string> {
    if (out_dir.empty()) return std::nullopt;
    return out_dir;
  };
  try {
    if (run->parsed()) return cmd_run(config, maybe_dir(), threads, snapshots);
    if (compare->parsed()) return cmd_compare(configs, maybe_dir(), threads);
    if (theorem->parsed()) return cmd_theorem1(users, items, seed);
    if (infogap->parsed()) return cmd_infogap(trials, gap_seed);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
