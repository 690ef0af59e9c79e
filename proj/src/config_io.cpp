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
#include "fedcia/config_io.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "fedcia/error.hpp"

namespace fedcia {
namespace {

// Keys whose value is itself a list; they become grid axes only when given
// as a list of lists.
const std::set<std::string> kListKeys = {"dims", "beta_grid"};

const std::set<std::string> kKnownKeys = {
    "name", "dataset_path", "dataset_format", "rating_threshold", "test_fraction",
    "validation_fraction", "clients", "partition_mode", "data_seed", "backbone", "aggregator",
    "com_num", "epoch_c", "epoch_i", "learning_rate", "item_align_learning_rate", "l2_reg",
    "init_std", "dims", "beta", "beta_grid", "ldp_delta", "ldp_clip_bound", "ldp_epsilon",
    "compression_rank", "eval_k", "seed", "snapshot_embeddings", "snapshot_clients"};

template <typename T>
T get_as(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("config key '" + key + "': " + e.what());
  }
}

template <typename T>
void read(const json& obj, const std::string& key, T& out) {
  if (const auto it = obj.find(key); it != obj.end() && !it->is_null()) out = get_as<T>(*it, key);
}

template <typename T>
void read(const json& obj, const std::string& key, std::optional<T>& out) {
  if (const auto it = obj.find(key); it != obj.end()) {
    if (it->is_null()) {
      out.reset();
    } else {
      out = get_as<T>(*it, key);
    }
  }
}

template <typename Enum>
Enum parse_enum(const json& obj, const std::string& key, Enum fallback,
                std::initializer_list<std::pair<const char*, Enum>> names) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  const auto text = get_as<std::string>(*it, key);
  for (const auto& [name, value] : names) {
    if (text == name) return value;
  }
  throw ConfigError("config key '" + key + "': unknown value '" + text + "'");
}

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

json metrics_json(const RankingMetrics& m) {
  return {{"f1", m.f1}, {"mrr", m.mrr}, {"ndcg", m.ndcg}};
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool is_axis(const std::string& key, const json& value) {
  if (!value.is_array()) return false;
  if (kListKeys.count(key)) return !value.empty() && value.front().is_array();
  return true;
}

std::vector<ExperimentConfig> expand_one(const json& grid) {
  if (!grid.is_object()) throw ConfigError("manifest entries must be JSON objects");
  std::vector<std::string> axes;
  for (const auto& [key, value] : grid.items()) {
    if (key == "out_dir") continue;
    if (!kKnownKeys.count(key)) throw ConfigError("unknown config key '" + key + "'");
    if (is_axis(key, value)) {
      if (value.empty()) throw ConfigError("grid axis '" + key + "' is empty");
      axes.push_back(key);
    }
  }

  std::size_t cells = 1;
  for (const auto& a : axes) cells *= grid.at(a).size();

  json base = grid;
  base.erase("out_dir");

  std::vector<ExperimentConfig> out;
  out.reserve(cells);
  for (std::size_t cell = 0; cell < cells; ++cell) {
    json j = base;
    std::size_t rest = cell;
    // Last axis varies fastest.
    for (auto it = axes.rbegin(); it != axes.rend(); ++it) {
      const auto& values = grid.at(*it);
      j[*it] = values.at(rest % values.size());
      rest /= values.size();
    }
    out.push_back(config_from_json(j));
  }
  return out;
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!kKnownKeys.count(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  ExperimentConfig cfg;
  read(j, "name", cfg.name);
  read(j, "dataset_path", cfg.dataset.path);
  cfg.dataset.format = parse_enum(j, "dataset_format", cfg.dataset.format,
                                  {{"tab_separated", RatingFormat::kTabSeparated},
                                   {"double_colon_separated", RatingFormat::kDoubleColonSeparated}});
  read(j, "rating_threshold", cfg.dataset.rating_threshold);
  read(j, "test_fraction", cfg.dataset.test_fraction);
  read(j, "validation_fraction", cfg.dataset.validation_fraction);
  read(j, "clients", cfg.num_clients);
  cfg.partition_mode = parse_enum(j, "partition_mode", cfg.partition_mode,
                                  {{"balanced_random", PartitionMode::kBalancedRandom},
                                   {"one_user_per_client", PartitionMode::kOneUserPerClient}});
  read(j, "data_seed", cfg.data_seed);
  cfg.backbone = parse_enum(j, "backbone", cfg.backbone,
                            {{"mf_bpr", Backbone::kMfBpr}, {"linear_filter", Backbone::kLinearFilter}});
  cfg.aggregator = parse_enum(j, "aggregator", cfg.aggregator,
                              {{"cia", Aggregator::kCia},
                               {"wsa", Aggregator::kWsa},
                               {"independent", Aggregator::kIndependent}});
  read(j, "com_num", cfg.com_num);
  read(j, "epoch_c", cfg.epoch_c);
  read(j, "epoch_i", cfg.epoch_i);
  read(j, "learning_rate", cfg.learning_rate);
  read(j, "item_align_learning_rate", cfg.item_align_learning_rate);
  read(j, "l2_reg", cfg.l2_reg);
  read(j, "init_std", cfg.init_std);
  read(j, "dims", cfg.dims);
  read(j, "beta", cfg.beta);
  read(j, "beta_grid", cfg.beta_grid);
  read(j, "ldp_delta", cfg.ldp.delta);
  read(j, "ldp_clip_bound", cfg.ldp.clip_bound);
  read(j, "ldp_epsilon", cfg.ldp.epsilon);
  read(j, "compression_rank", cfg.compression_rank);
  read(j, "eval_k", cfg.eval_cutoff);
  read(j, "seed", cfg.seed);
  read(j, "snapshot_embeddings", cfg.snapshot_embeddings);
  read(j, "snapshot_clients", cfg.snapshot_clients);
  cfg.validate();
  return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["name"] = cfg.name;
  j["dataset_path"] = cfg.dataset.path;
  j["dataset_format"] = cfg.dataset.format == RatingFormat::kTabSeparated ? "tab_separated"
                                                                          : "double_colon_separated";
  j["rating_threshold"] = optional_json(cfg.dataset.rating_threshold);
  j["test_fraction"] = cfg.dataset.test_fraction;
  j["validation_fraction"] = cfg.dataset.validation_fraction;
  j["clients"] = cfg.num_clients;
  j["partition_mode"] = cfg.partition_mode == PartitionMode::kBalancedRandom ? "balanced_random"
                                                                             : "one_user_per_client";
  j["data_seed"] = optional_json(cfg.data_seed);
  j["backbone"] = to_string(cfg.backbone);
  j["aggregator"] = to_string(cfg.aggregator);
  j["com_num"] = cfg.com_num;
  j["epoch_c"] = cfg.epoch_c;
  j["epoch_i"] = cfg.epoch_i;
  j["learning_rate"] = cfg.learning_rate;
  j["item_align_learning_rate"] = cfg.item_align_learning_rate;
  j["l2_reg"] = cfg.l2_reg;
  j["init_std"] = cfg.init_std;
  j["dims"] = cfg.dims;
  j["beta"] = optional_json(cfg.beta);
  j["beta_grid"] = cfg.beta_grid;
  j["ldp_delta"] = cfg.ldp.delta;
  j["ldp_clip_bound"] = optional_json(cfg.ldp.clip_bound);
  j["ldp_epsilon"] = optional_json(cfg.ldp.epsilon);
  j["compression_rank"] = optional_json(cfg.compression_rank);
  j["eval_k"] = cfg.eval_cutoff;
  j["seed"] = cfg.seed;
  j["snapshot_embeddings"] = cfg.snapshot_embeddings;
  j["snapshot_clients"] = optional_json(cfg.snapshot_clients);
  return j;
}

std::vector<ExperimentConfig> expand_manifest(const json& manifest) {
  std::vector<ExperimentConfig> out;
  if (manifest.is_array()) {
    for (const auto& entry : manifest) {
      auto cells = expand_one(entry);
      out.insert(out.end(), cells.begin(), cells.end());
    }
  } else {
    out = expand_one(manifest);
  }
  return out;
}

RunManifest load_manifest(const std::filesystem::path& path,
                          std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config not found: " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }

  RunManifest out;
  const auto base_dir = path.parent_path();
  auto fix_entry = [&](json& entry) {
    if (!entry.is_object()) throw ConfigError("manifest entries must be JSON objects");
    if (seed_override) entry["seed"] = *seed_override;
    if (auto it = entry.find("dataset_path"); it != entry.end() && it->is_string()) {
      std::filesystem::path p = it->get<std::string>();
      if (p.is_relative() && !base_dir.empty()) *it = (base_dir / p).lexically_normal().string();
    }
    if (auto it = entry.find("out_dir"); it != entry.end()) {
      if (!it->is_string()) throw ConfigError("out_dir must be a string");
      out.out_dir = it->get<std::string>();
    }
  };
  if (j.is_array()) {
    for (auto& entry : j) fix_entry(entry);
  } else {
    fix_entry(j);
  }
  out.configs = expand_manifest(j);
  return out;
}

std::string config_hash(const ExperimentConfig& cfg) {
  const auto text = config_to_json(cfg).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

json report_to_json(const ExperimentReport& report) {
  json j;
  j["config"] = config_to_json(report.config);
  j["config_hash"] = config_hash(report.config);
  j["data"] = {{"num_users", report.data.num_users},
               {"num_items", report.data.num_items},
               {"train", report.data.train},
               {"validation", report.data.validation},
               {"test", report.data.test}};
  j["initial_validation"] = metrics_json(report.initial_validation);
  json rounds = json::array();
  for (const auto& r : report.rounds) {
    rounds.push_back({{"round", r.round},
                      {"mean_l_pred", r.mean_l_pred},
                      {"mean_l_item", r.mean_l_item},
                      {"client_l_pred", r.client_l_pred},
                      {"client_l_item", r.client_l_item},
                      {"validation", metrics_json(r.validation)},
                      {"payload_values", r.payload_values}});
  }
  j["rounds"] = std::move(rounds);
  j["best_round"] = report.best_round;
  j["test"] = metrics_json(report.test);
  j["selected_beta"] = optional_json(report.selected_beta);
  json betas = json::array();
  for (const auto& b : report.beta_validation) {
    betas.push_back({{"beta", b.beta}, {"validation", metrics_json(b.validation)}});
  }
  j["beta_validation"] = std::move(betas);
  return j;
}

std::string report_to_string(const ExperimentReport& report) {
  return report_to_json(report).dump(2) + "\n";
}

std::string learning_curve_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "round,f1,mrr,ndcg,mean_l_pred,mean_l_item,payload_values\n";
  out << 0 << ',' << fmt_double(report.initial_validation.f1) << ','
      << fmt_double(report.initial_validation.mrr) << ','
      << fmt_double(report.initial_validation.ndcg) << ",0,0,0\n";
  for (const auto& r : report.rounds) {
    out << r.round << ',' << fmt_double(r.validation.f1) << ',' << fmt_double(r.validation.mrr) << ','
        << fmt_double(r.validation.ndcg) << ',' << fmt_double(r.mean_l_pred) << ','
        << fmt_double(r.mean_l_item) << ',' << r.payload_values << '\n';
  }
  return out.str();
}

std::string matrix_csv(const DenseMatrix& m) {
  std::string out;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out += ',';
      out += fmt_double(m(r, c));
    }
    out += '\n';
  }
  return out;
}

}  // namespace fedcia
