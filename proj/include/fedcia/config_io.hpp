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
// JSON configs, manifests and report serialization.
//
// A config is a flat JSON object whose keys match ExperimentConfig fields
// (dataset_path, dataset_format, clients, aggregator, ...). In a manifest,
// a list value for a scalar key (or a list of lists for `dims`) makes that
// key a grid axis; the cells are the Cartesian product.

#ifndef FEDCIA_CONFIG_IO_HPP_
#define FEDCIA_CONFIG_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fedcia/orchestrator.hpp"

namespace fedcia {

using json = nlohmann::json;

ExperimentConfig config_from_json(const json& j);
json config_to_json(const ExperimentConfig& cfg);

// Expands grid axes; the last axis varies fastest. Cells share the base
// seed unless `seed` itself is an axis.
std::vector<ExperimentConfig> expand_manifest(const json& manifest);

struct RunManifest {
  std::vector<ExperimentConfig> configs;
  std::optional<std::string> out_dir;
};

// Reads and expands a manifest file: either one (grid) object or an array of
// them. A top-level "out_dir" key is taken as the output directory. Relative
// dataset paths resolve against the manifest's directory. `seed_override`
// replaces the base seed before expansion. Throws ConfigError ("config not
// found: ...") when the file is missing.
RunManifest load_manifest(const std::filesystem::path& path,
                          std::optional<std::uint64_t> seed_override = {});

// 16 hex digits of FNV-1a over the canonical config JSON.
std::string config_hash(const ExperimentConfig& cfg);

// The report JSON omits wall-clock time and snapshots so that identical
// configs give byte-identical documents.
json report_to_json(const ExperimentReport& report);
std::string report_to_string(const ExperimentReport& report);

// round,f1,mrr,ndcg,mean_l_pred,mean_l_item,payload_values
std::string learning_curve_csv(const ExperimentReport& report);
std::string matrix_csv(const DenseMatrix& m);

}  // namespace fedcia

#endif  // FEDCIA_CONFIG_IO_HPP_
