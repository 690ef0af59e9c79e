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
// Implicit-feedback datasets: loading rating files, per-user train /
// validation / test splitting and assignment of users to clients.

#ifndef FEDCIA_DATASET_HPP_
#define FEDCIA_DATASET_HPP_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "fedcia/matrixkit.hpp"

namespace fedcia {

enum class RatingFormat {
  kTabSeparated,          // user \t item \t rating \t timestamp  (Ml-100k)
  kDoubleColonSeparated,  // user::item::rating::timestamp       (Ml-1m)
};

struct Interaction {
  std::int32_t user = 0;
  std::int32_t item = 0;

  friend bool operator==(const Interaction&, const Interaction&) = default;
  friend auto operator<=>(const Interaction&, const Interaction&) = default;
};

// Raw id <-> dense index table. Dense indices follow first appearance.
class IdMap {
 public:
  // Returns the dense index for `raw`, assigning the next one if unseen.
  std::int32_t intern(const std::string& raw);
  std::optional<std::int32_t> find(const std::string& raw) const;
  const std::string& raw(std::int32_t index) const { return to_raw_.at(index); }
  std::int32_t size() const { return static_cast<std::int32_t>(to_raw_.size()); }

  friend bool operator==(const IdMap& a, const IdMap& b) { return a.to_raw_ == b.to_raw_; }

 private:
  std::vector<std::string> to_raw_;
  std::unordered_map<std::string, std::int32_t> to_index_;
};

struct IdMaps {
  IdMap users;
  IdMap items;
};

// Deduplicated (user, item) positives over a dense id space. Split views
// share one IdMaps instance and identical num_users / num_items.
struct InteractionDataset {
  std::int32_t num_users = 0;
  std::int32_t num_items = 0;
  std::vector<Interaction> interactions;
  std::shared_ptr<const IdMaps> id_maps;

  // Sorted item list per user.
  std::vector<std::vector<std::int32_t>> items_by_user() const;
  SparseInteractionMatrix to_matrix() const;
};

struct SplitDataset {
  InteractionDataset train;
  InteractionDataset validation;
  InteractionDataset test;
};

enum class PartitionMode { kBalancedRandom, kOneUserPerClient };

struct ClientPartition {
  std::int32_t num_clients = 0;
  std::vector<std::int32_t> assignments;  // user -> client

  // Users of each client in ascending user order.
  std::vector<std::vector<std::int32_t>> users_by_client() const;
};

// Lines starting with '#' and blank lines are skipped. Throws DataError for
// unreadable files, malformed lines (with line number) and empty results.
InteractionDataset load_interactions(const std::filesystem::path& path, RatingFormat format,
                                     std::optional<double> rating_threshold = std::nullopt);

// Per-user stratified split. Users with fewer than 3 interactions keep all
// of them in train; otherwise every user keeps at least one train item.
SplitDataset split_dataset(const InteractionDataset& dataset, double test_fraction,
                           double validation_fraction_of_train, std::uint64_t seed);

ClientPartition partition_clients(const InteractionDataset& dataset, std::int32_t num_clients,
                                  PartitionMode mode, std::uint64_t seed);

}  // namespace fedcia

#endif  // FEDCIA_DATASET_HPP_
