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
#include "fedcia/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <string_view>
#include <utility>

#include "fedcia/error.hpp"
#include "fedcia/rng.hpp"

namespace fedcia {
namespace {

constexpr std::uint64_t kSplitTag = 0x5350'4c49'54ULL;
constexpr std::uint64_t kPartitionTag = 0x5041'5254ULL;

std::vector<std::string_view> split_fields(std::string_view line, RatingFormat format) {
  std::vector<std::string_view> fields;
  const std::string_view delim = format == RatingFormat::kTabSeparated ? "\t" : "::";
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + delim.size();
  }
  return fields;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view s, double& out) {
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

InteractionDataset view_of(const InteractionDataset& source, std::vector<Interaction> rows) {
  InteractionDataset view;
  view.num_users = source.num_users;
  view.num_items = source.num_items;
  view.id_maps = source.id_maps;
  view.interactions = std::move(rows);
  return view;
}

}  // namespace

std::int32_t IdMap::intern(const std::string& raw) {
  auto [it, inserted] = to_index_.try_emplace(raw, static_cast<std::int32_t>(to_raw_.size()));
  if (inserted) to_raw_.push_back(raw);
  return it->second;
}

std::optional<std::int32_t> IdMap::find(const std::string& raw) const {
  const auto it = to_index_.find(raw);
  if (it == to_index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::vector<std::int32_t>> InteractionDataset::items_by_user() const {
  std::vector<std::vector<std::int32_t>> out(num_users);
  for (const auto& x : interactions) out[x.user].push_back(x.item);
  for (auto& items : out) std::sort(items.begin(), items.end());
  return out;
}

SparseInteractionMatrix InteractionDataset::to_matrix() const {
  return SparseInteractionMatrix(num_items, items_by_user());
}

InteractionDataset load_interactions(const std::filesystem::path& path, RatingFormat format,
                                     std::optional<double> rating_threshold) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read interaction file: " + path.string());

  auto maps = std::make_shared<IdMaps>();
  std::vector<Interaction> rows;
  std::set<std::pair<std::int32_t, std::int32_t>> seen;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto fields = split_fields(body, format);
    double rating = 0.0;
    if (fields.size() != 4 || trim(fields[0]).empty() || trim(fields[1]).empty() ||
        !parse_double(trim(fields[2]), rating)) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": malformed line '" +
                      line + "'");
    }
    if (rating_threshold && rating < *rating_threshold) continue;
    // Ids are interned only for kept interactions so that the maps cover
    // exactly the observed users and items.
    const auto user = maps->users.intern(std::string(trim(fields[0])));
    const auto item = maps->items.intern(std::string(trim(fields[1])));
    if (seen.emplace(user, item).second) rows.push_back({user, item});
  }
  if (in.bad()) throw DataError("error while reading " + path.string());
  if (rows.empty()) throw DataError("zero interactions in " + path.string());

  InteractionDataset ds;
  ds.num_users = maps->users.size();
  ds.num_items = maps->items.size();
  ds.interactions = std::move(rows);
  ds.id_maps = std::move(maps);
  return ds;
}

SplitDataset split_dataset(const InteractionDataset& dataset, double test_fraction,
                           double validation_fraction_of_train, std::uint64_t seed) {
  if (!(test_fraction >= 0.0 && test_fraction <= 1.0) ||
      !(validation_fraction_of_train >= 0.0 && validation_fraction_of_train <= 1.0)) {
    throw std::invalid_argument("split fractions must lie in [0, 1]");
  }

  // Positions of each user's interactions in the source order.
  std::vector<std::vector<std::size_t>> positions(dataset.num_users);
  for (std::size_t p = 0; p < dataset.interactions.size(); ++p) {
    positions[dataset.interactions[p].user].push_back(p);
  }

  enum Part : std::uint8_t { kTrain, kValidation, kTest };
  std::vector<Part> part(dataset.interactions.size(), kTrain);
  for (std::int32_t u = 0; u < dataset.num_users; ++u) {
    auto& mine = positions[u];
    const auto n = static_cast<std::int64_t>(mine.size());
    if (n < 3) continue;
    auto rng = make_rng(seed, static_cast<std::uint64_t>(u), kSplitTag);
    shuffle(mine.begin(), mine.end(), rng);

    auto n_test = static_cast<std::int64_t>(std::llround(test_fraction * static_cast<double>(n)));
    n_test = std::min(n_test, n - 1);
    auto n_val = static_cast<std::int64_t>(
        std::llround(validation_fraction_of_train * static_cast<double>(n - n_test)));
    n_val = std::min(n_val, n - n_test - 1);
    for (std::int64_t k = 0; k < n_test; ++k) part[mine[k]] = kTest;
    for (std::int64_t k = n_test; k < n_test + n_val; ++k) part[mine[k]] = kValidation;
  }

  std::vector<Interaction> train, validation, test;
  for (std::size_t p = 0; p < dataset.interactions.size(); ++p) {
    switch (part[p]) {
      case kTrain: train.push_back(dataset.interactions[p]); break;
      case kValidation: validation.push_back(dataset.interactions[p]); break;
      case kTest: test.push_back(dataset.interactions[p]); break;
    }
  }
  return {view_of(dataset, std::move(train)), view_of(dataset, std::move(validation)),
          view_of(dataset, std::move(test))};
}

ClientPartition partition_clients(const InteractionDataset& dataset, std::int32_t num_clients,
                                  PartitionMode mode, std::uint64_t seed) {
  ClientPartition out;
  if (mode == PartitionMode::kOneUserPerClient) {
    out.num_clients = dataset.num_users;
    out.assignments.resize(dataset.num_users);
    std::iota(out.assignments.begin(), out.assignments.end(), 0);
    return out;
  }
  if (num_clients < 1 || num_clients > dataset.num_users) {
    throw std::invalid_argument("client count " + std::to_string(num_clients) +
                                " outside [1, " + std::to_string(dataset.num_users) + "]");
  }
  std::vector<std::int32_t> order(dataset.num_users);
  std::iota(order.begin(), order.end(), 0);
  auto rng = make_rng(seed, 0, kPartitionTag);
  shuffle(order.begin(), order.end(), rng);

  out.num_clients = num_clients;
  out.assignments.resize(dataset.num_users);
  for (std::size_t k = 0; k < order.size(); ++k) {
    out.assignments[order[k]] = static_cast<std::int32_t>(k % num_clients);
  }
  return out;
}

std::vector<std::vector<std::int32_t>> ClientPartition::users_by_client() const {
  std::vector<std::vector<std::int32_t>> out(num_clients);
  for (std::size_t u = 0; u < assignments.size(); ++u) {
    out[assignments[u]].push_back(static_cast<std::int32_t>(u));
  }
  return out;
}

}  // namespace fedcia
