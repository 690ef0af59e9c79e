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
#include "fedcia/collab.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace fedcia {
namespace {

std::string shape_of(const DenseMatrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

void LdpConfig::validate() const {
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw ConfigError("ldp delta must be finite and >= 0");
  if (clip_bound && !(*clip_bound > 0.0)) throw ConfigError("ldp clip_bound must be > 0");
  if (epsilon) {
    if (!(*epsilon > 0.0)) throw ConfigError("ldp epsilon must be > 0");
    if (!clip_bound) throw ConfigError("ldp epsilon requires clip_bound (sensitivity)");
  }
}

double LdpConfig::scale() const {
  if (epsilon && clip_bound) return 2.0 * *clip_bound / *epsilon;
  return delta;
}

DenseMatrix add_symmetric_laplace_noise(const DenseMatrix& c, const LdpConfig& cfg, Rng& rng) {
  cfg.validate();
  if (c.rows() != c.cols()) throw ShapeError("noise: matrix " + shape_of(c) + " is not square");
  DenseMatrix out = c;
  if (cfg.clip_bound) out = out.cwiseMax(-*cfg.clip_bound).cwiseMin(*cfg.clip_bound);
  const double b = cfg.scale();
  if (b == 0.0) return out;
  const auto m = out.rows();
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      out(i, j) += sample_laplace(rng, b);
      out(j, i) = out(i, j);
    }
  }
  return out;
}

DenseMatrix add_laplace_noise_entrywise(const DenseMatrix& m, const LdpConfig& cfg, Rng& rng) {
  cfg.validate();
  DenseMatrix out = m;
  if (cfg.clip_bound) out = out.cwiseMax(-*cfg.clip_bound).cwiseMin(*cfg.clip_bound);
  const double b = cfg.scale();
  if (b == 0.0) return out;
  for (Eigen::Index k = 0; k < out.size(); ++k) out.data()[k] += sample_laplace(rng, b);
  return out;
}

void MatrixAverager::add(const DenseMatrix& m) {
  if (count_ == 0) {
    sum_ = m;
  } else {
    if (m.rows() != sum_.rows() || m.cols() != sum_.cols()) {
      throw ShapeError("aggregate: shape " + shape_of(m) + " does not match " + shape_of(sum_));
    }
    sum_ += m;
  }
  ++count_;
}

DenseMatrix MatrixAverager::mean() const {
  if (count_ == 0) throw std::invalid_argument("aggregate: no matrices received");
  return sum_ / static_cast<double>(count_);
}

LinearFilter ideal_global_filter(const SparseInteractionMatrix& a, bool equal_popularity) {
  const DenseMatrix dense = a.to_dense();
  const auto n = dense.rows();
  Vector inv_user_degree = dense.rowwise().sum();
  for (Eigen::Index u = 0; u < n; ++u) {
    inv_user_degree[u] = inv_user_degree[u] > 0 ? 1.0 / inv_user_degree[u] : 0.0;
  }
  DenseMatrix f = dense.transpose() * inv_user_degree.asDiagonal() * dense;
  if (equal_popularity) {
    f /= n > 0 ? static_cast<double>(n) : 1.0;
  } else {
    Vector item_scale = dense.colwise().sum().transpose();
    for (Eigen::Index i = 0; i < item_scale.size(); ++i) {
      item_scale[i] = item_scale[i] > 0 ? 1.0 / std::sqrt(item_scale[i]) : 0.0;
    }
    f = item_scale.asDiagonal() * f * item_scale.asDiagonal();
  }
  DenseMatrix sym = 0.5 * (f + f.transpose());
  return LinearFilter(std::move(sym));
}

DenseMatrix aggregate_wsa(std::span<const DenseMatrix> embeddings, std::span<const double> weights) {
  if (embeddings.empty()) throw std::invalid_argument("aggregate_wsa: no embeddings");
  if (embeddings.size() != weights.size()) {
    throw std::invalid_argument("aggregate_wsa: one weight per client required");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("aggregate_wsa: weights must be >= 0");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    std::ostringstream msg;
    msg << "aggregate_wsa: weights sum to " << total << ", expected 1";
    throw std::invalid_argument(msg.str());
  }
  const auto& first = embeddings.front();
  for (const auto& e : embeddings) {
    if (e.rows() != first.rows() || e.cols() != first.cols()) {
      throw ShapeError("incompatible architectures: cannot sum item embeddings of shape " +
                       shape_of(e) + " and " + shape_of(first));
    }
  }
  DenseMatrix out = DenseMatrix::Zero(first.rows(), first.cols());
  for (std::size_t k = 0; k < embeddings.size(); ++k) out += weights[k] * embeddings[k];
  return out;
}

TruncatedSVD compress(const ItemSimilarityMatrix& c, std::int32_t rank) {
  return truncated_svd(c.values, rank);
}

TruncatedSVD compress(const LinearFilter& f, std::int32_t rank) {
  return truncated_svd(f.values, rank);
}

InformationGap l1_information_gap(const DenseMatrix& client_a, const DenseMatrix& client_b,
                                  std::int32_t item_i, std::int32_t item_j) {
  if (client_a.rows() != client_b.rows()) {
    throw ShapeError("l1_information_gap: embedding dimensions differ (" +
                     std::to_string(client_a.rows()) + " vs " + std::to_string(client_b.rows()) +
                     ")");
  }
  const auto in_range = [](const DenseMatrix& e, std::int32_t i) { return i >= 0 && i < e.cols(); };
  if (!in_range(client_a, item_i) || !in_range(client_a, item_j) || !in_range(client_b, item_i) ||
      !in_range(client_b, item_j)) {
    throw std::out_of_range("l1_information_gap: item index out of range");
  }
  const Vector da = client_a.col(item_i) - client_a.col(item_j);
  const Vector db = client_b.col(item_i) - client_b.col(item_j);
  InformationGap out;
  out.collaborative = 0.5 * da.lpNorm<1>() + 0.5 * db.lpNorm<1>();
  out.weighted_sum =
      0.5 * ((client_a.col(item_i) + client_b.col(item_i)) - (client_a.col(item_j) + client_b.col(item_j)))
                .lpNorm<1>();
  return out;
}

}  // namespace fedcia
