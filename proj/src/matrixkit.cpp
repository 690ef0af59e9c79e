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
#include "fedcia/matrixkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Eigenvalues>

namespace fedcia {
namespace {

double inv_sqrt_or_zero(std::int32_t degree) {
  return degree > 0 ? 1.0 / std::sqrt(static_cast<double>(degree)) : 0.0;
}

void mirror_lower(DenseMatrix& m) {
  m.triangularView<Eigen::StrictlyUpper>() = m.transpose();
}

}  // namespace

SparseInteractionMatrix::SparseInteractionMatrix(std::int32_t cols,
                                                 std::vector<std::vector<std::int32_t>> rows)
    : cols_(cols), rows_(std::move(rows)) {
  if (cols_ < 0) throw std::invalid_argument("negative column count");
  for (const auto& r : rows_) {
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (r[k] < 0 || r[k] >= cols_) throw std::invalid_argument("column index out of range");
      if (k > 0 && r[k] <= r[k - 1]) {
        throw std::invalid_argument("row indices must be strictly increasing");
      }
    }
  }
}

SparseInteractionMatrix SparseInteractionMatrix::from_dense(const DenseMatrix& binary) {
  std::vector<std::vector<std::int32_t>> rows(binary.rows());
  for (Eigen::Index r = 0; r < binary.rows(); ++r) {
    for (Eigen::Index c = 0; c < binary.cols(); ++c) {
      if (binary(r, c) != 0.0) rows[r].push_back(static_cast<std::int32_t>(c));
    }
  }
  return SparseInteractionMatrix(static_cast<std::int32_t>(binary.cols()), std::move(rows));
}

std::size_t SparseInteractionMatrix::nnz() const {
  return std::accumulate(rows_.begin(), rows_.end(), std::size_t{0},
                         [](std::size_t acc, const auto& r) { return acc + r.size(); });
}

std::vector<std::int32_t> SparseInteractionMatrix::row_degrees() const {
  std::vector<std::int32_t> out(rows_.size());
  for (std::size_t r = 0; r < rows_.size(); ++r) out[r] = static_cast<std::int32_t>(rows_[r].size());
  return out;
}

std::vector<std::int32_t> SparseInteractionMatrix::col_degrees() const {
  std::vector<std::int32_t> out(cols_, 0);
  for (const auto& r : rows_) {
    for (auto c : r) ++out[c];
  }
  return out;
}

DenseMatrix SparseInteractionMatrix::to_dense() const {
  DenseMatrix out = DenseMatrix::Zero(rows(), cols_);
  for (std::int32_t r = 0; r < rows(); ++r) {
    for (auto c : rows_[r]) out(r, c) = 1.0;
  }
  return out;
}

DenseMatrix normalize_bipartite(const SparseInteractionMatrix& a) {
  const auto du = a.row_degrees();
  const auto di = a.col_degrees();
  DenseMatrix out = DenseMatrix::Zero(a.rows(), a.cols());
  for (std::int32_t r = 0; r < a.rows(); ++r) {
    const double ru = inv_sqrt_or_zero(du[r]);
    for (auto c : a.row(r)) out(r, c) = ru * inv_sqrt_or_zero(di[c]);
  }
  return out;
}

DenseMatrix gram(const DenseMatrix& embeddings) {
  const auto m = embeddings.cols();
  DenseMatrix c = DenseMatrix::Zero(m, m);
  c.selfadjointView<Eigen::Lower>().rankUpdate(embeddings.transpose());
  mirror_lower(c);
  return c;
}

double max_asymmetry(const DenseMatrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  if (m.size() == 0) return 0.0;
  return (m - m.transpose()).cwiseAbs().maxCoeff();
}

TruncatedSVD truncated_svd(const DenseMatrix& c, std::int32_t rank, double tolerance) {
  const auto m = c.rows();
  if (c.rows() != c.cols()) throw std::invalid_argument("truncated_svd: matrix is not square");
  if (rank < 1 || rank > m) {
    throw std::invalid_argument("truncated_svd: rank " + std::to_string(rank) + " outside [1, " +
                                std::to_string(m) + "]");
  }
  if (max_asymmetry(c) > tolerance) {
    throw std::invalid_argument("truncated_svd: matrix is not symmetric");
  }

  // For symmetric C the singular values are |lambda| and U_left = U_right
  // up to the eigenvalue sign, which we carry in signed_values.
  Eigen::SelfAdjointEigenSolver<DenseMatrix> solver(c);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("truncated_svd: eigendecomposition failed");
  }
  const Vector& lambda = solver.eigenvalues();
  std::vector<Eigen::Index> order(m);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(lambda[a]) > std::abs(lambda[b]);
  });

  TruncatedSVD out;
  out.left_vectors.resize(m, rank);
  out.signed_values.resize(rank);
  for (std::int32_t k = 0; k < rank; ++k) {
    Vector v = solver.eigenvectors().col(order[k]);
    // Canonical sign: largest-magnitude component positive.
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v[arg] < 0) v = -v;
    out.left_vectors.col(k) = v;
    out.signed_values[k] = lambda[order[k]];
  }
  return out;
}

DenseMatrix reconstruct(const TruncatedSVD& svd) {
  DenseMatrix out = (svd.left_vectors * svd.signed_values.asDiagonal()) * svd.left_vectors.transpose();
  // Averaging with the transpose is exact: a + b == b + a in floating point.
  DenseMatrix sym = 0.5 * (out + out.transpose());
  return sym;
}

}  // namespace fedcia
