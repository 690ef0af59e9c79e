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
// Small linear-algebra layer on top of Eigen: binary interaction matrices,
// degree normalization, Gram matrices and symmetric truncated SVD.

#ifndef FEDCIA_MATRIXKIT_HPP_
#define FEDCIA_MATRIXKIT_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace fedcia {

using DenseMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kDefaultTolerance = 1e-8;

// Binary N x M matrix stored as sorted item lists per row.
class SparseInteractionMatrix {
 public:
  SparseInteractionMatrix() = default;
  // Each row must be strictly increasing with entries in [0, cols).
  SparseInteractionMatrix(std::int32_t cols, std::vector<std::vector<std::int32_t>> rows);

  static SparseInteractionMatrix from_dense(const DenseMatrix& binary);

  std::int32_t rows() const { return static_cast<std::int32_t>(rows_.size()); }
  std::int32_t cols() const { return cols_; }
  const std::vector<std::int32_t>& row(std::int32_t r) const { return rows_[r]; }
  std::size_t nnz() const;

  std::vector<std::int32_t> row_degrees() const;
  std::vector<std::int32_t> col_degrees() const;
  DenseMatrix to_dense() const;

 private:
  std::int32_t cols_ = 0;
  std::vector<std::vector<std::int32_t>> rows_;
};

// Top-L eigenpairs of a symmetric matrix, ordered by |eigenvalue|.
// Singular values are the magnitudes; the sign is kept with the value so
// that reconstruction works for indefinite (e.g. noised) inputs and only one
// set of vectors has to be stored.
struct TruncatedSVD {
  DenseMatrix left_vectors;  // M x L, orthonormal columns
  Vector signed_values;      // L entries, |.| non-increasing

  std::int32_t rank() const { return static_cast<std::int32_t>(signed_values.size()); }
  Vector singular_values() const { return signed_values.cwiseAbs(); }
  // Number of reals needed to transmit this factorization: M*L + L.
  std::size_t payload_values() const {
    return static_cast<std::size_t>(left_vectors.size() + signed_values.size());
  }
};

// D_u^{-1/2} A D_i^{-1/2}, with 0^{-1/2} := 0 for isolated rows or columns.
DenseMatrix normalize_bipartite(const SparseInteractionMatrix& a);

// E^T E for a d x M embedding table; the result is exactly symmetric.
DenseMatrix gram(const DenseMatrix& embeddings);

double max_asymmetry(const DenseMatrix& m);

// Throws std::invalid_argument if `c` is not square and symmetric within
// `tolerance`, or if rank is outside [1, M].
TruncatedSVD truncated_svd(const DenseMatrix& c, std::int32_t rank,
                           double tolerance = kDefaultTolerance);

// U diag(sigma) U^T, exactly symmetric.
DenseMatrix reconstruct(const TruncatedSVD& svd);

}  // namespace fedcia

#endif  // FEDCIA_MATRIXKIT_HPP_
