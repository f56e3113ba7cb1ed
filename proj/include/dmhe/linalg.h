// Copyright 2026 The DMHE Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DMHE_LINALG_H_
#define DMHE_LINALG_H_

#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace dmhe {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;
using Cholesky = Eigen::LLT<Matrix>;

// Factorizes a symmetric positive-definite matrix. Throws ConditioningError
// naming `what` when the factorization fails.
Cholesky FactorSpd(const Matrix& m, std::string_view what);

// Inverse of a (small) weight matrix through its Cholesky factor.
Matrix SpdInverse(const Matrix& m, std::string_view what);

Matrix BlockDiagonal(std::span<const Matrix> blocks);

// Block diagonal with `count` copies of `block`.
Matrix RepeatBlockDiagonal(const Matrix& block, int count);

// Largest eigenvalue modulus of a general square matrix (Hessenberg + shifted
// QR via Eigen::EigenSolver). Throws Error if the solver does not converge.
double SpectralRadius(const Matrix& m);

struct SymmetricExtremes {
  double min = 0.0;
  double max = 0.0;
};

// Smallest and largest eigenvalue of the symmetric part of `m`.
SymmetricExtremes SymmetricEigenExtremes(const Matrix& m);

// Keeps entries (r, c) with owner[r] == owner[c]; zeroes the rest.
Matrix SameOwnerPart(const Matrix& m, std::span<const int> row_owner,
                     std::span<const int> col_owner);

// Row/column gathers by explicit index lists.
Matrix GatherColumns(const Matrix& m, std::span<const Index> cols);
Matrix GatherRows(const Matrix& m, std::span<const Index> rows);
Vector Gather(const Vector& v, std::span<const Index> idx);
void Scatter(const Vector& src, std::span<const Index> idx, Vector& dst);

// Right-hand side of the matrix inversion lemma,
//   A^-1 + A^-1 B (D - C A^-1 B)^-1 C A^-1,
// which equals (A - B D^-1 C)^-1 when A and D are nonsingular. General LU
// solves; A and D need not be symmetric.
Matrix WoodburyInverse(const Matrix& a, const Matrix& b, const Matrix& c,
                       const Matrix& d);

// Inverse of [A B; C D] assembled from the two Schur complements.
Matrix SchurBlockInverse(const Matrix& a, const Matrix& b, const Matrix& c,
                         const Matrix& d);

// Numerical rank convention: singular values above dim * eps * sigma_max.
double RankTolerance(const Vector& singular_values, Index dim);

}  // namespace dmhe

#endif  // DMHE_LINALG_H_
