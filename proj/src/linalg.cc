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

#include "dmhe/linalg.h"

#include <limits>
#include <string>

#include "dmhe/error.h"

namespace dmhe {

Cholesky FactorSpd(const Matrix& m, std::string_view what) {
  if (m.rows() != m.cols()) {
    throw DimensionError(std::string(what) + ": matrix is not square");
  }
  if (!m.allFinite()) {
    throw ConditioningError(std::string(what) + ": matrix has non-finite entries");
  }
  Cholesky llt(m);
  if (llt.info() != Eigen::Success) {
    throw ConditioningError(std::string(what) +
                            ": not symmetric positive definite");
  }
  return llt;
}

Matrix SpdInverse(const Matrix& m, std::string_view what) {
  const Cholesky llt = FactorSpd(m, what);
  return llt.solve(Matrix::Identity(m.rows(), m.cols()));
}

Matrix BlockDiagonal(std::span<const Matrix> blocks) {
  Index rows = 0, cols = 0;
  for (const Matrix& b : blocks) {
    rows += b.rows();
    cols += b.cols();
  }
  Matrix out = Matrix::Zero(rows, cols);
  Index r = 0, c = 0;
  for (const Matrix& b : blocks) {
    out.block(r, c, b.rows(), b.cols()) = b;
    r += b.rows();
    c += b.cols();
  }
  return out;
}

Matrix RepeatBlockDiagonal(const Matrix& block, int count) {
  Matrix out = Matrix::Zero(block.rows() * count, block.cols() * count);
  for (int s = 0; s < count; ++s) {
    out.block(s * block.rows(), s * block.cols(), block.rows(), block.cols()) =
        block;
  }
  return out;
}

double SpectralRadius(const Matrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("SpectralRadius: not square");
  if (m.size() == 0) return 0.0;
  Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw Error("SpectralRadius: eigensolver did not converge");
  }
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

SymmetricExtremes SymmetricEigenExtremes(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw DimensionError("SymmetricEigenExtremes: not square");
  }
  const Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error("SymmetricEigenExtremes: eigensolver did not converge");
  }
  return {solver.eigenvalues().minCoeff(), solver.eigenvalues().maxCoeff()};
}

Matrix SameOwnerPart(const Matrix& m, std::span<const int> row_owner,
                     std::span<const int> col_owner) {
  if (static_cast<Index>(row_owner.size()) != m.rows() ||
      static_cast<Index>(col_owner.size()) != m.cols()) {
    throw DimensionError("SameOwnerPart: owner labels do not match matrix");
  }
  Matrix out = Matrix::Zero(m.rows(), m.cols());
  for (Index c = 0; c < m.cols(); ++c) {
    for (Index r = 0; r < m.rows(); ++r) {
      if (row_owner[r] == col_owner[c]) out(r, c) = m(r, c);
    }
  }
  return out;
}

Matrix GatherColumns(const Matrix& m, std::span<const Index> cols) {
  Matrix out(m.rows(), static_cast<Index>(cols.size()));
  for (Index j = 0; j < out.cols(); ++j) out.col(j) = m.col(cols[j]);
  return out;
}

Matrix GatherRows(const Matrix& m, std::span<const Index> rows) {
  Matrix out(static_cast<Index>(rows.size()), m.cols());
  for (Index j = 0; j < out.rows(); ++j) out.row(j) = m.row(rows[j]);
  return out;
}

Vector Gather(const Vector& v, std::span<const Index> idx) {
  Vector out(static_cast<Index>(idx.size()));
  for (Index j = 0; j < out.size(); ++j) out(j) = v(idx[j]);
  return out;
}

void Scatter(const Vector& src, std::span<const Index> idx, Vector& dst) {
  if (src.size() != static_cast<Index>(idx.size())) {
    throw DimensionError("Scatter: source and index list differ in length");
  }
  for (Index j = 0; j < src.size(); ++j) dst(idx[j]) = src(j);
}

namespace {

bool BlocksCompatible(const Matrix& a, const Matrix& b, const Matrix& c,
                      const Matrix& d) {
  return a.rows() == a.cols() && d.rows() == d.cols() &&
         b.rows() == a.rows() && b.cols() == d.rows() &&
         c.rows() == d.rows() && c.cols() == a.cols();
}

}  // namespace

Matrix WoodburyInverse(const Matrix& a, const Matrix& b, const Matrix& c,
                       const Matrix& d) {
  if (!BlocksCompatible(a, b, c, d)) {
    throw DimensionError("WoodburyInverse: incompatible blocks");
  }
  const Matrix a_inv = Eigen::PartialPivLU<Matrix>(a).inverse();
  const Matrix s = d - c * a_inv * b;
  return a_inv +
         a_inv * b * Eigen::PartialPivLU<Matrix>(s).solve(c * a_inv);
}

Matrix SchurBlockInverse(const Matrix& a, const Matrix& b, const Matrix& c,
                         const Matrix& d) {
  if (!BlocksCompatible(a, b, c, d)) {
    throw DimensionError("SchurBlockInverse: incompatible blocks");
  }
  const Index n1 = a.rows(), n2 = d.rows();
  const Matrix a_inv = Eigen::PartialPivLU<Matrix>(a).inverse();
  const Matrix d_inv = Eigen::PartialPivLU<Matrix>(d).inverse();
  const Matrix sa_inv = Eigen::PartialPivLU<Matrix>(a - b * d_inv * c).inverse();
  const Matrix sd_inv = Eigen::PartialPivLU<Matrix>(d - c * a_inv * b).inverse();
  Matrix out(n1 + n2, n1 + n2);
  out.topLeftCorner(n1, n1) = sa_inv;
  out.topRightCorner(n1, n2) = -sa_inv * b * d_inv;
  out.bottomLeftCorner(n2, n1) = -sd_inv * c * a_inv;
  out.bottomRightCorner(n2, n2) = sd_inv;
  return out;
}

double RankTolerance(const Vector& singular_values, Index dim) {
  if (singular_values.size() == 0) return 0.0;
  return static_cast<double>(dim) * std::numeric_limits<double>::epsilon() *
         singular_values.maxCoeff();
}

}  // namespace dmhe
