// predcode/matrix.h

// Copyright 2026  The predcode Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef PREDCODE_MATRIX_H_
#define PREDCODE_MATRIX_H_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

namespace predcode {

/// Dense row-major matrix.  Real is float for training runs and double for
/// gradient checking; both are explicitly instantiated.
template <typename Real>
class Matrix {
 public:
  Matrix() = default;
  Matrix(size_t rows, size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  Matrix(size_t rows, size_t cols, std::vector<Real> data);
  Matrix(std::initializer_list<std::initializer_list<Real>> rows);

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  Real &operator()(size_t r, size_t c) { return data_[r * cols_ + c]; }
  const Real &operator()(size_t r, size_t c) const { return data_[r * cols_ + c]; }

  Real *data() { return data_.data(); }
  const Real *data() const { return data_.data(); }
  std::span<Real> values() { return data_; }
  std::span<const Real> values() const { return data_; }

  std::span<Real> row(size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const Real> row(size_t r) const { return {data_.data() + r * cols_, cols_}; }

  void SetZero();
  void Resize(size_t rows, size_t cols);  // contents zeroed
  bool AllFinite() const;

  // Rows [begin, begin + count) as a new matrix.
  Matrix RowRange(size_t begin, size_t count) const;

  std::string ShapeString() const;

  bool operator==(const Matrix &other) const = default;

 private:
  size_t rows_ = 0;
  size_t cols_ = 0;
  std::vector<Real> data_;
};

template <typename To, typename From>
Matrix<To> Cast(const Matrix<From> &m) {
  Matrix<To> out(m.rows(), m.cols());
  for (size_t i = 0; i < m.size(); ++i) out.data()[i] = static_cast<To>(m.data()[i]);
  return out;
}

// c = a * b.  Throws DimensionError naming both shapes on mismatch.
template <typename Real>
Matrix<Real> MatMul(const Matrix<Real> &a, const Matrix<Real> &b);

// c = a * b^T
template <typename Real>
Matrix<Real> MatMulTransB(const Matrix<Real> &a, const Matrix<Real> &b);

// c = a^T * b
template <typename Real>
Matrix<Real> MatMulTransA(const Matrix<Real> &a, const Matrix<Real> &b);

// Raw kernel: C(m x n) = beta * C + op(A) * op(B), row-major with leading
// dimensions.  op(A) is m x k, op(B) is k x n.  The loop order is fixed, so
// results are bitwise reproducible for a given build.
template <typename Real>
void Gemm(bool trans_a, bool trans_b, size_t m, size_t n, size_t k,
          const Real *a, size_t lda, const Real *b, size_t ldb,
          Real beta, Real *c, size_t ldc);

// Adds `bias` (length cols) to every row.
template <typename Real>
void AddRowVector(std::type_identity_t<std::span<const Real>> bias, Matrix<Real> *m);

// out[j] += sum_i m(i, j)
template <typename Real>
void AccumulateColumnSums(const Matrix<Real> &m, std::span<Real> out);

template <typename Real>
void AddInPlace(const Matrix<Real> &src, Matrix<Real> *dst);

template <typename Real>
Real Dot(const Real *a, const Real *b, size_t n);

}  // namespace predcode

#endif  // PREDCODE_MATRIX_H_
