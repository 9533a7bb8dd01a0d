// src/matrix.cc

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

#include "predcode/matrix.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "predcode/errors.h"

namespace predcode {

template <typename Real>
Matrix<Real>::Matrix(size_t rows, size_t cols, std::vector<Real> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    std::ostringstream os;
    os << "matrix data length " << data_.size() << " does not match shape "
       << rows << "x" << cols;
    throw DimensionError(os.str());
  }
}

template <typename Real>
Matrix<Real>::Matrix(std::initializer_list<std::initializer_list<Real>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto &r : rows) {
    if (r.size() != cols_) throw DimensionError("ragged matrix initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

template <typename Real>
void Matrix<Real>::SetZero() {
  std::fill(data_.begin(), data_.end(), Real(0));
}

template <typename Real>
void Matrix<Real>::Resize(size_t rows, size_t cols) {
  rows_ = rows;
  cols_ = cols;
  data_.assign(rows * cols, Real(0));
}

template <typename Real>
bool Matrix<Real>::AllFinite() const {
  for (Real v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

template <typename Real>
Matrix<Real> Matrix<Real>::RowRange(size_t begin, size_t count) const {
  if (begin + count > rows_) {
    std::ostringstream os;
    os << "row range [" << begin << ", " << begin + count << ") outside "
       << ShapeString();
    throw DimensionError(os.str());
  }
  Matrix out(count, cols_);
  std::copy(data_.begin() + begin * cols_, data_.begin() + (begin + count) * cols_,
            out.data_.begin());
  return out;
}

template <typename Real>
std::string Matrix<Real>::ShapeString() const {
  std::ostringstream os;
  os << rows_ << "x" << cols_;
  return os.str();
}

template <typename Real>
Real Dot(const Real *a, const Real *b, size_t n) {
  // Eight independent accumulators, combined in a fixed tree.
  Real acc[8] = {0, 0, 0, 0, 0, 0, 0, 0};
  size_t i = 0;
  for (; i + 8 <= n; i += 8)
    for (size_t u = 0; u < 8; ++u) acc[u] += a[i + u] * b[i + u];
  Real tail = 0;
  for (; i < n; ++i) tail += a[i] * b[i];
  return ((acc[0] + acc[1]) + (acc[2] + acc[3])) +
         ((acc[4] + acc[5]) + (acc[6] + acc[7])) + tail;
}

template <typename Real>
void Gemm(bool trans_a, bool trans_b, size_t m, size_t n, size_t k,
          const Real *a, size_t lda, const Real *b, size_t ldb,
          Real beta, Real *c, size_t ldc) {
  if (beta == Real(0)) {
    for (size_t i = 0; i < m; ++i) std::fill(c + i * ldc, c + i * ldc + n, Real(0));
  } else if (beta != Real(1)) {
    for (size_t i = 0; i < m; ++i)
      for (size_t j = 0; j < n; ++j) c[i * ldc + j] *= beta;
  }
  if (!trans_a && !trans_b) {
    for (size_t i = 0; i < m; ++i) {
      Real *ci = c + i * ldc;
      const Real *ai = a + i * lda;
      for (size_t p = 0; p < k; ++p) {
        const Real aip = ai[p];
        if (aip == Real(0)) continue;
        const Real *bp = b + p * ldb;
        for (size_t j = 0; j < n; ++j) ci[j] += aip * bp[j];
      }
    }
  } else if (!trans_a && trans_b) {
    for (size_t i = 0; i < m; ++i) {
      Real *ci = c + i * ldc;
      const Real *ai = a + i * lda;
      for (size_t j = 0; j < n; ++j) ci[j] += Dot(ai, b + j * ldb, k);
    }
  } else if (trans_a && !trans_b) {
    // A is stored k x m.
    for (size_t p = 0; p < k; ++p) {
      const Real *ap = a + p * lda;
      const Real *bp = b + p * ldb;
      for (size_t i = 0; i < m; ++i) {
        const Real api = ap[i];
        if (api == Real(0)) continue;
        Real *ci = c + i * ldc;
        for (size_t j = 0; j < n; ++j) ci[j] += api * bp[j];
      }
    }
  } else {
    // A stored k x m, B stored n x k.
    for (size_t i = 0; i < m; ++i)
      for (size_t j = 0; j < n; ++j) {
        Real sum = 0;
        for (size_t p = 0; p < k; ++p) sum += a[p * lda + i] * b[j * ldb + p];
        c[i * ldc + j] += sum;
      }
  }
}

namespace {

[[noreturn]] void ThrowShape(const char *op, const std::string &a, const std::string &b) {
  throw DimensionError(std::string(op) + ": incompatible shapes " + a + " and " + b);
}

}  // namespace

template <typename Real>
Matrix<Real> MatMul(const Matrix<Real> &a, const Matrix<Real> &b) {
  if (a.cols() != b.rows()) ThrowShape("matmul", a.ShapeString(), b.ShapeString());
  Matrix<Real> c(a.rows(), b.cols());
  Gemm(false, false, a.rows(), b.cols(), a.cols(), a.data(), a.cols(), b.data(),
       b.cols(), Real(0), c.data(), c.cols());
  return c;
}

template <typename Real>
Matrix<Real> MatMulTransB(const Matrix<Real> &a, const Matrix<Real> &b) {
  if (a.cols() != b.cols()) ThrowShape("matmul_trans_b", a.ShapeString(), b.ShapeString());
  Matrix<Real> c(a.rows(), b.rows());
  Gemm(false, true, a.rows(), b.rows(), a.cols(), a.data(), a.cols(), b.data(),
       b.cols(), Real(0), c.data(), c.cols());
  return c;
}

template <typename Real>
Matrix<Real> MatMulTransA(const Matrix<Real> &a, const Matrix<Real> &b) {
  if (a.rows() != b.rows()) ThrowShape("matmul_trans_a", a.ShapeString(), b.ShapeString());
  Matrix<Real> c(a.cols(), b.cols());
  Gemm(true, false, a.cols(), b.cols(), a.rows(), a.data(), a.cols(), b.data(),
       b.cols(), Real(0), c.data(), c.cols());
  return c;
}

template <typename Real>
void AddRowVector(std::type_identity_t<std::span<const Real>> bias, Matrix<Real> *m) {
  if (bias.size() != m->cols())
    throw DimensionError("bias of length " + std::to_string(bias.size()) +
                         " cannot be added to " + m->ShapeString());
  for (size_t r = 0; r < m->rows(); ++r) {
    auto row = m->row(r);
    for (size_t j = 0; j < bias.size(); ++j) row[j] += bias[j];
  }
}

template <typename Real>
void AccumulateColumnSums(const Matrix<Real> &m, std::span<Real> out) {
  if (out.size() != m.cols()) throw DimensionError("column-sum length mismatch");
  for (size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    for (size_t j = 0; j < out.size(); ++j) out[j] += row[j];
  }
}

template <typename Real>
void AddInPlace(const Matrix<Real> &src, Matrix<Real> *dst) {
  if (src.rows() != dst->rows() || src.cols() != dst->cols())
    ThrowShape("add", src.ShapeString(), dst->ShapeString());
  for (size_t i = 0; i < src.size(); ++i) dst->data()[i] += src.data()[i];
}

#define PREDCODE_INSTANTIATE(Real)                                                   \
  template class Matrix<Real>;                                                       \
  template Real Dot(const Real *, const Real *, size_t);                             \
  template void Gemm(bool, bool, size_t, size_t, size_t, const Real *, size_t,       \
                     const Real *, size_t, Real, Real *, size_t);                    \
  template Matrix<Real> MatMul(const Matrix<Real> &, const Matrix<Real> &);          \
  template Matrix<Real> MatMulTransB(const Matrix<Real> &, const Matrix<Real> &);    \
  template Matrix<Real> MatMulTransA(const Matrix<Real> &, const Matrix<Real> &);    \
  template void AddRowVector(std::span<const Real>, Matrix<Real> *);                 \
  template void AccumulateColumnSums(const Matrix<Real> &, std::span<Real>);         \
  template void AddInPlace(const Matrix<Real> &, Matrix<Real> *);

PREDCODE_INSTANTIATE(float)
PREDCODE_INSTANTIATE(double)

#undef PREDCODE_INSTANTIATE

}  // namespace predcode
