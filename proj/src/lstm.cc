// src/lstm.cc

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

#include "predcode/lstm.h"

#include <cmath>

#include "predcode/activation.h"
#include "predcode/errors.h"

namespace predcode {

LstmLayer::LstmLayer(std::string prefix, size_t input_dim, size_t hidden_dim)
    : prefix_(std::move(prefix)), input_dim_(input_dim), hidden_dim_(hidden_dim) {
  if (input_dim == 0 || hidden_dim == 0) throw ConfigError("LSTM dimensions must be positive");
}

template <typename Real>
void LstmLayer::Register(ParamStore<Real> *params, std::mt19937_64 *rng) const {
  const size_t h = hidden_dim_;
  const double k = 1.0 / std::sqrt(static_cast<double>(h));
  std::uniform_real_distribution<double> dist(-k, k);
  auto &wx = params->Add(wx_name(), 4 * h, input_dim_).value;
  for (auto &v : wx.values()) v = static_cast<Real>(dist(*rng));
  auto &wh = params->Add(wh_name(), 4 * h, h).value;
  for (auto &v : wh.values()) v = static_cast<Real>(dist(*rng));
  auto &b = params->Add(bias_name(), 1, 4 * h).value;
  for (size_t j = h; j < 2 * h; ++j) b(0, j) = Real(1);
}

template <typename Real>
Matrix<Real> LstmLayer::Forward(const ParamStore<Real> &params, const Matrix<Real> &x,
                                size_t batch, LstmCache<Real> *cache) const {
  if (x.cols() != input_dim_)
    throw DimensionError("LSTM '" + prefix_ + "' expects input width " +
                         std::to_string(input_dim_) + ", got " + x.ShapeString());
  if (batch == 0 || x.rows() % batch != 0)
    throw DimensionError("LSTM input rows " + std::to_string(x.rows()) +
                         " not divisible by batch " + std::to_string(batch));
  const size_t h = hidden_dim_, g4 = 4 * h;
  const size_t steps = x.rows() / batch;
  const auto &wx = params.value(wx_name());
  const auto &wh = params.value(wh_name());
  const auto &bias = params.value(bias_name());

  Matrix<Real> gates = MatMulTransB(x, wx);
  AddRowVector(bias.row(0), &gates);
  Matrix<Real> cell(x.rows(), h), cell_tanh(x.rows(), h), hidden(x.rows(), h);

  for (size_t t = 0; t < steps; ++t) {
    Real *gt = gates.data() + t * batch * g4;
    if (t > 0) {
      const Real *h_prev = hidden.data() + (t - 1) * batch * h;
      Gemm(false, true, batch, g4, h, h_prev, h, wh.data(), h, Real(1), gt, g4);
    }
    for (size_t b = 0; b < batch; ++b) {
      Real *g = gt + b * g4;
      const size_t row = t * batch + b;
      const Real *c_prev = t > 0 ? cell.data() + (row - batch) * h : nullptr;
      Real *c = cell.data() + row * h;
      Real *ct = cell_tanh.data() + row * h;
      Real *hh = hidden.data() + row * h;
      for (size_t j = 0; j < h; ++j) {
        const Real ig = Sigmoid(g[j]);
        const Real fg = Sigmoid(g[h + j]);
        const Real cg = std::tanh(g[2 * h + j]);
        const Real og = Sigmoid(g[3 * h + j]);
        g[j] = ig;
        g[h + j] = fg;
        g[2 * h + j] = cg;
        g[3 * h + j] = og;
        c[j] = (c_prev ? fg * c_prev[j] : Real(0)) + ig * cg;
        ct[j] = std::tanh(c[j]);
        hh[j] = og * ct[j];
      }
    }
  }
  if (cache) {
    cache->batch = batch;
    cache->input = x;
    cache->gates = std::move(gates);
    cache->cell = std::move(cell);
    cache->cell_tanh = std::move(cell_tanh);
    cache->hidden = hidden;
  }
  return hidden;
}

template <typename Real>
Matrix<Real> LstmLayer::Backward(ParamStore<Real> *params, const LstmCache<Real> &cache,
                                 const Matrix<Real> &d_hidden) const {
  const size_t h = hidden_dim_, g4 = 4 * h;
  const size_t batch = cache.batch;
  const size_t rows = cache.hidden.rows();
  if (d_hidden.rows() != rows || d_hidden.cols() != h)
    throw DimensionError("LSTM backward: gradient shape " + d_hidden.ShapeString() +
                         " does not match outputs " + cache.hidden.ShapeString());
  const size_t steps = rows / batch;
  auto &wx = params->at(wx_name());
  auto &wh = params->at(wh_name());
  auto &bias = params->at(bias_name());

  Matrix<Real> d_pre(rows, g4);
  Matrix<Real> dh_next(batch, h), dc_next(batch, h);
  for (size_t step = steps; step-- > 0;) {
    for (size_t b = 0; b < batch; ++b) {
      const size_t row = step * batch + b;
      const Real *g = cache.gates.data() + row * g4;
      const Real *ct = cache.cell_tanh.data() + row * h;
      const Real *c_prev = step > 0 ? cache.cell.data() + (row - batch) * h : nullptr;
      const Real *dh_out = d_hidden.data() + row * h;
      Real *dhn = dh_next.data() + b * h;
      Real *dcn = dc_next.data() + b * h;
      Real *dp = d_pre.data() + row * g4;
      for (size_t j = 0; j < h; ++j) {
        const Real ig = g[j], fg = g[h + j], cg = g[2 * h + j], og = g[3 * h + j];
        const Real dh = dh_out[j] + dhn[j];
        const Real d_og = dh * ct[j];
        const Real dc = dcn[j] + dh * og * (Real(1) - ct[j] * ct[j]);
        const Real d_ig = dc * cg;
        const Real d_cg = dc * ig;
        const Real d_fg = c_prev ? dc * c_prev[j] : Real(0);
        dcn[j] = dc * fg;
        dp[j] = d_ig * ig * (Real(1) - ig);
        dp[h + j] = d_fg * fg * (Real(1) - fg);
        dp[2 * h + j] = d_cg * (Real(1) - cg * cg);
        dp[3 * h + j] = d_og * og * (Real(1) - og);
      }
    }
    // dh_{t-1} = d_pre_t * Wh.
    Gemm(false, false, batch, h, g4, d_pre.data() + step * batch * g4, g4, wh.value.data(), h,
         Real(0), dh_next.data(), h);
  }
  // dWh += d_pre[1..T)^T * hidden[0..T-1).
  if (steps > 1)
    Gemm(true, false, g4, h, (steps - 1) * batch, d_pre.data() + batch * g4, g4,
         cache.hidden.data(), h, Real(1), wh.grad.data(), h);
  Gemm(true, false, g4, input_dim_, rows, d_pre.data(), g4, cache.input.data(), input_dim_,
       Real(1), wx.grad.data(), input_dim_);
  AccumulateColumnSums(d_pre, bias.grad.row(0));
  return MatMul(d_pre, wx.value);
}

#define PREDCODE_INSTANTIATE(Real)                                                          \
  template void LstmLayer::Register(ParamStore<Real> *, std::mt19937_64 *) const;          \
  template Matrix<Real> LstmLayer::Forward(const ParamStore<Real> &, const Matrix<Real> &, \
                                           size_t, LstmCache<Real> *) const;                \
  template Matrix<Real> LstmLayer::Backward(ParamStore<Real> *, const LstmCache<Real> &,   \
                                            const Matrix<Real> &) const;

PREDCODE_INSTANTIATE(float)
PREDCODE_INSTANTIATE(double)

#undef PREDCODE_INSTANTIATE

}  // namespace predcode
