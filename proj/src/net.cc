// src/net.cc

// Copyright 2026  The Wavefront Authors

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

#include "wavefront/net.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "wavefront/error.h"

namespace wavefront {
namespace {

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

void glorot_uniform(Matrix& m, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
  for (double& v : m.values()) v = rng.uniform(-limit, limit);
}

}  // namespace

ModelParams zero_model_params(const HeadConfig& cfg) {
  const std::size_t H = cfg.hidden, D = cfg.input_dim, A = cfg.attention, L = cfg.n_labels;
  if (H == 0 || D == 0 || A == 0 || L == 0) {
    throw std::invalid_argument("zero_model_params: all head dimensions must be >= 1");
  }
  ModelParams p;
  p.lstm_wx = Matrix(4 * H, D);
  p.lstm_wh = Matrix(4 * H, H);
  p.lstm_b = Matrix(1, 4 * H);
  p.attn_w1 = Matrix(A, H);
  p.attn_b1 = Matrix(1, A);
  p.attn_w2 = Matrix(1, A);
  p.attn_b2 = Matrix(1, 1);
  p.out_w = Matrix(L, H);
  p.out_b = Matrix(1, L);
  return p;
}

ModelParams init_model_params(const HeadConfig& cfg, Rng& rng) {
  ModelParams p = zero_model_params(cfg);
  glorot_uniform(p.lstm_wx, rng);
  glorot_uniform(p.lstm_wh, rng);
  glorot_uniform(p.attn_w1, rng);
  glorot_uniform(p.attn_w2, rng);
  glorot_uniform(p.out_w, rng);
  for (std::size_t j = 0; j < cfg.hidden; ++j) p.lstm_b[cfg.hidden + j] = 1.0;
  return p;
}

Matrix lstm_forward(const Matrix& x, const ModelParams& p, LstmCache* cache) {
  const std::size_t T = x.rows();
  const std::size_t D = p.input_dim();
  const std::size_t H = p.hidden();
  if (x.cols() != D) {
    throw std::invalid_argument("lstm_forward: input has " + std::to_string(x.cols()) +
                                " features, expected " + std::to_string(D));
  }
  Matrix gates(T, 4 * H), cell(T, H), cell_tanh(T, H), hidden(T, H);
  std::vector<double> z(4 * H);
  std::vector<double> h_prev(H, 0.0), c_prev(H, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    const auto xt = x.row(t);
    for (std::size_t g = 0; g < 4 * H; ++g) {
      double acc = p.lstm_b[g];
      const auto wx = p.lstm_wx.row(g);
      for (std::size_t d = 0; d < D; ++d) acc += wx[d] * xt[d];
      const auto wh = p.lstm_wh.row(g);
      for (std::size_t j = 0; j < H; ++j) acc += wh[j] * h_prev[j];
      z[g] = acc;
    }
    auto gt = gates.row(t);
    for (std::size_t j = 0; j < H; ++j) {
      const double i = sigmoid(z[j]);
      const double f = sigmoid(z[H + j]);
      const double g = std::tanh(z[2 * H + j]);
      const double o = sigmoid(z[3 * H + j]);
      gt[j] = i;
      gt[H + j] = f;
      gt[2 * H + j] = g;
      gt[3 * H + j] = o;
      const double c = f * c_prev[j] + i * g;
      const double tc = std::tanh(c);
      const double h = o * tc;
      if (!std::isfinite(c) || !std::isfinite(h)) {
        throw NumericError("lstm_forward: non-finite state at timestep " + std::to_string(t));
      }
      cell(t, j) = c;
      cell_tanh(t, j) = tc;
      hidden(t, j) = h;
      c_prev[j] = c;
      h_prev[j] = h;
    }
  }
  if (cache != nullptr) {
    cache->input = x;
    cache->gates = std::move(gates);
    cache->cell = std::move(cell);
    cache->cell_tanh = std::move(cell_tanh);
    cache->hidden = hidden;
  }
  return hidden;
}

Matrix lstm_backward(const Matrix& grad_hidden, const ModelParams& p, const LstmCache& cache,
                     ModelParams& grads) {
  const std::size_t T = cache.hidden.rows();
  const std::size_t D = p.input_dim();
  const std::size_t H = p.hidden();
  if (!grad_hidden.same_shape(cache.hidden)) {
    throw std::invalid_argument("lstm_backward: gradient shape does not match cache");
  }
  Matrix grad_x(T, D);
  std::vector<double> dh_next(H, 0.0), dc_next(H, 0.0), dz(4 * H);
  for (std::size_t t = T; t-- > 0;) {
    const auto gt = cache.gates.row(t);
    for (std::size_t j = 0; j < H; ++j) {
      const double i = gt[j], f = gt[H + j], g = gt[2 * H + j], o = gt[3 * H + j];
      const double tc = cache.cell_tanh(t, j);
      const double dh = grad_hidden(t, j) + dh_next[j];
      const double dc = dc_next[j] + dh * o * (1.0 - tc * tc);
      const double c_prev = t > 0 ? cache.cell(t - 1, j) : 0.0;
      dz[j] = dc * g * i * (1.0 - i);
      dz[H + j] = dc * c_prev * f * (1.0 - f);
      dz[2 * H + j] = dc * i * (1.0 - g * g);
      dz[3 * H + j] = dh * tc * o * (1.0 - o);
      dc_next[j] = dc * f;
    }
    const auto xt = cache.input.row(t);
    std::fill(dh_next.begin(), dh_next.end(), 0.0);
    auto gx = grad_x.row(t);
    for (std::size_t r = 0; r < 4 * H; ++r) {
      const double d = dz[r];
      grads.lstm_b[r] += d;
      if (d == 0.0) continue;
      auto gwx = grads.lstm_wx.row(r);
      const auto wx = p.lstm_wx.row(r);
      for (std::size_t k = 0; k < D; ++k) {
        gwx[k] += d * xt[k];
        gx[k] += d * wx[k];
      }
      if (t > 0) {
        const auto h_prev = cache.hidden.row(t - 1);
        auto gwh = grads.lstm_wh.row(r);
        const auto wh = p.lstm_wh.row(r);
        for (std::size_t j = 0; j < H; ++j) {
          gwh[j] += d * h_prev[j];
          dh_next[j] += d * wh[j];
        }
      }
    }
  }
  return grad_x;
}

std::vector<double> softmax(const std::vector<double>& scores) {
  if (scores.empty()) return {};
  const double peak = *std::max_element(scores.begin(), scores.end());
  std::vector<double> out(scores.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out[i] = std::exp(scores[i] - peak);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

AttentionOutput attention_forward(const Matrix& hidden, const ModelParams& p,
                                  AttentionCache* cache) {
  const std::size_t T = hidden.rows();
  const std::size_t H = p.hidden();
  const std::size_t A = p.attn_w1.rows();
  const std::size_t L = p.n_labels();
  if (hidden.cols() != H) throw std::invalid_argument("attention_forward: hidden size mismatch");
  if (T == 0) throw std::invalid_argument("attention_forward: empty sequence");

  Matrix projected(T, A);
  std::vector<double> scores(T);
  for (std::size_t t = 0; t < T; ++t) {
    const auto ht = hidden.row(t);
    double score = p.attn_b2[0];
    for (std::size_t a = 0; a < A; ++a) {
      double acc = p.attn_b1[a];
      const auto w = p.attn_w1.row(a);
      for (std::size_t j = 0; j < H; ++j) acc += w[j] * ht[j];
      const double u = std::tanh(acc);
      projected(t, a) = u;
      score += p.attn_w2[a] * u;
    }
    scores[t] = score;
  }
  AttentionOutput out;
  out.weights = softmax(scores);
  out.context.assign(H, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    const auto ht = hidden.row(t);
    for (std::size_t j = 0; j < H; ++j) out.context[j] += out.weights[t] * ht[j];
  }
  out.logits.assign(L, 0.0);
  for (std::size_t l = 0; l < L; ++l) {
    double acc = p.out_b[l];
    const auto w = p.out_w.row(l);
    for (std::size_t j = 0; j < H; ++j) acc += w[j] * out.context[j];
    out.logits[l] = acc;
  }
  if (cache != nullptr) {
    cache->hidden = hidden;
    cache->projected = std::move(projected);
    cache->weights = out.weights;
    cache->context = out.context;
  }
  return out;
}

Matrix attention_backward(const std::vector<double>& grad_logits, const ModelParams& p,
                          const AttentionCache& cache, ModelParams& grads) {
  const std::size_t T = cache.hidden.rows();
  const std::size_t H = p.hidden();
  const std::size_t A = p.attn_w1.rows();
  const std::size_t L = p.n_labels();
  if (grad_logits.size() != L) throw std::invalid_argument("attention_backward: logits size");

  std::vector<double> grad_context(H, 0.0);
  for (std::size_t l = 0; l < L; ++l) {
    const double g = grad_logits[l];
    grads.out_b[l] += g;
    auto gw = grads.out_w.row(l);
    const auto w = p.out_w.row(l);
    for (std::size_t j = 0; j < H; ++j) {
      gw[j] += g * cache.context[j];
      grad_context[j] += g * w[j];
    }
  }

  Matrix grad_hidden(T, H);
  std::vector<double> grad_weight(T);
  double weighted = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    const auto ht = cache.hidden.row(t);
    double dot = 0.0;
    for (std::size_t j = 0; j < H; ++j) dot += grad_context[j] * ht[j];
    grad_weight[t] = dot;
    weighted += cache.weights[t] * dot;
    auto gh = grad_hidden.row(t);
    for (std::size_t j = 0; j < H; ++j) gh[j] = cache.weights[t] * grad_context[j];
  }
  for (std::size_t t = 0; t < T; ++t) {
    const double g_score = cache.weights[t] * (grad_weight[t] - weighted);
    grads.attn_b2[0] += g_score;
    const auto ht = cache.hidden.row(t);
    auto gh = grad_hidden.row(t);
    for (std::size_t a = 0; a < A; ++a) {
      const double u = cache.projected(t, a);
      grads.attn_w2[a] += g_score * u;
      const double g_pre = g_score * p.attn_w2[a] * (1.0 - u * u);
      grads.attn_b1[a] += g_pre;
      auto gw = grads.attn_w1.row(a);
      const auto w = p.attn_w1.row(a);
      for (std::size_t j = 0; j < H; ++j) {
        gw[j] += g_pre * ht[j];
        gh[j] += g_pre * w[j];
      }
    }
  }
  return grad_hidden;
}

LossResult cross_entropy_loss(const std::vector<double>& logits, std::size_t label) {
  if (label >= logits.size()) {
    throw std::invalid_argument("cross_entropy_loss: label " + std::to_string(label) +
                                " out of range for " + std::to_string(logits.size()) +
                                " classes");
  }
  const double peak = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double v : logits) sum += std::exp(v - peak);
  const double log_norm = peak + std::log(sum);
  LossResult out;
  out.loss = log_norm - logits[label];
  out.grad_logits.resize(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out.grad_logits[i] = std::exp(logits[i] - log_norm) - (i == label ? 1.0 : 0.0);
  }
  return out;
}

}  // namespace wavefront
