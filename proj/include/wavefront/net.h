// include/wavefront/net.h

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

#ifndef WAVEFRONT_NET_H_
#define WAVEFRONT_NET_H_

#include <cstddef>
#include <vector>

#include "wavefront/matrix.h"
#include "wavefront/rng.h"

namespace wavefront {

struct HeadConfig {
  std::size_t input_dim = 64;
  std::size_t hidden = 60;
  std::size_t attention = 50;
  std::size_t n_labels = 2;
};

/// LSTM -> attention pooling -> dense classifier. Gate blocks in the LSTM
/// matrices are ordered input, forget, cell, output.
struct ModelParams {
  Matrix lstm_wx;  // 4H x D
  Matrix lstm_wh;  // 4H x H
  Matrix lstm_b;   // 1 x 4H
  Matrix attn_w1;  // A x H
  Matrix attn_b1;  // 1 x A
  Matrix attn_w2;  // 1 x A
  Matrix attn_b2;  // 1 x 1
  Matrix out_w;    // labels x H
  Matrix out_b;    // 1 x labels

  std::size_t hidden() const { return lstm_wh.cols(); }
  std::size_t input_dim() const { return lstm_wx.cols(); }
  std::size_t n_labels() const { return out_w.rows(); }
};

template <class Params, class Fn>
void for_each_head_tensor(Params& p, Fn&& fn) {
  fn("lstm.wx", p.lstm_wx);
  fn("lstm.wh", p.lstm_wh);
  fn("lstm.b", p.lstm_b);
  fn("attn.w1", p.attn_w1);
  fn("attn.b1", p.attn_b1);
  fn("attn.w2", p.attn_w2);
  fn("attn.b2", p.attn_b2);
  fn("out.w", p.out_w);
  fn("out.b", p.out_b);
}

/// Zero-valued tensors with the shapes implied by `cfg`.
ModelParams zero_model_params(const HeadConfig& cfg);

/// Glorot-uniform weights, zero biases, forget-gate bias 1.
ModelParams init_model_params(const HeadConfig& cfg, Rng& rng);

struct LstmCache {
  Matrix input;  // T x D
  Matrix gates;  // T x 4H, post-activation
  Matrix cell;   // T x H
  Matrix cell_tanh;
  Matrix hidden;  // T x H
};

/// x is frames x features. Returns the hidden sequence (frames x H) with
/// h0 = c0 = 0. Throws NumericError naming the timestep on non-finite state.
Matrix lstm_forward(const Matrix& x, const ModelParams& p, LstmCache* cache = nullptr);

/// Accumulates parameter gradients into `grads` and returns d loss / d x.
Matrix lstm_backward(const Matrix& grad_hidden, const ModelParams& p, const LstmCache& cache,
                     ModelParams& grads);

struct AttentionOutput {
  std::vector<double> logits;
  std::vector<double> weights;  // softmax over frames
  std::vector<double> context;
};

struct AttentionCache {
  Matrix hidden;     // T x H
  Matrix projected;  // T x A, tanh(W1 h + b1)
  std::vector<double> weights;
  std::vector<double> context;
};

/// score_t = w2 . tanh(W1 h_t + b1) + b2, a = softmax(score),
/// logits = Wout (sum_t a_t h_t) + bout.
AttentionOutput attention_forward(const Matrix& hidden, const ModelParams& p,
                                  AttentionCache* cache = nullptr);

Matrix attention_backward(const std::vector<double>& grad_logits, const ModelParams& p,
                          const AttentionCache& cache, ModelParams& grads);

std::vector<double> softmax(const std::vector<double>& scores);

struct LossResult {
  double loss = 0.0;
  std::vector<double> grad_logits;
};

/// -log softmax(logits)[label], computed with max subtraction.
LossResult cross_entropy_loss(const std::vector<double>& logits, std::size_t label);

}  // namespace wavefront

#endif  // WAVEFRONT_NET_H_
