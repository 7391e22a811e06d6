/**
 * Copyright (c) vidsum contributors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "vidsum/matrix.hpp"

namespace vidsum {

inline constexpr std::size_t kDefaultEmbedDim = 300;
inline constexpr std::size_t kDefaultHiddenDim = 256;
/// Width of a precomputed skip-thought sentence vector.
inline constexpr std::size_t kDefaultDescDim = 4800;

double sigmoid(double z);

// ---------------------------------------------------------------------------
// LSTM
// ---------------------------------------------------------------------------

/// Gate weights of a bias-free LSTM cell. Each matrix is H x (D + H) and acts
/// on the concatenation [x; h_prev].
struct LstmParams {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  Matrix w_input;
  Matrix w_forget;
  Matrix w_output;
  Matrix w_cell;

  /// Throws ShapeError on inconsistent shapes, DomainError on non-finite weights.
  void validate() const;
};

struct LstmState {
  Vector h;
  Vector c;

  static LstmState zeros(std::size_t hidden_dim);
};

/// Intermediate activations of one cell update.
struct LstmGates {
  Vector input;
  Vector forget;
  Vector output;
  Vector candidate;  // tanh(W_c [x; h_prev])
};

struct LstmStepTrace {
  LstmState state;
  LstmGates gates;
};

LstmStepTrace lstm_step_traced(const LstmParams& params, const LstmState& state,
                               std::span<const double> x);

/// One application of
///   i = sig(W_i z), f = sig(W_f z), o = sig(W_o z),
///   c' = i * tanh(W_c z) + f * c,  h' = o * tanh(c')
/// with z = [x; h_prev].
LstmState lstm_step(const LstmParams& params, const LstmState& state, std::span<const double> x);

/// Folds lstm_step over the rows of `frames` from a zero state. Row t of the
/// result is h_t.
Matrix lstm_scan(const LstmParams& params, MatrixView frames);

/// Bidirectional frame-importance scorer: score_t = sig(readout . [h_fwd_t; h_bwd_t] + bias).
struct ImportanceScorer {
  LstmParams forward;
  LstmParams backward;
  Vector readout;  // length 2H
  double bias = 0.0;

  void validate() const;
};

/// One score in (0, 1) per frame.
Vector score_importance(const ImportanceScorer& scorer, MatrixView frames);

// ---------------------------------------------------------------------------
// Embedding subnetworks
// ---------------------------------------------------------------------------

/// Two fully-connected tanh layers: tanh(W2 tanh(W1 x + b1) + b2).
struct TanhProjection {
  Matrix w1;
  Vector b1;
  Matrix w2;
  Vector b2;

  std::size_t input_dim() const { return w1.cols(); }
  std::size_t hidden_dim() const { return w1.rows(); }
  std::size_t output_dim() const { return w2.rows(); }

  void validate() const;
  Vector forward(std::span<const double> x) const;

  /// Same shapes, all zeros.
  TanhProjection zeros_like() const;

  /// Every weight and bias in a fixed order: w1, b1, w2, b2.
  std::vector<std::span<double>> parameter_blocks();
  std::vector<std::span<const double>> parameter_blocks() const;

  friend bool operator==(const TanhProjection&, const TanhProjection&) = default;
};

/// Maps frame features into the joint semantic space.
struct VideoSubnet {
  TanhProjection layers;
  friend bool operator==(const VideoSubnet&, const VideoSubnet&) = default;
};

/// Maps a precomputed sentence vector into the joint semantic space.
struct DescSubnet {
  TanhProjection layers;
  friend bool operator==(const DescSubnet&, const DescSubnet&) = default;
};

Vector ffn_forward(const VideoSubnet& net, std::span<const double> x);

/// Mean of ffn_forward over the rows of `segment`. Throws DomainError when empty.
Vector embed_frames(const VideoSubnet& net, MatrixView segment);

Vector embed_description(const DescSubnet& net, std::span<const double> v);

// ---------------------------------------------------------------------------
// Initialization: entries uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)],
// deterministic in the seed. Zero dims throw DomainError.
// ---------------------------------------------------------------------------

VideoSubnet init_video_subnet(std::uint64_t seed, std::size_t input_dim, std::size_t hidden_dim,
                              std::size_t embed_dim);
DescSubnet init_desc_subnet(std::uint64_t seed, std::size_t desc_dim, std::size_t hidden_dim,
                            std::size_t embed_dim);
LstmParams init_lstm(std::uint64_t seed, std::size_t input_dim, std::size_t hidden_dim);
ImportanceScorer init_scorer(std::uint64_t seed, std::size_t input_dim, std::size_t hidden_dim);

}  // namespace vidsum
