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
#include "vidsum/model.hpp"

#include <cmath>
#include <random>
#include <string>

#include "vidsum/errors.hpp"

namespace vidsum {

namespace {

void require_shape(const Matrix& m, std::size_t rows, std::size_t cols, const char* name) {
  if (m.rows() != rows || m.cols() != cols) {
    throw ShapeError(std::string(name) + " is " + std::to_string(m.rows()) + "x" +
                     std::to_string(m.cols()) + ", expected " + std::to_string(rows) + "x" +
                     std::to_string(cols));
  }
}

void require_length(std::span<const double> v, std::size_t n, const char* name) {
  if (v.size() != n) {
    throw ShapeError(std::string(name) + " has length " + std::to_string(v.size()) +
                     ", expected " + std::to_string(n));
  }
}

void require_finite(std::span<const double> v, const char* name) {
  for (double x : v) {
    if (!std::isfinite(x)) throw DomainError(std::string(name) + " contains a non-finite value");
  }
}

// W [x; h] without materializing the concatenation.
double gate_product(std::span<const double> w_row, std::span<const double> x,
                    std::span<const double> h) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) s += w_row[k] * x[k];
  for (std::size_t k = 0; k < h.size(); ++k) s += w_row[x.size() + k] * h[k];
  return s;
}

class UniformInit {
 public:
  explicit UniformInit(std::uint64_t seed) : gen_(seed) {}

  void fill(std::span<double> out, std::size_t fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (double& v : out) v = dist(gen_);
  }

  Matrix matrix(std::size_t rows, std::size_t cols, std::size_t fan_in) {
    Matrix m(rows, cols);
    fill(m.data(), fan_in);
    return m;
  }

  Vector vector(std::size_t n, std::size_t fan_in) {
    Vector v(n);
    fill(v, fan_in);
    return v;
  }

 private:
  std::mt19937_64 gen_;
};

void require_positive(std::size_t dim, const char* name) {
  if (dim == 0) throw DomainError(std::string(name) + " must be positive");
}

TanhProjection init_projection(UniformInit& init, std::size_t in, std::size_t hidden,
                               std::size_t out) {
  require_positive(in, "input dim");
  require_positive(hidden, "hidden dim");
  require_positive(out, "embed dim");
  TanhProjection p;
  p.w1 = init.matrix(hidden, in, in);
  p.b1 = init.vector(hidden, in);
  p.w2 = init.matrix(out, hidden, hidden);
  p.b2 = init.vector(out, hidden);
  return p;
}

LstmParams init_lstm_with(UniformInit& init, std::size_t input_dim, std::size_t hidden_dim) {
  require_positive(input_dim, "input dim");
  require_positive(hidden_dim, "hidden dim");
  const std::size_t fan_in = input_dim + hidden_dim;
  LstmParams p;
  p.input_dim = input_dim;
  p.hidden_dim = hidden_dim;
  p.w_input = init.matrix(hidden_dim, fan_in, fan_in);
  p.w_forget = init.matrix(hidden_dim, fan_in, fan_in);
  p.w_output = init.matrix(hidden_dim, fan_in, fan_in);
  p.w_cell = init.matrix(hidden_dim, fan_in, fan_in);
  return p;
}

}  // namespace

double sigmoid(double z) {
  // Split on sign so exp never overflows.
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void LstmParams::validate() const {
  const std::size_t cols = input_dim + hidden_dim;
  require_shape(w_input, hidden_dim, cols, "W_i");
  require_shape(w_forget, hidden_dim, cols, "W_f");
  require_shape(w_output, hidden_dim, cols, "W_o");
  require_shape(w_cell, hidden_dim, cols, "W_c");
  require_finite(w_input.data(), "W_i");
  require_finite(w_forget.data(), "W_f");
  require_finite(w_output.data(), "W_o");
  require_finite(w_cell.data(), "W_c");
}

LstmState LstmState::zeros(std::size_t hidden_dim) {
  return {Vector(hidden_dim, 0.0), Vector(hidden_dim, 0.0)};
}

LstmStepTrace lstm_step_traced(const LstmParams& params, const LstmState& state,
                               std::span<const double> x) {
  const std::size_t H = params.hidden_dim;
  require_shape(params.w_input, H, params.input_dim + H, "W_i");
  require_shape(params.w_forget, H, params.input_dim + H, "W_f");
  require_shape(params.w_output, H, params.input_dim + H, "W_o");
  require_shape(params.w_cell, H, params.input_dim + H, "W_c");
  require_length(x, params.input_dim, "x");
  require_length(state.h, H, "h_prev");
  require_length(state.c, H, "c_prev");

  LstmStepTrace out;
  LstmGates& g = out.gates;
  g.input.resize(H);
  g.forget.resize(H);
  g.output.resize(H);
  g.candidate.resize(H);
  out.state.h.resize(H);
  out.state.c.resize(H);
  for (std::size_t k = 0; k < H; ++k) {
    g.input[k] = sigmoid(gate_product(params.w_input.row(k), x, state.h));
    g.forget[k] = sigmoid(gate_product(params.w_forget.row(k), x, state.h));
    g.output[k] = sigmoid(gate_product(params.w_output.row(k), x, state.h));
    g.candidate[k] = std::tanh(gate_product(params.w_cell.row(k), x, state.h));
    out.state.c[k] = g.input[k] * g.candidate[k] + g.forget[k] * state.c[k];
    out.state.h[k] = g.output[k] * std::tanh(out.state.c[k]);
  }
  return out;
}

LstmState lstm_step(const LstmParams& params, const LstmState& state, std::span<const double> x) {
  return lstm_step_traced(params, state, x).state;
}

Matrix lstm_scan(const LstmParams& params, MatrixView frames) {
  if (!frames.empty() && frames.cols() != params.input_dim) {
    throw ShapeError("lstm_scan: frames have " + std::to_string(frames.cols()) +
                     " columns, expected " + std::to_string(params.input_dim));
  }
  Matrix hidden(frames.rows(), params.hidden_dim);
  LstmState state = LstmState::zeros(params.hidden_dim);
  for (std::size_t t = 0; t < frames.rows(); ++t) {
    state = lstm_step(params, state, frames.row(t));
    std::copy(state.h.begin(), state.h.end(), hidden.row(t).begin());
  }
  return hidden;
}

void ImportanceScorer::validate() const {
  forward.validate();
  backward.validate();
  if (forward.input_dim != backward.input_dim || forward.hidden_dim != backward.hidden_dim) {
    throw ShapeError("forward and backward LSTMs must share input and hidden dims");
  }
  require_length(readout, 2 * forward.hidden_dim, "readout");
  require_finite(readout, "readout");
  if (!std::isfinite(bias)) throw DomainError("readout bias is not finite");
}

Vector score_importance(const ImportanceScorer& scorer, MatrixView frames) {
  scorer.validate();
  const std::size_t T = frames.rows();
  const std::size_t H = scorer.forward.hidden_dim;
  if (T > 0 && frames.cols() != scorer.forward.input_dim) {
    throw ShapeError("score_importance: frames have " + std::to_string(frames.cols()) +
                     " columns, expected " + std::to_string(scorer.forward.input_dim));
  }
  const Matrix fwd = lstm_scan(scorer.forward, frames);

  // Backward pass runs over the reversed sequence; row t of `bwd` is aligned
  // with frame t.
  Matrix bwd(T, H);
  LstmState state = LstmState::zeros(H);
  for (std::size_t k = 0; k < T; ++k) {
    const std::size_t t = T - 1 - k;
    state = lstm_step(scorer.backward, state, frames.row(t));
    std::copy(state.h.begin(), state.h.end(), bwd.row(t).begin());
  }

  const std::span<const double> readout(scorer.readout);
  Vector scores(T);
  for (std::size_t t = 0; t < T; ++t) {
    const double z = dot(readout.first(H), fwd.row(t)) + dot(readout.subspan(H), bwd.row(t)) +
                     scorer.bias;
    scores[t] = sigmoid(z);
  }
  return scores;
}

void TanhProjection::validate() const {
  require_length(b1, w1.rows(), "b1");
  if (w2.cols() != w1.rows()) {
    throw ShapeError("W2 has " + std::to_string(w2.cols()) + " columns, expected " +
                     std::to_string(w1.rows()));
  }
  require_length(b2, w2.rows(), "b2");
  require_finite(w1.data(), "W1");
  require_finite(b1, "b1");
  require_finite(w2.data(), "W2");
  require_finite(b2, "b2");
}

Vector TanhProjection::forward(std::span<const double> x) const {
  require_length(x, input_dim(), "input");
  Vector hidden = matvec(w1, x);
  for (std::size_t k = 0; k < hidden.size(); ++k) hidden[k] = std::tanh(hidden[k] + b1[k]);
  Vector out = matvec(w2, hidden);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::tanh(out[k] + b2[k]);
  return out;
}

TanhProjection TanhProjection::zeros_like() const {
  return {Matrix(w1.rows(), w1.cols()), Vector(b1.size(), 0.0), Matrix(w2.rows(), w2.cols()),
          Vector(b2.size(), 0.0)};
}

std::vector<std::span<double>> TanhProjection::parameter_blocks() {
  return {w1.data(), b1, w2.data(), b2};
}

std::vector<std::span<const double>> TanhProjection::parameter_blocks() const {
  return {w1.data(), b1, w2.data(), b2};
}

Vector ffn_forward(const VideoSubnet& net, std::span<const double> x) {
  return net.layers.forward(x);
}

Vector embed_frames(const VideoSubnet& net, MatrixView segment) {
  if (segment.empty()) throw DomainError("embed_frames: segment has no frames");
  Vector mean(net.layers.output_dim(), 0.0);
  for (std::size_t r = 0; r < segment.rows(); ++r) {
    const Vector y = ffn_forward(net, segment.row(r));
    for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += y[k];
  }
  const double n = static_cast<double>(segment.rows());
  for (double& v : mean) v /= n;
  return mean;
}

Vector embed_description(const DescSubnet& net, std::span<const double> v) {
  return net.layers.forward(v);
}

VideoSubnet init_video_subnet(std::uint64_t seed, std::size_t input_dim, std::size_t hidden_dim,
                              std::size_t embed_dim) {
  UniformInit init(seed);
  return {init_projection(init, input_dim, hidden_dim, embed_dim)};
}

DescSubnet init_desc_subnet(std::uint64_t seed, std::size_t desc_dim, std::size_t hidden_dim,
                            std::size_t embed_dim) {
  UniformInit init(seed);
  return {init_projection(init, desc_dim, hidden_dim, embed_dim)};
}

LstmParams init_lstm(std::uint64_t seed, std::size_t input_dim, std::size_t hidden_dim) {
  UniformInit init(seed);
  return init_lstm_with(init, input_dim, hidden_dim);
}

ImportanceScorer init_scorer(std::uint64_t seed, std::size_t input_dim, std::size_t hidden_dim) {
  UniformInit init(seed);
  ImportanceScorer s;
  s.forward = init_lstm_with(init, input_dim, hidden_dim);
  s.backward = init_lstm_with(init, input_dim, hidden_dim);
  s.readout = init.vector(2 * hidden_dim, 2 * hidden_dim);
  Vector bias = init.vector(1, 2 * hidden_dim);
  s.bias = bias.front();
  return s;
}

}  // namespace vidsum
