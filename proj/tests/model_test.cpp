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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "vidsum/errors.hpp"

using namespace vidsum;

namespace {

double sig(double z) { return 1.0 / (1.0 + std::exp(-z)); }

LstmParams zero_lstm(std::size_t d, std::size_t h) {
  return {d, h, Matrix(h, d + h), Matrix(h, d + h), Matrix(h, d + h), Matrix(h, d + h)};
}

LstmParams scalar_lstm(double wi0, double wi1, double wf0, double wf1, double wo0, double wo1,
                       double wc0, double wc1) {
  return {1, 1, Matrix(1, 2, {wi0, wi1}), Matrix(1, 2, {wf0, wf1}), Matrix(1, 2, {wo0, wo1}),
          Matrix(1, 2, {wc0, wc1})};
}

VideoSubnet scalar_net(double w1, double b1, double w2, double b2) {
  return {{Matrix(1, 1, {w1}), Vector{b1}, Matrix(1, 1, {w2}), Vector{b2}}};
}

Matrix random_matrix(std::mt19937_64& gen, std::size_t r, std::size_t c, double scale) {
  std::normal_distribution<double> n(0.0, scale);
  Matrix m(r, c);
  for (double& v : m.data()) v = n(gen);
  return m;
}

}  // namespace

TEST(LstmStep, ZeroWeightsZeroState) {
  const auto p = zero_lstm(3, 2);
  const auto tr = lstm_step_traced(p, LstmState::zeros(2), Vector{0.3, -7.0, 2.0});
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_EQ(tr.gates.input[k], 0.5);
    EXPECT_EQ(tr.gates.forget[k], 0.5);
    EXPECT_EQ(tr.gates.output[k], 0.5);
    EXPECT_EQ(tr.state.c[k], 0.0);
    EXPECT_EQ(tr.state.h[k], 0.0);
  }
}

TEST(LstmStep, ZeroWeightsCarryHalfTheCell) {
  const auto p = zero_lstm(1, 1);
  const auto s = lstm_step(p, {Vector{0.0}, Vector{1.0}}, Vector{4.0});
  EXPECT_EQ(s.c[0], 0.5);
  EXPECT_DOUBLE_EQ(s.h[0], 0.5 * std::tanh(0.5));
}

TEST(LstmStep, UnitScalarWeights) {
  const auto p = scalar_lstm(1, 1, 1, 1, 1, 1, 1, 1);
  const auto s = lstm_step(p, LstmState::zeros(1), Vector{1.0});
  EXPECT_NEAR(s.c[0], 0.5567699411459397, 1e-15);
  EXPECT_NEAR(s.h[0], 0.36960635293570576, 1e-15);
}

TEST(LstmStep, ShapeErrors) {
  const auto p = zero_lstm(2, 3);
  EXPECT_THROW(lstm_step(p, LstmState::zeros(3), Vector{1.0}), ShapeError);
  EXPECT_THROW(lstm_step(p, LstmState::zeros(2), Vector{1.0, 2.0}), ShapeError);
  auto bad = p;
  bad.w_cell = Matrix(3, 4);
  EXPECT_THROW(lstm_step(bad, LstmState::zeros(3), Vector{1.0, 2.0}), ShapeError);
}

TEST(LstmStep, GateAndHiddenRanges) {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 50; ++trial) {
    LstmParams p{6, 5, random_matrix(gen, 5, 11, 1.0), random_matrix(gen, 5, 11, 1.0),
                 random_matrix(gen, 5, 11, 1.0), random_matrix(gen, 5, 11, 1.0)};
    LstmState s{Vector(5), Vector(5)};
    std::normal_distribution<double> n(0.0, 2.0);
    for (double& v : s.h) v = std::tanh(n(gen));
    for (double& v : s.c) v = n(gen);
    Vector x(6);
    for (double& v : x) v = n(gen);
    const auto tr = lstm_step_traced(p, s, x);
    for (std::size_t k = 0; k < 5; ++k) {
      EXPECT_GT(tr.gates.input[k], 0.0);
      EXPECT_LT(tr.gates.input[k], 1.0);
      EXPECT_GT(tr.gates.forget[k], 0.0);
      EXPECT_LT(tr.gates.forget[k], 1.0);
      EXPECT_GT(tr.gates.output[k], 0.0);
      EXPECT_LT(tr.gates.output[k], 1.0);
      EXPECT_GT(tr.state.h[k], -1.0);
      EXPECT_LT(tr.state.h[k], 1.0);
    }
  }
}

TEST(LstmScan, EmptySequence) {
  const auto p = init_lstm(1, 3, 4);
  const Matrix h = lstm_scan(p, Matrix(0, 3));
  EXPECT_EQ(h.rows(), 0u);
}

TEST(LstmScan, ZeroWeightsGiveZeroRows) {
  const Matrix frames(4, 2, {1, 2, 3, 4, 5, 6, 7, 8});
  const Matrix h = lstm_scan(zero_lstm(2, 3), frames);
  for (double v : h.data()) EXPECT_EQ(v, 0.0);
}

TEST(LstmScan, MatchesChainedScalarSteps) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int trial = 0; trial < 20; ++trial) {
    double w[8];
    for (double& v : w) v = u(gen);
    const auto p = scalar_lstm(w[0], w[1], w[2], w[3], w[4], w[5], w[6], w[7]);
    const Matrix frames(3, 1, {u(gen), u(gen), u(gen)});
    const Matrix h = lstm_scan(p, frames);

    double hp = 0.0;
    double cp = 0.0;
    for (std::size_t t = 0; t < 3; ++t) {
      const double x = frames(t, 0);
      const double i = sig(w[0] * x + w[1] * hp);
      const double f = sig(w[2] * x + w[3] * hp);
      const double o = sig(w[4] * x + w[5] * hp);
      cp = i * std::tanh(w[6] * x + w[7] * hp) + f * cp;
      hp = o * std::tanh(cp);
      EXPECT_NEAR(h(t, 0), hp, 1e-14);
    }
  }
}

TEST(LstmScan, Causality) {
  std::mt19937_64 gen(3);
  const auto p = init_lstm(5, 4, 3);
  const Matrix frames = random_matrix(gen, 8, 4, 1.0);
  const Matrix full = lstm_scan(p, frames);
  for (std::size_t t = 1; t <= 8; ++t) {
    const MatrixView prefix = frames.row_range(0, t);
    const Matrix part = lstm_scan(p, prefix);
    for (std::size_t r = 0; r < t; ++r) {
      for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(part(r, k), full(r, k));
    }
  }
}

TEST(ScoreImportance, ZeroScorerGivesHalf) {
  ImportanceScorer s{zero_lstm(2, 3), zero_lstm(2, 3), Vector(6, 0.0), 0.0};
  const Vector scores = score_importance(s, Matrix(5, 2, 1.0));
  ASSERT_EQ(scores.size(), 5u);
  for (double v : scores) EXPECT_EQ(v, 0.5);
}

TEST(ScoreImportance, SingleFrameMatchesOneStepEachWay) {
  const auto s = init_scorer(21, 3, 2);
  const Vector x{0.4, -1.2, 0.9};
  const Vector scores = score_importance(s, Matrix(1, 3, x));
  const auto hf = lstm_step(s.forward, LstmState::zeros(2), x).h;
  const auto hb = lstm_step(s.backward, LstmState::zeros(2), x).h;
  const double z = s.readout[0] * hf[0] + s.readout[1] * hf[1] + s.readout[2] * hb[0] +
                   s.readout[3] * hb[1] + s.bias;
  EXPECT_NEAR(scores[0], sig(z), 1e-15);
}

TEST(ScoreImportance, ReversalSymmetry) {
  std::mt19937_64 gen(5);
  const auto s = init_scorer(9, 3, 4);
  const Matrix frames = random_matrix(gen, 7, 3, 1.0);
  Matrix reversed(7, 3);
  for (std::size_t t = 0; t < 7; ++t) {
    std::copy(frames.row(6 - t).begin(), frames.row(6 - t).end(), reversed.row(t).begin());
  }
  ImportanceScorer swapped = s;
  std::swap(swapped.forward, swapped.backward);
  // The readout halves follow their LSTMs.
  std::rotate(swapped.readout.begin(), swapped.readout.begin() + 4, swapped.readout.end());

  const Vector a = score_importance(s, frames);
  const Vector b = score_importance(swapped, reversed);
  for (std::size_t t = 0; t < 7; ++t) EXPECT_NEAR(a[t], b[6 - t], 1e-15);
}

TEST(ScoreImportance, RangeAndShape) {
  std::mt19937_64 gen(8);
  auto s = init_scorer(2, 4, 3);
  for (double& v : s.readout) v *= 50.0;
  const Vector scores = score_importance(s, random_matrix(gen, 20, 4, 5.0));
  for (double v : scores) {
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
  EXPECT_THROW(score_importance(s, Matrix(3, 5)), ShapeError);
}

TEST(FfnForward, ZeroNet) {
  const VideoSubnet net{{Matrix(3, 4), Vector(3, 0.0), Matrix(2, 3), Vector(2, 0.0)}};
  EXPECT_EQ(ffn_forward(net, Vector{1, 2, 3, 4}), (Vector{0.0, 0.0}));
}

TEST(FfnForward, ScalarToy) {
  EXPECT_NEAR(ffn_forward(scalar_net(1, 0, 1, 0), Vector{1.0})[0], 0.6420149920119997, 1e-15);
}

TEST(FfnForward, OutputStrictlyInsideUnitBox) {
  std::mt19937_64 gen(4);
  const auto net = init_video_subnet(1, 6, 5, 4);
  std::normal_distribution<double> n(0.0, 1e3);
  for (int trial = 0; trial < 100; ++trial) {
    Vector x(6);
    for (double& v : x) v = n(gen);
    for (double y : ffn_forward(net, x)) {
      EXPECT_TRUE(std::isfinite(y));
      EXPECT_GE(y, -1.0);
      EXPECT_LE(y, 1.0);
    }
  }
  EXPECT_THROW(ffn_forward(net, Vector(5)), ShapeError);
}

TEST(EmbedFrames, IdenticalFramesEqualOneFrame) {
  const auto net = init_video_subnet(3, 4, 6, 3);
  const Vector x{0.1, -0.2, 0.3, 0.7};
  Matrix seg(5, 4);
  for (std::size_t r = 0; r < 5; ++r) std::copy(x.begin(), x.end(), seg.row(r).begin());
  const Vector a = embed_frames(net, seg);
  const Vector b = ffn_forward(net, x);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(a[k], b[k], 1e-15);
  EXPECT_EQ(embed_frames(net, Matrix(1, 4, x)), b);
}

TEST(EmbedFrames, TwoFrameScalarMean) {
  const Vector e = embed_frames(scalar_net(1, 0, 1, 0), Matrix(2, 1, {1.0, -0.5}));
  EXPECT_NEAR(e[0], 0.10510340570845181, 1e-15);
}

TEST(EmbedFrames, EmptySegmentIsDomainError) {
  const auto net = init_video_subnet(3, 4, 6, 3);
  EXPECT_THROW(embed_frames(net, Matrix(0, 4)), DomainError);
}

TEST(EmbedFrames, PermutationInvariant) {
  std::mt19937_64 gen(6);
  const auto net = init_video_subnet(3, 4, 6, 3);
  const Matrix seg = random_matrix(gen, 6, 4, 1.0);
  std::vector<std::size_t> order{3, 0, 5, 1, 4, 2};
  Matrix perm(6, 4);
  for (std::size_t r = 0; r < 6; ++r) {
    std::copy(seg.row(order[r]).begin(), seg.row(order[r]).end(), perm.row(r).begin());
  }
  const Vector a = embed_frames(net, seg);
  const Vector b = embed_frames(net, perm);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(a[k], b[k], 1e-15);
}

TEST(EmbedDescription, MirrorsVideoForward) {
  const DescSubnet zero{{Matrix(2, 3), Vector(2, 0.0), Matrix(4, 2), Vector(4, 0.0)}};
  EXPECT_EQ(embed_description(zero, Vector{1, 2, 3}), Vector(4, 0.0));
  const DescSubnet toy{scalar_net(1, 0, 1, 0).layers};
  EXPECT_NEAR(embed_description(toy, Vector{1.0})[0], 0.6420149920119997, 1e-15);
  const auto net = init_desc_subnet(2, kDefaultDescDim, 8, 4);
  const Vector y = embed_description(net, Vector(kDefaultDescDim, 3.0));
  for (double v : y) EXPECT_LT(std::abs(v), 1.0);
  EXPECT_THROW(embed_description(net, Vector(10)), ShapeError);
}

TEST(InitParams, DeterministicInSeed) {
  EXPECT_EQ(init_video_subnet(42, 8, 6, 4), init_video_subnet(42, 8, 6, 4));
  EXPECT_FALSE(init_video_subnet(42, 8, 6, 4) == init_video_subnet(43, 8, 6, 4));
  const auto a = init_scorer(5, 3, 2);
  const auto b = init_scorer(5, 3, 2);
  EXPECT_EQ(a.forward.w_cell, b.forward.w_cell);
  EXPECT_EQ(a.readout, b.readout);
}

TEST(InitParams, EntriesWithinFanInBound) {
  const auto net = init_video_subnet(17, 40, 25, 9);
  const double b1 = 1.0 / std::sqrt(40.0);
  const double b2 = 1.0 / std::sqrt(25.0);
  std::size_t n = 0;
  auto check = [&n](std::span<const double> values, double bound) {
    for (double v : values) {
      EXPECT_LE(std::abs(v), bound);
      ++n;
    }
  };
  check(net.layers.w1.data(), b1);
  check(net.layers.b1, b1);
  check(net.layers.w2.data(), b2);
  check(net.layers.b2, b2);
  EXPECT_GE(n, 1000u);

  const auto lstm = init_lstm(3, 10, 15);
  for (double v : lstm.w_forget.data()) EXPECT_LE(std::abs(v), 1.0 / 5.0);
}

TEST(InitParams, ZeroDimsAreDomainErrors) {
  EXPECT_THROW(init_video_subnet(1, 0, 4, 4), DomainError);
  EXPECT_THROW(init_desc_subnet(1, 4, 0, 4), DomainError);
  EXPECT_THROW(init_lstm(1, 3, 0), DomainError);
  EXPECT_THROW(init_scorer(1, 0, 2), DomainError);
}

TEST(Sigmoid, StableAtExtremes) {
  EXPECT_EQ(sigmoid(0.0), 0.5);
  EXPECT_TRUE(std::isfinite(sigmoid(-1000.0)));
  EXPECT_EQ(sigmoid(1000.0), 1.0);
}
