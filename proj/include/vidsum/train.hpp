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
#include <vector>

#include "vidsum/matrix.hpp"
#include "vidsum/model.hpp"
#include "vidsum/segment.hpp"

namespace vidsum {

inline constexpr double kDefaultMargin = 1.0;
inline constexpr double kDefaultLearningRate = 0.05;

/// A video segment paired with a description vector. tn = 1 marks a relevant
/// (positive) pair, tn = 0 an irrelevant one.
struct PairExample {
  FeatureMatrix segment;
  Vector desc;
  int tn = 0;
};

struct TrainConfig {
  double margin = kDefaultMargin;
  double learning_rate = kDefaultLearningRate;
  std::size_t epochs = 100;
  std::uint64_t seed = 0;
  bool shuffle = true;

  void validate() const;
};

/// tn * d + (1 - tn) * max(0, m - d), d = squared Euclidean distance.
double contrastive_loss(std::span<const double> x, std::span<const double> y, int tn,
                        double margin);

/// Loss of one example through both subnetworks.
double pair_loss(const VideoSubnet& vnet, const DescSubnet& dnet, const PairExample& ex,
                 double margin);

struct PairGradients {
  TanhProjection video;
  TanhProjection desc;
  double loss = 0.0;
};

/// Exact gradient of pair_loss with respect to every weight and bias. The
/// hinge contributes 0 at d == m.
PairGradients loss_gradients(const VideoSubnet& vnet, const DescSubnet& dnet,
                             const PairExample& ex, double margin);

/// Max relative error between loss_gradients and central differences with
/// step h over all parameters of both nets. Relative error is
/// |a - n| / max(|a|, |n|, 1e-8).
double finite_diff_check(const VideoSubnet& vnet, const DescSubnet& dnet, const PairExample& ex,
                         double margin, double h);

struct TrainResult {
  VideoSubnet video;
  DescSubnet desc;
  std::vector<double> loss_history;  // mean loss per epoch
};

/// Plain SGD, one step per example. Example order is reshuffled each epoch
/// from cfg.seed when cfg.shuffle is set. Throws DomainError on an empty dataset.
TrainResult sgd_train(VideoSubnet vnet, DescSubnet dnet, std::span<const PairExample> dataset,
                      const TrainConfig& cfg);

struct PairLabel {
  std::size_t segment_index = 0;
  std::size_t desc_index = 0;
  int tn = 0;

  friend bool operator==(const PairLabel&, const PairLabel&) = default;
};

/// Materializes labels into examples, in label order. Out-of-range indices
/// throw ValidationError naming the record.
std::vector<PairExample> sample_pairs(const FeatureMatrix& frames,
                                      std::span<const Segment> segments,
                                      const FeatureMatrix& descs,
                                      std::span<const PairLabel> labels);

struct GradcheckDims {
  std::size_t input_dim = 8;
  std::size_t hidden_dim = 6;
  std::size_t embed_dim = 4;
  std::size_t desc_dim = 5;
  std::size_t frames = 3;
};

struct GradcheckCase {
  VideoSubnet video;
  DescSubnet desc;
  PairExample example;
};

/// Seeded random nets and a standard-normal segment/description for gradient
/// checking.
GradcheckCase random_gradcheck_case(std::uint64_t seed, const GradcheckDims& dims, int tn);

}  // namespace vidsum
