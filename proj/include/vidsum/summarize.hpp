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
#include <optional>
#include <span>
#include <vector>

#include "vidsum/matrix.hpp"
#include "vidsum/metrics.hpp"
#include "vidsum/model.hpp"
#include "vidsum/segment.hpp"

namespace vidsum {

// ---------------------------------------------------------------------------
// Segment-level summarization
// ---------------------------------------------------------------------------

/// Consecutive segments of exactly seg_len frames from frame 0. A trailing
/// remainder shorter than seg_len is dropped.
std::vector<Segment> uniform_segments(std::size_t n_frames, std::size_t seg_len);

/// Embeds each segment's frames with the video subnet. Output follows the
/// order of `segments`.
std::vector<SegmentFeature> segment_features(const VideoSubnet& net, const FeatureMatrix& frames,
                                             std::span<const Segment> segments);

/// Sum over points of the squared distance to the nearest medoid.
double kmedoids_objective(std::span<const Vector> points, std::span<const std::size_t> medoids);

struct KMedoidsResult {
  std::vector<std::size_t> medoids;  // ascending point indices
  double objective = 0.0;
  /// Objective after BUILD, then after every accepted swap.
  std::vector<double> trace;
  std::size_t swaps = 0;
};

/// PAM with squared Euclidean distance. BUILD adds medoids greedily; SWAP
/// applies the best strictly improving medoid/non-medoid exchange until none
/// remains or max_iters swaps have been made. Ties go to the lowest index.
KMedoidsResult kmedoids(std::span<const Vector> points, std::size_t k, std::size_t max_iters);

/// Medoid segments of the features, in temporal order.
std::vector<Segment> generate_summary(std::span<const SegmentFeature> segfeats, std::size_t k,
                                      std::size_t max_iters = 100);

// ---------------------------------------------------------------------------
// Semantic fast-forward
// ---------------------------------------------------------------------------

/// Detected region of interest in one frame.
struct Roi {
  double confidence = 0.0;  // [0, 1]
  double center_x = 0.0;    // pixels
  double center_y = 0.0;
  double area = 0.0;  // pixels^2
};

/// Sum over ROIs of confidence * centrality * relative size, where centrality
/// is exp(-|center - frame_center|^2 / (2 sigma^2)) and size is area over frame
/// area clamped to [0, 1].
double semantic_score(std::span<const Roi> rois, double frame_w, double frame_h, double sigma);

/// sigma a quarter of the frame diagonal.
double default_centrality_sigma(double frame_w, double frame_h);

struct ThresholdSplit {
  double threshold = 0.0;
  std::vector<Interval> semantic;
  std::vector<Interval> non_semantic;
  std::vector<bool> is_semantic;  // per frame
};

/// Scores more than two population standard deviations from the mean are
/// outliers. The threshold is the midpoint of the inlier range; inlier frames
/// at or above it are semantic, everything else (outliers included) is not.
ThresholdSplit semantic_threshold_split(std::span<const double> scores);

/// Non-semantic speed-up such that the whole video reaches `target` when the
/// semantic part plays at rho_s. Throws DomainError when infeasible.
double segment_speedups(double len_s, double len_ns, double target, double rho_s);

/// Cost of a frame path under the fast-forward edge cost
///   lambda_speed * ((j - i) - rho)^2 + lambda_sem * (max(scores) - scores[j]).
double frame_path_cost(std::span<const double> scores, std::span<const std::size_t> path,
                       double rho, double lambda_speed, double lambda_sem);

/// Minimum-cost increasing path 0 -> T-1 with steps of at most max_skip
/// frames. Among equal-cost paths the lexicographically smallest is returned.
std::vector<std::size_t> speedup_frame_selection(std::span<const double> scores, double rho,
                                                 std::size_t max_skip, double lambda_speed,
                                                 double lambda_sem);

struct FastForwardPlan {
  ThresholdSplit split;
  double rho_semantic = 0.0;
  double rho_non_semantic = 0.0;
  std::vector<std::size_t> frames;
};

/// Full semantic fast-forward. Without rho_semantic the whole sequence is
/// sampled at `target`. Otherwise the scores are split, the non-semantic rate
/// is solved from the segment lengths, and every range is sampled at its own
/// rate.
FastForwardPlan fast_forward(std::span<const double> scores, double target,
                             std::optional<double> rho_semantic, std::size_t max_skip,
                             double lambda_speed, double lambda_sem);

}  // namespace vidsum
