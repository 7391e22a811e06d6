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
#include <vector>

#include "vidsum/matrix.hpp"
#include "vidsum/metrics.hpp"
#include "vidsum/train.hpp"

namespace vidsum {

/// Planted-event feature stream. Events of frames_per_event frames are
/// separated by gap_frames of near-zero frames.
struct SynthSpec {
  std::uint64_t seed = 0;
  std::size_t n_events = 5;
  std::size_t frames_per_event = 60;
  std::size_t gap_frames = 10;
  std::size_t dim = 16;
  double noise_sigma = 0.05;
  /// Segment length used to index the pair labels.
  std::size_t seg_len = 10;

  void validate() const;
};

struct SynthData {
  FeatureMatrix features;    // frames x dim
  FeatureMatrix descs;       // n_events x n_events, row i is one-hot e_i
  FeatureMatrix centers;     // n_events x dim
  IntervalSet truth;         // event windows
  std::vector<PairLabel> labels;
};

/// Deterministic in spec.seed. Event centers are pairwise at least
/// 10 * noise_sigma apart and at least that far from the origin. Every
/// segment lying wholly inside event i is paired positively with description
/// i and negatively with every other description.
SynthData synth_generate(const SynthSpec& spec);

}  // namespace vidsum
