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
#include "vidsum/synth.hpp"

#include <cmath>
#include <random>
#include <string>

#include "vidsum/errors.hpp"
#include "vidsum/summarize.hpp"

namespace vidsum {

namespace {

constexpr int kCenterAttempts = 1000;

}  // namespace

void SynthSpec::validate() const {
  if (n_events < 1 || frames_per_event < 1 || gap_frames < 1 || dim < 1 || seg_len < 1) {
    throw DomainError("synth spec: all counts must be >= 1");
  }
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw DomainError("synth spec: noise_sigma must be >= 0");
  }
}

SynthData synth_generate(const SynthSpec& spec) {
  spec.validate();
  std::mt19937_64 gen(spec.seed);
  const double min_sep = 10.0 * spec.noise_sigma;

  // Centers uniform in a cube around the origin, rejection-sampled for
  // separation; the cube doubles whenever sampling stalls.
  SynthData out;
  out.centers = Matrix(spec.n_events, spec.dim);
  double half_width = std::max(1.0, min_sep);
  for (std::size_t e = 0; e < spec.n_events; ++e) {
    for (int attempt = 0;; ++attempt) {
      if (attempt == kCenterAttempts) {
        half_width *= 2.0;
        attempt = 0;
      }
      std::uniform_real_distribution<double> coord(-half_width, half_width);
      auto c = out.centers.row(e);
      for (double& v : c) v = coord(gen);
      bool ok = std::sqrt(squared_distance(c, Vector(spec.dim, 0.0))) >= min_sep;
      for (std::size_t prev = 0; ok && prev < e; ++prev) {
        ok = std::sqrt(squared_distance(c, out.centers.row(prev))) >= min_sep;
      }
      if (ok) break;
    }
  }

  const std::size_t n_frames =
      spec.n_events * spec.frames_per_event + (spec.n_events - 1) * spec.gap_frames;
  out.features = Matrix(n_frames, spec.dim);
  std::normal_distribution<double> unit(0.0, 1.0);
  const double gap_sigma = 0.1 * spec.noise_sigma;

  std::vector<Interval> windows;
  std::size_t t = 0;
  for (std::size_t e = 0; e < spec.n_events; ++e) {
    if (e > 0) {
      for (std::size_t g = 0; g < spec.gap_frames; ++g, ++t) {
        for (double& v : out.features.row(t)) v = gap_sigma * unit(gen);
      }
    }
    windows.push_back({t, t + spec.frames_per_event});
    for (std::size_t f = 0; f < spec.frames_per_event; ++f, ++t) {
      auto row = out.features.row(t);
      const auto c = out.centers.row(e);
      for (std::size_t k = 0; k < spec.dim; ++k) row[k] = c[k] + spec.noise_sigma * unit(gen);
    }
  }
  out.truth = normalize(windows);

  out.descs = Matrix(spec.n_events, spec.n_events);
  for (std::size_t e = 0; e < spec.n_events; ++e) out.descs(e, e) = 1.0;

  for (const Segment& s : uniform_segments(n_frames, spec.seg_len)) {
    for (std::size_t e = 0; e < spec.n_events; ++e) {
      if (s.start >= windows[e].start && s.end <= windows[e].end) {
        for (std::size_t d = 0; d < spec.n_events; ++d) {
          out.labels.push_back({s.index, d, d == e ? 1 : 0});
        }
        break;
      }
    }
  }
  return out;
}

}  // namespace vidsum
