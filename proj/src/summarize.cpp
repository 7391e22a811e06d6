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
#include "vidsum/summarize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vidsum/errors.hpp"

namespace vidsum {

std::vector<Segment> uniform_segments(std::size_t n_frames, std::size_t seg_len) {
  if (seg_len == 0) throw DomainError("uniform_segments: seg_len must be >= 1");
  std::vector<Segment> out;
  out.reserve(n_frames / seg_len);
  for (std::size_t i = 0; (i + 1) * seg_len <= n_frames; ++i) {
    out.push_back({i, i * seg_len, (i + 1) * seg_len});
  }
  return out;
}

std::vector<SegmentFeature> segment_features(const VideoSubnet& net, const FeatureMatrix& frames,
                                             std::span<const Segment> segments) {
  std::vector<SegmentFeature> out;
  out.reserve(segments.size());
  for (const Segment& s : segments) {
    if (s.start >= s.end || s.end > frames.rows()) {
      throw ValidationError("segment " + std::to_string(s.index) + " [" + std::to_string(s.start) +
                            ", " + std::to_string(s.end) + ") outside " +
                            std::to_string(frames.rows()) + " frames");
    }
    out.push_back({s, embed_frames(net, frames.row_range(s.start, s.end))});
  }
  return out;
}

namespace {

void require_points(std::span<const Vector> points) {
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].size() != points[0].size()) {
      throw ShapeError("point " + std::to_string(i) + " has dimension " +
                       std::to_string(points[i].size()) + ", expected " +
                       std::to_string(points[0].size()));
    }
  }
}

class DistanceTable {
 public:
  explicit DistanceTable(std::span<const Vector> points)
      : n_(points.size()), d_(n_ * n_, 0.0) {
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = i + 1; j < n_; ++j) {
        const double v = squared_distance(points[i], points[j]);
        d_[i * n_ + j] = v;
        d_[j * n_ + i] = v;
      }
    }
  }

  double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }
  std::size_t size() const { return n_; }

 private:
  std::size_t n_;
  std::vector<double> d_;
};

// Nearest and second-nearest medoid distance per point.
struct Assignment {
  std::vector<std::size_t> nearest;
  std::vector<double> d1;
  std::vector<double> d2;
  double total = 0.0;
};

Assignment assign(const DistanceTable& dist, std::span<const std::size_t> medoids) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const std::size_t n = dist.size();
  Assignment a{std::vector<std::size_t>(n, 0), std::vector<double>(n, inf),
               std::vector<double>(n, inf), 0.0};
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t m : medoids) {
      const double v = dist(j, m);
      if (v < a.d1[j]) {
        a.d2[j] = a.d1[j];
        a.d1[j] = v;
        a.nearest[j] = m;
      } else if (v < a.d2[j]) {
        a.d2[j] = v;
      }
    }
    a.total += a.d1[j];
  }
  return a;
}

}  // namespace

double kmedoids_objective(std::span<const Vector> points, std::span<const std::size_t> medoids) {
  if (medoids.empty()) throw DomainError("objective: medoid set is empty");
  for (std::size_t m : medoids) {
    if (m >= points.size()) {
      throw DomainError("objective: medoid index " + std::to_string(m) + " out of range");
    }
  }
  double total = 0.0;
  for (const Vector& p : points) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t m : medoids) best = std::min(best, squared_distance(p, points[m]));
    total += best;
  }
  return total;
}

KMedoidsResult kmedoids(std::span<const Vector> points, std::size_t k, std::size_t max_iters) {
  const std::size_t n = points.size();
  if (k < 1 || k > n) {
    throw DomainError("kmedoids: K = " + std::to_string(k) + " outside [1, " + std::to_string(n) +
                      "]");
  }
  require_points(points);
  const DistanceTable dist(points);
  constexpr double inf = std::numeric_limits<double>::infinity();

  // BUILD
  std::vector<std::size_t> medoids;
  std::vector<bool> is_medoid(n, false);
  std::vector<double> nearest(n, inf);
  while (medoids.size() < k) {
    std::size_t best = n;
    double best_total = inf;
    for (std::size_t c = 0; c < n; ++c) {
      if (is_medoid[c]) continue;
      double total = 0.0;
      for (std::size_t j = 0; j < n; ++j) total += std::min(nearest[j], dist(j, c));
      if (total < best_total) {
        best_total = total;
        best = c;
      }
    }
    medoids.push_back(best);
    is_medoid[best] = true;
    for (std::size_t j = 0; j < n; ++j) nearest[j] = std::min(nearest[j], dist(j, best));
  }
  std::sort(medoids.begin(), medoids.end());

  KMedoidsResult result;
  Assignment a = assign(dist, medoids);
  result.trace.push_back(a.total);

  // SWAP
  while (result.swaps < max_iters) {
    double best_total = a.total;
    std::size_t best_slot = k;
    std::size_t best_candidate = n;
    for (std::size_t slot = 0; slot < k; ++slot) {
      const std::size_t m = medoids[slot];
      for (std::size_t c = 0; c < n; ++c) {
        if (is_medoid[c]) continue;
        double total = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          const double keep = a.nearest[j] == m ? a.d2[j] : a.d1[j];
          total += std::min(keep, dist(j, c));
        }
        if (total < best_total) {
          best_total = total;
          best_slot = slot;
          best_candidate = c;
        }
      }
    }
    if (best_slot == k) break;
    is_medoid[medoids[best_slot]] = false;
    is_medoid[best_candidate] = true;
    medoids[best_slot] = best_candidate;
    std::sort(medoids.begin(), medoids.end());
    a = assign(dist, medoids);
    ++result.swaps;
    result.trace.push_back(a.total);
  }

  result.medoids = std::move(medoids);
  result.objective = a.total;
  return result;
}

std::vector<Segment> generate_summary(std::span<const SegmentFeature> segfeats, std::size_t k,
                                      std::size_t max_iters) {
  std::vector<Vector> points;
  points.reserve(segfeats.size());
  for (const SegmentFeature& sf : segfeats) points.push_back(sf.feature);
  const KMedoidsResult r = kmedoids(points, k, max_iters);

  std::vector<Segment> out;
  out.reserve(r.medoids.size());
  for (std::size_t m : r.medoids) out.push_back(segfeats[m].segment);
  std::sort(out.begin(), out.end(), [](const Segment& a, const Segment& b) {
    return a.start != b.start ? a.start < b.start : a.index < b.index;
  });
  return out;
}

double default_centrality_sigma(double frame_w, double frame_h) {
  return 0.25 * std::hypot(frame_w, frame_h);
}

double semantic_score(std::span<const Roi> rois, double frame_w, double frame_h, double sigma) {
  if (!(frame_w > 0.0) || !(frame_h > 0.0)) {
    throw DomainError("semantic_score: frame dimensions must be positive");
  }
  if (!(sigma > 0.0)) throw DomainError("semantic_score: sigma must be positive");
  const double cx = frame_w / 2.0;
  const double cy = frame_h / 2.0;
  const double frame_area = frame_w * frame_h;
  double total = 0.0;
  for (std::size_t k = 0; k < rois.size(); ++k) {
    const Roi& r = rois[k];
    if (!(r.confidence >= 0.0 && r.confidence <= 1.0)) {
      throw DomainError("ROI " + std::to_string(k) + ": confidence outside [0, 1]");
    }
    if (!(r.area >= 0.0)) throw DomainError("ROI " + std::to_string(k) + ": negative area");
    const double dx = r.center_x - cx;
    const double dy = r.center_y - cy;
    const double centrality = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
    const double size = std::clamp(r.area / frame_area, 0.0, 1.0);
    total += r.confidence * centrality * size;
  }
  return total;
}

ThresholdSplit semantic_threshold_split(std::span<const double> scores) {
  const std::size_t T = scores.size();
  if (T == 0) throw DomainError("semantic_threshold_split: no frames");
  double mean = 0.0;
  for (double s : scores) mean += s;
  mean /= static_cast<double>(T);
  double var = 0.0;
  for (double s : scores) var += (s - mean) * (s - mean);
  const double sd = std::sqrt(var / static_cast<double>(T));

  std::vector<bool> inlier(T);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < T; ++t) {
    inlier[t] = std::abs(scores[t] - mean) <= 2.0 * sd;
    if (inlier[t]) {
      lo = std::min(lo, scores[t]);
      hi = std::max(hi, scores[t]);
    }
  }

  ThresholdSplit out;
  out.threshold = (lo + hi) / 2.0;
  out.is_semantic.resize(T);
  for (std::size_t t = 0; t < T; ++t) out.is_semantic[t] = inlier[t] && scores[t] >= out.threshold;

  std::size_t run_start = 0;
  for (std::size_t t = 1; t <= T; ++t) {
    if (t == T || out.is_semantic[t] != out.is_semantic[run_start]) {
      auto& dst = out.is_semantic[run_start] ? out.semantic : out.non_semantic;
      dst.push_back({run_start, t});
      run_start = t;
    }
  }
  return out;
}

double segment_speedups(double len_s, double len_ns, double target, double rho_s) {
  if (!(target >= 1.0)) throw DomainError("segment_speedups: target speed-up must be >= 1");
  if (!(rho_s >= 1.0 && rho_s <= target)) {
    throw DomainError("segment_speedups: semantic speed-up must lie in [1, target]");
  }
  if (!(len_s >= 0.0) || !(len_ns >= 0.0)) {
    throw DomainError("segment_speedups: segment lengths must be nonnegative");
  }
  if (len_s + len_ns == 0.0) throw DomainError("segment_speedups: both parts are empty");
  if (len_ns == 0.0) {
    if (rho_s == target) return target;
    throw DomainError(
        "segment_speedups: infeasible, no non-semantic frames to absorb the speed-up "
        "(requires rho_s == target)");
  }
  if (len_s == 0.0 || rho_s == target) return target;
  const double budget = (len_s + len_ns) / target - len_s / rho_s;
  if (!(budget > 0.0)) {
    throw DomainError(
        "segment_speedups: infeasible, (len_s + len_ns) / target - len_s / rho_s must be > 0");
  }
  return len_ns / budget;
}

double frame_path_cost(std::span<const double> scores, std::span<const std::size_t> path,
                       double rho, double lambda_speed, double lambda_sem) {
  if (scores.empty()) throw DomainError("frame_path_cost: no frames");
  const double s_max = *std::max_element(scores.begin(), scores.end());
  double total = 0.0;
  for (std::size_t k = 1; k < path.size(); ++k) {
    if (path[k] <= path[k - 1] || path[k] >= scores.size()) {
      throw ValidationError("frame_path_cost: path must be increasing and in range");
    }
    const double gap = static_cast<double>(path[k] - path[k - 1]) - rho;
    total += lambda_speed * gap * gap + lambda_sem * (s_max - scores[path[k]]);
  }
  return total;
}

std::vector<std::size_t> speedup_frame_selection(std::span<const double> scores, double rho,
                                                 std::size_t max_skip, double lambda_speed,
                                                 double lambda_sem) {
  const std::size_t T = scores.size();
  if (T < 2) throw DomainError("speedup_frame_selection: need at least 2 frames");
  if (max_skip < 1) throw DomainError("speedup_frame_selection: max_skip must be >= 1");
  if (!(rho >= 1.0)) throw DomainError("speedup_frame_selection: rho must be >= 1");
  const double s_max = *std::max_element(scores.begin(), scores.end());

  // Cost-to-go from each frame to the last one; scanning successors in
  // ascending order with a strict comparison keeps the smallest next frame
  // among ties.
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> to_go(T, inf);
  std::vector<std::size_t> next(T, T);
  to_go[T - 1] = 0.0;
  for (std::size_t i = T - 1; i-- > 0;) {
    const std::size_t last = std::min(T - 1, i + max_skip);
    for (std::size_t j = i + 1; j <= last; ++j) {
      const double gap = static_cast<double>(j - i) - rho;
      const double c = lambda_speed * gap * gap + lambda_sem * (s_max - scores[j]) + to_go[j];
      if (c < to_go[i]) {
        to_go[i] = c;
        next[i] = j;
      }
    }
  }

  std::vector<std::size_t> path{0};
  while (path.back() != T - 1) path.push_back(next[path.back()]);
  return path;
}

FastForwardPlan fast_forward(std::span<const double> scores, double target,
                             std::optional<double> rho_semantic, std::size_t max_skip,
                             double lambda_speed, double lambda_sem) {
  FastForwardPlan plan;
  plan.split = semantic_threshold_split(scores);
  if (!rho_semantic) {
    plan.rho_semantic = target;
    plan.rho_non_semantic = target;
    plan.frames = scores.size() < 2 ? std::vector<std::size_t>{0}
                                    : speedup_frame_selection(scores, target, max_skip,
                                                              lambda_speed, lambda_sem);
    return plan;
  }

  std::size_t len_s = 0;
  for (const Interval& iv : plan.split.semantic) len_s += iv.length();
  const std::size_t len_ns = scores.size() - len_s;
  plan.rho_semantic = *rho_semantic;
  plan.rho_non_semantic = segment_speedups(static_cast<double>(len_s),
                                           static_cast<double>(len_ns), target, *rho_semantic);

  std::vector<Interval> ranges = plan.split.semantic;
  ranges.insert(ranges.end(), plan.split.non_semantic.begin(), plan.split.non_semantic.end());
  std::sort(ranges.begin(), ranges.end(),
            [](const Interval& a, const Interval& b) { return a.start < b.start; });
  for (const Interval& iv : ranges) {
    if (iv.length() == 1) {
      plan.frames.push_back(iv.start);
      continue;
    }
    const double rho = plan.split.is_semantic[iv.start] ? plan.rho_semantic : plan.rho_non_semantic;
    const auto local = speedup_frame_selection(scores.subspan(iv.start, iv.length()), rho,
                                               max_skip, lambda_speed, lambda_sem);
    for (std::size_t f : local) plan.frames.push_back(iv.start + f);
  }
  return plan;
}

}  // namespace vidsum
