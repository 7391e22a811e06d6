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
#include "vidsum/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vidsum/errors.hpp"

namespace vidsum {

std::size_t IntervalSet::duration() const {
  std::size_t total = 0;
  for (const Interval& iv : intervals_) total += iv.length();
  return total;
}

IntervalSet normalize(std::vector<Interval> intervals) {
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    if (intervals[i].start >= intervals[i].end) {
      throw ValidationError("interval " + std::to_string(i) + " [" +
                            std::to_string(intervals[i].start) + ", " +
                            std::to_string(intervals[i].end) + ") has start >= end");
    }
  }
  std::sort(intervals.begin(), intervals.end(), [](const Interval& a, const Interval& b) {
    return a.start != b.start ? a.start < b.start : a.end < b.end;
  });
  IntervalSet out;
  for (const Interval& iv : intervals) {
    if (!out.intervals_.empty() && iv.start <= out.intervals_.back().end) {
      out.intervals_.back().end = std::max(out.intervals_.back().end, iv.end);
    } else {
      out.intervals_.push_back(iv);
    }
  }
  return out;
}

std::size_t overlap_duration(const IntervalSet& a, const IntervalSet& b) {
  const auto& x = a.intervals();
  const auto& y = b.intervals();
  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t total = 0;
  while (i < x.size() && j < y.size()) {
    const std::size_t lo = std::max(x[i].start, y[j].start);
    const std::size_t hi = std::min(x[i].end, y[j].end);
    if (lo < hi) total += hi - lo;
    if (x[i].end < y[j].end) {
      ++i;
    } else {
      ++j;
    }
  }
  return total;
}

KeyshotScore keyshot_pr(const IntervalSet& a, const IntervalSet& b) {
  const std::size_t len_a = a.duration();
  const std::size_t len_b = b.duration();
  if (len_a == 0) throw DomainError("keyshot_pr: summary A has zero duration");
  if (len_b == 0) throw DomainError("keyshot_pr: reference B has zero duration");
  const auto overlap = static_cast<double>(overlap_duration(a, b));
  KeyshotScore s;
  s.precision = overlap / static_cast<double>(len_a);
  s.recall = overlap / static_cast<double>(len_b);
  const double sum = s.precision + s.recall;
  s.f1 = sum > 0.0 ? 2.0 * s.precision * s.recall / sum : 0.0;
  return s;
}

double jitter_amount(std::span<const Point2> track) {
  if (track.size() < 2) throw DomainError("jitter_amount: need at least 2 FOE points");
  double total = 0.0;
  for (std::size_t i = 1; i < track.size(); ++i) {
    total += std::hypot(track[i].x - track[i - 1].x, track[i].y - track[i - 1].y);
  }
  return total / static_cast<double>(track.size() - 1);
}

double speedup_deviation(double desired, std::size_t n_input, std::size_t n_output) {
  if (n_output == 0) throw DomainError("speedup_deviation: output has no frames");
  if (!(desired >= 1.0)) throw DomainError("speedup_deviation: desired speed-up must be >= 1");
  return std::abs(desired - static_cast<double>(n_input) / static_cast<double>(n_output));
}

}  // namespace vidsum
