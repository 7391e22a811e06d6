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
#include <span>
#include <vector>

namespace vidsum {

/// Frame interval [start, end).
struct Interval {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - start; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Sorted, disjoint, non-adjacent intervals. Only constructible through
/// normalize(), so every instance satisfies the invariant.
class IntervalSet {
 public:
  IntervalSet() = default;

  const std::vector<Interval>& intervals() const { return intervals_; }
  std::size_t duration() const;
  bool empty() const { return intervals_.empty(); }

  friend IntervalSet normalize(std::vector<Interval> intervals);
  friend bool operator==(const IntervalSet&, const IntervalSet&) = default;

 private:
  std::vector<Interval> intervals_;
};

/// Sorts and merges overlapping or touching intervals. Throws ValidationError
/// naming the first record with start >= end.
IntervalSet normalize(std::vector<Interval> intervals);

/// Total length of the intersection of two normalized sets.
std::size_t overlap_duration(const IntervalSet& a, const IntervalSet& b);

struct KeyshotScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// precision = overlap / |A|, recall = overlap / |B|, f1 their harmonic mean
/// (0 when both vanish). A is the generated summary, B the reference.
KeyshotScore keyshot_pr(const IntervalSet& a, const IntervalSet& b);

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Mean displacement norm between consecutive focus-of-expansion points.
double jitter_amount(std::span<const Point2> track);

/// |desired - n_input / n_output|.
double speedup_deviation(double desired, std::size_t n_input, std::size_t n_output);

}  // namespace vidsum
