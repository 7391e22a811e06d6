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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "vidsum/errors.hpp"

using namespace vidsum;

namespace {

std::vector<Interval> random_intervals(std::mt19937_64& gen, std::size_t horizon) {
  std::uniform_int_distribution<std::size_t> count(1, 6);
  std::uniform_int_distribution<std::size_t> pos(0, horizon - 1);
  std::vector<Interval> out;
  for (std::size_t n = count(gen); n > 0; --n) {
    std::size_t a = pos(gen);
    std::size_t b = pos(gen);
    if (a > b) std::swap(a, b);
    out.push_back({a, b + 1});
  }
  return out;
}

std::vector<bool> membership(const std::vector<Interval>& ivs, std::size_t horizon) {
  std::vector<bool> m(horizon, false);
  for (const auto& iv : ivs) {
    for (std::size_t t = iv.start; t < iv.end; ++t) m[t] = true;
  }
  return m;
}

}  // namespace

TEST(Normalize, MergesAdjacentAndSorts) {
  EXPECT_EQ(normalize({{0, 5}, {5, 10}}).intervals(), (std::vector<Interval>{{0, 10}}));
  EXPECT_EQ(normalize({{3, 4}, {0, 2}}).intervals(), (std::vector<Interval>{{0, 2}, {3, 4}}));
  EXPECT_EQ(normalize({{0, 8}, {2, 3}}).intervals(), (std::vector<Interval>{{0, 8}}));
  EXPECT_TRUE(normalize({}).empty());
}

TEST(Normalize, RejectsEmptyInterval) {
  try {
    normalize({{0, 2}, {4, 4}});
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("interval 1"), std::string::npos);
  }
}

TEST(Normalize, DurationMatchesMembershipCount) {
  std::mt19937_64 gen(1);
  for (int trial = 0; trial < 100; ++trial) {
    const auto ivs = random_intervals(gen, 50);
    const IntervalSet set = normalize(ivs);
    const auto m = membership(ivs, 50);
    EXPECT_EQ(set.duration(), static_cast<std::size_t>(std::count(m.begin(), m.end(), true)));
    const auto& out = set.intervals();
    for (std::size_t i = 1; i < out.size(); ++i) EXPECT_LT(out[i - 1].end, out[i].start);
    EXPECT_EQ(normalize(out), set);
  }
}

TEST(KeyshotPr, Examples) {
  const auto a = normalize({{0, 10}});
  const auto same = keyshot_pr(a, a);
  EXPECT_EQ(same.precision, 1.0);
  EXPECT_EQ(same.recall, 1.0);
  EXPECT_EQ(same.f1, 1.0);

  const auto disjoint = keyshot_pr(a, normalize({{10, 20}}));
  EXPECT_EQ(disjoint.precision, 0.0);
  EXPECT_EQ(disjoint.recall, 0.0);
  EXPECT_EQ(disjoint.f1, 0.0);

  const auto partial = keyshot_pr(a, normalize({{5, 20}}));
  EXPECT_DOUBLE_EQ(partial.precision, 0.5);
  EXPECT_DOUBLE_EQ(partial.recall, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(partial.f1, 0.4);
}

TEST(KeyshotPr, ZeroDurationIsDomainError) {
  EXPECT_THROW(keyshot_pr(IntervalSet{}, normalize({{0, 1}})), DomainError);
  EXPECT_THROW(keyshot_pr(normalize({{0, 1}}), IntervalSet{}), DomainError);
}

TEST(KeyshotPr, MatchesFrameCountingOracle) {
  std::mt19937_64 gen(2);
  for (int trial = 0; trial < 300; ++trial) {
    const auto ra = random_intervals(gen, 80);
    const auto rb = random_intervals(gen, 80);
    const auto ma = membership(ra, 80);
    const auto mb = membership(rb, 80);
    double na = 0, nb = 0, both = 0;
    for (std::size_t t = 0; t < 80; ++t) {
      na += ma[t];
      nb += mb[t];
      both += ma[t] && mb[t];
    }
    const IntervalSet a = normalize(ra);
    const IntervalSet b = normalize(rb);
    const auto s = keyshot_pr(a, b);
    EXPECT_NEAR(s.precision, both / na, 1e-12);
    EXPECT_NEAR(s.recall, both / nb, 1e-12);
    EXPECT_EQ(s.precision, keyshot_pr(b, a).recall);
    EXPECT_LE(s.f1, std::max(s.precision, s.recall));
    EXPECT_EQ(s.f1 == 0.0, both == 0.0);
    for (double v : {s.precision, s.recall, s.f1}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(KeyshotPr, InvariantUnderResplitting) {
  const auto whole = keyshot_pr(normalize({{0, 10}, {20, 30}}), normalize({{5, 25}}));
  const auto split = keyshot_pr(normalize({{0, 3}, {3, 10}, {20, 21}, {21, 30}}),
                                normalize({{5, 12}, {12, 25}}));
  EXPECT_EQ(whole.precision, split.precision);
  EXPECT_EQ(whole.recall, split.recall);
  EXPECT_EQ(whole.f1, split.f1);
}

TEST(Jitter, Examples) {
  const std::vector<Point2> still(4, {3.0, -1.0});
  EXPECT_EQ(jitter_amount(still), 0.0);
  const std::vector<Point2> pair{{0, 0}, {3, 4}};
  EXPECT_EQ(jitter_amount(pair), 5.0);
  EXPECT_THROW(jitter_amount(std::vector<Point2>{{1, 1}}), DomainError);
}

TEST(Jitter, MeanOfPairNorms) {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> nd(0.0, 10.0);
  std::vector<Point2> pts(10);
  for (auto& p : pts) p = {nd(gen), nd(gen)};
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double dx = pts[i + 1].x - pts[i].x;
    const double dy = pts[i + 1].y - pts[i].y;
    sum += std::sqrt(dx * dx + dy * dy);
  }
  EXPECT_NEAR(jitter_amount(pts), sum / 9.0, 1e-12);

  auto moved = pts;
  for (auto& p : moved) p = {3.0 * p.x + 7.0, 3.0 * p.y - 2.0};
  EXPECT_NEAR(jitter_amount(moved), 3.0 * jitter_amount(pts), 1e-9);
}

TEST(SpeedupDeviation, Examples) {
  EXPECT_EQ(speedup_deviation(8, 800, 100), 0.0);
  EXPECT_EQ(speedup_deviation(8, 800, 80), 2.0);
  EXPECT_THROW(speedup_deviation(8, 800, 0), DomainError);
  std::mt19937_64 gen(4);
  std::uniform_int_distribution<std::size_t> n(1, 5000);
  std::uniform_real_distribution<double> d(1.0, 20.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double desired = d(gen);
    const std::size_t in = n(gen);
    const std::size_t out = n(gen);
    EXPECT_EQ(speedup_deviation(desired, in, out),
              std::abs(desired - static_cast<double>(in) / static_cast<double>(out)));
  }
}
