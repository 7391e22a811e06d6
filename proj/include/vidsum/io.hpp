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
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "vidsum/matrix.hpp"
#include "vidsum/metrics.hpp"
#include "vidsum/model.hpp"
#include "vidsum/segment.hpp"
#include "vidsum/summarize.hpp"
#include "vidsum/train.hpp"

namespace vidsum::io {

// Binary feature files: 4-byte magic, u32-LE rows, u32-LE cols, then
// rows*cols little-endian IEEE-754 binary32 values, row-major.
inline constexpr std::string_view kFeatureMagic = "VSF1";
inline constexpr std::string_view kDescMagic = "VSD1";
inline constexpr std::size_t kHeaderBytes = 12;

/// Throws FormatError on a wrong magic, short payload, size overflow or a
/// non-finite value; IoError when the file cannot be opened.
FeatureMatrix read_matrix(const std::filesystem::path& path, std::string_view expected_magic);

/// Values are narrowed to float. Throws IoError when the path is unwritable.
void write_matrix(const std::filesystem::path& path, const FeatureMatrix& matrix,
                  std::string_view magic);

struct IntervalDocument {
  std::vector<Interval> intervals;
  std::optional<double> fps;
};

/// {"intervals": [[start, end], ...], "fps": optional}. Throws
/// ValidationError with the record index on malformed entries.
IntervalDocument read_intervals(const std::filesystem::path& path);

void write_intervals(const std::filesystem::path& path, std::span<const Interval> intervals,
                     std::optional<double> fps = std::nullopt);

/// Summary document: the interval schema plus "k" and "seg_len".
void write_summary(const std::filesystem::path& path, std::span<const Segment> segments,
                   std::size_t k, std::size_t seg_len);

/// One "segment_index desc_index tn" record per line; blank lines and lines
/// starting with '#' are skipped.
std::vector<PairLabel> read_pair_labels(const std::filesystem::path& path);
void write_pair_labels(const std::filesystem::path& path, std::span<const PairLabel> labels);

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  VideoSubnet video;
  DescSubnet desc;
};

void save_checkpoint(const std::filesystem::path& path, const VideoSubnet& video,
                     const DescSubnet& desc);

/// Throws ValidationError on version or dimension mismatch.
Checkpoint load_checkpoint(const std::filesystem::path& path);

void save_scorer(const std::filesystem::path& path, const ImportanceScorer& scorer);
ImportanceScorer load_scorer(const std::filesystem::path& path);

/// Per-frame ROI detections.
struct RoiDocument {
  double frame_width = 0.0;
  double frame_height = 0.0;
  std::optional<double> sigma;
  std::vector<std::vector<Roi>> frames;
};

/// {"frame_width": w, "frame_height": h, "sigma": optional,
///  "frames": [[{"confidence": c, "center": [x, y], "area": a}, ...], ...]}
RoiDocument read_rois(const std::filesystem::path& path);

/// {"points": [[x, y], ...]}
std::vector<Point2> read_foe_track(const std::filesystem::path& path);

}  // namespace vidsum::io
