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
#include "vidsum/io.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "json.hpp"
#include "vidsum/errors.hpp"

namespace vidsum::io {

using nlohmann::json;

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xFFu));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write to " + path.string() + " failed");
}

json parse_json(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": malformed document: " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const json& doc) {
  write_file(path, doc.dump(2) + "\n");
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    rows.push_back(json(std::vector<double>(row.begin(), row.end())));
  }
  return rows;
}

Vector vector_from_json(const json& j, const std::string& what) {
  if (!j.is_array()) throw ValidationError(what + " must be an array");
  Vector v;
  v.reserve(j.size());
  for (const json& x : j) {
    if (!x.is_number()) throw ValidationError(what + " contains a non-number");
    v.push_back(x.get<double>());
  }
  return v;
}

Matrix matrix_from_json(const json& j, const std::string& what) {
  if (!j.is_array()) throw ValidationError(what + " must be an array of rows");
  std::vector<Vector> rows;
  for (std::size_t r = 0; r < j.size(); ++r) {
    rows.push_back(vector_from_json(j[r], what + "[" + std::to_string(r) + "]"));
  }
  try {
    return Matrix::from_rows(rows);
  } catch (const ShapeError& e) {
    throw ValidationError(what + ": " + e.what());
  }
}

json projection_to_json(const TanhProjection& p) {
  return json{{"w1", matrix_to_json(p.w1)},
              {"b1", p.b1},
              {"w2", matrix_to_json(p.w2)},
              {"b2", p.b2}};
}

const json& member(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ValidationError(where + ": missing field \"" + key + "\"");
  }
  return obj.at(key);
}

std::size_t count_field(const json& obj, const char* key, const std::string& where) {
  const json& v = member(obj, key, where);
  if (!v.is_number_unsigned()) {
    throw ValidationError(where + ": \"" + key + "\" must be a nonnegative integer");
  }
  return v.get<std::size_t>();
}

void expect_dims(const Matrix& m, std::size_t rows, std::size_t cols, const std::string& what) {
  // An empty JSON array yields a 0x0 matrix; compare on rows first so a
  // tampered dims field is reported against the stored arrays.
  if (m.rows() != rows || (rows != 0 && m.cols() != cols)) {
    throw ValidationError("dimension mismatch: " + what + " is " + std::to_string(m.rows()) +
                          "x" + std::to_string(m.cols()) + ", dims field says " +
                          std::to_string(rows) + "x" + std::to_string(cols));
  }
}

void expect_len(const Vector& v, std::size_t n, const std::string& what) {
  if (v.size() != n) {
    throw ValidationError("dimension mismatch: " + what + " has length " +
                          std::to_string(v.size()) + ", dims field says " + std::to_string(n));
  }
}

TanhProjection projection_from_json(const json& j, std::size_t in, std::size_t hidden,
                                    std::size_t out, const std::string& where) {
  TanhProjection p;
  p.w1 = matrix_from_json(member(j, "w1", where), where + ".w1");
  p.b1 = vector_from_json(member(j, "b1", where), where + ".b1");
  p.w2 = matrix_from_json(member(j, "w2", where), where + ".w2");
  p.b2 = vector_from_json(member(j, "b2", where), where + ".b2");
  expect_dims(p.w1, hidden, in, where + ".w1");
  expect_len(p.b1, hidden, where + ".b1");
  expect_dims(p.w2, out, hidden, where + ".w2");
  expect_len(p.b2, out, where + ".b2");
  return p;
}

json lstm_to_json(const LstmParams& p) {
  return json{{"input_dim", p.input_dim},
              {"hidden_dim", p.hidden_dim},
              {"w_input", matrix_to_json(p.w_input)},
              {"w_forget", matrix_to_json(p.w_forget)},
              {"w_output", matrix_to_json(p.w_output)},
              {"w_cell", matrix_to_json(p.w_cell)}};
}

LstmParams lstm_from_json(const json& j, const std::string& where) {
  LstmParams p;
  p.input_dim = count_field(j, "input_dim", where);
  p.hidden_dim = count_field(j, "hidden_dim", where);
  p.w_input = matrix_from_json(member(j, "w_input", where), where + ".w_input");
  p.w_forget = matrix_from_json(member(j, "w_forget", where), where + ".w_forget");
  p.w_output = matrix_from_json(member(j, "w_output", where), where + ".w_output");
  p.w_cell = matrix_from_json(member(j, "w_cell", where), where + ".w_cell");
  const std::size_t cols = p.input_dim + p.hidden_dim;
  expect_dims(p.w_input, p.hidden_dim, cols, where + ".w_input");
  expect_dims(p.w_forget, p.hidden_dim, cols, where + ".w_forget");
  expect_dims(p.w_output, p.hidden_dim, cols, where + ".w_output");
  expect_dims(p.w_cell, p.hidden_dim, cols, where + ".w_cell");
  return p;
}

}  // namespace

FeatureMatrix read_matrix(const std::filesystem::path& path, std::string_view expected_magic) {
  const std::string bytes = read_file(path);
  if (bytes.size() < kHeaderBytes) {
    throw FormatError(path.string() + ": truncated header: " + std::to_string(bytes.size()) +
                      " bytes, needs " + std::to_string(kHeaderBytes));
  }
  const std::string_view magic(bytes.data(), 4);
  if (magic != expected_magic) {
    throw FormatError(path.string() + ": bad magic \"" + std::string(magic) + "\", expected \"" +
                      std::string(expected_magic) + "\"");
  }
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::uint64_t rows = get_u32(p + 4);
  const std::uint64_t cols = get_u32(p + 8);
  const std::uint64_t count = rows * cols;  // < 2^64 for u32 operands
  constexpr std::uint64_t max_count =
      (std::numeric_limits<std::uint64_t>::max() - kHeaderBytes) / 4;
  if (count > max_count || count > std::numeric_limits<std::size_t>::max() / sizeof(double)) {
    throw FormatError(path.string() + ": " + std::to_string(rows) + "x" + std::to_string(cols) +
                      " payload size overflows");
  }
  const std::uint64_t needed = kHeaderBytes + 4 * count;
  if (bytes.size() < needed) {
    throw FormatError(path.string() + ": truncated payload: " +
                      std::to_string(bytes.size() - kHeaderBytes) + " bytes, needs " +
                      std::to_string(needed - kHeaderBytes));
  }
  if (bytes.size() > needed) {
    throw FormatError(path.string() + ": " + std::to_string(bytes.size() - needed) +
                      " trailing bytes after payload");
  }
  std::vector<double> data(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const float f = std::bit_cast<float>(get_u32(p + kHeaderBytes + 4 * i));
    if (!std::isfinite(f)) {
      throw FormatError(path.string() + ": non-finite value at element " + std::to_string(i));
    }
    data[i] = static_cast<double>(f);
  }
  return Matrix(rows, cols, std::move(data));
}

void write_matrix(const std::filesystem::path& path, const FeatureMatrix& matrix,
                  std::string_view magic) {
  if (magic.size() != 4) throw ValidationError("magic must be 4 bytes");
  constexpr auto u32_max = std::numeric_limits<std::uint32_t>::max();
  if (matrix.rows() > u32_max || matrix.cols() > u32_max) {
    throw ValidationError("matrix too large for a 32-bit header");
  }
  std::string out;
  out.reserve(kHeaderBytes + 4 * matrix.size());
  out.append(magic);
  put_u32(out, static_cast<std::uint32_t>(matrix.rows()));
  put_u32(out, static_cast<std::uint32_t>(matrix.cols()));
  for (double v : matrix.data()) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  write_file(path, out);
}

IntervalDocument read_intervals(const std::filesystem::path& path) {
  const json doc = parse_json(path);
  const std::string where = path.string();
  const json& list = member(doc, "intervals", where);
  if (!list.is_array()) throw ValidationError(where + ": \"intervals\" must be an array");
  IntervalDocument out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const json& rec = list[i];
    if (!rec.is_array() || rec.size() != 2 || !rec[0].is_number_unsigned() ||
        !rec[1].is_number_unsigned()) {
      throw ValidationError(where + ": interval record " + std::to_string(i) +
                            " must be [start, end] with nonnegative integers");
    }
    const Interval iv{rec[0].get<std::size_t>(), rec[1].get<std::size_t>()};
    if (iv.start >= iv.end) {
      throw ValidationError(where + ": interval record " + std::to_string(i) +
                            " has start >= end");
    }
    out.intervals.push_back(iv);
  }
  if (doc.contains("fps")) {
    if (!doc["fps"].is_number()) throw ValidationError(where + ": \"fps\" must be a number");
    out.fps = doc["fps"].get<double>();
  }
  return out;
}

void write_intervals(const std::filesystem::path& path, std::span<const Interval> intervals,
                     std::optional<double> fps) {
  json list = json::array();
  for (const Interval& iv : intervals) list.push_back({iv.start, iv.end});
  json doc{{"intervals", list}};
  if (fps) doc["fps"] = *fps;
  write_json(path, doc);
}

void write_summary(const std::filesystem::path& path, std::span<const Segment> segments,
                   std::size_t k, std::size_t seg_len) {
  json list = json::array();
  for (const Segment& s : segments) list.push_back({s.start, s.end});
  write_json(path, json{{"intervals", list}, {"k", k}, {"seg_len", seg_len}});
}

std::vector<PairLabel> read_pair_labels(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::vector<PairLabel> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    long long seg = -1;
    long long desc = -1;
    long long tn = -1;
    std::string extra;
    if (!(fields >> seg >> desc >> tn) || (fields >> extra) || seg < 0 || desc < 0 ||
        (tn != 0 && tn != 1)) {
      throw ValidationError(path.string() + ": line " + std::to_string(line_no) +
                            ": expected \"segment_index desc_index tn\" with tn in {0,1}");
    }
    out.push_back({static_cast<std::size_t>(seg), static_cast<std::size_t>(desc),
                   static_cast<int>(tn)});
  }
  return out;
}

void write_pair_labels(const std::filesystem::path& path, std::span<const PairLabel> labels) {
  std::string out;
  for (const PairLabel& l : labels) {
    out += std::to_string(l.segment_index) + ' ' + std::to_string(l.desc_index) + ' ' +
           std::to_string(l.tn) + '\n';
  }
  write_file(path, out);
}

void save_checkpoint(const std::filesystem::path& path, const VideoSubnet& video,
                     const DescSubnet& desc) {
  video.layers.validate();
  desc.layers.validate();
  if (video.layers.output_dim() != desc.layers.output_dim()) {
    throw ShapeError("video and description subnets disagree on embed dim");
  }
  const json doc{{"format_version", kCheckpointVersion},
                 {"dims",
                  {{"input_dim", video.layers.input_dim()},
                   {"hidden", video.layers.hidden_dim()},
                   {"desc_hidden", desc.layers.hidden_dim()},
                   {"embed_dim", video.layers.output_dim()},
                   {"desc_dim", desc.layers.input_dim()}}},
                 {"video", projection_to_json(video.layers)},
                 {"desc", projection_to_json(desc.layers)}};
  write_json(path, doc);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  const json doc = parse_json(path);
  const std::string where = path.string();
  const json& version = member(doc, "format_version", where);
  if (!version.is_number_integer() || version.get<int>() != kCheckpointVersion) {
    throw ValidationError(where + ": unsupported checkpoint format_version " + version.dump() +
                          ", expected " + std::to_string(kCheckpointVersion));
  }
  const json& dims = member(doc, "dims", where);
  const std::size_t input_dim = count_field(dims, "input_dim", where + ".dims");
  const std::size_t hidden = count_field(dims, "hidden", where + ".dims");
  const std::size_t desc_hidden =
      dims.contains("desc_hidden") ? count_field(dims, "desc_hidden", where + ".dims") : hidden;
  const std::size_t embed_dim = count_field(dims, "embed_dim", where + ".dims");
  const std::size_t desc_dim = count_field(dims, "desc_dim", where + ".dims");

  Checkpoint ck;
  ck.video.layers =
      projection_from_json(member(doc, "video", where), input_dim, hidden, embed_dim, "video");
  ck.desc.layers =
      projection_from_json(member(doc, "desc", where), desc_dim, desc_hidden, embed_dim, "desc");
  ck.video.layers.validate();
  ck.desc.layers.validate();
  return ck;
}

void save_scorer(const std::filesystem::path& path, const ImportanceScorer& scorer) {
  scorer.validate();
  write_json(path, json{{"format_version", kCheckpointVersion},
                        {"forward", lstm_to_json(scorer.forward)},
                        {"backward", lstm_to_json(scorer.backward)},
                        {"readout", scorer.readout},
                        {"bias", scorer.bias}});
}

ImportanceScorer load_scorer(const std::filesystem::path& path) {
  const json doc = parse_json(path);
  const std::string where = path.string();
  const json& version = member(doc, "format_version", where);
  if (!version.is_number_integer() || version.get<int>() != kCheckpointVersion) {
    throw ValidationError(where + ": unsupported scorer format_version " + version.dump());
  }
  ImportanceScorer s;
  s.forward = lstm_from_json(member(doc, "forward", where), "forward");
  s.backward = lstm_from_json(member(doc, "backward", where), "backward");
  s.readout = vector_from_json(member(doc, "readout", where), "readout");
  const json& bias = member(doc, "bias", where);
  if (!bias.is_number()) throw ValidationError(where + ": \"bias\" must be a number");
  s.bias = bias.get<double>();
  try {
    s.validate();
  } catch (const ShapeError& e) {
    throw ValidationError(where + ": dimension mismatch: " + e.what());
  }
  return s;
}

RoiDocument read_rois(const std::filesystem::path& path) {
  const json doc = parse_json(path);
  const std::string where = path.string();
  RoiDocument out;
  const json& w = member(doc, "frame_width", where);
  const json& h = member(doc, "frame_height", where);
  if (!w.is_number() || !h.is_number()) {
    throw ValidationError(where + ": frame_width and frame_height must be numbers");
  }
  out.frame_width = w.get<double>();
  out.frame_height = h.get<double>();
  if (doc.contains("sigma")) {
    if (!doc["sigma"].is_number()) throw ValidationError(where + ": \"sigma\" must be a number");
    out.sigma = doc["sigma"].get<double>();
  }
  const json& frames = member(doc, "frames", where);
  if (!frames.is_array()) throw ValidationError(where + ": \"frames\" must be an array");
  for (std::size_t t = 0; t < frames.size(); ++t) {
    const std::string fwhere = where + ": frame " + std::to_string(t);
    if (!frames[t].is_array()) throw ValidationError(fwhere + " must be an array of ROIs");
    std::vector<Roi> rois;
    for (std::size_t k = 0; k < frames[t].size(); ++k) {
      const json& r = frames[t][k];
      const std::string rwhere = fwhere + " ROI " + std::to_string(k);
      const json& c = member(r, "confidence", rwhere);
      const json& center = member(r, "center", rwhere);
      const json& area = member(r, "area", rwhere);
      if (!c.is_number() || !area.is_number() || !center.is_array() || center.size() != 2 ||
          !center[0].is_number() || !center[1].is_number()) {
        throw ValidationError(rwhere + ": expected numeric confidence, area and center [x, y]");
      }
      rois.push_back({c.get<double>(), center[0].get<double>(), center[1].get<double>(),
                      area.get<double>()});
    }
    out.frames.push_back(std::move(rois));
  }
  return out;
}

std::vector<Point2> read_foe_track(const std::filesystem::path& path) {
  const json doc = parse_json(path);
  const std::string where = path.string();
  const json& pts = member(doc, "points", where);
  if (!pts.is_array()) throw ValidationError(where + ": \"points\" must be an array");
  std::vector<Point2> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const json& p = pts[i];
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      throw ValidationError(where + ": point " + std::to_string(i) + " must be [x, y]");
    }
    out.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return out;
}

}  // namespace vidsum::io
