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
#include "vidsum/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "vidsum/errors.hpp"

namespace vidsum {

namespace {

void require_label(int tn) {
  if (tn != 0 && tn != 1) throw ValidationError("pair label must be 0 or 1, got " + std::to_string(tn));
}

// Accumulates the gradient of one input through a TanhProjection, given the
// upstream gradient on its output, into `grad`.
void backprop_projection(const TanhProjection& net, std::span<const double> x,
                         std::span<const double> grad_out, TanhProjection& grad) {
  const std::size_t H = net.hidden_dim();
  const std::size_t E = net.output_dim();

  Vector hidden = matvec(net.w1, x);
  for (std::size_t k = 0; k < H; ++k) hidden[k] = std::tanh(hidden[k] + net.b1[k]);
  Vector out = matvec(net.w2, hidden);
  for (std::size_t k = 0; k < E; ++k) out[k] = std::tanh(out[k] + net.b2[k]);

  Vector grad_hidden(H, 0.0);
  for (std::size_t e = 0; e < E; ++e) {
    const double dz = grad_out[e] * (1.0 - out[e] * out[e]);
    if (dz == 0.0) continue;
    grad.b2[e] += dz;
    auto w_row = net.w2.row(e);
    auto g_row = grad.w2.row(e);
    for (std::size_t k = 0; k < H; ++k) {
      g_row[k] += dz * hidden[k];
      grad_hidden[k] += dz * w_row[k];
    }
  }
  for (std::size_t k = 0; k < H; ++k) {
    const double dz = grad_hidden[k] * (1.0 - hidden[k] * hidden[k]);
    if (dz == 0.0) continue;
    grad.b1[k] += dz;
    auto g_row = grad.w1.row(k);
    for (std::size_t j = 0; j < x.size(); ++j) g_row[j] += dz * x[j];
  }
}

std::vector<double*> parameter_pointers(TanhProjection& net) {
  std::vector<double*> out;
  for (std::span<double> block : net.parameter_blocks()) {
    for (double& v : block) out.push_back(&v);
  }
  return out;
}

void apply_step(TanhProjection& net, const TanhProjection& grad, double lr) {
  auto params = net.parameter_blocks();
  auto grads = grad.parameter_blocks();
  for (std::size_t b = 0; b < params.size(); ++b) {
    for (std::size_t i = 0; i < params[b].size(); ++i) params[b][i] -= lr * grads[b][i];
  }
}

}  // namespace

void TrainConfig::validate() const {
  if (!(margin >= 0.0) || !std::isfinite(margin)) throw DomainError("margin must be >= 0");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw DomainError("learning rate must be a finite nonnegative number");
  }
}

double contrastive_loss(std::span<const double> x, std::span<const double> y, int tn,
                        double margin) {
  require_label(tn);
  if (margin < 0.0) throw DomainError("margin must be >= 0");
  const double d = squared_distance(x, y);
  return tn == 1 ? d : std::max(0.0, margin - d);
}

double pair_loss(const VideoSubnet& vnet, const DescSubnet& dnet, const PairExample& ex,
                 double margin) {
  const Vector x = embed_frames(vnet, ex.segment);
  const Vector y = embed_description(dnet, ex.desc);
  return contrastive_loss(x, y, ex.tn, margin);
}

PairGradients loss_gradients(const VideoSubnet& vnet, const DescSubnet& dnet,
                             const PairExample& ex, double margin) {
  require_label(ex.tn);
  if (vnet.layers.output_dim() != dnet.layers.output_dim()) {
    throw ShapeError("video and description subnets disagree on embed dim");
  }
  PairGradients g{vnet.layers.zeros_like(), dnet.layers.zeros_like(), 0.0};

  const Vector x = embed_frames(vnet, ex.segment);
  const Vector y = embed_description(dnet, ex.desc);
  const double d = squared_distance(x, y);

  // dL/dx; dL/dy is its negation.
  double scale = 0.0;
  if (ex.tn == 1) {
    g.loss = d;
    scale = 2.0;
  } else if (margin - d > 0.0) {
    g.loss = margin - d;
    scale = -2.0;
  }
  if (scale == 0.0) return g;

  Vector grad_x(x.size());
  Vector grad_y(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    grad_x[k] = scale * (x[k] - y[k]);
    grad_y[k] = -grad_x[k];
  }

  // Mean pooling spreads dL/dx evenly across frames.
  const std::size_t n = ex.segment.rows();
  Vector grad_frame(grad_x);
  for (double& v : grad_frame) v /= static_cast<double>(n);
  for (std::size_t r = 0; r < n; ++r) {
    backprop_projection(vnet.layers, ex.segment.row(r), grad_frame, g.video);
  }
  backprop_projection(dnet.layers, ex.desc, grad_y, g.desc);
  return g;
}

double finite_diff_check(const VideoSubnet& vnet, const DescSubnet& dnet, const PairExample& ex,
                         double margin, double h) {
  if (!(h > 0.0)) throw DomainError("finite-difference step must be positive");
  PairGradients analytic = loss_gradients(vnet, dnet, ex, margin);

  VideoSubnet v = vnet;
  DescSubnet dn = dnet;
  double worst = 0.0;

  auto check = [&](std::vector<double*> params, std::vector<double*> grads) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double saved = *params[i];
      *params[i] = saved + h;
      const double up = pair_loss(v, dn, ex, margin);
      *params[i] = saved - h;
      const double down = pair_loss(v, dn, ex, margin);
      *params[i] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double a = *grads[i];
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
      worst = std::max(worst, std::abs(a - numeric) / denom);
    }
  };
  check(parameter_pointers(v.layers), parameter_pointers(analytic.video));
  check(parameter_pointers(dn.layers), parameter_pointers(analytic.desc));
  return worst;
}

TrainResult sgd_train(VideoSubnet vnet, DescSubnet dnet, std::span<const PairExample> dataset,
                      const TrainConfig& cfg) {
  cfg.validate();
  if (dataset.empty()) throw DomainError("sgd_train: dataset is empty");

  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 gen(cfg.seed);

  TrainResult result;
  result.loss_history.reserve(cfg.epochs);
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (cfg.shuffle) std::shuffle(order.begin(), order.end(), gen);
    double total = 0.0;
    for (std::size_t idx : order) {
      const PairGradients g = loss_gradients(vnet, dnet, dataset[idx], cfg.margin);
      total += g.loss;
      apply_step(vnet.layers, g.video, cfg.learning_rate);
      apply_step(dnet.layers, g.desc, cfg.learning_rate);
    }
    result.loss_history.push_back(total / static_cast<double>(dataset.size()));
  }
  result.video = std::move(vnet);
  result.desc = std::move(dnet);
  return result;
}

std::vector<PairExample> sample_pairs(const FeatureMatrix& frames,
                                      std::span<const Segment> segments,
                                      const FeatureMatrix& descs,
                                      std::span<const PairLabel> labels) {
  std::vector<PairExample> out;
  out.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const PairLabel& l = labels[i];
    const std::string where = "pair record " + std::to_string(i) + " (segment " +
                              std::to_string(l.segment_index) + ", desc " +
                              std::to_string(l.desc_index) + ", tn " + std::to_string(l.tn) + ")";
    if (l.segment_index >= segments.size()) {
      throw ValidationError(where + ": segment index out of range (" +
                            std::to_string(segments.size()) + " segments)");
    }
    if (l.desc_index >= descs.rows()) {
      throw ValidationError(where + ": description index out of range (" +
                            std::to_string(descs.rows()) + " descriptions)");
    }
    if (l.tn != 0 && l.tn != 1) throw ValidationError(where + ": tn must be 0 or 1");
    const Segment& s = segments[l.segment_index];
    if (s.start >= s.end || s.end > frames.rows()) {
      throw ValidationError(where + ": segment frames [" + std::to_string(s.start) + ", " +
                            std::to_string(s.end) + ") outside " +
                            std::to_string(frames.rows()) + " frames");
    }
    const MatrixView rows = frames.row_range(s.start, s.end);
    const auto desc = descs.row(l.desc_index);
    out.push_back({Matrix(rows.rows(), rows.cols(), Vector(rows.data().begin(), rows.data().end())),
                   Vector(desc.begin(), desc.end()), l.tn});
  }
  return out;
}

GradcheckCase random_gradcheck_case(std::uint64_t seed, const GradcheckDims& dims, int tn) {
  require_label(tn);
  std::mt19937_64 gen(seed);
  GradcheckCase c;
  c.video = init_video_subnet(gen(), dims.input_dim, dims.hidden_dim, dims.embed_dim);
  c.desc = init_desc_subnet(gen(), dims.desc_dim, dims.hidden_dim, dims.embed_dim);
  std::normal_distribution<double> unit(0.0, 1.0);
  c.example.segment = Matrix(dims.frames, dims.input_dim);
  for (double& v : c.example.segment.data()) v = unit(gen);
  c.example.desc.resize(dims.desc_dim);
  for (double& v : c.example.desc) v = unit(gen);
  c.example.tn = tn;
  return c;
}

}  // namespace vidsum
