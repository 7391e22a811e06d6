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
#include "vidsum/cli.hpp"

#include <cstdint>
#include <fstream>
#include <optional>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "vidsum/errors.hpp"
#include "vidsum/io.hpp"
#include "vidsum/metrics.hpp"
#include "vidsum/model.hpp"
#include "vidsum/summarize.hpp"
#include "vidsum/synth.hpp"
#include "vidsum/train.hpp"

namespace vidsum::cli {

using nlohmann::json;

namespace {

// Independent init streams for the two subnets from one user seed.
constexpr std::uint64_t kDescSeedSalt = 0x9E3779B97F4A7C15ull;

json intervals_json(std::span<const Interval> intervals) {
  json list = json::array();
  for (const Interval& iv : intervals) list.push_back({iv.start, iv.end});
  return list;
}

Vector single_column(const FeatureMatrix& m, const std::string& what) {
  if (m.cols() != 1 && !m.empty()) {
    throw ValidationError(what + " must have exactly one column, found " +
                          std::to_string(m.cols()));
  }
  return Vector(m.data().begin(), m.data().end());
}

FeatureMatrix as_column(const Vector& v) { return Matrix(v.size(), 1, v); }

struct GenSynthArgs {
  SynthSpec spec;
  std::string features, descs, pairs, truth;
};

struct TrainArgs {
  std::string features, descs, pairs, out, history;
  std::size_t seg_len = 0;
  std::size_t embed_dim = kDefaultEmbedDim;
  std::size_t hidden = kDefaultHiddenDim;
  TrainConfig cfg;
  bool no_shuffle = false;
};

struct SummarizeArgs {
  std::string features, model, out;
  std::size_t seg_len = 0;
  std::size_t k = 0;
  std::size_t max_iters = 100;
};

struct ScoreLstmArgs {
  std::string features, out, scorer, save_scorer;
  std::size_t hidden = 64;
  std::uint64_t seed = 0;
};

struct ScoreSemanticArgs {
  std::string rois, out;
};

struct FastForwardArgs {
  std::string scores, out;
  double speedup = 1.0;
  std::optional<double> semantic_speedup;
  std::size_t max_skip = 1;
  double lambda_speed = 1.0;
  double lambda_sem = 1.0;
};

struct EvalArgs {
  std::string summary, truth, foe;
};

struct GradcheckArgs {
  std::uint64_t seed = 0;
  std::size_t configs = 20;
  double h = 1e-5;
  double tol = 1e-4;
  double margin = kDefaultMargin;
  GradcheckDims dims;
};

int run_gen_synth(const GenSynthArgs& a, std::ostream& out) {
  const SynthData data = synth_generate(a.spec);
  io::write_matrix(a.features, data.features, io::kFeatureMagic);
  io::write_matrix(a.descs, data.descs, io::kDescMagic);
  io::write_pair_labels(a.pairs, data.labels);
  io::write_intervals(a.truth, data.truth.intervals());
  out << json{{"frames", data.features.rows()},
              {"dim", data.features.cols()},
              {"events", data.truth.intervals().size()},
              {"pairs", data.labels.size()}}
             .dump()
      << "\n";
  return kExitOk;
}

int run_train(TrainArgs a, std::ostream& out) {
  const FeatureMatrix frames = io::read_matrix(a.features, io::kFeatureMagic);
  const FeatureMatrix descs = io::read_matrix(a.descs, io::kDescMagic);
  const auto labels = io::read_pair_labels(a.pairs);
  const auto segments = uniform_segments(frames.rows(), a.seg_len);
  const auto dataset = sample_pairs(frames, segments, descs, labels);

  a.cfg.shuffle = !a.no_shuffle;
  VideoSubnet video = init_video_subnet(a.cfg.seed, frames.cols(), a.hidden, a.embed_dim);
  DescSubnet desc = init_desc_subnet(a.cfg.seed ^ kDescSeedSalt, descs.cols(), a.hidden,
                                     a.embed_dim);
  const TrainResult r = sgd_train(std::move(video), std::move(desc), dataset, a.cfg);
  io::save_checkpoint(a.out, r.video, r.desc);
  if (!a.history.empty()) {
    io::write_matrix(a.history, as_column(r.loss_history), io::kFeatureMagic);
  }
  json report{{"examples", dataset.size()}, {"epochs", r.loss_history.size()}};
  report["final_loss"] = r.loss_history.empty() ? json(nullptr) : json(r.loss_history.back());
  out << report.dump() << "\n";
  return kExitOk;
}

int run_summarize(const SummarizeArgs& a, std::ostream& out) {
  const FeatureMatrix frames = io::read_matrix(a.features, io::kFeatureMagic);
  const io::Checkpoint ck = io::load_checkpoint(a.model);
  if (ck.video.layers.input_dim() != frames.cols()) {
    throw ValidationError("model expects " + std::to_string(ck.video.layers.input_dim()) +
                          "-dim frames, features file has " + std::to_string(frames.cols()));
  }
  const auto segments = uniform_segments(frames.rows(), a.seg_len);
  const auto feats = segment_features(ck.video, frames, segments);
  const auto summary = generate_summary(feats, a.k, a.max_iters);
  io::write_summary(a.out, summary, a.k, a.seg_len);
  out << json{{"segments", segments.size()}, {"selected", summary.size()}}.dump() << "\n";
  return kExitOk;
}

int run_score_lstm(const ScoreLstmArgs& a, std::ostream& out) {
  const FeatureMatrix frames = io::read_matrix(a.features, io::kFeatureMagic);
  const ImportanceScorer scorer = a.scorer.empty()
                                      ? init_scorer(a.seed, frames.cols(), a.hidden)
                                      : io::load_scorer(a.scorer);
  if (!a.save_scorer.empty()) io::save_scorer(a.save_scorer, scorer);
  const Vector scores = score_importance(scorer, frames);
  io::write_matrix(a.out, as_column(scores), io::kFeatureMagic);
  out << json{{"frames", scores.size()}}.dump() << "\n";
  return kExitOk;
}

int run_score_semantic(const ScoreSemanticArgs& a, std::ostream& out) {
  const io::RoiDocument doc = io::read_rois(a.rois);
  const double sigma = doc.sigma.value_or(default_centrality_sigma(doc.frame_width,
                                                                   doc.frame_height));
  Vector scores;
  scores.reserve(doc.frames.size());
  for (const auto& rois : doc.frames) {
    scores.push_back(semantic_score(rois, doc.frame_width, doc.frame_height, sigma));
  }
  io::write_matrix(a.out, as_column(scores), io::kFeatureMagic);
  out << json{{"frames", scores.size()}}.dump() << "\n";
  return kExitOk;
}

int run_fastforward(const FastForwardArgs& a, std::ostream& out) {
  const Vector scores = single_column(io::read_matrix(a.scores, io::kFeatureMagic), "scores");
  const FastForwardPlan plan = fast_forward(scores, a.speedup, a.semantic_speedup, a.max_skip,
                                            a.lambda_speed, a.lambda_sem);
  json doc{{"frames", plan.frames},
           {"threshold", plan.split.threshold},
           {"semantic", intervals_json(plan.split.semantic)},
           {"non_semantic", intervals_json(plan.split.non_semantic)},
           {"rho_semantic", plan.rho_semantic},
           {"rho_non_semantic", plan.rho_non_semantic},
           {"achieved_speedup", static_cast<double>(scores.size()) /
                                    static_cast<double>(plan.frames.size())},
           {"speedup_deviation", speedup_deviation(a.speedup, scores.size(), plan.frames.size())}};
  std::ofstream file(a.out, std::ios::trunc);
  if (!file) throw IoError("cannot open " + a.out + " for writing");
  file << doc.dump(2) << "\n";
  out << json{{"selected", plan.frames.size()}, {"input", scores.size()}}.dump() << "\n";
  return kExitOk;
}

int run_eval(const EvalArgs& a, std::ostream& out) {
  const IntervalSet summary = normalize(io::read_intervals(a.summary).intervals);
  const IntervalSet truth = normalize(io::read_intervals(a.truth).intervals);
  const KeyshotScore s = keyshot_pr(summary, truth);
  json doc{{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}};
  if (!a.foe.empty()) doc["jitter"] = jitter_amount(io::read_foe_track(a.foe));
  out << doc.dump() << "\n";
  return kExitOk;
}

int run_gradcheck(const GradcheckArgs& a, std::ostream& out) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.configs; ++i) {
    const int tn = static_cast<int>(i % 2);
    const GradcheckCase c = random_gradcheck_case(a.seed + i, a.dims, tn);
    worst = std::max(worst, finite_diff_check(c.video, c.desc, c.example, a.margin, a.h));
  }
  const bool ok = worst <= a.tol;
  out << json{{"configs", a.configs}, {"max_rel_error", worst}, {"tolerance", a.tol},
              {"pass", ok}}
             .dump()
      << "\n";
  return ok ? kExitOk : kExitRuntime;
}

}  // namespace

int dispatch(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Video summarization over per-frame feature streams", "vidsum"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  GenSynthArgs gs;
  auto* gen = app.add_subcommand("gen-synth", "Generate a planted-event feature stream");
  gen->add_option("--seed", gs.spec.seed, "Random seed");
  gen->add_option("--events", gs.spec.n_events, "Number of planted events")->capture_default_str();
  gen->add_option("--frames-per-event", gs.spec.frames_per_event)->capture_default_str();
  gen->add_option("--gap-frames", gs.spec.gap_frames)->capture_default_str();
  gen->add_option("--dim", gs.spec.dim, "Feature dimension")->capture_default_str();
  gen->add_option("--noise", gs.spec.noise_sigma, "Event noise sigma")->capture_default_str();
  gen->add_option("--seg-len", gs.spec.seg_len, "Segment length for pair labels")
      ->capture_default_str();
  gen->add_option("--features-out", gs.features, "Frame features (VSF1)")->required();
  gen->add_option("--descs-out", gs.descs, "Description vectors (VSD1)")->required();
  gen->add_option("--pairs-out", gs.pairs, "Pair labels")->required();
  gen->add_option("--truth-out", gs.truth, "Event windows (JSON)")->required();

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "Train the joint embedding with contrastive loss");
  train->add_option("--features", ta.features, "Frame features (VSF1)")->required();
  train->add_option("--descs", ta.descs, "Description vectors (VSD1)")->required();
  train->add_option("--pairs", ta.pairs, "Pair labels")->required();
  train->add_option("--seg-len", ta.seg_len, "Frames per segment")->required();
  train->add_option("--embed-dim", ta.embed_dim)->capture_default_str();
  train->add_option("--hidden", ta.hidden)->capture_default_str();
  train->add_option("--margin", ta.cfg.margin)->capture_default_str();
  train->add_option("--lr", ta.cfg.learning_rate)->capture_default_str();
  train->add_option("--epochs", ta.cfg.epochs)->capture_default_str();
  train->add_option("--seed", ta.cfg.seed)->capture_default_str();
  train->add_flag("--no-shuffle", ta.no_shuffle, "Keep example order fixed");
  train->add_option("--history", ta.history, "Write per-epoch mean loss (VSF1)");
  train->add_option("--out", ta.out, "Checkpoint path (JSON)")->required();

  SummarizeArgs sa;
  auto* summarize = app.add_subcommand("summarize", "Select K representative segments");
  summarize->add_option("--features", sa.features, "Frame features (VSF1)")->required();
  summarize->add_option("--model", sa.model, "Checkpoint (JSON)")->required();
  summarize->add_option("--seg-len", sa.seg_len)->required();
  summarize->add_option("--k", sa.k, "Number of segments to keep")->required();
  summarize->add_option("--max-iters", sa.max_iters, "PAM swap limit")->capture_default_str();
  summarize->add_option("--out", sa.out, "Summary (JSON)")->required();

  ScoreLstmArgs la;
  auto* score_lstm = app.add_subcommand("score-lstm", "Bidirectional LSTM frame importance");
  score_lstm->add_option("--features", la.features, "Frame features (VSF1)")->required();
  score_lstm->add_option("--scorer", la.scorer, "Scorer parameters (JSON)");
  score_lstm->add_option("--hidden", la.hidden, "Hidden size for a seeded scorer")
      ->capture_default_str();
  score_lstm->add_option("--seed", la.seed)->capture_default_str();
  score_lstm->add_option("--save-scorer", la.save_scorer, "Write the scorer used (JSON)");
  score_lstm->add_option("--out", la.out, "Scores (VSF1, one column)")->required();

  ScoreSemanticArgs ma;
  auto* score_sem = app.add_subcommand("score-semantic", "Per-frame semantic ROI score");
  score_sem->add_option("--rois", ma.rois, "ROI detections (JSON)")->required();
  score_sem->add_option("--out", ma.out, "Scores (VSF1, one column)")->required();

  FastForwardArgs fa;
  double semantic_speedup = 0.0;
  auto* ff = app.add_subcommand("fastforward", "Shortest-path frame sampling");
  ff->add_option("--scores", fa.scores, "Scores (VSF1, one column)")->required();
  ff->add_option("--speedup", fa.speedup, "Desired overall speed-up")->required();
  auto* sem_opt = ff->add_option("--semantic-speedup", semantic_speedup,
                                 "Speed-up inside semantic ranges");
  ff->add_option("--max-skip", fa.max_skip)->required();
  ff->add_option("--lambda-speed", fa.lambda_speed)->capture_default_str();
  ff->add_option("--lambda-sem", fa.lambda_sem)->capture_default_str();
  ff->add_option("--out", fa.out, "Selection (JSON)")->required();

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "Keyshot precision/recall/F1");
  eval->add_option("--summary", ea.summary, "Summary intervals (JSON)")->required();
  eval->add_option("--truth", ea.truth, "Reference intervals (JSON)")->required();
  eval->add_option("--foe", ea.foe, "FOE track (JSON) for jitter");

  GradcheckArgs ga;
  auto* grad = app.add_subcommand("gradcheck", "Compare analytic and numeric gradients");
  grad->add_option("--seed", ga.seed)->capture_default_str();
  grad->add_option("--configs", ga.configs)->capture_default_str();
  grad->add_option("--step", ga.h, "Central-difference step")->capture_default_str();
  grad->add_option("--tol", ga.tol)->capture_default_str();
  grad->add_option("--margin", ga.margin)->capture_default_str();
  grad->add_option("--input-dim", ga.dims.input_dim)->capture_default_str();
  grad->add_option("--hidden", ga.dims.hidden_dim)->capture_default_str();
  grad->add_option("--embed-dim", ga.dims.embed_dim)->capture_default_str();
  grad->add_option("--desc-dim", ga.dims.desc_dim)->capture_default_str();
  grad->add_option("--frames", ga.dims.frames)->capture_default_str();

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  for (const std::string& a : args) argv.push_back(a.c_str());
  if (argv.empty()) argv.push_back("vidsum");

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (*gen) return run_gen_synth(gs, out);
    if (*train) return run_train(ta, out);
    if (*summarize) return run_summarize(sa, out);
    if (*score_lstm) return run_score_lstm(la, out);
    if (*score_sem) return run_score_semantic(ma, out);
    if (*ff) {
      if (*sem_opt) fa.semantic_speedup = semantic_speedup;
      return run_fastforward(fa, out);
    }
    if (*eval) return run_eval(ea, out);
    if (*grad) return run_gradcheck(ga, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace vidsum::cli
