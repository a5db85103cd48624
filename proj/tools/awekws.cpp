// Copyright 2026 The awekws Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// awekws: train acoustic word embedders and run query-by-example keyword search.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "awekws/corpus.hpp"
#include "awekws/embedders.hpp"
#include "awekws/error.hpp"
#include "awekws/gradcheck.hpp"
#include "awekws/kws.hpp"
#include "awekws/metrics.hpp"
#include "awekws/nn/checkpoint.hpp"
#include "awekws/synthetic.hpp"
#include "awekws/train.hpp"

#ifndef AWEKWS_VERSION
#define AWEKWS_VERSION "unknown"
#endif
#ifndef AWEKWS_GIT_REV
#define AWEKWS_GIT_REV "unknown"
#endif

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace awekws;

namespace {

// Exit codes, one per error family.
enum Exit : int {
  kOk = 0,
  kUsage = 2,
  kMissingFile = 3,
  kFormat = 4,      // unreadable manifest, feature file or checkpoint
  kShape = 5,       // feature/embedding dimensions disagree
  kNonFinite = 6,   // NaN/Inf in data, loss or gradients
  kData = 7,        // the data cannot support the request (no pairs, empty groups, ...)
  kEvaluation = 8,  // nothing left to evaluate
  kLayerSet = 9,
  kInvalid = 10,
  kGradcheck = 11,
};

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMissingFile:
      return kMissingFile;
    case ErrorCode::kParseError:
    case ErrorCode::kCheckpointFormat:
      return kFormat;
    case ErrorCode::kDimensionMismatch:
    case ErrorCode::kInconsistentFeatureDim:
    case ErrorCode::kDimMismatch:
    case ErrorCode::kShapeMismatch:
      return kShape;
    case ErrorCode::kNonFiniteValue:
    case ErrorCode::kNonFiniteGradient:
    case ErrorCode::kNonFiniteLoss:
      return kNonFinite;
    case ErrorCode::kEmptyScopeGroup:
    case ErrorCode::kAlignmentOutOfRange:
    case ErrorCode::kNoPositivePairsAvailable:
    case ErrorCode::kOddPairCountRequested:
    case ErrorCode::kEmptySequence:
    case ErrorCode::kInvalidLength:
    case ErrorCode::kZeroNormEmbedding:
    case ErrorCode::kZeroNormFrame:
      return kData;
    case ErrorCode::kNoSameLabelPairs:
    case ErrorCode::kNoRelevantUtterances:
    case ErrorCode::kNoKeywordsSurviveFilter:
      return kEvaluation;
    case ErrorCode::kLayerSetInconsistent:
      return kLayerSet;
    case ErrorCode::kInvalidArgument:
      return kInvalid;
  }
  return kInvalid;
}

void require_file(const std::string& path, const std::string& what) {
  if (!fs::is_regular_file(path)) fail(ErrorCode::kMissingFile, what + " not found: " + path);
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCode::kMissingFile, "cannot create " + path.string());
  return out;
}

Corpus load_normalized(const std::string& manifest, const std::string& mode, int threads) {
  return normalize(load_corpus(manifest, threads), {parse_normalization_mode(mode), 1e-8});
}

std::vector<std::string> split_list(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& item : items) {
    std::stringstream ss(item);
    std::string part;
    while (std::getline(ss, part, ',')) {
      if (!part.empty()) out.push_back(part);
    }
  }
  return out;
}

// ---- synth ----

struct SynthArgs {
  std::string out;
  std::uint64_t seed = 0;
  SyntheticConfig language;
  std::size_t train_per_type = 10;
  std::size_t templates_per_type = 3;
  std::size_t heldout_per_type = 10;
  std::size_t utterances = 200;
  std::size_t min_words = 3;
  std::size_t max_words = 6;
};

void cmd_synth(const SynthArgs& a) {
  SyntheticConfig cfg = a.language;
  cfg.seed = a.seed;
  require(cfg.n_speakers >= 3, ErrorCode::kInvalidArgument, "synth needs at least 3 speakers");
  SyntheticLanguage lang(cfg);
  // Speakers are split three ways: training, templates, and held-out/search.
  std::vector<std::size_t> train_spk, templ_spk, test_spk;
  for (std::size_t s = 0; s < cfg.n_speakers; ++s) {
    (s % 3 == 0 ? train_spk : s % 3 == 1 ? templ_spk : test_spk).push_back(s);
  }
  Rng rng(a.seed + 1);
  const fs::path out = a.out;
  write_corpus(lang.isolated_words(a.train_per_type, train_spk, "train", rng), out / "train" / "manifest.jsonl");
  write_corpus(lang.isolated_words(a.templates_per_type, templ_spk, "templ", rng),
               out / "templates" / "manifest.jsonl");
  write_corpus(lang.isolated_words(a.heldout_per_type, test_spk, "held", rng), out / "heldout" / "manifest.jsonl");
  const Corpus search = lang.sentences(a.utterances, a.min_words, a.max_words, test_spk, "utt", rng);
  write_corpus(search, out / "search" / "manifest.jsonl");
  write_ground_truth(ground_truth_from_alignments(search), (out / "truth.jsonl").string());
  std::cout << "wrote synthetic corpora under " << out.string() << "\n";
}

// ---- train ----

struct TrainArgs {
  std::string manifest;
  std::string out;
  std::string embedder = std::string(kContrastiveTransformerId);
  std::string precision = "f32";
  std::string normalization = "per-speaker";
  std::uint64_t seed = 0;
  std::size_t pairs = 400000;
  std::uint64_t pair_seed = 0;  // defaults to --seed
  TrainConfig train;
  nn::TransformerConfig transformer;
  nn::RnnConfig rnn;
  int threads = 1;
};

template <typename Model>
void write_model(const Model& model, const nn::ModelSpec& spec, const fs::path& path) {
  nn::save_checkpoint(path, spec, model.params());
}

template <typename T>
std::vector<TrainLogEntry> train_as(const TrainArgs& a, nn::ModelSpec& spec, const std::vector<WordSegment>& segments,
                                    const std::vector<SegmentPair>& pairs, const TrainObserver& observer,
                                    const fs::path& checkpoint) {
  std::vector<TrainLogEntry> log;
  if (a.embedder == kContrastiveTransformerId) {
    ContrastiveTransformer<T> model(a.transformer, a.seed);
    log = train_contrastive(model, segments, pairs, a.train, observer);
    write_model(model, spec, checkpoint);
  } else if (a.embedder == kContrastiveRnnId) {
    ContrastiveRnn<T> model(a.rnn, a.seed);
    log = train_contrastive(model, segments, pairs, a.train, observer);
    write_model(model, spec, checkpoint);
  } else if (a.embedder == kCaeRnnId) {
    CaeRnn<T> model(a.rnn, a.seed);
    log = train_reconstruction(model, segments, pairs, a.train, observer);
    write_model(model, spec, checkpoint);
  } else {
    fail(ErrorCode::kInvalidArgument, "cannot train embedder '" + a.embedder + "'");
  }
  return log;
}

void cmd_train(TrainArgs a) {
  require_file(a.manifest, "training manifest");
  const Corpus corpus = load_normalized(a.manifest, a.normalization, a.threads);
  const auto segments = extract_segments(corpus);
  const Index dim = corpus.empty() ? 0 : corpus.front().dim();
  a.transformer.input_dim = dim;
  a.rnn.input_dim = dim;
  a.transformer.validate();
  a.rnn.validate();
  a.train.seed = a.seed;
  a.train.threads = a.threads;
  const auto pairs = sample_pairs(segments, a.pairs, a.pair_seed != 0 ? a.pair_seed : a.seed);

  const fs::path out = a.out;
  fs::create_directories(out);
  nn::ModelSpec spec{a.embedder, a.transformer, a.rnn};
  const auto precision = nn::parse_precision(a.precision);

  auto log_file = open_output(out / "train_log.jsonl");
  const TrainObserver observer = [&](const TrainLogEntry& e) {
    log_file << json{{"step", e.step}, {"loss", e.loss}, {"wall_seconds", e.wall_seconds}}.dump() << '\n';
  };
  const auto checkpoint = out / "checkpoint.bin";
  const auto log = precision == nn::Precision::kFloat32
                       ? train_as<float>(a, spec, segments, pairs, observer, checkpoint)
                       : train_as<double>(a, spec, segments, pairs, observer, checkpoint);

  const json run = {
      {"command", "train"},
      {"version", AWEKWS_VERSION},
      {"git_rev", AWEKWS_GIT_REV},
      {"manifest", a.manifest},
      {"normalization", a.normalization},
      {"seed", a.seed},
      {"pairs", a.pairs},
      {"pair_seed", a.pair_seed != 0 ? a.pair_seed : a.seed},
      {"segments", segments.size()},
      {"steps", a.train.steps},
      {"batch_size", a.train.batch_size},
      {"temperature", a.train.temperature},
      {"learning_rate", a.train.adam.learning_rate},
      {"precision", a.precision},
      {"model", json::parse(nn::describe(spec))},
      {"final_loss", log.empty() ? 0.0 : log.back().loss},
  };
  open_output(out / "run.json") << run.dump(2) << '\n';
  std::cout << "trained " << a.embedder << " for " << log.size() << " steps; final loss "
            << (log.empty() ? 0.0 : log.back().loss) << "\n";
}

// ---- embed ----

struct EmbedArgs {
  std::string manifest;
  std::string out;
  std::string embedder = std::string(kMeanpoolId);
  std::string checkpoint;
  std::string normalization = "per-speaker";
  std::string unit = "words";
  Index subsample_k = 10;
  int threads = 1;
};

std::unique_ptr<Embedder> make_embedder(const std::string& id, const std::string& checkpoint, Index k) {
  if (!checkpoint.empty()) {
    require_file(checkpoint, "checkpoint");
    return nn::load_embedder(checkpoint);
  }
  return make_builtin_embedder(id, k);
}

void cmd_embed(const EmbedArgs& a) {
  require_file(a.manifest, "manifest");
  const auto embedder = make_embedder(a.embedder, a.checkpoint, a.subsample_k);
  const Corpus corpus = load_normalized(a.manifest, a.normalization, a.threads);
  std::vector<WordSegment> items;
  if (a.unit == "words") {
    items = extract_segments(corpus);
  } else if (a.unit == "utterances") {
    for (const auto& u : corpus) items.push_back({u.utterance_id, "", 0, u.num_frames(), u.frames});
  } else {
    fail(ErrorCode::kInvalidArgument, "--unit must be words or utterances");
  }
  std::vector<Vector<float>> vectors(items.size());
  const auto n = static_cast<std::ptrdiff_t>(items.size());
  std::vector<std::string> errors(items.size());
  std::vector<ErrorCode> codes(items.size(), ErrorCode::kInvalidArgument);
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, a.threads))
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      vectors[static_cast<std::size_t>(i)] = embedder->embed(items[static_cast<std::size_t>(i)].frames);
    } catch (const Error& e) {
      errors[static_cast<std::size_t>(i)] = e.what();
      codes[static_cast<std::size_t>(i)] = e.code();
    }
  }
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i].empty()) throw Error(codes[i], errors[i]);
  }
  auto out = open_output(a.out);
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& v = vectors[i];
    out << json{{"source", items[i].source},
                {"label", items[i].label},
                {"start", items[i].start_frame},
                {"end", items[i].end_frame},
                {"embedder", embedder->id()},
                {"vector", std::vector<float>(v.data(), v.data() + v.size())}}
               .dump()
        << '\n';
  }
}

// ---- search ----

struct SearchArgs {
  std::string templates;
  std::string search;
  std::string out;
  std::string embedder = std::string(kMeanpoolId);  // or "dtw"
  std::string checkpoint;
  std::string template_normalization = "per-speaker";
  std::string search_normalization = "per-utterance";
  Index subsample_k = 10;
  WindowConfig windows;
  int threads = 1;
};

std::vector<RankedDetections> run_search(const SearchArgs& a) {
  require_file(a.templates, "template manifest");
  require_file(a.search, "search manifest");
  const Corpus templ = load_normalized(a.templates, a.template_normalization, a.threads);
  const Corpus search_corpus = load_normalized(a.search, a.search_normalization, a.threads);
  const auto keywords = templates_from_segments(extract_segments(templ));
  require(!keywords.empty(), ErrorCode::kInvalidArgument, "template manifest has no aligned words");
  SearchOptions options;
  options.threads = a.threads;
  if (a.checkpoint.empty() && a.embedder == "dtw") return dtw_search_all(keywords, search_corpus, options);
  a.windows.validate();
  const auto embedder = make_embedder(a.embedder, a.checkpoint, a.subsample_k);
  return search(keywords, search_corpus, *embedder, a.windows, options);
}

void cmd_search(const SearchArgs& a) {
  const auto rankings = run_search(a);
  auto out = open_output(a.out);
  write_detections(rankings, out);
  std::size_t n = 0;
  for (const auto& r : rankings) n += r.detections.size();
  std::cout << "wrote " << n << " detections for " << rankings.size() << " keywords\n";
}

// ---- evaluate ----

struct EvaluateArgs {
  std::string detections;
  std::string truth;
  std::string truth_manifest;
  std::string out;
  std::string table;
  std::size_t min_occurrences = 10;
};

GroundTruth load_truth(const std::string& truth, const std::string& truth_manifest) {
  if (!truth.empty()) {
    require_file(truth, "ground truth");
    return read_ground_truth(truth);
  }
  require(!truth_manifest.empty(), ErrorCode::kInvalidArgument, "give --truth or --truth-manifest");
  require_file(truth_manifest, "search manifest");
  std::vector<ManifestEntry> entries = read_manifest(truth_manifest);
  GroundTruth g;
  for (const auto& e : entries) {
    for (const auto& w : e.words) g.relevant[w.label].insert(e.id);
  }
  return g;
}

void cmd_evaluate(const EvaluateArgs& a) {
  require_file(a.detections, "detections");
  std::ifstream in(a.detections);
  const auto rankings = read_detections(in);
  const auto report = evaluate(rankings, load_truth(a.truth, a.truth_manifest), a.min_occurrences);
  const std::string text = report_to_json(report);
  if (!a.out.empty()) open_output(a.out) << text;
  if (!a.table.empty()) open_output(a.table) << report_to_table(report);
  std::printf("MAP %.6f  P@10 %.6f  P@N %.6f  keywords %zu\n", report.map, report.mean_p_at_10, report.mean_p_at_n,
              report.kept_keywords.size());
}

// ---- layer-sweep ----

struct SweepArgs {
  std::vector<std::string> templates;
  std::vector<std::string> search;
  std::vector<std::string> layers;
  std::string truth;
  std::string out_table;
  std::string out_series;
  std::string template_normalization = "per-speaker";
  std::string search_normalization = "per-utterance";
  std::size_t min_occurrences = 10;
  WindowConfig windows;
  int threads = 1;
};

std::vector<std::string> utterance_ids(const std::string& manifest) {
  std::vector<std::string> ids;
  for (const auto& e : read_manifest(manifest)) ids.push_back(e.id);
  return ids;
}

void cmd_layer_sweep(const SweepArgs& a) {
  const auto templates = split_list(a.templates);
  const auto searches = split_list(a.search);
  auto names = split_list(a.layers);
  require(!templates.empty(), ErrorCode::kInvalidArgument, "no layers given");
  if (templates.size() != searches.size()) {
    fail(ErrorCode::kLayerSetInconsistent, std::to_string(templates.size()) + " template manifests but " +
                                               std::to_string(searches.size()) + " search manifests");
  }
  if (names.empty()) {
    for (std::size_t l = 0; l < templates.size(); ++l) names.push_back(std::to_string(l + 1));
  }
  require(names.size() == templates.size(), ErrorCode::kInvalidArgument, "--layers must name every layer");
  for (std::size_t l = 0; l < templates.size(); ++l) {
    require_file(templates[l], "template manifest for layer " + names[l]);
    require_file(searches[l], "search manifest for layer " + names[l]);
  }
  // Every layer must describe the same utterances.
  const auto ref_templ = utterance_ids(templates.front());
  const auto ref_search = utterance_ids(searches.front());
  for (std::size_t l = 1; l < templates.size(); ++l) {
    if (utterance_ids(templates[l]) != ref_templ || utterance_ids(searches[l]) != ref_search) {
      fail(ErrorCode::kLayerSetInconsistent, "layer " + names[l] + " covers different utterances than layer " +
                                                 names.front());
    }
  }
  const GroundTruth truth = load_truth(a.truth, searches.front());

  std::ostringstream table;
  table << "layer\tMAP\tP@10\tP@N\n";
  json series = {{"x_label", "layer"}, {"y_label", "MAP"}, {"layer", json::array()}, {"map", json::array()},
                 {"p_at_10", json::array()}, {"p_at_n", json::array()}};
  MeanpoolEmbedder meanpool;
  for (std::size_t l = 0; l < templates.size(); ++l) {
    const Corpus templ = load_normalized(templates[l], a.template_normalization, a.threads);
    const Corpus search_corpus = load_normalized(searches[l], a.search_normalization, a.threads);
    SearchOptions options;
    options.threads = a.threads;
    const auto rankings = search(templates_from_segments(extract_segments(templ)), search_corpus, meanpool,
                                 a.windows, options);
    const auto report = evaluate(rankings, truth, a.min_occurrences);
    char buf[128];
    std::snprintf(buf, sizeof(buf), "\t%.6f\t%.6f\t%.6f\n", report.map, report.mean_p_at_10, report.mean_p_at_n);
    table << names[l] << buf;
    series["layer"].push_back(names[l]);
    series["map"].push_back(report.map);
    series["p_at_10"].push_back(report.mean_p_at_10);
    series["p_at_n"].push_back(report.mean_p_at_n);
  }
  std::cout << table.str();
  if (!a.out_table.empty()) open_output(a.out_table) << table.str();
  if (!a.out_series.empty()) open_output(a.out_series) << series.dump(2) << '\n';
}

// ---- gradcheck ----

int cmd_gradcheck(const GradCheckOptions& options, const std::string& target) {
  const auto reports = target.empty() ? gradcheck_all(options) : std::vector{gradcheck(target, options)};
  bool ok = true;
  for (const auto& r : reports) {
    std::printf("%-26s trials %zu  entries %zu  max_rel_err %.3e  %s\n", r.target.c_str(), r.trials, r.entries,
                r.max_relative_error, r.passed() ? "ok" : "FAILED");
    ok = ok && r.passed();
  }
  return ok ? kOk : kGradcheck;
}

void add_window_options(CLI::App* cmd, WindowConfig& w) {
  cmd->add_option("--window-min", w.min_len, "Shortest window, frames")->capture_default_str();
  cmd->add_option("--window-max", w.max_len, "Longest window, frames")->capture_default_str();
  cmd->add_option("--window-step", w.len_step, "Window length increment")->capture_default_str();
  cmd->add_option("--window-stride", w.stride, "Window start stride")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acoustic word embeddings and query-by-example keyword search"};
  app.set_config("--config", "", "Read options from a TOML/INI file; command-line flags override it");
  app.set_version_flag("--version", std::string(AWEKWS_VERSION) + " (" + AWEKWS_GIT_REV + ")");
  app.require_subcommand(1);
  int threads = 1;
  app.add_option("--threads", threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic corpus (train/templates/heldout/search)");
  synth_cmd->add_option("--out", synth.out, "Output directory")->required();
  synth_cmd->add_option("--seed", synth.seed, "Random seed")->required();
  synth_cmd->add_option("--types", synth.language.n_types, "Word types")->capture_default_str();
  synth_cmd->add_option("--dim", synth.language.dim, "Feature dimension")->capture_default_str();
  synth_cmd->add_option("--speakers", synth.language.n_speakers, "Speakers")->capture_default_str();
  synth_cmd->add_option("--noise", synth.language.noise, "Per-frame noise level")->capture_default_str();
  synth_cmd->add_option("--train-per-type", synth.train_per_type)->capture_default_str();
  synth_cmd->add_option("--templates-per-type", synth.templates_per_type)->capture_default_str();
  synth_cmd->add_option("--heldout-per-type", synth.heldout_per_type)->capture_default_str();
  synth_cmd->add_option("--utterances", synth.utterances, "Search utterances")->capture_default_str();
  synth_cmd->add_option("--min-words", synth.min_words)->capture_default_str();
  synth_cmd->add_option("--max-words", synth.max_words)->capture_default_str();

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train an embedder; writes checkpoint.bin, train_log.jsonl, run.json");
  train_cmd->add_option("--manifest", train.manifest, "Training corpus manifest")->required();
  train_cmd->add_option("--out", train.out, "Output directory")->required();
  train_cmd->add_option("--seed", train.seed, "Random seed (initialization, pairs, batches)")->required();
  train_cmd->add_option("--embedder", train.embedder)
      ->check(CLI::IsMember({std::string(kContrastiveTransformerId), std::string(kContrastiveRnnId),
                             std::string(kCaeRnnId)}))
      ->capture_default_str();
  train_cmd->add_option("--precision", train.precision)->check(CLI::IsMember({"f32", "f64"}))->capture_default_str();
  train_cmd->add_option("--normalization", train.normalization)->capture_default_str();
  train_cmd->add_option("--pairs", train.pairs, "Ordered training pairs to sample")->capture_default_str();
  train_cmd->add_option("--pair-seed", train.pair_seed, "Seed for pair sampling (default: --seed)");
  train_cmd->add_option("--steps", train.train.steps)->capture_default_str();
  train_cmd->add_option("--batch-size", train.train.batch_size, "Pairs per batch")->capture_default_str();
  train_cmd->add_option("--temperature", train.train.temperature)->capture_default_str();
  train_cmd->add_option("--lr", train.train.adam.learning_rate)->capture_default_str();
  train_cmd->add_option("--model-dim", train.transformer.model_dim)->capture_default_str();
  train_cmd->add_option("--heads", train.transformer.n_heads)->capture_default_str();
  train_cmd->add_option("--layers", train.transformer.n_layers)->capture_default_str();
  train_cmd->add_option("--ffn-dim", train.transformer.ffn_dim)->capture_default_str();
  train_cmd->add_option("--awe-dim", train.transformer.awe_dim, "Embedding size (all models)")->capture_default_str();
  train_cmd->add_option("--hidden-dim", train.rnn.hidden_dim, "GRU width")->capture_default_str();
  train_cmd->add_option("--rnn-layers", train.rnn.n_layers)->capture_default_str();

  EmbedArgs embed;
  auto* embed_cmd = app.add_subcommand("embed", "Embed aligned words (or whole utterances) to JSONL");
  embed_cmd->add_option("--manifest", embed.manifest)->required();
  embed_cmd->add_option("--out", embed.out)->required();
  embed_cmd->add_option("--embedder", embed.embedder, "meanpool or subsample")->capture_default_str();
  embed_cmd->add_option("--checkpoint", embed.checkpoint, "Trained model (overrides --embedder)");
  embed_cmd->add_option("--normalization", embed.normalization)->capture_default_str();
  embed_cmd->add_option("--unit", embed.unit, "words or utterances")->capture_default_str();
  embed_cmd->add_option("--subsample-k", embed.subsample_k)->capture_default_str();

  SearchArgs search_args;
  auto* search_cmd = app.add_subcommand("search", "Score every keyword against every search utterance");
  search_cmd->add_option("--templates", search_args.templates, "Manifest of aligned keyword templates")->required();
  search_cmd->add_option("--search", search_args.search, "Manifest of search utterances")->required();
  search_cmd->add_option("--out", search_args.out, "Detections JSONL")->required();
  search_cmd->add_option("--embedder", search_args.embedder, "meanpool, subsample or dtw")->capture_default_str();
  search_cmd->add_option("--checkpoint", search_args.checkpoint, "Trained model (overrides --embedder)");
  search_cmd->add_option("--template-normalization", search_args.template_normalization)->capture_default_str();
  search_cmd->add_option("--search-normalization", search_args.search_normalization)->capture_default_str();
  search_cmd->add_option("--subsample-k", search_args.subsample_k)->capture_default_str();
  add_window_options(search_cmd, search_args.windows);

  EvaluateArgs eval;
  auto* eval_cmd = app.add_subcommand("evaluate", "Compute AP, P@10 and P@N against ground truth");
  eval_cmd->add_option("--detections", eval.detections)->required();
  eval_cmd->add_option("--truth", eval.truth, "Ground truth JSONL {keyword, utterances}");
  eval_cmd->add_option("--truth-manifest", eval.truth_manifest, "Derive ground truth from manifest alignments");
  eval_cmd->add_option("--out", eval.out, "Report JSON");
  eval_cmd->add_option("--table", eval.table, "Report TSV");
  eval_cmd->add_option("--min-occurrences", eval.min_occurrences)->capture_default_str();

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("layer-sweep", "Meanpool KWS on per-layer feature corpora");
  sweep_cmd->add_option("--templates", sweep.templates, "Template manifests, one per layer (comma list)")->required();
  sweep_cmd->add_option("--search", sweep.search, "Search manifests, one per layer (comma list)")->required();
  sweep_cmd->add_option("--layers", sweep.layers, "Layer names (default 1..L)");
  sweep_cmd->add_option("--truth", sweep.truth, "Ground truth JSONL (default: first search manifest)");
  sweep_cmd->add_option("--out-table", sweep.out_table);
  sweep_cmd->add_option("--out-series", sweep.out_series);
  sweep_cmd->add_option("--template-normalization", sweep.template_normalization)->capture_default_str();
  sweep_cmd->add_option("--search-normalization", sweep.search_normalization)->capture_default_str();
  sweep_cmd->add_option("--min-occurrences", sweep.min_occurrences)->capture_default_str();
  add_window_options(sweep_cmd, sweep.windows);

  GradCheckOptions gc;
  std::string gc_target;
  auto* gc_cmd = app.add_subcommand("gradcheck", "Finite-difference check of every backward pass");
  gc_cmd->add_option("--target", gc_target)->check(CLI::IsMember(gradcheck_targets()));
  gc_cmd->add_option("--trials", gc.trials)->capture_default_str();
  gc_cmd->add_option("--seed", gc.seed)->capture_default_str();
  gc_cmd->add_option("--tolerance", gc.tolerance)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  train.threads = embed.threads = search_args.threads = sweep.threads = threads;
  try {
    if (*synth_cmd) cmd_synth(synth);
    if (*train_cmd) cmd_train(train);
    if (*embed_cmd) cmd_embed(embed);
    if (*search_cmd) cmd_search(search_args);
    if (*eval_cmd) cmd_evaluate(eval);
    if (*sweep_cmd) cmd_layer_sweep(sweep);
    if (*gc_cmd) return cmd_gradcheck(gc, gc_target);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kMissingFile;
  }
  return kOk;
}
