// Copyright 2026 The occlear Authors
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

// occlear command line. Every subcommand reads and writes files only; see
// README.md for the formats.
//
// Exit status: 0 ok, 1 internal, 2 usage / invalid argument, 3 invalid
// data, 4 not found, 5 io, 6 numeric.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "occlear/corpus.hpp"
#include "occlear/embedding.hpp"
#include "occlear/error.hpp"
#include "occlear/eval.hpp"
#include "occlear/image.hpp"
#include "occlear/inpaint.hpp"
#include "occlear/lexicon.hpp"
#include "occlear/mask.hpp"
#include "occlear/pipeline.hpp"
#include "occlear/relation.hpp"
#include "occlear/simd/kernels.hpp"
#include "occlear/tsne.hpp"

using namespace occlear;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

bool g_json = false;

void emit(const json& j, const std::string& human) {
  if (g_json) {
    std::cout << j.dump(2) << '\n';
  } else if (!human.empty()) {
    std::cout << human;
  }
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(fs::exists(path) ? ErrorCode::kIo : ErrorCode::kNotFound, "cannot open " + path.string());
  return in;
}

CorpusMode parse_mode(const std::string& s) {
  if (s == "original") return CorpusMode::kOriginal;
  if (s == "modified") return CorpusMode::kModified;
  fail(ErrorCode::kInvalidArgument, "mode must be 'original' or 'modified'");
}

BoundaryMode parse_boundary(const std::string& s) {
  if (s == "hard") return BoundaryMode::kHardBoundary;
  if (s == "literal-eop") return BoundaryMode::kLiteralEop;
  fail(ErrorCode::kInvalidArgument, "boundary must be 'hard' or 'literal-eop'");
}

struct Args {
  std::string captions, lexicon = OCCLEAR_DEFAULT_LEXICON, mode = "modified", out;
  std::string corpus, emb, stats, scenes, label_maps, scatter, boundary = "hard";
  std::string image, mask, label_map, stuff, mask_out, composite, config, manifest;
  TrainConfig train;
  TsneConfig tsne;
  DetectorConfig detector;
  InpaintConfig inpaint;
  bool classes_only = false, no_stuff_stuff = false, skip_missing = false, timings = false;
  int unlabeled = 255;
  int workers = 0;
  std::int64_t image_id = 0;
};

int cmd_build_corpus(const Args& a) {
  const auto lexicon = load_lexicon(a.lexicon);
  const auto captions = load_coco_captions(a.captions);
  const Corpus corpus = build_corpus(captions, lexicon, parse_mode(a.mode));
  auto out = open_out(a.out);
  write_corpus(out, corpus);
  std::size_t tokens = 0;
  for (const auto& d : corpus.documents) tokens += d.size();
  emit({{"documents", corpus.documents.size()}, {"tokens", tokens}, {"out", a.out}},
       std::to_string(corpus.documents.size()) + " documents, " + std::to_string(tokens) +
           " tokens -> " + a.out + "\n");
  return 0;
}

int cmd_train(Args a) {
  a.train.boundary = parse_boundary(a.boundary);
  auto in = open_in(a.corpus);
  const Corpus corpus = read_corpus(in);
  const EmbeddingMatrix emb = train(corpus, a.train);
  save_embeddings(a.out, emb);
  emit({{"vocab", emb.size()}, {"dim", emb.dim()}, {"steps", a.train.steps}, {"out", a.out}},
       std::to_string(emb.size()) + " vectors of dim " + std::to_string(emb.dim()) + " -> " + a.out + "\n");
  return 0;
}

int cmd_project(const Args& a) {
  const EmbeddingMatrix full = load_embeddings(a.emb);
  EmbeddingMatrix emb = full;
  if (a.classes_only) {
    const auto lexicon = load_lexicon(a.lexicon);
    std::vector<std::string> vocab;
    for (const auto& l : lexicon.labels()) {
      if (full.find(lexicon.corpus_token(l.id))) vocab.push_back(lexicon.corpus_token(l.id));
    }
    emb = EmbeddingMatrix(vocab, full.dim());
    for (int r = 0; r < int(vocab.size()); ++r) {
      const auto src = full.vector(full.index_of(vocab[r]));
      std::copy(src.begin(), src.end(), emb.vector(r).begin());
    }
  }
  const TsneResult res = project_tsne(emb, a.tsne);
  auto out = open_out(a.out);
  write_tsne(out, emb.vocab(), res.coords);
  const double kl = res.kl.empty() ? 0.0 : res.kl.back();
  emit({{"points", res.coords.size()}, {"final_kl", kl}, {"out", a.out}},
       std::to_string(res.coords.size()) + " points, final KL " + std::to_string(kl) + " -> " + a.out + "\n");
  return 0;
}

int cmd_stats(const Args& a) {
  const auto lexicon = load_lexicon(a.lexicon);
  std::vector<SceneContext> scenes;
  if (!a.scenes.empty()) {
    auto in = open_in(a.scenes);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      fail(ErrorCode::kInvalidData, a.scenes + " is not valid JSON: " + e.what());
    }
    scenes = parse_scenes(j, lexicon);
  } else if (!a.label_maps.empty()) {
    scenes = scenes_from_label_maps(a.label_maps, lexicon, a.unlabeled);
  } else {
    fail(ErrorCode::kInvalidArgument, "stats needs --scenes or --label-maps");
  }
  const auto stats = count_cooccurrence(scenes, lexicon.size());
  auto out = open_out(a.out);
  write_stats(out, stats, lexicon);
  emit({{"images", stats.image_total()}, {"out", a.out}},
       std::to_string(stats.image_total()) + " images counted -> " + a.out + "\n");
  return 0;
}

int cmd_evaluate(const Args& a) {
  const auto lexicon = load_lexicon(a.lexicon);
  const auto emb = load_embeddings(a.emb);
  auto in = open_in(a.stats);
  const auto stats = read_stats(in, lexicon);
  const ClassSpace space(emb, lexicon);
  CorrelationOptions opts;
  opts.include_stuff_stuff = !a.no_stuff_stuff;
  opts.skip_missing = a.skip_missing;
  const auto res = correlate_relations(space, stats, opts);
  if (!a.scatter.empty()) {
    auto out = open_out(a.scatter);
    write_scatter(out, res, lexicon);
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", res.coefficient);
  emit({{"pearson", res.coefficient},
        {"pairs", res.pairs.size()},
        {"skipped_missing_classes", res.skipped_missing}},
       std::string("pearson ") + buf + "\npairs " + std::to_string(res.pairs.size()) + "\n");
  return 0;
}

int cmd_detect(const Args& a) {
  a.detector.validate();
  const auto lexicon = load_lexicon(a.lexicon);
  const auto emb = load_embeddings(a.emb);
  const ClassSpace space(emb, lexicon);
  const LabelMap map = load_label_map(a.label_map, a.unlabeled);
  SceneContext scene = scene_from_label_map(map, lexicon, a.image_id, &a.detector);
  if (!a.stuff.empty()) {
    auto in = open_in(a.stuff);
    scene.stuffs.clear();
    try {
      for (const auto& n : json::parse(in)) scene.stuffs.insert(lexicon.id_of(n.get<std::string>()));
    } catch (const json::exception& e) {
      fail(ErrorCode::kInvalidData, a.stuff + ": " + e.what());
    }
  }
  const auto report = detect_occlusions(space, scene, a.detector);
  const auto merged = merge_occlusion_mask(report, scene.thing_masks, map.width, map.height);
  if (!a.mask_out.empty()) save_mask(a.mask_out, merged.mask);
  std::string human;
  for (const auto& e : report.entries) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-20s %-6s normalized %.4f context %d\n", e.name.c_str(),
                  std::string(to_string(e.verdict)).c_str(), e.normalized_score, e.context_size);
    human += buf;
  }
  human += "removed area " + std::to_string(merged.mask.area()) + " px\n";
  json j = to_json(report);
  j["removed_area"] = merged.mask.area();
  emit(j, human);
  return 0;
}

int cmd_inpaint(const Args& a) {
  const Image img = load_image(a.image);
  const BinaryMask mask = load_mask(a.mask);
  const Image out = inpaint(img, mask, a.inpaint);
  save_image(a.out, out);
  if (!a.composite.empty()) save_image(a.composite, side_by_side(img, out));
  emit({{"hole_area", mask.area()}, {"out", a.out}},
       "filled " + std::to_string(mask.area()) + " px -> " + a.out + "\n");
  return 0;
}

int cmd_run(const Args& a) {
  PipelineConfig cfg = load_pipeline_config(a.config);
  if (a.workers > 0) cfg.workers = a.workers;
  const RunManifest manifest = run_pipeline(cfg);
  std::size_t failed = 0, removed = 0;
  for (const auto& r : manifest.records()) {
    if (r.status != "ok") ++failed;
    else if (!r.passed_through) ++removed;
  }
  emit({{"images", manifest.size()},
        {"inpainted", removed},
        {"failed", failed},
        {"manifest", (cfg.output_dir / "manifest.json").string()}},
       std::to_string(manifest.size()) + " images, " + std::to_string(removed) + " inpainted, " +
           std::to_string(failed) + " failed -> " + (cfg.output_dir / "manifest.json").string() + "\n");
  return 0;
}

int cmd_report(const Args& a) {
  auto in = open_in(a.manifest);
  json m;
  try {
    m = json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorCode::kInvalidData, a.manifest + " is not valid JSON: " + e.what());
  }
  if (!m.contains("records")) fail(ErrorCode::kInvalidData, "not a run manifest");
  std::map<std::string, int> statuses, removed_by_class;
  std::size_t inpainted = 0;
  double fraction_sum = 0.0;
  for (const auto& r : m["records"]) {
    statuses[r.value("status", "ok")]++;
    if (!r.value("passed_through", false) && r.value("status", "ok") == "ok") {
      ++inpainted;
      fraction_sum += r.value("removed_fraction", 0.0);
    }
    if (r.contains("report") && r["report"].is_object()) {
      for (const auto& e : r["report"]["entries"]) {
        if (e.value("verdict", "") == "remove") removed_by_class[e.value("name", "")]++;
      }
    }
  }
  const double mean_fraction = inpainted ? fraction_sum / double(inpainted) : 0.0;
  std::string human = "images " + std::to_string(m["records"].size()) + "\n";
  for (const auto& [s, n] : statuses) human += "  " + s + " " + std::to_string(n) + "\n";
  human += "inpainted " + std::to_string(inpainted) + ", mean removed fraction " +
           std::to_string(mean_fraction) + "\n";
  for (const auto& [c, n] : removed_by_class) human += "  removed " + c + " x" + std::to_string(n) + "\n";
  emit({{"images", m["records"].size()},
        {"status", statuses},
        {"inpainted", inpainted},
        {"mean_removed_fraction", mean_fraction},
        {"removed_by_class", removed_by_class}},
       human);
  return 0;
}

int report_error(int code, const std::string& category, const std::string& msg) {
  std::cerr << "occlear: " << category << ": " << msg << '\n';
  if (g_json) std::cout << json{{"error", {{"category", category}, {"message", msg}}}}.dump(2) << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"occlear: context-based occlusion detection and removal"};
  app.set_version_flag("--version", std::string(OCCLEAR_VERSION));
  app.require_subcommand(1);
  app.add_flag("--json", g_json, "Print machine-readable JSON on stdout");
  std::string simd = "auto";
  app.add_option("--simd", simd, "Kernel backend: auto, scalar, avx2, neon");
  Args a;

  auto* bc = app.add_subcommand("build-corpus", "Turn COCO captions into a training corpus");
  bc->add_option("--captions", a.captions, "COCO captions JSON")->required();
  bc->add_option("--lexicon", a.lexicon, "Class lexicon JSON");
  bc->add_option("--mode", a.mode, "original | modified")->check(CLI::IsMember({"original", "modified"}));
  bc->add_option("--out", a.out, "Corpus file")->required();

  auto* te = app.add_subcommand("train-embeddings", "Train skip-gram vectors");
  te->add_option("--corpus", a.corpus, "Corpus file")->required();
  te->add_option("--dim", a.train.dim);
  te->add_option("--window", a.train.window);
  te->add_option("--steps", a.train.steps);
  te->add_option("--negatives", a.train.negatives);
  te->add_option("--lr", a.train.learning_rate);
  te->add_option("--seed", a.train.seed);
  te->add_option("--boundary", a.boundary, "hard | literal-eop")->check(CLI::IsMember({"hard", "literal-eop"}));
  te->add_option("--out", a.out, "Embedding file")->required();

  auto* pj = app.add_subcommand("project-2d", "t-SNE projection of embedding vectors");
  pj->add_option("--emb", a.emb)->required();
  pj->add_option("--perplexity", a.tsne.perplexity);
  pj->add_option("--iters", a.tsne.iterations);
  pj->add_option("--seed", a.tsne.seed);
  pj->add_flag("--classes-only", a.classes_only, "Project only the lexicon's class tokens");
  pj->add_option("--lexicon", a.lexicon);
  pj->add_option("--out", a.out, "Coordinate file (token x y)")->required();

  auto* st = app.add_subcommand("stats", "Count image-level class co-occurrence");
  st->add_option("--scenes", a.scenes, "Scenes JSON");
  st->add_option("--label-maps", a.label_maps, "Directory of label map PNGs");
  st->add_option("--unlabeled", a.unlabeled);
  st->add_option("--lexicon", a.lexicon);
  st->add_option("--out", a.out, "Count table")->required();

  auto* ev = app.add_subcommand("evaluate", "Correlate embedding similarity with co-occurrence");
  ev->add_option("--emb", a.emb)->required();
  ev->add_option("--stats", a.stats)->required();
  ev->add_option("--lexicon", a.lexicon);
  ev->add_option("--scatter", a.scatter, "Write per-pair data here");
  ev->add_flag("--no-stuff-stuff", a.no_stuff_stuff, "Leave out stuff-stuff pairs");
  ev->add_flag("--skip-missing", a.skip_missing, "Skip classes absent from the embedding");

  auto* dt = app.add_subcommand("detect", "Score the things of one label map");
  dt->add_option("--emb", a.emb)->required();
  dt->add_option("--label-map", a.label_map)->required();
  dt->add_option("--lexicon", a.lexicon);
  dt->add_option("--image-id", a.image_id);
  dt->add_option("--stuff", a.stuff, "JSON array overriding the stuff classes");
  dt->add_option("--unlabeled", a.unlabeled);
  dt->add_option("--threshold", a.detector.similarity_threshold);
  dt->add_option("--min-area", a.detector.min_area_fraction);
  dt->add_option("--dilation", a.detector.dilation_radius);
  dt->add_option("--mask-out", a.mask_out, "Write the merged removal mask");

  auto* ip = app.add_subcommand("inpaint", "Fill a masked region of an image");
  ip->add_option("--image", a.image)->required();
  ip->add_option("--mask", a.mask)->required();
  ip->add_option("--out", a.out)->required();
  ip->add_option("--patch", a.inpaint.patch_size);
  ip->add_option("--stride", a.inpaint.search_stride);
  ip->add_option("--coarse-iters", a.inpaint.coarse_iters);
  ip->add_option("--blend", a.inpaint.blend_width);
  ip->add_option("--composite", a.composite, "Write a before/after image");

  auto* rn = app.add_subcommand("run", "Run the full pipeline from a config file");
  rn->add_option("--config", a.config)->required();
  rn->add_option("--workers", a.workers);

  auto* rp = app.add_subcommand("report", "Summarize a run manifest");
  rp->add_option("--manifest", a.manifest)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << app.help() << '\n';
    return report_error(2, "usage", e.what());
  }

  try {
    if (simd == "scalar") simd::select_backend(simd::Backend::kScalar);
    else if (simd == "avx2") simd::select_backend(simd::Backend::kAvx2);
    else if (simd == "neon") simd::select_backend(simd::Backend::kNeon);
    else if (simd != "auto") fail(ErrorCode::kInvalidArgument, "unknown --simd value '" + simd + "'");

    if (*bc) return cmd_build_corpus(a);
    if (*te) return cmd_train(a);
    if (*pj) return cmd_project(a);
    if (*st) return cmd_stats(a);
    if (*ev) return cmd_evaluate(a);
    if (*dt) return cmd_detect(a);
    if (*ip) return cmd_inpaint(a);
    if (*rn) return cmd_run(a);
    if (*rp) return cmd_report(a);
  } catch (const Error& e) {
    return report_error(int(e.code()), std::string(to_string(e.code())), e.what());
  } catch (const std::exception& e) {
    return report_error(1, "internal", e.what());
  }
  return 1;
}
