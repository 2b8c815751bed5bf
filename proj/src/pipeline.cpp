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

#include "occlear/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "occlear/corpus.hpp"
#include "occlear/error.hpp"
#include "occlear/simd/kernels.hpp"

namespace fs = std::filesystem;

namespace occlear {
namespace {

nlohmann::json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(std::filesystem::exists(path) ? ErrorCode::kIo : ErrorCode::kNotFound, "cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kInvalidData, path.string() + " is not valid JSON: " + e.what());
  }
}

fs::path resolve(const nlohmann::json& j, const char* key, const fs::path& base) {
  if (!j.contains(key) || j[key].is_null()) return {};
  fs::path p = j[key].get<std::string>();
  return p.is_absolute() ? p : base / p;
}

template <class T>
void maybe(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j[key].get<T>();
}

std::int64_t id_from_stem(const std::string& stem, std::int64_t fallback) {
  std::int64_t v = 0;
  auto res = std::from_chars(stem.data(), stem.data() + stem.size(), v);
  return (res.ec == std::errc() && res.ptr == stem.data() + stem.size()) ? v : fallback;
}

std::vector<fs::path> png_files(const fs::path& dir) {
  std::vector<fs::path> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".png" &&
        e.path().stem().extension().empty()) {
      out.push_back(e.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<std::set<int>> read_stuff_override(const fs::path& path, const ClassLexicon& lexicon) {
  if (!fs::exists(path)) return std::nullopt;
  const auto j = read_json_file(path);
  if (!j.is_array()) fail(ErrorCode::kInvalidData, path.string() + " must be an array of class names");
  std::set<int> out;
  for (const auto& name : j) {
    const int id = lexicon.id_of(name.get<std::string>());
    if (lexicon.label(id).kind != ClassKind::kStuff) {
      fail(ErrorCode::kInvalidData, "'" + lexicon.label(id).name + "' in " + path.string() + " is not a stuff class");
    }
    out.insert(id);
  }
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
}

}  // namespace

void PipelineConfig::validate() const {
  detector.validate();
  inpaint.validate();
  train.validate();
  if (workers < 1) fail(ErrorCode::kInvalidArgument, "workers must be >= 1");
  auto need = [](const fs::path& p, const char* what) {
    if (p.empty()) fail(ErrorCode::kInvalidArgument, std::string(what) + " is not set");
    if (!fs::exists(p)) fail(ErrorCode::kNotFound, std::string(what) + " " + p.string() + " does not exist");
  };
  need(lexicon_file, "lexicon file");
  need(label_map_dir, "label map directory");
  need(image_dir, "image directory");
  if (output_dir.empty()) fail(ErrorCode::kInvalidArgument, "output directory is not set");
  if (!embedding_file.empty() && fs::exists(embedding_file)) return;
  if (captions_file.empty()) {
    fail(ErrorCode::kInvalidArgument, "either an existing embedding file or a captions file is required");
  }
  need(captions_file, "captions file");
}

DetectorConfig detector_config_from_json(const nlohmann::json& j) {
  DetectorConfig c;
  maybe(j, "similarity_threshold", c.similarity_threshold);
  maybe(j, "min_area_fraction", c.min_area_fraction);
  maybe(j, "dilation_radius", c.dilation_radius);
  maybe(j, "filter_before_dilation", c.filter_before_dilation);
  return c;
}

InpaintConfig inpaint_config_from_json(const nlohmann::json& j) {
  InpaintConfig c;
  maybe(j, "patch_size", c.patch_size);
  maybe(j, "coarse_iters", c.coarse_iters);
  maybe(j, "search_stride", c.search_stride);
  maybe(j, "blend_width", c.blend_width);
  maybe(j, "coarse_weight", c.coarse_weight);
  maybe(j, "max_candidates", c.max_candidates);
  maybe(j, "seed", c.seed);
  return c;
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  maybe(j, "dim", c.dim);
  maybe(j, "window", c.window);
  maybe(j, "steps", c.steps);
  maybe(j, "negatives", c.negatives);
  maybe(j, "learning_rate", c.learning_rate);
  maybe(j, "min_learning_rate_fraction", c.min_learning_rate_fraction);
  maybe(j, "noise_exponent", c.noise_exponent);
  maybe(j, "seed", c.seed);
  if (j.contains("boundary")) {
    const auto b = j["boundary"].get<std::string>();
    if (b == "hard") c.boundary = BoundaryMode::kHardBoundary;
    else if (b == "literal-eop") c.boundary = BoundaryMode::kLiteralEop;
    else fail(ErrorCode::kInvalidArgument, "boundary must be 'hard' or 'literal-eop'");
  }
  return c;
}

PipelineConfig parse_pipeline_config(const nlohmann::json& j, const fs::path& base_dir) {
  PipelineConfig c;
  try {
    c.lexicon_file = resolve(j, "lexicon", base_dir);
    c.embedding_file = resolve(j, "embeddings", base_dir);
    c.captions_file = resolve(j, "captions", base_dir);
    c.label_map_dir = resolve(j, "label_maps", base_dir);
    c.image_dir = resolve(j, "images", base_dir);
    c.output_dir = resolve(j, "output", base_dir);
    maybe(j, "unlabeled_value", c.unlabeled_value);
    maybe(j, "workers", c.workers);
    maybe(j, "composites", c.write_composites);
    maybe(j, "seed", c.seed);
    if (j.contains("detector")) c.detector = detector_config_from_json(j["detector"]);
    if (j.contains("inpaint")) c.inpaint = inpaint_config_from_json(j["inpaint"]);
    if (j.contains("train")) c.train = train_config_from_json(j["train"]);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kInvalidArgument, std::string("bad pipeline config: ") + e.what());
  }
  return c;
}

PipelineConfig load_pipeline_config(const fs::path& path) {
  return parse_pipeline_config(read_json_file(path), path.parent_path());
}

nlohmann::json to_json(const PipelineConfig& c) {
  return {
      {"lexicon", c.lexicon_file.string()},
      {"embeddings", c.embedding_file.string()},
      {"captions", c.captions_file.string()},
      {"label_maps", c.label_map_dir.string()},
      {"images", c.image_dir.string()},
      {"output", c.output_dir.string()},
      {"unlabeled_value", c.unlabeled_value},
      {"workers", c.workers},
      {"composites", c.write_composites},
      {"seed", c.seed},
      {"detector",
       {{"similarity_threshold", c.detector.similarity_threshold},
        {"min_area_fraction", c.detector.min_area_fraction},
        {"dilation_radius", c.detector.dilation_radius},
        {"filter_before_dilation", c.detector.filter_before_dilation}}},
      {"inpaint",
       {{"patch_size", c.inpaint.patch_size},
        {"coarse_iters", c.inpaint.coarse_iters},
        {"search_stride", c.inpaint.search_stride},
        {"blend_width", c.inpaint.blend_width},
        {"coarse_weight", c.inpaint.coarse_weight},
        {"max_candidates", c.inpaint.max_candidates},
        {"seed", c.inpaint.seed}}},
      {"train",
       {{"dim", c.train.dim},
        {"window", c.train.window},
        {"steps", c.train.steps},
        {"negatives", c.train.negatives},
        {"learning_rate", c.train.learning_rate},
        {"min_learning_rate_fraction", c.train.min_learning_rate_fraction},
        {"noise_exponent", c.train.noise_exponent},
        {"seed", c.train.seed},
        {"boundary", c.train.boundary == BoundaryMode::kHardBoundary ? "hard" : "literal-eop"}}},
  };
}

nlohmann::json ImageRecord::to_json(bool include_timings) const {
  nlohmann::json j{
      {"image", image},
      {"image_id", image_id},
      {"status", status},
      {"things", things},
      {"stuffs", stuffs},
      {"removed_area", removed_area},
      {"removed_fraction", removed_fraction},
      {"missing_masks", missing_masks},
      {"passed_through", passed_through},
      {"output", output},
  };
  if (!error.empty()) j["error"] = error;
  j["report"] = report ? occlear::to_json(*report) : nlohmann::json(nullptr);
  if (include_timings) j["millis"] = millis;
  return j;
}

void RunManifest::append(ImageRecord record) {
  std::lock_guard lock(*mu_);
  records_.push_back(std::move(record));
}

std::vector<ImageRecord> RunManifest::records() const {
  std::vector<ImageRecord> out;
  {
    std::lock_guard lock(*mu_);
    out = records_;
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.image < b.image; });
  return out;
}

std::size_t RunManifest::size() const {
  std::lock_guard lock(*mu_);
  return records_.size();
}

nlohmann::json RunManifest::to_json(bool include_timings) const {
  nlohmann::json recs = nlohmann::json::array();
  for (const auto& r : records()) recs.push_back(r.to_json(include_timings));
  return {{"tool", "occlear"},
          {"version", tool_version},
          {"simd_backend", simd_backend},
          {"config", config},
          {"records", recs}};
}

std::map<int, BinaryMask> clean_thing_masks(const std::map<int, BinaryMask>& raw,
                                            const DetectorConfig& config) {
  auto dilate_all = [&](const std::map<int, BinaryMask>& in) {
    std::map<int, BinaryMask> out;
    for (const auto& [id, m] : in) out.emplace(id, dilate(m, config.dilation_radius));
    return out;
  };
  if (config.filter_before_dilation) return dilate_all(filter_small(raw, config.min_area_fraction));
  return filter_small(dilate_all(raw), config.min_area_fraction);
}

SceneContext scene_from_label_map(const LabelMap& map, const ClassLexicon& lexicon,
                                  std::int64_t image_id, const DetectorConfig* hygiene) {
  SceneMasks masks = masks_from_labelmap(map, lexicon);
  SceneContext scene;
  scene.image_id = image_id;
  scene.stuffs = std::move(masks.stuffs);
  scene.thing_masks = hygiene ? clean_thing_masks(masks.things, *hygiene) : std::move(masks.things);
  for (const auto& [id, m] : scene.thing_masks) scene.things.insert(id);
  return scene;
}

std::vector<SceneContext> parse_scenes(const nlohmann::json& j, const ClassLexicon& lexicon) {
  if (!j.is_array()) fail(ErrorCode::kInvalidData, "scenes file must hold an array");
  std::vector<SceneContext> out;
  try {
    for (const auto& s : j) {
      SceneContext scene;
      scene.image_id = s.value("image_id", std::int64_t(out.size()));
      for (const auto& n : s.value("things", nlohmann::json::array())) {
        scene.things.insert(lexicon.id_of(n.get<std::string>()));
      }
      for (const auto& n : s.value("stuffs", nlohmann::json::array())) {
        scene.stuffs.insert(lexicon.id_of(n.get<std::string>()));
      }
      scene.validate();
      out.push_back(std::move(scene));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kInvalidData, std::string("malformed scenes file: ") + e.what());
  }
  return out;
}

std::vector<SceneContext> scenes_from_label_maps(const fs::path& dir, const ClassLexicon& lexicon,
                                                 int unlabeled_value) {
  if (!fs::is_directory(dir)) fail(ErrorCode::kNotFound, "label map directory " + dir.string() + " not found");
  std::vector<SceneContext> out;
  for (const auto& path : png_files(dir)) {
    const auto map = load_label_map(path, unlabeled_value);
    out.push_back(scene_from_label_map(map, lexicon, id_from_stem(path.stem().string(), std::int64_t(out.size()))));
    out.back().thing_masks.clear();
  }
  return out;
}

EmbeddingMatrix prepare_embeddings(const PipelineConfig& config, const ClassLexicon& lexicon) {
  if (!config.embedding_file.empty() && fs::exists(config.embedding_file)) {
    return load_embeddings(config.embedding_file);
  }
  const auto captions = load_coco_captions(config.captions_file);
  const Corpus corpus = build_corpus(captions, lexicon, CorpusMode::kModified);
  EmbeddingMatrix emb = train(corpus, config.train);
  fs::create_directories(config.output_dir);
  save_embeddings(config.output_dir / "embeddings.vec", emb);
  return emb;
}

ImageResult process_image(const Image& image, const LabelMap& map, const ClassSpace& space,
                          std::int64_t image_id, const DetectorConfig& detector,
                          const InpaintConfig& inpaint_config,
                          const std::optional<std::set<int>>& stuff_override) {
  if (map.width != image.width || map.height != image.height) {
    fail(ErrorCode::kInvalidData, "label map and image sizes differ");
  }
  ImageResult r;
  r.scene = scene_from_label_map(map, space.lexicon(), image_id, &detector);
  if (stuff_override) r.scene.stuffs = *stuff_override;
  r.report = detect_occlusions(space, r.scene, detector);
  r.merged = merge_occlusion_mask(r.report, r.scene.thing_masks, image.width, image.height);
  if (!r.merged.mask.empty()) r.output = inpaint(image, r.merged.mask, inpaint_config);
  return r;
}

RunManifest run_pipeline(const PipelineConfig& config) {
  config.validate();
  const ClassLexicon lexicon = load_lexicon(config.lexicon_file);
  const EmbeddingMatrix emb = prepare_embeddings(config, lexicon);
  const ClassSpace space(emb, lexicon);

  fs::create_directories(config.output_dir / "images");
  fs::create_directories(config.output_dir / "masks");
  write_text(config.output_dir / "labels.tsv", lexicon_id_table(lexicon));

  RunManifest manifest;
  manifest.config = to_json(config);
  manifest.simd_backend = std::string(simd::to_string(simd::active().backend));

  const auto images = png_files(config.image_dir);
  if (images.empty()) {
    std::cerr << "warning: no PNG images in " << config.image_dir << '\n';
  }

  auto process = [&](std::size_t index) {
    const fs::path& path = images[index];
    const auto start = std::chrono::steady_clock::now();
    ImageRecord rec;
    rec.image = path.stem().string();
    rec.image_id = id_from_stem(rec.image, std::int64_t(index));
    try {
      const fs::path map_path = config.label_map_dir / (rec.image + ".png");
      if (!fs::exists(map_path)) fail(ErrorCode::kNotFound, "missing label map " + map_path.string());
      const LabelMap map = load_label_map(map_path, config.unlabeled_value);
      const Image image = load_image(path);
      const auto stuffs = read_stuff_override(config.label_map_dir / (rec.image + ".stuff.json"), lexicon);

      const ImageResult result =
          process_image(image, map, space, rec.image_id, config.detector, config.inpaint, stuffs);
      for (int id : result.scene.things) rec.things.push_back(lexicon.label(id).name);
      for (int id : result.scene.stuffs) rec.stuffs.push_back(lexicon.label(id).name);
      rec.report = result.report;
      rec.removed_area = result.merged.mask.area();
      rec.removed_fraction = double(rec.removed_area) / double(image.pixel_count());
      for (int id : result.merged.missing) {
        rec.missing_masks.push_back(lexicon.label(id).name);
        std::cerr << "warning: " << rec.image << ": class '" << lexicon.label(id).name
                  << "' marked for removal has no surviving mask; kept\n";
      }

      rec.output = "images/" + rec.image + ".png";
      const fs::path out_path = config.output_dir / rec.output;
      if (!result.output) {
        rec.passed_through = true;
        fs::copy_file(path, out_path, fs::copy_options::overwrite_existing);
      } else {
        save_image(out_path, *result.output);
        save_mask(config.output_dir / "masks" / (rec.image + ".png"), result.merged.mask);
        if (config.write_composites) {
          save_image(config.output_dir / "images" / (rec.image + ".compare.png"),
                     side_by_side(image, *result.output));
        }
      }
    } catch (const Error& e) {
      rec.status = std::string(to_string(e.code()));
      rec.error = e.what();
    } catch (const std::exception& e) {
      rec.status = "internal";
      rec.error = e.what();
    }
    rec.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    manifest.append(std::move(rec));
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < images.size(); i = next++) process(i);
  };
  const int n_workers = std::min<int>(config.workers, int(std::max<std::size_t>(images.size(), 1)));
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
  }

  write_text(config.output_dir / "manifest.json", manifest.to_json().dump(2) + "\n");
  return manifest;
}

}  // namespace occlear
