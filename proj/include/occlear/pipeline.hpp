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
#pragma once

// End-to-end occlusion removal over a directory of images:
//
//   label map -> thing masks + stuff set -> area filter / dilation
//     -> relation scores and verdicts -> merged hole mask -> inpaint
//
// Segmentation is not computed here; each image is paired with a label map
// (ground truth or any external predictor's output) of the same stem.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "occlear/embedding.hpp"
#include "occlear/inpaint.hpp"
#include "occlear/lexicon.hpp"
#include "occlear/mask.hpp"
#include "occlear/relation.hpp"

namespace occlear {

struct PipelineConfig {
  std::filesystem::path lexicon_file;
  // Either an embedding file, or a captions file to train one from.
  std::filesystem::path embedding_file;
  std::filesystem::path captions_file;
  std::filesystem::path label_map_dir;
  std::filesystem::path image_dir;
  std::filesystem::path output_dir;
  int unlabeled_value = 255;
  int workers = 1;
  bool write_composites = false;
  std::uint64_t seed = 1;

  DetectorConfig detector;
  InpaintConfig inpaint;
  TrainConfig train;

  // Throws kInvalidArgument / kNotFound for bad values or missing paths.
  void validate() const;
};

// JSON config; relative paths are resolved against `base_dir`.
PipelineConfig parse_pipeline_config(const nlohmann::json& j, const std::filesystem::path& base_dir);
PipelineConfig load_pipeline_config(const std::filesystem::path& path);
nlohmann::json to_json(const PipelineConfig& config);

DetectorConfig detector_config_from_json(const nlohmann::json& j);
InpaintConfig inpaint_config_from_json(const nlohmann::json& j);
TrainConfig train_config_from_json(const nlohmann::json& j);

struct ImageRecord {
  std::string image;  // file stem
  std::int64_t image_id = 0;
  std::string status = "ok";  // "ok" or an error category
  std::string error;
  std::vector<std::string> things;
  std::vector<std::string> stuffs;
  std::optional<OcclusionReport> report;
  std::size_t removed_area = 0;
  double removed_fraction = 0.0;
  std::vector<std::string> missing_masks;
  bool passed_through = false;
  std::string output;  // relative to the output directory
  double millis = 0.0;

  nlohmann::json to_json(bool include_timings = true) const;
};

// Append-only record store; safe to append from several workers.
class RunManifest {
 public:
  void append(ImageRecord record);
  std::vector<ImageRecord> records() const;  // sorted by image stem
  std::size_t size() const;

  nlohmann::json config;
  std::string tool_version = OCCLEAR_VERSION;
  std::string simd_backend;

  nlohmann::json to_json(bool include_timings = true) const;

 private:
  std::unique_ptr<std::mutex> mu_ = std::make_unique<std::mutex>();
  std::vector<ImageRecord> records_;
};

// Thing masks after area filtering and dilation, in the configured order.
std::map<int, BinaryMask> clean_thing_masks(const std::map<int, BinaryMask>& raw,
                                            const DetectorConfig& config);

// Scene of one label map. With `hygiene` set, things are the classes whose
// masks survive clean_thing_masks and carry the cleaned masks.
SceneContext scene_from_label_map(const LabelMap& map, const ClassLexicon& lexicon,
                                  std::int64_t image_id,
                                  const DetectorConfig* hygiene = nullptr);

// Scenes file: [{"image_id": n, "things": [names], "stuffs": [names]}].
std::vector<SceneContext> parse_scenes(const nlohmann::json& j, const ClassLexicon& lexicon);
// Raw class presence of every label map (*.png) in a directory, sorted by
// file name.
std::vector<SceneContext> scenes_from_label_maps(const std::filesystem::path& dir,
                                                 const ClassLexicon& lexicon,
                                                 int unlabeled_value = 255);

// Loads the embedding file or, when absent, trains one from the captions
// file on the class-only corpus and writes it to the output directory.
EmbeddingMatrix prepare_embeddings(const PipelineConfig& config, const ClassLexicon& lexicon);

// Processes every *.png in image_dir. Per-image failures are recorded, not
// thrown. Writes <output>/images/, <output>/masks/, <output>/labels.tsv and
// <output>/manifest.json.
RunManifest run_pipeline(const PipelineConfig& config);

// Single-image core shared by run_pipeline and the CLI.
struct ImageResult {
  SceneContext scene;
  OcclusionReport report;
  MergedMask merged;
  std::optional<Image> output;  // empty when nothing was removed
};

ImageResult process_image(const Image& image, const LabelMap& map, const ClassSpace& space,
                          std::int64_t image_id, const DetectorConfig& detector,
                          const InpaintConfig& inpaint_config,
                          const std::optional<std::set<int>>& stuff_override = std::nullopt);

}  // namespace occlear
