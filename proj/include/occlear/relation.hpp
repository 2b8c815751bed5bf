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

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "occlear/embedding.hpp"
#include "occlear/lexicon.hpp"
#include "occlear/mask.hpp"

namespace occlear {

// Lexicon class ids resolved to embedding rows through their corpus token.
class ClassSpace {
 public:
  ClassSpace(const EmbeddingMatrix& emb, const ClassLexicon& lexicon)
      : emb_(&emb), lexicon_(&lexicon) {}

  const EmbeddingMatrix& embedding() const { return *emb_; }
  const ClassLexicon& lexicon() const { return *lexicon_; }

  bool covers(int class_id) const;
  // Throws kNotFound when the class token is not in the vocabulary.
  std::span<const double> vector(int class_id) const;

 private:
  const EmbeddingMatrix* emb_;
  const ClassLexicon* lexicon_;
};

// What the relation predictor sees for one image: thing classes T, stuff
// classes S and the pixel mask of each thing class.
struct SceneContext {
  std::int64_t image_id = 0;
  std::set<int> things;
  std::set<int> stuffs;
  std::map<int, BinaryMask> thing_masks;

  // Throws if things and stuffs intersect or a mask is empty or mis-sized.
  void validate(int width = -1, int height = -1) const;
};

struct DetectorConfig {
  double similarity_threshold = 0.4;
  double min_area_fraction = 0.02;
  int dilation_radius = 5;
  // Area filter before dilation (default) or after.
  bool filter_before_dilation = true;

  void validate() const;
};

enum class Verdict { kKeep, kRemove };

std::string_view to_string(Verdict verdict);

struct OcclusionEntry {
  int class_id = 0;
  std::string name;
  // Mean cosine against the context; empty when the context is empty.
  std::optional<double> raw_score;
  double normalized_score = 0.0;
  Verdict verdict = Verdict::kKeep;
  int context_size = 0;

  bool no_context() const { return !raw_score.has_value(); }
};

struct OcclusionReport {
  std::int64_t image_id = 0;
  double similarity_threshold = 0.4;
  std::vector<OcclusionEntry> entries;

  std::vector<int> removed() const;
};

// Mean cosine similarity between thing `i` and every other class of the
// scene, C = (S u T) \ {i}. nullopt when C is empty.
std::optional<double> relation_score(const ClassSpace& space, const SceneContext& scene, int thing);

inline double normalize_score(double raw) { return (raw + 1.0) / 2.0; }

// One entry per thing, in ascending class id. Remove iff the normalized
// score is strictly below the threshold and the context is non-empty.
OcclusionReport detect_occlusions(const ClassSpace& space, const SceneContext& scene,
                                  const DetectorConfig& config);

struct MergedMask {
  BinaryMask mask;
  // Remove-verdict classes with no surviving mask; treated as Keep.
  std::vector<int> missing;
};

// Pixel-wise OR of the masks of every Remove-verdict class.
MergedMask merge_occlusion_mask(const OcclusionReport& report,
                                const std::map<int, BinaryMask>& masks, int width, int height);

nlohmann::json to_json(const OcclusionReport& report);
OcclusionReport report_from_json(const nlohmann::json& j);

}  // namespace occlear
