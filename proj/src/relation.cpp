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

#include "occlear/relation.hpp"

#include <algorithm>
#include <cmath>

#include "occlear/error.hpp"

namespace occlear {

bool ClassSpace::covers(int class_id) const {
  return lexicon_->contains(class_id) && emb_->find(lexicon_->corpus_token(class_id)).has_value();
}

std::span<const double> ClassSpace::vector(int class_id) const {
  const ClassLabel& label = lexicon_->label(class_id);
  auto row = emb_->find(lexicon_->corpus_token(class_id));
  if (!row) fail(ErrorCode::kNotFound, "class '" + label.name + "' has no embedding vector");
  return emb_->vector(*row);
}

void SceneContext::validate(int width, int height) const {
  for (int t : things) {
    if (stuffs.count(t)) {
      fail(ErrorCode::kInvalidData, "class " + std::to_string(t) + " is both thing and stuff");
    }
  }
  for (const auto& [id, m] : thing_masks) {
    if (!things.count(id)) fail(ErrorCode::kInvalidData, "mask for class not in the thing set");
    if (m.empty()) fail(ErrorCode::kInvalidData, "empty mask for class " + std::to_string(id));
    if (width >= 0 && (m.width() != width || m.height() != height)) {
      fail(ErrorCode::kInvalidData, "mask size differs from the image size");
    }
  }
}

void DetectorConfig::validate() const {
  if (!(similarity_threshold >= 0.0 && similarity_threshold <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "similarity_threshold must be in [0, 1]");
  }
  if (!(min_area_fraction >= 0.0 && min_area_fraction < 1.0)) {
    fail(ErrorCode::kInvalidArgument, "min_area_fraction must be in [0, 1)");
  }
  if (dilation_radius < 0) fail(ErrorCode::kInvalidArgument, "dilation_radius must be >= 0");
}

std::string_view to_string(Verdict verdict) {
  return verdict == Verdict::kKeep ? "keep" : "remove";
}

std::vector<int> OcclusionReport::removed() const {
  std::vector<int> out;
  for (const auto& e : entries) {
    if (e.verdict == Verdict::kRemove) out.push_back(e.class_id);
  }
  return out;
}

std::optional<double> relation_score(const ClassSpace& space, const SceneContext& scene, int thing) {
  if (!scene.things.count(thing)) {
    fail(ErrorCode::kInvalidArgument, "class " + std::to_string(thing) + " is not a thing of this scene");
  }
  const auto vi = space.vector(thing);
  double sum = 0.0;
  int count = 0;
  auto accumulate = [&](const std::set<int>& classes) {
    for (int j : classes) {
      if (j == thing) continue;
      sum += cosine_similarity(vi, space.vector(j));
      ++count;
    }
  };
  accumulate(scene.stuffs);
  accumulate(scene.things);
  if (count == 0) return std::nullopt;
  return sum / count;
}

OcclusionReport detect_occlusions(const ClassSpace& space, const SceneContext& scene,
                                  const DetectorConfig& config) {
  config.validate();
  scene.validate();
  OcclusionReport report;
  report.image_id = scene.image_id;
  report.similarity_threshold = config.similarity_threshold;
  const int context = int(scene.things.size() + scene.stuffs.size()) - 1;
  for (int t : scene.things) {
    OcclusionEntry e;
    e.class_id = t;
    e.name = space.lexicon().label(t).name;
    e.context_size = context;
    e.raw_score = relation_score(space, scene, t);
    if (e.raw_score) {
      e.normalized_score = normalize_score(*e.raw_score);
      e.verdict = e.normalized_score < config.similarity_threshold ? Verdict::kRemove : Verdict::kKeep;
    } else {
      // No evidence either way: the lone object stays.
      e.normalized_score = 1.0;
      e.verdict = Verdict::kKeep;
    }
    report.entries.push_back(std::move(e));
  }
  return report;
}

MergedMask merge_occlusion_mask(const OcclusionReport& report,
                                const std::map<int, BinaryMask>& masks, int width, int height) {
  MergedMask out{BinaryMask(width, height), {}};
  for (int id : report.removed()) {
    auto it = masks.find(id);
    if (it == masks.end()) {
      out.missing.push_back(id);
      continue;
    }
    out.mask |= it->second;
  }
  return out;
}

nlohmann::json to_json(const OcclusionReport& report) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : report.entries) {
    entries.push_back({
        {"class_id", e.class_id},
        {"name", e.name},
        {"raw_score", e.raw_score ? nlohmann::json(*e.raw_score) : nlohmann::json(nullptr)},
        {"normalized_score", e.normalized_score},
        {"verdict", std::string(to_string(e.verdict))},
        {"context_size", e.context_size},
        {"no_context", e.no_context()},
    });
  }
  return {{"image_id", report.image_id},
          {"similarity_threshold", report.similarity_threshold},
          {"entries", entries}};
}

OcclusionReport report_from_json(const nlohmann::json& j) {
  OcclusionReport r;
  try {
    r.image_id = j.at("image_id").get<std::int64_t>();
    r.similarity_threshold = j.at("similarity_threshold").get<double>();
    for (const auto& je : j.at("entries")) {
      OcclusionEntry e;
      e.class_id = je.at("class_id").get<int>();
      e.name = je.at("name").get<std::string>();
      if (!je.at("raw_score").is_null()) e.raw_score = je.at("raw_score").get<double>();
      e.normalized_score = je.at("normalized_score").get<double>();
      e.verdict = je.at("verdict").get<std::string>() == "remove" ? Verdict::kRemove : Verdict::kKeep;
      e.context_size = je.at("context_size").get<int>();
      r.entries.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& ex) {
    fail(ErrorCode::kInvalidData, std::string("malformed occlusion report: ") + ex.what());
  }
  return r;
}

}  // namespace occlear
