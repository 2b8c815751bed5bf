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

// Shared fixtures and brute-force oracles for unit and acceptance tests.

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "occlear/corpus.hpp"
#include "occlear/embedding.hpp"
#include "occlear/image.hpp"
#include "occlear/inpaint.hpp"
#include "occlear/lexicon.hpp"
#include "occlear/mask.hpp"
#include "occlear/relation.hpp"

namespace occlear::testing {

// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "t");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::vector<double> random_unit_vector(int dim, std::uint64_t& state);

// ---- oracles ----

// Mean of cosines of `thing` against every other member of things u stuffs,
// each computed with plain loops.
std::optional<double> brute_relation_score(const EmbeddingMatrix& emb, const std::vector<std::string>& tokens,
                                           const std::set<int>& things, const std::set<int>& stuffs,
                                           int thing);

// Set pixel (x, y) iff some source pixel lies within Euclidean distance r.
BinaryMask brute_dilate(const BinaryMask& mask, int radius);

// All (center, context) pairs with |i - j| <= window inside each document.
std::vector<TokenPair> brute_pairs(const std::vector<std::vector<int>>& docs, int window);

double brute_cosine(std::span<const double> a, std::span<const double> b);

// ---- image fixtures ----

Image checkerboard(int size, int cell);
// Smooth plus periodic texture, values in [0, 1].
Image texture_fixture(int width, int height, int kind);
BinaryMask rect_mask(int width, int height, int x0, int y0, int x1, int y1);
// Weighted-free SSD of the hole region against ground truth.
double hole_ssd(const Image& a, const Image& b, const BinaryMask& mask);

// ---- tiny lexicon / embedding used by relation and pipeline fixtures ----

// Things: dog, boat, giraffe, person. Stuffs: grass, sky, sea, snow.
ClassLexicon toy_lexicon();
std::string toy_lexicon_json();
// Engineered 4-d vectors: dog sits near grass and sky, boat near sea and sky,
// person near snow and sky, giraffe points away from everything else.
EmbeddingMatrix toy_embedding();

// Five 48x48 images with label maps under <root>/images and <root>/labels,
// plus lexicon.json, embeddings.vec and config.json (output under
// <root>/out).
struct PipelineFixture {
  std::filesystem::path root;
  std::filesystem::path config;
  std::filesystem::path output;
  // stem -> class names expected to be removed
  std::map<std::string, std::set<std::string>> expected_removed;
};
PipelineFixture write_pipeline_fixture(const std::filesystem::path& root, int workers = 1);

std::string read_file(const std::filesystem::path& path);

}  // namespace occlear::testing
