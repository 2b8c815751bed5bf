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

#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "occlear/detail/random.hpp"
#include "occlear/error.hpp"
#include "occlear/relation.hpp"

using namespace occlear;
using namespace occlear::testing;

namespace {

// Lexicon of n generic classes, the first half things.
ClassLexicon generic_lexicon(int n) {
  std::vector<LabelSpec> specs;
  for (int i = 0; i < n; ++i) {
    specs.push_back({"c" + std::to_string(i), i < n / 2 ? ClassKind::kThing : ClassKind::kStuff, {}});
  }
  return ClassLexicon::from_specs(specs);
}

EmbeddingMatrix random_embedding(const ClassLexicon& lex, int dim, std::uint64_t& state) {
  std::vector<std::string> vocab;
  for (const auto& l : lex.labels()) vocab.push_back(lex.corpus_token(l.id));
  EmbeddingMatrix emb(vocab, dim);
  for (int r = 0; r < int(vocab.size()); ++r) {
    const auto v = random_unit_vector(dim, state);
    std::copy(v.begin(), v.end(), emb.vector(r).begin());
  }
  return emb;
}

std::vector<std::string> tokens_of(const ClassLexicon& lex) {
  std::vector<std::string> t;
  for (const auto& l : lex.labels()) t.push_back(lex.corpus_token(l.id));
  return t;
}

// Embedding where c0 has the given cosine with every other class.
EmbeddingMatrix pinned_embedding(const ClassLexicon& lex, double target) {
  std::vector<std::string> vocab = tokens_of(lex);
  const int dim = int(vocab.size()) + 1;
  EmbeddingMatrix emb(vocab, dim);
  emb.vector(0)[0] = 1.0;
  for (int r = 1; r < int(vocab.size()); ++r) {
    emb.vector(r)[0] = target;
    emb.vector(r)[r] = std::sqrt(1 - target * target);
  }
  return emb;
}

}  // namespace

TEST_CASE("singleton context equals the pair cosine") {
  const auto lex = toy_lexicon();
  const auto emb = toy_embedding();
  const ClassSpace space(emb, lex);
  SceneContext s;
  s.things = {lex.id_of("dog")};
  s.stuffs = {lex.id_of("grass")};
  const auto d = relation_score(space, s, lex.id_of("dog"));
  REQUIRE(d.has_value());
  CHECK(*d == doctest::Approx(cosine_similarity(space.vector(lex.id_of("dog")), space.vector(lex.id_of("grass")))));
}

TEST_CASE("four-class scene matches brute force") {
  const auto lex = generic_lexicon(4);
  std::uint64_t state = 100;
  const auto emb = random_embedding(lex, 4, state);
  const ClassSpace space(emb, lex);
  SceneContext s;
  s.things = {0, 1};
  s.stuffs = {2, 3};
  const auto d = relation_score(space, s, 0);
  const auto want = brute_relation_score(emb, tokens_of(lex), s.things, s.stuffs, 0);
  CHECK(std::abs(*d - *want) < 1e-12);
}

TEST_CASE("random scenes agree with the oracle") {
  const auto lex = generic_lexicon(12);
  std::uint64_t state = 1;
  detail::Rng rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const auto emb = random_embedding(lex, 2 + int(rng.below(8)), state);
    const ClassSpace space(emb, lex);
    SceneContext s;
    const int k = 1 + int(rng.below(6));
    while (int(s.things.size() + s.stuffs.size()) < k) {
      const int id = int(rng.below(12));
      if (s.things.count(id) || s.stuffs.count(id)) continue;
      (id < 6 ? s.things : s.stuffs).insert(id);
    }
    for (int t : s.things) {
      const auto got = relation_score(space, s, t);
      const auto want = brute_relation_score(emb, tokens_of(lex), s.things, s.stuffs, t);
      REQUIRE(got.has_value() == want.has_value());
      if (got) CHECK(std::abs(*got - *want) <= 1e-9);
    }
  }
}

TEST_CASE("empty context keeps the thing") {
  const auto lex = toy_lexicon();
  const auto emb = toy_embedding();
  const ClassSpace space(emb, lex);
  SceneContext s;
  s.things = {lex.id_of("giraffe")};
  const auto r = detect_occlusions(space, s, DetectorConfig{});
  REQUIRE(r.entries.size() == 1);
  CHECK(r.entries[0].no_context());
  CHECK(r.entries[0].verdict == Verdict::kKeep);
  CHECK(r.entries[0].context_size == 0);
}

TEST_CASE("threshold is a strict less-than") {
  const auto lex = generic_lexicon(2);
  SceneContext s;
  s.things = {0};
  s.stuffs = {1};
  // normalized 0.39 and 0.4 correspond to raw -0.22 and -0.2.
  const auto e39 = pinned_embedding(lex, -0.22);
  const auto r39 = detect_occlusions(ClassSpace(e39, lex), s, DetectorConfig{});
  CHECK(r39.entries[0].normalized_score == doctest::Approx(0.39));
  CHECK(r39.entries[0].verdict == Verdict::kRemove);

  const auto lex3 = generic_lexicon(3);
  const auto e40 = pinned_embedding(lex3, 0.0);
  SceneContext s3;
  s3.things = {0};
  s3.stuffs = {1};
  DetectorConfig half;
  half.similarity_threshold = 0.5;
  const auto r40 = detect_occlusions(ClassSpace(e40, lex3), s3, half);
  CHECK(r40.entries[0].normalized_score == 0.5);
  CHECK(r40.entries[0].verdict == Verdict::kKeep);
}

TEST_CASE("zero things gives an empty report") {
  const auto lex = toy_lexicon();
  const auto emb = toy_embedding();
  SceneContext s;
  s.stuffs = {lex.id_of("sky")};
  CHECK(detect_occlusions(ClassSpace(emb, lex), s, DetectorConfig{}).entries.empty());
}

TEST_CASE("remove set grows with the threshold") {
  const auto lex = generic_lexicon(10);
  std::uint64_t state = 9;
  const auto emb = random_embedding(lex, 3, state);
  const ClassSpace space(emb, lex);
  SceneContext s;
  s.things = {0, 1, 2, 3, 4};
  s.stuffs = {5, 7};
  std::vector<int> prev;
  for (int step = 0; step <= 20; ++step) {
    DetectorConfig cfg;
    cfg.similarity_threshold = step / 20.0;
    const auto removed = detect_occlusions(space, s, cfg).removed();
    CHECK(std::includes(removed.begin(), removed.end(), prev.begin(), prev.end()));
    prev = removed;
  }
}

TEST_CASE("scores do not depend on vector length") {
  const auto lex = generic_lexicon(6);
  std::uint64_t state = 50;
  const auto emb = random_embedding(lex, 5, state);
  EmbeddingMatrix scaled = emb;
  for (int r = 0; r < int(emb.size()); ++r) {
    for (double& x : scaled.vector(r)) x *= 0.5 + r;
  }
  SceneContext s;
  s.things = {0, 1, 2};
  s.stuffs = {3, 4};
  const auto a = detect_occlusions(ClassSpace(emb, lex), s, DetectorConfig{});
  const auto b = detect_occlusions(ClassSpace(scaled, lex), s, DetectorConfig{});
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    CHECK(std::abs(a.entries[i].normalized_score - b.entries[i].normalized_score) < 1e-12);
  }
}

TEST_CASE("missing class vector and malformed scenes") {
  const auto lex = toy_lexicon();
  EmbeddingMatrix emb({"dog", "grass"}, 2);
  emb.vector(0)[0] = 1;
  emb.vector(1)[1] = 1;
  const ClassSpace space(emb, lex);
  CHECK(space.covers(lex.id_of("dog")));
  CHECK_FALSE(space.covers(lex.id_of("sea")));
  SceneContext s;
  s.things = {lex.id_of("dog")};
  s.stuffs = {lex.id_of("sea")};
  CHECK_THROWS_AS(detect_occlusions(space, s, DetectorConfig{}), Error);
  SceneContext overlap;
  overlap.things = {1};
  overlap.stuffs = {1};
  CHECK_THROWS_AS(overlap.validate(), Error);
  DetectorConfig bad;
  bad.similarity_threshold = 1.5;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("merged mask and report serialization") {
  const auto lex = toy_lexicon();
  const auto emb = toy_embedding();
  const ClassSpace space(emb, lex);
  const int dog = lex.id_of("dog"), giraffe = lex.id_of("giraffe");
  SceneContext s;
  s.things = {dog, giraffe};
  s.stuffs = {lex.id_of("grass")};
  const auto report = detect_occlusions(space, s, DetectorConfig{});
  CHECK(report.removed() == std::vector<int>{giraffe});

  std::map<int, BinaryMask> masks{{dog, rect_mask(10, 10, 0, 0, 3, 3)}, {giraffe, rect_mask(10, 10, 2, 2, 6, 6)}};
  const auto merged = merge_occlusion_mask(report, masks, 10, 10);
  CHECK(merged.mask == masks.at(giraffe));
  CHECK(merged.missing.empty());
  const auto none = merge_occlusion_mask(report, {{dog, masks.at(dog)}}, 10, 10);
  CHECK(none.mask.empty());
  CHECK(none.missing == std::vector<int>{giraffe});

  const auto back = report_from_json(to_json(report));
  REQUIRE(back.entries.size() == report.entries.size());
  for (std::size_t i = 0; i < back.entries.size(); ++i) {
    CHECK(back.entries[i].class_id == report.entries[i].class_id);
    CHECK(back.entries[i].verdict == report.entries[i].verdict);
    CHECK(back.entries[i].normalized_score == report.entries[i].normalized_score);
  }
}

TEST_CASE("overlapping removals merge to the pixelwise union") {
  detail::Rng rng(4);
  OcclusionReport report;
  std::map<int, BinaryMask> masks;
  BinaryMask want(16, 16);
  for (int id = 0; id < 3; ++id) {
    BinaryMask m(16, 16);
    for (int i = 0; i < 60; ++i) m.set(int(rng.below(16)), int(rng.below(16)));
    OcclusionEntry e;
    e.class_id = id;
    e.verdict = Verdict::kRemove;
    report.entries.push_back(e);
    for (int y = 0; y < 16; ++y) {
      for (int x = 0; x < 16; ++x) {
        if (m.get(x, y)) want.set(x, y);
      }
    }
    masks.emplace(id, m);
  }
  CHECK(merge_occlusion_mask(report, masks, 16, 16).mask == want);
}
