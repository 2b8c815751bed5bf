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

#include "doctest.h"
#include "fixtures.hpp"
#include "occlear/detail/random.hpp"
#include "occlear/error.hpp"
#include "occlear/mask.hpp"

using namespace occlear;
using namespace occlear::testing;

namespace {

BinaryMask random_mask(int w, int h, double density, detail::Rng& rng) {
  BinaryMask m(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (rng.uniform() < density) m.set(x, y);
    }
  }
  return m;
}

}  // namespace

TEST_CASE("label map to masks") {
  const auto lex = toy_lexicon();
  LabelMap sky{4, 4, std::vector<int>(16, lex.id_of("sky"))};
  auto s = masks_from_labelmap(sky, lex);
  CHECK(s.things.empty());
  CHECK(s.stuffs == std::set<int>{lex.id_of("sky")});

  LabelMap half{6, 4, {}};
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 6; ++x) half.labels.push_back(x < 3 ? lex.id_of("dog") : lex.id_of("grass"));
  }
  s = masks_from_labelmap(half, lex);
  CHECK(s.things.at(lex.id_of("dog")).area() == 12);
  CHECK(s.stuffs == std::set<int>{lex.id_of("grass")});

  LabelMap bad{1, 1, {99}};
  CHECK_THROWS_AS(masks_from_labelmap(bad, lex), Error);
  LabelMap unl{2, 1, {kUnlabeled, lex.id_of("dog")}};
  CHECK(masks_from_labelmap(unl, lex).things.at(lex.id_of("dog")).area() == 1);
}

TEST_CASE("per-class areas match pixel counting") {
  const auto lex = toy_lexicon();
  detail::Rng rng(6);
  LabelMap m{20, 15, {}};
  const int ids[] = {lex.id_of("dog"), lex.id_of("boat"), lex.id_of("sea")};
  for (int i = 0; i < 300; ++i) m.labels.push_back(ids[rng.below(3)]);
  const auto s = masks_from_labelmap(m, lex);
  for (int id : {ids[0], ids[1]}) {
    CHECK(s.things.at(id).area() == std::size_t(std::count(m.labels.begin(), m.labels.end(), id)));
  }
}

TEST_CASE("dilation examples") {
  BinaryMask m(7, 7);
  CHECK(dilate(m, 3).empty());
  m.set(3, 3);
  CHECK(dilate(m, 0) == m);
  const auto d1 = dilate(m, 1);
  CHECK(d1.area() == 5);
  CHECK(d1.get(3, 2));
  CHECK_FALSE(d1.get(2, 2));
  CHECK(dilate(m, 2).area() == 13);
  BinaryMask full(5, 5);
  for (int y = 0; y < 5; ++y) {
    for (int x = 0; x < 5; ++x) full.set(x, y);
  }
  CHECK(dilate(full, 2) == full);
  CHECK_THROWS_AS(dilate(m, -1), Error);
}

TEST_CASE("dilation matches brute force on random masks") {
  detail::Rng rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    const auto m = random_mask(32, 32, rng.uniform(0.002, 0.05), rng);
    const int r = int(rng.below(7));
    CAPTURE(r);
    CHECK(dilate(m, r) == brute_dilate(m, r));
  }
}

TEST_CASE("dilation is extensive and monotone") {
  detail::Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_mask(24, 18, 0.03, rng);
    auto b = a;
    b |= random_mask(24, 18, 0.02, rng);
    const int r = 1 + int(rng.below(4));
    CHECK(a.subset_of(dilate(a, r)));
    CHECK(dilate(a, r).subset_of(dilate(b, r)));
    CHECK(dilate(a, r).subset_of(dilate(a, r + 1)));
  }
}

TEST_CASE("small-mask filter boundary") {
  // 50x50 = 2500 pixels, 2% = 50.
  std::map<int, BinaryMask> masks{
      {1, rect_mask(50, 50, 0, 0, 9, 4)},    // 50 px, exactly 2%
      {2, rect_mask(50, 50, 0, 10, 4, 14)},  // 25 px, 1%
      {3, rect_mask(50, 50, 0, 20, 6, 26)},  // 49 px
  };
  const auto kept = filter_small(masks, 0.02);
  CHECK(kept.size() == 1);
  CHECK(kept.count(1) == 1);
  CHECK(filter_small({}, 0.02).empty());
  CHECK_THROWS_AS(filter_small(masks, 1.5), Error);
}

TEST_CASE("random masks are deterministic and within bounds") {
  std::vector<BinaryMask> things{rect_mask(40, 40, 5, 5, 14, 19), rect_mask(40, 40, 20, 20, 29, 27)};
  RandomMaskConfig cfg;
  cfg.min_area_fraction = 0.05;
  cfg.max_area_fraction = 0.3;
  CHECK(random_mask_from_things(things, cfg, 3) == random_mask_from_things(things, cfg, 3));
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto m = random_mask_from_things(things, cfg, seed);
    const double f = double(m.area()) / double(m.pixel_count());
    CHECK(f >= cfg.min_area_fraction);
    CHECK(f <= cfg.max_area_fraction);
  }
  RandomMaskConfig rigid;
  rigid.max_dilation = 0;
  rigid.min_area_fraction = 0.0;
  rigid.max_area_fraction = 1.0;
  const std::vector<BinaryMask> one{things[0]};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    CHECK(random_mask_from_things(one, rigid, seed).area() == things[0].area());
  }
  CHECK_THROWS_AS(random_mask_from_things(std::vector<BinaryMask>{}, cfg, 1), Error);
}

TEST_CASE("mask and label map files round trip") {
  TempDir dir("mask");
  detail::Rng rng(1);
  const auto m = random_mask(17, 9, 0.3, rng);
  save_mask(dir / "m.png", m);
  CHECK(load_mask(dir / "m.png") == m);

  LabelMap map{5, 3, {0, 1, 2, 3, kUnlabeled, 181, 0, 0, 0, 0, 7, 7, 7, 7, 7}};
  save_label_map(dir / "l.png", map);
  const auto back = load_label_map(dir / "l.png");
  CHECK(back.labels == map.labels);
  LabelMap wide{2, 1, {300, 1}};
  save_label_map(dir / "w.png", wide);
  CHECK(load_label_map(dir / "w.png").labels == wide.labels);
}
