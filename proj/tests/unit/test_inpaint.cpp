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
#include "occlear/inpaint.hpp"
#include "occlear/simd/kernels.hpp"

using namespace occlear;
using namespace occlear::testing;

namespace {

bool outside_preserved(const Image& in, const Image& out, const BinaryMask& mask) {
  for (int y = 0; y < in.height; ++y) {
    for (int x = 0; x < in.width; ++x) {
      if (mask.get(x, y)) continue;
      for (int c = 0; c < 3; ++c) {
        if (in.at(x, y, c) != out.at(x, y, c)) return false;
      }
    }
  }
  return true;
}

// Ground-truth textures with a rectangular hole; the hole is painted over
// so only the known pixels carry information.
struct Case {
  Image truth;
  Image damaged;
  BinaryMask mask;
};

std::vector<Case> texture_suite() {
  std::vector<Case> out;
  for (int kind = 0; kind < 4; ++kind) {
    Case c;
    c.truth = texture_fixture(40, 36, kind);
    c.mask = rect_mask(40, 36, 14 + kind, 12, 22 + kind, 21);
    c.damaged = c.truth;
    for (int y = 0; y < 36; ++y) {
      for (int x = 0; x < 40; ++x) {
        if (c.mask.get(x, y)) {
          for (int ch = 0; ch < 3; ++ch) c.damaged.at(x, y, ch) = ch == 0 ? 1.0f : 0.0f;
        }
      }
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

TEST_CASE("constant image is a fixed point") {
  const Image img(20, 16, 0.3f);
  const auto mask = rect_mask(20, 16, 5, 4, 12, 10);
  const Image coarse = coarse_fill(img, mask, 50);
  for (float v : coarse.data) CHECK(std::abs(v - 0.3f) < 1e-6);
  InpaintConfig cfg;
  cfg.patch_size = 5;
  const Image full = inpaint(img, mask, cfg);
  for (float v : full.data) CHECK(std::abs(v - 0.3f) < 1e-6);
}

TEST_CASE("empty mask is the identity") {
  const Image img = texture_fixture(16, 16, 1);
  const BinaryMask none(16, 16);
  CHECK(coarse_fill(img, none, 10) == img);
  CHECK(refine_patches(img, none, InpaintConfig{}) == img);
  CHECK(inpaint(img, none, InpaintConfig{}) == img);
}

TEST_CASE("harmonic fill across a black-white seam is monotone") {
  Image img(32, 12);
  for (int y = 0; y < 12; ++y) {
    for (int x = 16; x < 32; ++x) {
      for (int c = 0; c < 3; ++c) img.at(x, y, c) = 1.0f;
    }
  }
  const auto mask = rect_mask(32, 12, 14, 0, 17, 11);
  const Image out = coarse_fill(img, mask, 400);
  for (int y = 0; y < 12; ++y) {
    for (int x = 13; x < 18; ++x) CHECK(out.at(x + 1, y, 0) >= out.at(x, y, 0));
  }
}

TEST_CASE("checkerboard cell is reconstructed exactly") {
  const Image board = checkerboard(32, 4);
  const auto mask = rect_mask(32, 32, 12, 12, 15, 15);
  Image damaged = board;
  for (int y = 12; y < 16; ++y) {
    for (int x = 12; x < 16; ++x) {
      for (int c = 0; c < 3; ++c) damaged.at(x, y, c) = 0.5f;
    }
  }
  InpaintConfig cfg;
  cfg.patch_size = 5;
  cfg.search_stride = 1;
  const Image out = inpaint(damaged, mask, cfg);
  for (std::size_t i = 0; i < out.data.size(); ++i) CHECK(std::abs(out.data[i] - board.data[i]) <= 1e-6);
}

TEST_CASE("pixels outside the mask are preserved bit-exactly") {
  detail::Rng rng(21);
  for (const auto& c : texture_suite()) {
    CHECK(outside_preserved(c.damaged, coarse_fill(c.damaged, c.mask, 100), c.mask));
    InpaintConfig cfg;
    cfg.patch_size = 7;
    CHECK(outside_preserved(c.damaged, inpaint(c.damaged, c.mask, cfg), c.mask));
    cfg.max_candidates = 40;
    cfg.seed = rng.next();
    CHECK(outside_preserved(c.damaged, inpaint(c.damaged, c.mask, cfg), c.mask));
  }
}

TEST_CASE("refinement beats the coarse fill on the texture suite") {
  for (const auto& c : texture_suite()) {
    InpaintConfig cfg;
    cfg.patch_size = 7;
    cfg.search_stride = 1;
    const Image coarse = coarse_fill(c.damaged, c.mask, cfg.coarse_iters);
    const Image fine = refine_patches(coarse, c.mask, cfg);
    CHECK(hole_ssd(fine, c.truth, c.mask) <= hole_ssd(coarse, c.truth, c.mask));
    CHECK(psnr(fine, c.truth) >= psnr(coarse, c.truth));
  }
}

TEST_CASE("scalar and vector kernels give the same fill") {
  const auto suite = texture_suite();
  const auto before = simd::active().backend;
  InpaintConfig cfg;
  cfg.patch_size = 7;
  simd::select_backend(simd::Backend::kScalar);
  const Image ref = inpaint(suite[2].damaged, suite[2].mask, cfg);
  for (auto be : simd::available_backends()) {
    simd::select_backend(be);
    const Image got = inpaint(suite[2].damaged, suite[2].mask, cfg);
    double worst = 0;
    for (std::size_t i = 0; i < got.data.size(); ++i) worst = std::max(worst, double(std::abs(got.data[i] - ref.data[i])));
    CHECK(worst <= 1e-5);
  }
  simd::select_backend(before);
}

TEST_CASE("inpainting errors") {
  const Image img(10, 10, 0.5f);
  BinaryMask all(10, 10);
  for (int y = 0; y < 10; ++y) {
    for (int x = 0; x < 10; ++x) all.set(x, y);
  }
  CHECK_THROWS_AS(inpaint(img, all, InpaintConfig{}), Error);
  CHECK_THROWS_AS(inpaint(img, BinaryMask(5, 5), InpaintConfig{}), Error);
  InpaintConfig even;
  even.patch_size = 4;
  CHECK_THROWS_AS(even.validate(), Error);
  // A hole too wide for any clean 9x9 source patch.
  const auto wide = rect_mask(10, 10, 2, 2, 7, 7);
  try {
    inpaint(img, wide, InpaintConfig{});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidData);
  }
}
