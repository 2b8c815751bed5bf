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

// Two-stage hole filling. The coarse stage is a harmonic (diffusion) fill
// seeded by an onion-peel average; the fine stage replaces hole pixels with
// the best matching exemplar patch from the unmasked region, processing the
// hole from its boundary inward.

#include <cstdint>

#include "occlear/image.hpp"
#include "occlear/mask.hpp"

namespace occlear {

struct InpaintConfig {
  int patch_size = 9;
  int coarse_iters = 300;
  // Source patch centers are enumerated on a grid with this spacing.
  int search_stride = 2;
  // Already-refined pixels within this distance of a new patch's border are
  // feathered with it instead of kept.
  int blend_width = 2;
  // Weight of coarse-only pixels in the patch distance; known and refined
  // pixels weigh 1.
  float coarse_weight = 0.25f;
  // 0 searches every grid candidate. Otherwise a seeded random subset of
  // this size is searched (approximate, non-default).
  int max_candidates = 0;
  std::uint64_t seed = 0;

  void validate() const;
};

// Masked pixels get the iterated 4-neighbour average; everything else is
// returned bit-exact. Throws if the mask covers the whole image.
Image coarse_fill(const Image& img, const BinaryMask& mask, int iters);

// Throws if no fully unmasked source patch exists.
Image refine_patches(const Image& img, const BinaryMask& mask, const InpaintConfig& config);

Image inpaint(const Image& img, const BinaryMask& mask, const InpaintConfig& config);

}  // namespace occlear
