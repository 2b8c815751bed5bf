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
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <vector>

#include "occlear/lexicon.hpp"

namespace occlear {

class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int width, int height);
  // `bits` holds one byte per pixel, nonzero = set.
  static BinaryMask from_bits(int width, int height, std::span<const std::uint8_t> bits);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t pixel_count() const { return bits_.size(); }
  std::size_t area() const { return area_; }
  bool empty() const { return area_ == 0; }

  bool get(int x, int y) const { return bits_[std::size_t(y) * width_ + x] != 0; }
  bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }
  void set(int x, int y, bool value = true);

  // Bytes are 0 or 1.
  std::span<const std::uint8_t> bits() const { return bits_; }
  std::span<const std::uint8_t> row(int y) const {
    return {bits_.data() + std::size_t(y) * width_, std::size_t(width_)};
  }

  bool same_shape(const BinaryMask& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }
  // Every set pixel of this mask is set in `other`.
  bool subset_of(const BinaryMask& other) const;

  // In-place OR; shapes must match.
  BinaryMask& operator|=(const BinaryMask& other);

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::size_t area_ = 0;
  std::vector<std::uint8_t> bits_;
};

inline constexpr int kUnlabeled = -1;

// Per-pixel class ids; kUnlabeled marks the reserved "unlabeled" value.
struct LabelMap {
  int width = 0;
  int height = 0;
  std::vector<int> labels;

  int at(int x, int y) const { return labels[std::size_t(y) * width + x]; }
};

// Single-channel PNG, pixel value = class id. `unlabeled_value` (255 for
// COCO-Stuff style 8-bit maps) decodes to kUnlabeled.
LabelMap load_label_map(const std::filesystem::path& path, int unlabeled_value = 255);
void save_label_map(const std::filesystem::path& path, const LabelMap& map, int unlabeled_value = 255);

struct SceneMasks {
  std::map<int, BinaryMask> things;
  std::set<int> stuffs;
};

// One mask per thing class present; stuff classes as a set. Throws on ids
// the lexicon does not know.
SceneMasks masks_from_labelmap(const LabelMap& map, const ClassLexicon& lexicon);

// Dilation by the Euclidean disc {(dx, dy) : dx^2 + dy^2 <= radius^2}.
BinaryMask dilate(const BinaryMask& mask, int radius);

// Keeps masks with area >= min_area_fraction * width * height.
std::map<int, BinaryMask> filter_small(const std::map<int, BinaryMask>& masks,
                                       double min_area_fraction);

// Masks read and written as 8-bit single-channel PNG: 0 clear, 255 set (any
// nonzero value reads as set).
BinaryMask load_mask(const std::filesystem::path& path);
void save_mask(const std::filesystem::path& path, const BinaryMask& mask);

struct RandomMaskConfig {
  double min_area_fraction = 0.01;
  double max_area_fraction = 0.5;
  int max_dilation = 8;
  bool allow_flip = true;
  int max_attempts = 100;
};

// Random hole shape for inpainting: a ground-truth thing mask, optionally
// mirrored, moved to a random position where it fits entirely, then dilated
// by a random radius in [0, max_dilation] and clipped. Resamples until the
// area fraction lies within the configured bounds.
BinaryMask random_mask_from_things(std::span<const BinaryMask> thing_masks,
                                   const RandomMaskConfig& config, std::uint64_t seed);

}  // namespace occlear
