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
#include <span>
#include <vector>

namespace occlear {

// RGB image, interleaved, values in [0, 1].
struct Image {
  int width = 0;
  int height = 0;
  std::vector<float> data;

  Image() = default;
  Image(int w, int h, float fill = 0.0f)
      : width(w), height(h), data(std::size_t(w) * h * 3, fill) {}

  static constexpr int kChannels = 3;

  std::size_t pixel_count() const { return std::size_t(width) * height; }
  float& at(int x, int y, int c) { return data[(std::size_t(y) * width + x) * 3 + c]; }
  float at(int x, int y, int c) const { return data[(std::size_t(y) * width + x) * 3 + c]; }
  std::span<float> row(int y) { return {data.data() + std::size_t(y) * width * 3, std::size_t(width) * 3}; }
  std::span<const float> row(int y) const {
    return {data.data() + std::size_t(y) * width * 3, std::size_t(width) * 3};
  }

  friend bool operator==(const Image&, const Image&) = default;
};

// Undecoded PNG samples: channels interleaved, palette images keep their
// indices, 16-bit samples are kept at full range.
struct RawRaster {
  int width = 0;
  int height = 0;
  int channels = 0;
  int bit_depth = 8;
  std::vector<std::uint16_t> samples;
};

RawRaster read_png(const std::filesystem::path& path);
// channels 1 or 3, bit_depth 8 or 16.
void write_png(const std::filesystem::path& path, const RawRaster& raster);

// Gray and gray+alpha inputs are replicated to RGB; alpha is dropped.
Image to_image(const RawRaster& raster);
// Rounds to the nearest 8-bit level. u8 -> Image -> u8 is the identity.
RawRaster to_raster8(const Image& image);

Image load_image(const std::filesystem::path& path);
void save_image(const std::filesystem::path& path, const Image& image);

// Horizontal concatenation, used for before/after composites.
Image side_by_side(const Image& left, const Image& right);

double mean_squared_error(const Image& a, const Image& b);
// Peak signal-to-noise ratio for peak value 1. Infinite for identical images.
double psnr(const Image& a, const Image& b);

}  // namespace occlear
