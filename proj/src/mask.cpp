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

#include "occlear/mask.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "occlear/detail/random.hpp"
#include "occlear/error.hpp"
#include "occlear/image.hpp"
#include "occlear/simd/kernels.hpp"

namespace occlear {

BinaryMask::BinaryMask(int width, int height) : width_(width), height_(height) {
  if (width < 0 || height < 0) fail(ErrorCode::kInvalidArgument, "negative mask size");
  bits_.assign(std::size_t(width) * height, 0);
}

BinaryMask BinaryMask::from_bits(int width, int height, std::span<const std::uint8_t> bits) {
  BinaryMask m(width, height);
  if (bits.size() != m.bits_.size()) fail(ErrorCode::kInvalidArgument, "mask bit count mismatch");
  for (std::size_t i = 0; i < bits.size(); ++i) {
    m.bits_[i] = bits[i] ? 1 : 0;
    m.area_ += m.bits_[i];
  }
  return m;
}

void BinaryMask::set(int x, int y, bool value) {
  auto& b = bits_[std::size_t(y) * width_ + x];
  const std::uint8_t v = value ? 1 : 0;
  if (b != v) {
    area_ = value ? area_ + 1 : area_ - 1;
    b = v;
  }
}

bool BinaryMask::subset_of(const BinaryMask& other) const {
  if (!same_shape(other)) return false;
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i] && !other.bits_[i]) return false;
  }
  return true;
}

BinaryMask& BinaryMask::operator|=(const BinaryMask& other) {
  if (!same_shape(other)) fail(ErrorCode::kInvalidArgument, "OR of masks with different shapes");
  simd::bitwise_or(bits_, other.bits_);
  area_ = std::size_t(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
  return *this;
}

LabelMap load_label_map(const std::filesystem::path& path, int unlabeled_value) {
  const RawRaster raw = read_png(path);
  if (raw.channels != 1) {
    fail(ErrorCode::kInvalidData, path.string() + " is not a single-channel label map");
  }
  LabelMap map{raw.width, raw.height, {}};
  map.labels.resize(raw.samples.size());
  for (std::size_t i = 0; i < raw.samples.size(); ++i) {
    const int v = raw.samples[i];
    map.labels[i] = v == unlabeled_value ? kUnlabeled : v;
  }
  return map;
}

void save_label_map(const std::filesystem::path& path, const LabelMap& map, int unlabeled_value) {
  RawRaster raw{map.width, map.height, 1, 8, {}};
  int max_value = unlabeled_value;
  for (int v : map.labels) max_value = std::max(max_value, v);
  if (max_value > 255) raw.bit_depth = 16;
  if (max_value > 65535) fail(ErrorCode::kInvalidArgument, "class id does not fit in 16 bits");
  raw.samples.resize(map.labels.size());
  for (std::size_t i = 0; i < map.labels.size(); ++i) {
    const int v = map.labels[i];
    if (v == unlabeled_value && v != kUnlabeled) {
      fail(ErrorCode::kInvalidArgument, "class id collides with the unlabeled value");
    }
    raw.samples[i] = std::uint16_t(v == kUnlabeled ? unlabeled_value : v);
  }
  write_png(path, raw);
}

SceneMasks masks_from_labelmap(const LabelMap& map, const ClassLexicon& lexicon) {
  if (map.labels.size() != std::size_t(map.width) * map.height) {
    fail(ErrorCode::kInvalidData, "label map size does not match its dimensions");
  }
  SceneMasks out;
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) {
      const int id = map.at(x, y);
      if (id == kUnlabeled) continue;
      if (!lexicon.contains(id)) {
        fail(ErrorCode::kInvalidData, "label map contains unknown class id " + std::to_string(id));
      }
      if (lexicon.label(id).kind == ClassKind::kStuff) {
        out.stuffs.insert(id);
        continue;
      }
      auto it = out.things.find(id);
      if (it == out.things.end()) it = out.things.emplace(id, BinaryMask(map.width, map.height)).first;
      it->second.set(x, y);
    }
  }
  return out;
}

namespace {

// Row dilated horizontally by half-width w: out[x] = any(in[x-w .. x+w]).
void dilate_row(std::span<const std::uint8_t> in, int w, std::span<std::uint8_t> out) {
  const int n = int(in.size());
  int last_set = -1'000'000'000;
  // Forward pass marks pixels within w to the right of a set pixel, the
  // backward pass those within w to the left.
  for (int x = 0; x < n; ++x) {
    if (in[x]) last_set = x;
    out[x] = (x - last_set <= w) ? 1 : 0;
  }
  int next_set = 2'000'000'000;
  for (int x = n - 1; x >= 0; --x) {
    if (in[x]) next_set = x;
    if (next_set - x <= w) out[x] = 1;
  }
}

}  // namespace

BinaryMask dilate(const BinaryMask& mask, int radius) {
  if (radius < 0) fail(ErrorCode::kInvalidArgument, "dilation radius must be >= 0");
  if (radius == 0 || mask.empty()) return mask;

  const int w = mask.width();
  const int h = mask.height();
  // half_width[|dy|] = max dx with dx^2 + dy^2 <= r^2
  std::vector<int> half_width(std::size_t(radius) + 1);
  for (int dy = 0; dy <= radius; ++dy) {
    int dx = int(std::sqrt(double(radius * radius - dy * dy)));
    while (dx * dx + dy * dy > radius * radius) --dx;
    while ((dx + 1) * (dx + 1) + dy * dy <= radius * radius) ++dx;
    half_width[dy] = dx;
  }

  // Horizontal dilations, one plane per distinct half width.
  std::map<int, std::vector<std::uint8_t>> planes;
  for (int hw : half_width) {
    auto [it, inserted] = planes.try_emplace(hw);
    if (!inserted) continue;
    it->second.resize(mask.pixel_count());
    for (int y = 0; y < h; ++y) {
      dilate_row(mask.row(y), hw, std::span(it->second).subspan(std::size_t(y) * w, std::size_t(w)));
    }
  }

  std::vector<std::uint8_t> out(mask.pixel_count(), 0);
  for (int y = 0; y < h; ++y) {
    auto dst = std::span(out).subspan(std::size_t(y) * w, std::size_t(w));
    for (int dy = -radius; dy <= radius; ++dy) {
      const int sy = y + dy;
      if (sy < 0 || sy >= h) continue;
      const auto& plane = planes.at(half_width[std::size_t(std::abs(dy))]);
      simd::bitwise_or(dst, std::span(plane).subspan(std::size_t(sy) * w, std::size_t(w)));
    }
  }
  return BinaryMask::from_bits(w, h, out);
}

std::map<int, BinaryMask> filter_small(const std::map<int, BinaryMask>& masks,
                                       double min_area_fraction) {
  if (!(min_area_fraction >= 0.0 && min_area_fraction < 1.0)) {
    fail(ErrorCode::kInvalidArgument, "min_area_fraction must be in [0, 1)");
  }
  std::map<int, BinaryMask> out;
  for (const auto& [id, m] : masks) {
    const double total = double(m.pixel_count());
    // The relative slack absorbs rounding in fraction * total so that an
    // area of exactly that many pixels is kept.
    if (double(m.area()) >= min_area_fraction * total * (1.0 - 1e-12)) out.emplace(id, m);
  }
  return out;
}

BinaryMask load_mask(const std::filesystem::path& path) {
  const RawRaster raw = read_png(path);
  if (raw.channels != 1 && raw.channels != 3) {
    fail(ErrorCode::kInvalidData, path.string() + " is not a mask image");
  }
  std::vector<std::uint8_t> bits(std::size_t(raw.width) * raw.height);
  for (std::size_t p = 0; p < bits.size(); ++p) bits[p] = raw.samples[p * raw.channels] != 0;
  return BinaryMask::from_bits(raw.width, raw.height, bits);
}

void save_mask(const std::filesystem::path& path, const BinaryMask& mask) {
  RawRaster raw{mask.width(), mask.height(), 1, 8, {}};
  raw.samples.resize(mask.pixel_count());
  for (std::size_t i = 0; i < raw.samples.size(); ++i) raw.samples[i] = mask.bits()[i] ? 255 : 0;
  write_png(path, raw);
}

BinaryMask random_mask_from_things(std::span<const BinaryMask> thing_masks,
                                   const RandomMaskConfig& config, std::uint64_t seed) {
  if (thing_masks.empty()) fail(ErrorCode::kInvalidArgument, "no thing masks to sample from");
  if (config.max_dilation < 0 || config.max_attempts < 1 ||
      !(config.min_area_fraction >= 0 && config.min_area_fraction <= config.max_area_fraction)) {
    fail(ErrorCode::kInvalidArgument, "invalid random mask configuration");
  }
  const int w = thing_masks.front().width();
  const int h = thing_masks.front().height();
  for (const auto& m : thing_masks) {
    if (m.width() != w || m.height() != h) fail(ErrorCode::kInvalidArgument, "thing masks differ in size");
  }
  const double total = double(w) * h;

  detail::Rng rng(seed);
  for (int attempt = 0; attempt < config.max_attempts; ++attempt) {
    const BinaryMask& src = thing_masks[rng.below(thing_masks.size())];
    const bool flip = config.allow_flip && rng.uniform() < 0.5;
    const int radius = int(rng.below(std::uint64_t(config.max_dilation) + 1));
    if (src.empty()) continue;

    int x0 = w, y0 = h, x1 = -1, y1 = -1;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (!src.get(x, y)) continue;
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
      }
    }
    const int bw = x1 - x0 + 1;
    const int bh = y1 - y0 + 1;
    const int tx = int(rng.below(std::uint64_t(w - bw) + 1));
    const int ty = int(rng.below(std::uint64_t(h - bh) + 1));

    BinaryMask placed(w, h);
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        if (!src.get(x, y)) continue;
        const int lx = flip ? (x1 - x) : (x - x0);
        placed.set(tx + lx, ty + (y - y0));
      }
    }
    BinaryMask out = dilate(placed, radius);
    const double fraction = double(out.area()) / total;
    if (!out.empty() && fraction >= config.min_area_fraction && fraction <= config.max_area_fraction) {
      return out;
    }
  }
  fail(ErrorCode::kInvalidData, "could not sample a mask within the configured area bounds");
}

}  // namespace occlear
