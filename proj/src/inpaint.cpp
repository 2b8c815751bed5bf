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

#include "occlear/inpaint.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <vector>

#include "occlear/detail/random.hpp"
#include "occlear/error.hpp"
#include "occlear/simd/kernels.hpp"

namespace occlear {
namespace {

constexpr std::array<std::array<int, 2>, 4> kNeighbors{{{-1, 0}, {1, 0}, {0, -1}, {0, 1}}};

void check_shapes(const Image& img, const BinaryMask& mask) {
  if (mask.width() != img.width || mask.height() != img.height) {
    fail(ErrorCode::kInvalidArgument, "mask and image sizes differ");
  }
  if (mask.pixel_count() > 0 && mask.area() == mask.pixel_count()) {
    fail(ErrorCode::kInvalidArgument, "mask covers the entire image; nothing to fill from");
  }
}

// Breadth-first distance (in 4-steps) from the unmasked region; -1 outside
// the mask.
std::vector<int> hole_layers(const BinaryMask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  std::vector<int> layer(mask.pixel_count(), -1);
  std::deque<int> queue;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask.get(x, y)) continue;
      for (auto [dx, dy] : kNeighbors) {
        const int nx = x + dx, ny = y + dy;
        if (mask.in_bounds(nx, ny) && !mask.get(nx, ny)) {
          layer[std::size_t(y) * w + x] = 0;
          queue.push_back(y * w + x);
          break;
        }
      }
    }
  }
  while (!queue.empty()) {
    const int p = queue.front();
    queue.pop_front();
    const int x = p % w, y = p / w;
    for (auto [dx, dy] : kNeighbors) {
      const int nx = x + dx, ny = y + dy;
      if (!mask.in_bounds(nx, ny) || !mask.get(nx, ny)) continue;
      const int q = ny * w + nx;
      if (layer[q] >= 0) continue;
      layer[q] = layer[p] + 1;
      queue.push_back(q);
    }
  }
  return layer;
}

}  // namespace

void InpaintConfig::validate() const {
  if (patch_size < 3 || patch_size % 2 == 0) fail(ErrorCode::kInvalidArgument, "patch_size must be odd and >= 3");
  if (coarse_iters < 1) fail(ErrorCode::kInvalidArgument, "coarse_iters must be >= 1");
  if (search_stride < 1) fail(ErrorCode::kInvalidArgument, "search_stride must be >= 1");
  if (blend_width < 0) fail(ErrorCode::kInvalidArgument, "blend_width must be >= 0");
  if (!(coarse_weight >= 0.0f)) fail(ErrorCode::kInvalidArgument, "coarse_weight must be >= 0");
  if (max_candidates < 0) fail(ErrorCode::kInvalidArgument, "max_candidates must be >= 0");
}

Image coarse_fill(const Image& img, const BinaryMask& mask, int iters) {
  check_shapes(img, mask);
  if (iters < 1) fail(ErrorCode::kInvalidArgument, "coarse_iters must be >= 1");
  if (mask.empty()) return img;

  const int w = img.width;
  const int h = img.height;
  std::vector<int> hole;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (mask.get(x, y)) hole.push_back(y * w + x);
    }
  }

  std::vector<double> cur(img.data.begin(), img.data.end());

  // Onion-peel initialisation: each layer takes the mean of its already
  // known 4-neighbours.
  const auto layer = hole_layers(mask);
  const int depth = *std::max_element(layer.begin(), layer.end());
  for (int l = 0; l <= depth; ++l) {
    for (int p : hole) {
      if (layer[p] != l) continue;
      const int x = p % w, y = p / w;
      std::array<double, 3> sum{};
      int n = 0;
      for (auto [dx, dy] : kNeighbors) {
        const int nx = x + dx, ny = y + dy;
        if (!mask.in_bounds(nx, ny)) continue;
        const int q = ny * w + nx;
        if (layer[q] >= 0 && layer[q] >= l) continue;
        for (int c = 0; c < 3; ++c) sum[c] += cur[std::size_t(q) * 3 + c];
        ++n;
      }
      for (int c = 0; c < 3; ++c) cur[std::size_t(p) * 3 + c] = sum[c] / n;
    }
  }

  // Jacobi sweeps of the discrete Laplace equation on the hole.
  std::vector<double> next = cur;
  for (int it = 0; it < iters; ++it) {
    for (int p : hole) {
      const int x = p % w, y = p / w;
      std::array<double, 3> sum{};
      int n = 0;
      for (auto [dx, dy] : kNeighbors) {
        const int nx = x + dx, ny = y + dy;
        if (!mask.in_bounds(nx, ny)) continue;
        const std::size_t q = std::size_t(ny) * w + nx;
        for (int c = 0; c < 3; ++c) sum[c] += cur[q * 3 + c];
        ++n;
      }
      for (int c = 0; c < 3; ++c) next[std::size_t(p) * 3 + c] = sum[c] / n;
    }
    std::swap(cur, next);
  }

  Image out = img;
  for (int p : hole) {
    for (int c = 0; c < 3; ++c) {
      out.data[std::size_t(p) * 3 + c] = std::clamp(float(cur[std::size_t(p) * 3 + c]), 0.0f, 1.0f);
    }
  }
  return out;
}

Image refine_patches(const Image& img, const BinaryMask& mask, const InpaintConfig& config) {
  config.validate();
  check_shapes(img, mask);
  if (mask.empty()) return img;

  const int w = img.width;
  const int h = img.height;
  const int half = config.patch_size / 2;

  // Summed-area table of the mask for O(1) "patch touches hole" checks.
  std::vector<int> sat(std::size_t(w + 1) * (h + 1), 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      sat[std::size_t(y + 1) * (w + 1) + x + 1] = mask.get(x, y) + sat[std::size_t(y) * (w + 1) + x + 1] +
                                                  sat[std::size_t(y + 1) * (w + 1) + x] -
                                                  sat[std::size_t(y) * (w + 1) + x];
    }
  }
  auto masked_in = [&](int x0, int y0, int x1, int y1) {
    return sat[std::size_t(y1 + 1) * (w + 1) + x1 + 1] - sat[std::size_t(y0) * (w + 1) + x1 + 1] -
           sat[std::size_t(y1 + 1) * (w + 1) + x0] + sat[std::size_t(y0) * (w + 1) + x0];
  };

  std::vector<std::array<int, 2>> sources;
  for (int cy = half; cy + half < h; cy += config.search_stride) {
    for (int cx = half; cx + half < w; cx += config.search_stride) {
      if (masked_in(cx - half, cy - half, cx + half, cy + half) == 0) sources.push_back({cx, cy});
    }
  }
  if (sources.empty()) {
    fail(ErrorCode::kInvalidData, "no fully unmasked source patch of size " +
                                      std::to_string(config.patch_size) + " exists");
  }
  if (config.max_candidates > 0 && sources.size() > std::size_t(config.max_candidates)) {
    detail::Rng rng(config.seed);
    rng.shuffle(std::span(sources));
    sources.resize(std::size_t(config.max_candidates));
    std::sort(sources.begin(), sources.end(),
              [](const auto& a, const auto& b) { return a[1] != b[1] ? a[1] < b[1] : a[0] < b[0]; });
  }

  Image out = img;
  std::vector<std::uint8_t> refined(mask.pixel_count(), 0);
  // Per-channel weights laid out like the image so patch rows are contiguous.
  std::vector<float> weight(img.data.size(), 1.0f);
  for (std::size_t p = 0; p < mask.pixel_count(); ++p) {
    if (mask.bits()[p]) std::fill_n(weight.begin() + std::ptrdiff_t(p * 3), 3, config.coarse_weight);
  }

  const auto layer = hole_layers(mask);
  std::vector<int> order;
  for (std::size_t p = 0; p < layer.size(); ++p) {
    if (layer[p] >= 0) order.push_back(int(p));
  }
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return layer[a] < layer[b]; });

  for (int p : order) {
    if (refined[p]) continue;
    const int px = p % w, py = p / w;
    const int x0 = std::max(px - half, 0), x1 = std::min(px + half, w - 1);
    const int y0 = std::max(py - half, 0), y1 = std::min(py + half, h - 1);
    const std::size_t span_len = std::size_t(x1 - x0 + 1) * 3;

    float best = std::numeric_limits<float>::infinity();
    std::array<int, 2> best_src = sources.front();
    for (const auto& s : sources) {
      float cost = 0.0f;
      for (int y = y0; y <= y1 && cost <= best; ++y) {
        const std::size_t t_off = (std::size_t(y) * w + x0) * 3;
        const std::size_t s_off = (std::size_t(s[1] + y - py) * w + (s[0] + x0 - px)) * 3;
        cost += simd::weighted_ssd(std::span<const float>(out.data).subspan(t_off, span_len),
                                   std::span<const float>(img.data).subspan(s_off, span_len),
                                   std::span<const float>(weight).subspan(t_off, span_len));
      }
      if (cost < best) {
        best = cost;
        best_src = s;
      }
    }

    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        if (!mask.get(x, y)) continue;
        const std::size_t q = std::size_t(y) * w + x;
        const std::size_t sq = std::size_t(best_src[1] + y - py) * w + (best_src[0] + x - px);
        if (!refined[q]) {
          for (int c = 0; c < 3; ++c) out.data[q * 3 + c] = img.data[sq * 3 + c];
          refined[q] = 1;
          std::fill_n(weight.begin() + std::ptrdiff_t(q * 3), 3, 1.0f);
        } else if (config.blend_width > 0) {
          const int edge = half - std::max(std::abs(x - px), std::abs(y - py));
          const float ramp = std::min(1.0f, float(edge + 1) / float(config.blend_width + 1));
          const float alpha = 0.5f * ramp;
          for (int c = 0; c < 3; ++c) {
            float& v = out.data[q * 3 + c];
            v = (1.0f - alpha) * v + alpha * img.data[sq * 3 + c];
          }
        }
      }
    }
  }
  return out;
}

Image inpaint(const Image& img, const BinaryMask& mask, const InpaintConfig& config) {
  config.validate();
  return refine_patches(coarse_fill(img, mask, config.coarse_iters), mask, config);
}

}  // namespace occlear
