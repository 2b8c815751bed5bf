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

// Data-parallel inner loops shared by the embedding, t-SNE, mask and
// inpainting code. Every kernel has a scalar reference implementation; vector
// variants (AVX2+FMA on x86-64, NEON on AArch64) are picked once at startup
// from CPU feature detection. Set OCCLEAR_SIMD=scalar|avx2|neon to override.
//
// Vector variants reassociate floating-point sums, so results agree with the
// scalar reference to rounding only. Within one backend every kernel is
// deterministic.

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace occlear::simd {

enum class Backend { kScalar, kAvx2, kNeon };

std::string_view to_string(Backend backend);

struct KernelTable {
  Backend backend;
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // sum_i (a[i] - b[i])^2
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
  // sum_i w[i] * (a[i] - b[i])^2, accumulated in float
  float (*weighted_ssd)(const float* a, const float* b, const float* w,
                        std::size_t n);
  // dst[i] |= src[i]
  void (*bitwise_or)(std::uint8_t* dst, const std::uint8_t* src, std::size_t n);
};

// Kernels for one backend. Throws occlear::Error if the backend is not
// compiled in or the CPU lacks the instructions.
const KernelTable& kernels_for(Backend backend);

bool backend_available(Backend backend);
std::vector<Backend> available_backends();

// Best backend for this CPU, honouring OCCLEAR_SIMD.
Backend detect_backend();

// Active table. Defaults to detect_backend().
const KernelTable& active();
void select_backend(Backend backend);

inline double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return active().dot(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  active().axpy(alpha, x.data(), y.data(), x.size());
}

inline double squared_distance(std::span<const double> a,
                               std::span<const double> b) {
  assert(a.size() == b.size());
  return active().squared_distance(a.data(), b.data(), a.size());
}

inline float weighted_ssd(std::span<const float> a, std::span<const float> b,
                          std::span<const float> w) {
  assert(a.size() == b.size() && a.size() == w.size());
  return active().weighted_ssd(a.data(), b.data(), w.data(), a.size());
}

inline void bitwise_or(std::span<std::uint8_t> dst,
                       std::span<const std::uint8_t> src) {
  assert(dst.size() == src.size());
  active().bitwise_or(dst.data(), src.data(), dst.size());
}

namespace detail {
// Per-backend tables; null when the backend is not compiled in.
const KernelTable* scalar_table();
const KernelTable* avx2_table();
const KernelTable* neon_table();
}  // namespace detail

}  // namespace occlear::simd
