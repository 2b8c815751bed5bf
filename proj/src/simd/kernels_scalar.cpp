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

// Reference kernels. Plain left-to-right loops; the vector variants are
// tested against these.

#include "occlear/simd/kernels.hpp"

namespace occlear::simd {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double squared_distance_scalar(const double* a, const double* b,
                               std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

float weighted_ssd_scalar(const float* a, const float* b, const float* w,
                          std::size_t n) {
  float sum = 0.0f;
  for (std::size_t i = 0; i < n; ++i) {
    const float d = a[i] - b[i];
    sum += w[i] * d * d;
  }
  return sum;
}

void bitwise_or_scalar(std::uint8_t* dst, const std::uint8_t* src,
                       std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] |= src[i];
}

constexpr KernelTable kScalar{
    Backend::kScalar,        dot_scalar,          axpy_scalar,
    squared_distance_scalar, weighted_ssd_scalar, bitwise_or_scalar,
};

}  // namespace

namespace detail {
const KernelTable* scalar_table() { return &kScalar; }
}  // namespace detail

}  // namespace occlear::simd
