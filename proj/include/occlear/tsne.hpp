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

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "occlear/embedding.hpp"

namespace occlear {

// Exact O(n^2) t-SNE with the usual optimizer schedule: early exaggeration
// and low momentum for the first quarter of the run (capped at 250
// iterations), then momentum 0.8; per-coordinate adaptive gains.
struct TsneConfig {
  double perplexity = 30.0;
  int iterations = 1000;
  std::uint64_t seed = 1;
  double learning_rate = 200.0;
  double early_exaggeration = 12.0;
  double initial_momentum = 0.5;
  double final_momentum = 0.8;
};

struct TsneResult {
  std::vector<std::array<double, 2>> coords;
  // KL(P || Q) after each iteration, unexaggerated P.
  std::vector<double> kl;
};

// `data` is n x dim row-major. Throws if n < 4 or the perplexity is not in
// [1, n - 1).
TsneResult project_tsne(std::span<const double> data, std::size_t n,
                        std::size_t dim, const TsneConfig& config);
TsneResult project_tsne(const EmbeddingMatrix& emb, const TsneConfig& config);

// Symmetrized input affinities (n x n, sums to 1). Exposed for tests.
std::vector<double> tsne_affinities(std::span<const double> data, std::size_t n,
                                    std::size_t dim, double perplexity);

double tsne_kl_divergence(std::span<const double> p,
                          std::span<const std::array<double, 2>> coords);

// One "token x y" line per row.
void write_tsne(std::ostream& out, std::span<const std::string> tokens,
                std::span<const std::array<double, 2>> coords);

}  // namespace occlear
