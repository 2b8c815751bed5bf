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
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "occlear/corpus.hpp"

namespace occlear {

// Skip-gram with negative sampling. Defaults: 128 dimensions, window 3 and
// 100000 SGD steps (one step = one (center, context) pair plus its negative
// samples). negatives, noise_exponent and the learning rate schedule are the
// usual word2vec values.
struct TrainConfig {
  int dim = 128;
  int window = 3;
  std::int64_t steps = 100000;
  int negatives = 5;
  double learning_rate = 0.025;
  // Linear decay stops at learning_rate * min_learning_rate_fraction.
  double min_learning_rate_fraction = 1e-4;
  double noise_exponent = 0.75;
  std::uint64_t seed = 1;
  BoundaryMode boundary = BoundaryMode::kHardBoundary;

  void validate() const;
};

// Dense row-major token vectors. `vectors` are the center (input) vectors
// used for every similarity query; `context_vectors` are the output vectors
// of training and are all zero for matrices loaded from file.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  EmbeddingMatrix(std::vector<std::string> vocab, int dim);

  std::size_t size() const { return vocab_.size(); }
  int dim() const { return dim_; }
  const std::vector<std::string>& vocab() const { return vocab_; }

  std::optional<int> find(std::string_view token) const;
  int index_of(std::string_view token) const;  // throws kNotFound

  std::span<const double> vector(int row) const {
    return {vectors_.data() + std::size_t(row) * dim_, std::size_t(dim_)};
  }
  std::span<double> vector(int row) {
    return {vectors_.data() + std::size_t(row) * dim_, std::size_t(dim_)};
  }
  std::span<const double> context_vector(int row) const {
    return {context_.data() + std::size_t(row) * dim_, std::size_t(dim_)};
  }
  std::span<double> context_vector(int row) {
    return {context_.data() + std::size_t(row) * dim_, std::size_t(dim_)};
  }

  std::span<const double> data() const { return vectors_; }
  std::span<const double> context_data() const { return context_; }

  bool all_finite() const;

  friend bool operator==(const EmbeddingMatrix&, const EmbeddingMatrix&) = default;

 private:
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, int> index_;
  int dim_ = 0;
  std::vector<double> vectors_;
  std::vector<double> context_;
};

// Exactly config.steps updates over the pair stream, reshuffled with the
// seeded generator each time it is exhausted. Single-threaded and
// bit-reproducible for a given seed and SIMD backend.
EmbeddingMatrix train(const IndexedCorpus& corpus, const TrainConfig& config);
EmbeddingMatrix train(const Corpus& corpus, const TrainConfig& config);

// Per-pair SGNS objective
//   L = -log s(u_pos . v) - sum_k log s(-u_k . v)
// and its gradient with respect to the center vector v and every output
// vector (positive first, then negatives in order).
struct SgnsGradient {
  double loss = 0.0;
  std::vector<double> center;
  std::vector<std::vector<double>> outputs;
};

double sgns_loss(std::span<const double> center,
                 std::span<const std::span<const double>> outputs);
SgnsGradient sgns_gradient(std::span<const double> center,
                           std::span<const std::span<const double>> outputs);

// dot(u, v) / (|u| |v|) clamped to [-1, 1]. Throws on a zero vector.
double cosine_similarity(std::span<const double> u, std::span<const double> v);

struct Neighbor {
  std::string token;
  double similarity = 0.0;
};

// Top-k by cosine similarity excluding the query, ties in vocab order.
std::vector<Neighbor> nearest_neighbors(const EmbeddingMatrix& emb,
                                        std::string_view token, int k);

// Word-vector text format: "<vocab_size> <dim>" then "token v1 ... vdim".
// Values are written with 17 significant digits so a round trip is exact.
void write_embeddings(std::ostream& out, const EmbeddingMatrix& emb);
EmbeddingMatrix read_embeddings(std::istream& in);
void save_embeddings(const std::filesystem::path& path, const EmbeddingMatrix& emb);
EmbeddingMatrix load_embeddings(const std::filesystem::path& path);

}  // namespace occlear
