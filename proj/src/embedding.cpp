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

#include "occlear/embedding.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "occlear/detail/random.hpp"
#include "occlear/error.hpp"
#include "occlear/simd/kernels.hpp"

namespace occlear {
namespace {

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log(sigmoid(x)) without overflow for large |x|.
double log_sigmoid(double x) {
  if (x >= 0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

// coeff[j] = dL/ds_j where s_j = u_j . v; returns L. outputs[0] is the
// observed context, the rest are noise samples.
double sgns_coefficients(std::span<const double> center,
                         std::span<const std::span<const double>> outputs,
                         std::span<double> coeff) {
  double loss = 0.0;
  for (std::size_t j = 0; j < outputs.size(); ++j) {
    const double s = simd::dot(center, outputs[j]);
    if (j == 0) {
      loss -= log_sigmoid(s);
      coeff[j] = sigmoid(s) - 1.0;
    } else {
      loss -= log_sigmoid(-s);
      coeff[j] = sigmoid(s);
    }
  }
  return loss;
}

// Inverse-CDF sampler over count^exponent.
class NoiseSampler {
 public:
  NoiseSampler(std::span<const std::uint64_t> counts, double exponent) {
    cdf_.reserve(counts.size());
    double acc = 0.0;
    for (auto c : counts) {
      acc += std::pow(static_cast<double>(c), exponent);
      cdf_.push_back(acc);
    }
    for (auto& v : cdf_) v /= acc;
  }

  int sample(detail::Rng& rng) const {
    const double u = rng.uniform();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) --it;
    return static_cast<int>(it - cdf_.begin());
  }

 private:
  std::vector<double> cdf_;
};

void append_double(std::string& out, double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

}  // namespace

void TrainConfig::validate() const {
  if (dim < 2) fail(ErrorCode::kInvalidArgument, "dim must be >= 2");
  if (window < 1) fail(ErrorCode::kInvalidArgument, "window must be >= 1");
  if (steps < 1) fail(ErrorCode::kInvalidArgument, "steps must be >= 1");
  if (negatives < 1) fail(ErrorCode::kInvalidArgument, "negatives must be >= 1");
  if (!(learning_rate > 0) || !std::isfinite(learning_rate)) {
    fail(ErrorCode::kInvalidArgument, "learning rate must be positive");
  }
  if (!(min_learning_rate_fraction >= 0 && min_learning_rate_fraction <= 1)) {
    fail(ErrorCode::kInvalidArgument, "min learning rate fraction must be in [0, 1]");
  }
  if (!std::isfinite(noise_exponent)) fail(ErrorCode::kInvalidArgument, "noise exponent must be finite");
}

EmbeddingMatrix::EmbeddingMatrix(std::vector<std::string> vocab, int dim)
    : vocab_(std::move(vocab)), dim_(dim) {
  if (dim < 1) fail(ErrorCode::kInvalidArgument, "embedding dim must be >= 1");
  for (std::size_t i = 0; i < vocab_.size(); ++i) {
    if (!index_.emplace(vocab_[i], static_cast<int>(i)).second) {
      fail(ErrorCode::kInvalidData, "duplicate token '" + vocab_[i] + "' in embedding vocabulary");
    }
  }
  vectors_.assign(vocab_.size() * std::size_t(dim), 0.0);
  context_.assign(vocab_.size() * std::size_t(dim), 0.0);
}

std::optional<int> EmbeddingMatrix::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int EmbeddingMatrix::index_of(std::string_view token) const {
  if (auto i = find(token)) return *i;
  fail(ErrorCode::kNotFound, "token '" + std::string(token) + "' is not in the embedding vocabulary");
}

bool EmbeddingMatrix::all_finite() const {
  auto finite = [](double v) { return std::isfinite(v); };
  return std::all_of(vectors_.begin(), vectors_.end(), finite) &&
         std::all_of(context_.begin(), context_.end(), finite);
}

double sgns_loss(std::span<const double> center,
                 std::span<const std::span<const double>> outputs) {
  std::vector<double> coeff(outputs.size());
  return sgns_coefficients(center, outputs, coeff);
}

SgnsGradient sgns_gradient(std::span<const double> center,
                           std::span<const std::span<const double>> outputs) {
  SgnsGradient g;
  std::vector<double> coeff(outputs.size());
  g.loss = sgns_coefficients(center, outputs, coeff);
  g.center.assign(center.size(), 0.0);
  g.outputs.resize(outputs.size());
  for (std::size_t j = 0; j < outputs.size(); ++j) {
    simd::axpy(coeff[j], outputs[j], g.center);
    g.outputs[j].assign(center.size(), 0.0);
    simd::axpy(coeff[j], center, g.outputs[j]);
  }
  return g;
}

EmbeddingMatrix train(const IndexedCorpus& corpus, const TrainConfig& config) {
  config.validate();
  const auto pairs = generate_pairs(corpus.documents, config.window, config.boundary);
  if (pairs.empty()) fail(ErrorCode::kInvalidData, "corpus yields no (center, context) pairs");

  const int dim = config.dim;
  EmbeddingMatrix emb(corpus.vocab.tokens, dim);
  detail::Rng rng(config.seed);
  for (std::size_t r = 0; r < emb.size(); ++r) {
    for (double& x : emb.vector(int(r))) x = (rng.uniform() - 0.5) / dim;
  }

  const NoiseSampler noise(corpus.vocab.counts, config.noise_exponent);
  std::vector<std::uint32_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0u);
  std::size_t cursor = order.size();

  std::vector<int> rows;
  std::vector<std::span<const double>> outputs;
  std::vector<double> coeff(std::size_t(config.negatives) + 1);
  std::vector<double> grad_center(static_cast<std::size_t>(dim));
  const double lr_floor = config.learning_rate * config.min_learning_rate_fraction;

  for (std::int64_t step = 0; step < config.steps; ++step) {
    if (cursor == order.size()) {
      rng.shuffle(std::span(order));
      cursor = 0;
    }
    const TokenPair pair = pairs[order[cursor++]];
    const double progress = double(step) / double(config.steps);
    const double lr = std::max(config.learning_rate * (1.0 - progress), lr_floor);

    rows.clear();
    rows.push_back(pair.context);
    for (int k = 0; k < config.negatives; ++k) {
      const int r = noise.sample(rng);
      if (r != pair.context) rows.push_back(r);
    }
    outputs.clear();
    for (int r : rows) outputs.push_back(emb.context_vector(r));

    auto center = emb.vector(pair.center);
    const double loss = sgns_coefficients(center, outputs, coeff);
    if (!std::isfinite(loss)) {
      fail(ErrorCode::kNumeric, "training loss became non-finite at step " +
                                    std::to_string(step) + "; learning rate too high?");
    }

    // All updates use the pre-step center vector, so this is an exact
    // gradient step on the per-pair loss even when a row repeats.
    std::fill(grad_center.begin(), grad_center.end(), 0.0);
    for (std::size_t j = 0; j < rows.size(); ++j) simd::axpy(coeff[j], outputs[j], grad_center);
    for (std::size_t j = 0; j < rows.size(); ++j) {
      simd::axpy(-lr * coeff[j], center, emb.context_vector(rows[j]));
    }
    simd::axpy(-lr, grad_center, center);
  }

  if (!emb.all_finite()) fail(ErrorCode::kNumeric, "training produced non-finite vectors");
  return emb;
}

EmbeddingMatrix train(const Corpus& corpus, const TrainConfig& config) {
  return train(index_corpus(corpus), config);
}

double cosine_similarity(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) fail(ErrorCode::kInvalidArgument, "cosine of vectors with different lengths");
  const double uu = simd::dot(u, u);
  const double vv = simd::dot(v, v);
  if (!(uu > 0) || !(vv > 0)) fail(ErrorCode::kNumeric, "cosine similarity of a zero vector");
  const double c = simd::dot(u, v) / (std::sqrt(uu) * std::sqrt(vv));
  return std::clamp(c, -1.0, 1.0);
}

std::vector<Neighbor> nearest_neighbors(const EmbeddingMatrix& emb,
                                        std::string_view token, int k) {
  const int query = emb.index_of(token);
  if (k < 1 || std::size_t(k) >= emb.size()) {
    fail(ErrorCode::kInvalidArgument, "k must be in [1, vocab size - 1]");
  }
  std::vector<Neighbor> all;
  all.reserve(emb.size() - 1);
  for (int r = 0; r < int(emb.size()); ++r) {
    if (r == query) continue;
    all.push_back({emb.vocab()[r], cosine_similarity(emb.vector(query), emb.vector(r))});
  }
  std::stable_sort(all.begin(), all.end(),
                   [](const Neighbor& a, const Neighbor& b) { return a.similarity > b.similarity; });
  all.resize(std::size_t(k));
  return all;
}

void write_embeddings(std::ostream& out, const EmbeddingMatrix& emb) {
  std::string line;
  out << emb.size() << ' ' << emb.dim() << '\n';
  for (int r = 0; r < int(emb.size()); ++r) {
    line = emb.vocab()[r];
    for (double v : emb.vector(r)) {
      line += ' ';
      append_double(line, v);
    }
    line += '\n';
    out << line;
  }
  if (!out) fail(ErrorCode::kIo, "failed writing embeddings");
}

EmbeddingMatrix read_embeddings(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::kInvalidData, "embedding file is empty");
  std::istringstream header(line);
  std::size_t n = 0;
  int dim = 0;
  if (!(header >> n >> dim) || dim < 1) {
    fail(ErrorCode::kInvalidData, "embedding header must be '<vocab_size> <dim>'");
  }

  std::vector<std::string> vocab;
  std::vector<double> values;
  vocab.reserve(n);
  values.reserve(n * std::size_t(dim));
  while (vocab.size() < n && std::getline(in, line)) {
    if (line.empty()) continue;
    const char* p = line.data();
    const char* end = p + line.size();
    const char* tok_end = std::find(p, end, ' ');
    vocab.emplace_back(p, tok_end);
    p = tok_end;
    for (int d = 0; d < dim; ++d) {
      while (p < end && *p == ' ') ++p;
      double v = 0.0;
      auto res = std::from_chars(p, end, v);
      if (res.ec != std::errc() || !std::isfinite(v)) {
        fail(ErrorCode::kInvalidData, "bad vector value for token '" + vocab.back() + "'");
      }
      values.push_back(v);
      p = res.ptr;
    }
  }
  if (vocab.size() != n) fail(ErrorCode::kInvalidData, "embedding file has fewer rows than its header says");

  EmbeddingMatrix emb(std::move(vocab), dim);
  for (std::size_t r = 0; r < n; ++r) {
    std::copy_n(values.begin() + std::ptrdiff_t(r * dim), dim, emb.vector(int(r)).begin());
  }
  return emb;
}

void save_embeddings(const std::filesystem::path& path, const EmbeddingMatrix& emb) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  write_embeddings(out, emb);
}

EmbeddingMatrix load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(std::filesystem::exists(path) ? ErrorCode::kIo : ErrorCode::kNotFound, "cannot open embedding file " + path.string());
  return read_embeddings(in);
}

}  // namespace occlear
