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

#include "occlear/tsne.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "occlear/detail/random.hpp"
#include "occlear/error.hpp"
#include "occlear/simd/kernels.hpp"

namespace occlear {
namespace {

void check_inputs(std::size_t n, std::size_t dim, std::size_t values, double perplexity) {
  if (n < 4) fail(ErrorCode::kInvalidArgument, "t-SNE needs at least 4 points");
  if (values != n * dim) fail(ErrorCode::kInvalidArgument, "t-SNE data size does not match n x dim");
  if (!(perplexity >= 1.0) || !(perplexity < double(n - 1))) {
    fail(ErrorCode::kInvalidArgument,
         "perplexity " + std::to_string(perplexity) + " is infeasible for " +
             std::to_string(n) + " points (needs 1 <= perplexity < n - 1)");
  }
}

// Row-wise Gaussian conditionals with entropy log(perplexity), found by
// bisection on the precision.
void conditional_row(std::span<const double> dist, std::size_t self, double perplexity,
                     std::span<double> out) {
  const double target = std::log(perplexity);
  double min_d = std::numeric_limits<double>::max();
  for (std::size_t j = 0; j < dist.size(); ++j) {
    if (j != self) min_d = std::min(min_d, dist[j]);
  }

  double beta = 1.0;
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 200; ++iter) {
    double sum = 0.0;
    double weighted = 0.0;
    for (std::size_t j = 0; j < dist.size(); ++j) {
      const double shifted = dist[j] - min_d;
      out[j] = j == self ? 0.0 : std::exp(-beta * shifted);
      sum += out[j];
      weighted += out[j] * shifted;
    }
    // H = log(sum) + beta * E[d - min_d]
    const double entropy = std::log(sum) + beta * weighted / sum;
    for (double& v : out) v /= sum;
    const double diff = entropy - target;
    if (std::abs(diff) < 1e-7) break;
    if (diff > 0) {
      lo = beta;
      beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
    } else {
      hi = beta;
      beta = 0.5 * (beta + lo);
    }
  }
}

std::vector<double> squared_distances(std::span<const double> data, std::size_t n,
                                      std::size_t dim) {
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = simd::squared_distance(data.subspan(i * dim, dim), data.subspan(j * dim, dim));
      d[i * n + j] = v;
      d[j * n + i] = v;
    }
  }
  return d;
}

}  // namespace

std::vector<double> tsne_affinities(std::span<const double> data, std::size_t n,
                                    std::size_t dim, double perplexity) {
  check_inputs(n, dim, data.size(), perplexity);
  const auto dist = squared_distances(data, n, dim);
  std::vector<double> cond(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    conditional_row(std::span(dist).subspan(i * n, n), i, perplexity,
                    std::span(cond).subspan(i * n, n));
  }
  std::vector<double> p(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      p[i * n + j] = std::max((cond[i * n + j] + cond[j * n + i]) / (2.0 * double(n)),
                              std::numeric_limits<double>::min());
    }
    p[i * n + i] = 0.0;
  }
  return p;
}

double tsne_kl_divergence(std::span<const double> p,
                          std::span<const std::array<double, 2>> coords) {
  const std::size_t n = coords.size();
  std::vector<double> num(n * n, 0.0);
  double z = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double dx = coords[i][0] - coords[j][0];
      const double dy = coords[i][1] - coords[j][1];
      num[i * n + j] = 1.0 / (1.0 + dx * dx + dy * dy);
      z += num[i * n + j];
    }
  }
  double kl = 0.0;
  for (std::size_t k = 0; k < n * n; ++k) {
    if (p[k] > 0) {
      const double q = std::max(num[k] / z, std::numeric_limits<double>::min());
      kl += p[k] * std::log(p[k] / q);
    }
  }
  return kl;
}

TsneResult project_tsne(std::span<const double> data, std::size_t n,
                        std::size_t dim, const TsneConfig& config) {
  check_inputs(n, dim, data.size(), config.perplexity);
  if (config.iterations < 0) fail(ErrorCode::kInvalidArgument, "iterations must be >= 0");

  TsneResult result;
  detail::Rng rng(config.seed);
  result.coords.resize(n);
  for (auto& c : result.coords) {
    c[0] = rng.gaussian() * 1e-4;
    c[1] = rng.gaussian() * 1e-4;
  }
  if (config.iterations == 0) return result;

  const auto p = tsne_affinities(data, n, dim, config.perplexity);
  const int exaggeration_iters = std::min(250, config.iterations / 4);

  std::vector<std::array<double, 2>> velocity(n, {0.0, 0.0});
  std::vector<std::array<double, 2>> gains(n, {1.0, 1.0});
  std::vector<std::array<double, 2>> grad(n);
  std::vector<double> num(n * n);
  auto& y = result.coords;
  result.kl.reserve(std::size_t(config.iterations));

  for (int iter = 0; iter < config.iterations; ++iter) {
    const bool early = iter < exaggeration_iters;
    const double exaggeration = early ? config.early_exaggeration : 1.0;
    const double momentum = early ? config.initial_momentum : config.final_momentum;

    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double dx = y[i][0] - y[j][0];
        const double dy = y[i][1] - y[j][1];
        const double v = 1.0 / (1.0 + dx * dx + dy * dy);
        num[i * n + j] = v;
        num[j * n + i] = v;
        z += 2.0 * v;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      double gx = 0.0;
      double gy = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        const double w = num[i * n + j];
        const double mult = (exaggeration * p[i * n + j] - w / z) * w;
        gx += mult * (y[i][0] - y[j][0]);
        gy += mult * (y[i][1] - y[j][1]);
      }
      grad[i] = {4.0 * gx, 4.0 * gy};
    }

    for (std::size_t i = 0; i < n; ++i) {
      for (int d = 0; d < 2; ++d) {
        double& g = gains[i][d];
        g = (std::signbit(grad[i][d]) != std::signbit(velocity[i][d])) ? g + 0.2 : g * 0.8;
        g = std::max(g, 0.01);
        velocity[i][d] = momentum * velocity[i][d] - config.learning_rate * g * grad[i][d];
        y[i][d] += velocity[i][d];
      }
    }

    double mx = 0.0;
    double my = 0.0;
    for (const auto& c : y) {
      mx += c[0];
      my += c[1];
    }
    mx /= double(n);
    my /= double(n);
    for (auto& c : y) {
      c[0] -= mx;
      c[1] -= my;
    }

    result.kl.push_back(tsne_kl_divergence(p, y));
  }

  for (const auto& c : y) {
    if (!std::isfinite(c[0]) || !std::isfinite(c[1])) {
      fail(ErrorCode::kNumeric, "t-SNE produced non-finite coordinates");
    }
  }
  return result;
}

TsneResult project_tsne(const EmbeddingMatrix& emb, const TsneConfig& config) {
  return project_tsne(emb.data(), emb.size(), std::size_t(emb.dim()), config);
}

void write_tsne(std::ostream& out, std::span<const std::string> tokens,
                std::span<const std::array<double, 2>> coords) {
  if (tokens.size() != coords.size()) fail(ErrorCode::kInvalidArgument, "token/coordinate count mismatch");
  out.precision(9);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    out << tokens[i] << ' ' << coords[i][0] << ' ' << coords[i][1] << '\n';
  }
}

}  // namespace occlear
