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

#include <cmath>
#include <sstream>

#include "doctest.h"
#include "occlear/detail/random.hpp"
#include "occlear/error.hpp"
#include "occlear/tsne.hpp"

using namespace occlear;

namespace {

double dist(const std::array<double, 2>& a, const std::array<double, 2>& b) {
  return std::hypot(a[0] - b[0], a[1] - b[1]);
}

}  // namespace

TEST_CASE("two far-apart pairs stay two clusters") {
  const std::size_t dim = 10;
  std::vector<double> data(4 * dim, 0.0);
  data[1 * dim + 0] = 0.1;
  for (std::size_t d = 0; d < dim; ++d) {
    data[2 * dim + d] = 10.0;
    data[3 * dim + d] = 10.0;
  }
  data[3 * dim + 1] += 0.1;
  TsneConfig cfg;
  cfg.perplexity = 1.5;
  cfg.iterations = 500;
  const auto res = project_tsne(data, 4, dim, cfg);
  REQUIRE(res.coords.size() == 4);
  const double intra = std::max(dist(res.coords[0], res.coords[1]), dist(res.coords[2], res.coords[3]));
  const double inter = std::min({dist(res.coords[0], res.coords[2]), dist(res.coords[0], res.coords[3]),
                                 dist(res.coords[1], res.coords[2]), dist(res.coords[1], res.coords[3])});
  CHECK(intra < inter);
}

TEST_CASE("zero iterations returns the seeded initialisation") {
  std::vector<double> data(5 * 3);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = double(i % 7);
  TsneConfig cfg;
  cfg.perplexity = 2;
  cfg.iterations = 0;
  cfg.seed = 17;
  const auto res = project_tsne(data, 5, 3, cfg);
  detail::Rng rng(17);
  for (const auto& c : res.coords) {
    const double x = rng.gaussian() * 1e-4;
    const double y = rng.gaussian() * 1e-4;
    CHECK(c[0] == x);
    CHECK(c[1] == y);
  }
  CHECK(res.kl.empty());
}

TEST_CASE("affinities are a symmetric distribution") {
  detail::Rng rng(2);
  const std::size_t n = 12, dim = 5;
  std::vector<double> data(n * dim);
  for (double& x : data) x = rng.gaussian();
  const auto p = tsne_affinities(data, n, dim, 4.0);
  double sum = 0;
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(p[i * n + i] == 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      sum += p[i * n + j];
      CHECK(p[i * n + j] == doctest::Approx(p[j * n + i]));
    }
  }
  CHECK(sum == doctest::Approx(1.0));
}

TEST_CASE("182 points project and KL settles") {
  detail::Rng rng(8);
  const std::size_t n = 182, dim = 16;
  std::vector<double> data(n * dim);
  for (std::size_t i = 0; i < n; ++i) {
    const double shift = double(i % 6) * 3.0;
    for (std::size_t d = 0; d < dim; ++d) data[i * dim + d] = rng.gaussian() + (d == i % dim ? shift : 0.0);
  }
  TsneConfig cfg;
  cfg.iterations = 400;
  const auto res = project_tsne(data, n, dim, cfg);
  CHECK(res.coords.size() == n);
  REQUIRE(res.kl.size() == 400);
  // After early exaggeration the objective keeps going down overall.
  const double late = res.kl.back();
  const double mid = res.kl[res.kl.size() * 9 / 10];
  CHECK(late <= mid + 1e-6);
  for (const auto& c : res.coords) CHECK(std::isfinite(c[0]));

  std::ostringstream out;
  std::vector<std::string> tokens(n, "t");
  write_tsne(out, tokens, res.coords);
  const std::string s = out.str();
  CHECK(std::count(s.begin(), s.end(), '\n') == long(n));
}

TEST_CASE("infeasible perplexity is rejected") {
  std::vector<double> data(4 * 2, 1.0);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = double(i);
  TsneConfig cfg;
  cfg.perplexity = 3.0;
  CHECK_THROWS_AS(project_tsne(data, 4, 2, cfg), Error);
  CHECK_THROWS_AS(project_tsne(data, 3, 2, TsneConfig{}), Error);
}
