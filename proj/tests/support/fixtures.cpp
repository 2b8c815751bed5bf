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

#include "fixtures.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <unistd.h>

#include "json.hpp"
#include "occlear/detail/random.hpp"

namespace fs = std::filesystem;

namespace occlear::testing {

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          ("occlear-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::vector<double> random_unit_vector(int dim, std::uint64_t& state) {
  detail::Rng rng(state++);
  std::vector<double> v(dim);
  double n = 0.0;
  do {
    n = 0.0;
    for (double& x : v) {
      x = rng.gaussian();
      n += x * x;
    }
  } while (n < 1e-12);
  for (double& x : v) x /= std::sqrt(n);
  return v;
}

double brute_cosine(std::span<const double> a, std::span<const double> b) {
  long double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += (long double)a[i] * b[i];
    aa += (long double)a[i] * a[i];
    bb += (long double)b[i] * b[i];
  }
  return double(ab / (std::sqrt(aa) * std::sqrt(bb)));
}

std::optional<double> brute_relation_score(const EmbeddingMatrix& emb, const std::vector<std::string>& tokens,
                                           const std::set<int>& things, const std::set<int>& stuffs,
                                           int thing) {
  std::set<int> context = things;
  context.insert(stuffs.begin(), stuffs.end());
  context.erase(thing);
  if (context.empty()) return std::nullopt;
  const auto vi = emb.vector(emb.index_of(tokens[thing]));
  long double sum = 0;
  for (int c : context) sum += brute_cosine(vi, emb.vector(emb.index_of(tokens[c])));
  return double(sum / context.size());
}

BinaryMask brute_dilate(const BinaryMask& mask, int radius) {
  BinaryMask out(mask.width(), mask.height());
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      bool hit = false;
      for (int sy = 0; sy < mask.height() && !hit; ++sy) {
        for (int sx = 0; sx < mask.width() && !hit; ++sx) {
          if (!mask.get(sx, sy)) continue;
          const int dx = sx - x, dy = sy - y;
          hit = dx * dx + dy * dy <= radius * radius;
        }
      }
      if (hit) out.set(x, y);
    }
  }
  return out;
}

std::vector<TokenPair> brute_pairs(const std::vector<std::vector<int>>& docs, int window) {
  std::vector<TokenPair> out;
  for (const auto& d : docs) {
    for (int i = 0; i < int(d.size()); ++i) {
      for (int j = 0; j < int(d.size()); ++j) {
        if (i != j && std::abs(i - j) <= window) out.push_back({d[i], d[j]});
      }
    }
  }
  return out;
}

Image checkerboard(int size, int cell) {
  Image img(size, size);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const float v = ((x / cell + y / cell) % 2) ? 1.0f : 0.0f;
      for (int c = 0; c < 3; ++c) img.at(x, y, c) = v;
    }
  }
  return img;
}

Image texture_fixture(int width, int height, int kind) {
  Image img(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double r = 0, g = 0, b = 0;
      switch (kind % 4) {
        case 0:  // stripes
          r = ((x / 3) % 2) ? 0.8 : 0.2;
          g = 0.5;
          b = ((x / 3) % 2) ? 0.3 : 0.7;
          break;
        case 1:  // sinusoidal weave
          r = 0.5 + 0.4 * std::sin(2 * std::numbers::pi * x / 8.0);
          g = 0.5 + 0.4 * std::cos(2 * std::numbers::pi * y / 6.0);
          b = 0.5;
          break;
        case 2:  // brick-like
          r = ((y / 4) % 2 ? (x + 3) / 6 : x / 6) % 2 ? 0.7 : 0.35;
          g = r * 0.6;
          b = 0.25 + ((y % 4) == 0 ? 0.5 : 0.0);
          break;
        default:  // diagonal
          r = ((x + y) / 4) % 2 ? 0.9 : 0.1;
          g = ((x - y + 1000) / 5) % 2 ? 0.6 : 0.3;
          b = 0.4;
          break;
      }
      img.at(x, y, 0) = float(std::lround(r * 255) / 255.0);
      img.at(x, y, 1) = float(std::lround(g * 255) / 255.0);
      img.at(x, y, 2) = float(std::lround(b * 255) / 255.0);
    }
  }
  return img;
}

BinaryMask rect_mask(int width, int height, int x0, int y0, int x1, int y1) {
  BinaryMask m(width, height);
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) m.set(x, y);
  }
  return m;
}

double hole_ssd(const Image& a, const Image& b, const BinaryMask& mask) {
  double s = 0;
  for (int y = 0; y < a.height; ++y) {
    for (int x = 0; x < a.width; ++x) {
      if (!mask.get(x, y)) continue;
      for (int c = 0; c < 3; ++c) {
        const double d = double(a.at(x, y, c)) - b.at(x, y, c);
        s += d * d;
      }
    }
  }
  return s;
}

std::string toy_lexicon_json() {
  return R"({"labels": [
    {"name": "dog", "kind": "thing", "synonyms": ["puppy"]},
    {"name": "boat", "kind": "thing", "synonyms": ["ship"]},
    {"name": "giraffe", "kind": "thing"},
    {"name": "person", "kind": "thing", "synonyms": ["man", "woman"]},
    {"name": "grass", "kind": "stuff"},
    {"name": "sky", "kind": "stuff"},
    {"name": "sea", "kind": "stuff", "synonyms": ["ocean"]},
    {"name": "snow", "kind": "stuff"}
  ]})";
}

ClassLexicon toy_lexicon() { return parse_lexicon(toy_lexicon_json()); }

EmbeddingMatrix toy_embedding() {
  const std::vector<std::string> vocab{"dog", "boat", "giraffe", "person", "grass", "sky", "sea", "snow"};
  EmbeddingMatrix emb(vocab, 4);
  const double s2 = 1.0 / std::sqrt(2.0), s3 = 1.0 / std::sqrt(3.0);
  const std::vector<std::vector<double>> rows{
      {s2, s2, 0, 0},      // dog
      {0, s2, s2, 0},      // boat
      {-s3, -s3, -s3, 0},  // giraffe
      {0, s2, 0, s2},      // person
      {1, 0, 0, 0},        // grass
      {0, 1, 0, 0},        // sky
      {0, 0, 1, 0},        // sea
      {0, 0, 0, 1},        // snow
  };
  for (int r = 0; r < int(rows.size()); ++r) {
    std::copy(rows[r].begin(), rows[r].end(), emb.vector(r).begin());
  }
  return emb;
}

namespace {

struct Region {
  std::string name;
  int x0, y0, x1, y1;  // inclusive
};

// Per-class base colour; stuffs get a small seeded texture.
std::array<int, 3> class_colour(const std::string& name) {
  static const std::map<std::string, std::array<int, 3>> colours{
      {"dog", {150, 90, 40}},   {"boat", {230, 230, 240}}, {"giraffe", {240, 200, 40}},
      {"person", {200, 60, 80}}, {"grass", {60, 150, 50}},  {"sky", {120, 170, 230}},
      {"sea", {30, 70, 160}},    {"snow", {235, 240, 245}},
  };
  return colours.at(name);
}

}  // namespace

PipelineFixture write_pipeline_fixture(const fs::path& root, int workers) {
  constexpr int kSize = 48;
  const ClassLexicon lexicon = toy_lexicon();
  fs::create_directories(root / "images");
  fs::create_directories(root / "labels");
  {
    std::ofstream(root / "lexicon.json") << toy_lexicon_json();
  }
  save_embeddings(root / "embeddings.vec", toy_embedding());

  // Each scene: a stuff layout (top / bottom) plus thing rectangles.
  struct Scene {
    std::string stem;
    std::string top, bottom;
    std::vector<Region> things;
    std::set<std::string> removed;
  };
  const std::vector<Scene> scenes{
      {"000001", "sky", "grass", {{"dog", 18, 26, 29, 37}}, {}},
      {"000002", "sky", "sea", {{"giraffe", 20, 14, 31, 33}}, {"giraffe"}},
      {"000003", "sky", "sea", {{"boat", 10, 20, 25, 29}}, {}},
      {"000004", "grass", "grass", {{"dog", 6, 8, 17, 19}, {"giraffe", 28, 24, 39, 39}}, {"giraffe"}},
      {"000005", "sky", "snow", {{"person", 30, 22, 37, 39}}, {}},
  };

  PipelineFixture fx;
  fx.root = root;
  fx.output = root / "out";
  std::uint64_t seed = 11;
  for (const auto& sc : scenes) {
    LabelMap map;
    map.width = map.height = kSize;
    map.labels.assign(std::size_t(kSize) * kSize, 0);
    Image img(kSize, kSize);
    detail::Rng rng(seed++);
    for (int y = 0; y < kSize; ++y) {
      for (int x = 0; x < kSize; ++x) {
        const std::string& name = y < kSize / 3 ? sc.top : sc.bottom;
        std::string cls = name;
        for (const auto& t : sc.things) {
          if (x >= t.x0 && x <= t.x1 && y >= t.y0 && y <= t.y1) cls = t.name;
        }
        map.labels[std::size_t(y) * kSize + x] = lexicon.id_of(cls);
        const auto col = class_colour(cls);
        const int jitter = int(rng.below(21)) - 10;
        for (int c = 0; c < 3; ++c) img.at(x, y, c) = float(std::clamp(col[c] + jitter, 0, 255)) / 255.0f;
      }
    }
    save_label_map(root / "labels" / (sc.stem + ".png"), map);
    save_image(root / "images" / (sc.stem + ".png"), img);
    fx.expected_removed[sc.stem] = sc.removed;
  }

  nlohmann::json cfg{
      {"lexicon", "lexicon.json"},
      {"embeddings", "embeddings.vec"},
      {"label_maps", "labels"},
      {"images", "images"},
      {"output", "out"},
      {"workers", workers},
      {"detector", {{"similarity_threshold", 0.4}, {"min_area_fraction", 0.02}, {"dilation_radius", 2}}},
      {"inpaint", {{"patch_size", 7}, {"coarse_iters", 100}, {"search_stride", 2}}},
  };
  fx.config = root / "config.json";
  std::ofstream(fx.config) << cfg.dump(2);
  return fx;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace occlear::testing
