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

#include "occlear/eval.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>

#include "occlear/error.hpp"

namespace occlear {

CooccurrenceStats::CooccurrenceStats(std::size_t classes)
    : n_(classes), inter_(classes * classes, 0) {}

void CooccurrenceStats::add_image(std::span<const int> present) {
  std::vector<int> ids(present.begin(), present.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  for (int id : ids) {
    if (id < 0 || std::size_t(id) >= n_) fail(ErrorCode::kInvalidData, "class id out of range in scene");
  }
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i; j < ids.size(); ++j) {
      ++inter_[index(ids[i], ids[j])];
      if (i != j) ++inter_[index(ids[j], ids[i])];
    }
  }
  ++images_;
}

CooccurrenceStats& CooccurrenceStats::operator+=(const CooccurrenceStats& other) {
  if (other.n_ != n_) fail(ErrorCode::kInvalidArgument, "merging count tables of different sizes");
  for (std::size_t i = 0; i < inter_.size(); ++i) inter_[i] += other.inter_[i];
  images_ += other.images_;
  return *this;
}

void CooccurrenceStats::set_counts(int a, int b, std::uint64_t intersection) {
  inter_[index(a, b)] = intersection;
  inter_[index(b, a)] = intersection;
}

CooccurrenceStats count_cooccurrence(std::span<const SceneContext> scenes, std::size_t classes) {
  CooccurrenceStats stats(classes);
  std::vector<int> present;
  for (const auto& s : scenes) {
    present.assign(s.things.begin(), s.things.end());
    present.insert(present.end(), s.stuffs.begin(), s.stuffs.end());
    stats.add_image(present);
  }
  return stats;
}

double relation_count(const CooccurrenceStats& stats, int a, int b) {
  const auto u = stats.union_count(a, b);
  if (u == 0) {
    fail(ErrorCode::kInvalidArgument,
         "classes " + std::to_string(a) + " and " + std::to_string(b) + " never occur");
  }
  return double(stats.intersection(a, b)) / double(u);
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) fail(ErrorCode::kInvalidArgument, "pearson: sequences differ in length");
  if (xs.size() < 2) fail(ErrorCode::kInvalidArgument, "pearson: need at least two samples");
  const double n = double(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (!(sxx > 0) || !(syy > 0)) fail(ErrorCode::kNumeric, "pearson: a sequence has zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

CorrelationResult correlate_relations(const ClassSpace& space, const CooccurrenceStats& stats,
                                      const CorrelationOptions& options) {
  const auto& lexicon = space.lexicon();
  if (stats.classes() != lexicon.size()) {
    fail(ErrorCode::kInvalidArgument, "count table and lexicon differ in class count");
  }
  CorrelationResult result;
  std::set<int> missing;
  for (int a = 0; a < int(stats.classes()); ++a) {
    for (int b = a + 1; b < int(stats.classes()); ++b) {
      if (stats.union_count(a, b) == 0) continue;
      if (!options.include_stuff_stuff && lexicon.label(a).kind == ClassKind::kStuff &&
          lexicon.label(b).kind == ClassKind::kStuff) {
        continue;
      }
      if (options.skip_missing && (!space.covers(a) || !space.covers(b))) {
        if (!space.covers(a)) missing.insert(a);
        if (!space.covers(b)) missing.insert(b);
        continue;
      }
      result.pairs.push_back(
          {a, b, cosine_similarity(space.vector(a), space.vector(b)), relation_count(stats, a, b)});
    }
  }
  result.skipped_missing = missing.size();
  if (result.pairs.size() < 2) {
    fail(ErrorCode::kNumeric, "need at least two class pairs with a defined relation, got " +
                                  std::to_string(result.pairs.size()));
  }
  std::vector<double> xs, ys;
  xs.reserve(result.pairs.size());
  ys.reserve(result.pairs.size());
  for (const auto& p : result.pairs) {
    xs.push_back(p.cosine);
    ys.push_back(p.relation);
  }
  result.coefficient = pearson(xs, ys);
  return result;
}

void write_stats(std::ostream& out, const CooccurrenceStats& stats, const ClassLexicon& lexicon) {
  if (stats.classes() != lexicon.size()) {
    fail(ErrorCode::kInvalidArgument, "count table and lexicon differ in class count");
  }
  out << "# occlear-cooccurrence v1\n";
  out << "images " << stats.image_total() << '\n';
  for (int a = 0; a < int(stats.classes()); ++a) {
    for (int b = a; b < int(stats.classes()); ++b) {
      const auto u = stats.union_count(a, b);
      if (u == 0) continue;
      out << lexicon.label(a).name << '\t' << lexicon.label(b).name << '\t'
          << stats.intersection(a, b) << '\t' << u << '\n';
    }
  }
  if (!out) fail(ErrorCode::kIo, "failed writing count table");
}

CooccurrenceStats read_stats(std::istream& in, const ClassLexicon& lexicon) {
  std::string line;
  if (!std::getline(in, line) || line != "# occlear-cooccurrence v1") {
    fail(ErrorCode::kInvalidData, "not an occlear co-occurrence table");
  }
  CooccurrenceStats stats(lexicon.size());
  std::uint64_t images = 0;
  if (!std::getline(in, line) || std::sscanf(line.c_str(), "images %" SCNu64, &images) != 1) {
    fail(ErrorCode::kInvalidData, "co-occurrence table lacks an 'images' line");
  }
  stats.set_image_total(images);

  struct Row {
    int a, b;
    std::uint64_t inter, uni;
  };
  std::vector<Row> rows;
  int lineno = 2;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, '\t');) fields.push_back(f);
    if (fields.size() != 4) fail(ErrorCode::kInvalidData, "bad row on line " + std::to_string(lineno));
    Row r{lexicon.id_of(fields[0]), lexicon.id_of(fields[1]), std::stoull(fields[2]), std::stoull(fields[3])};
    if (r.inter > r.uni || r.uni > images) {
      fail(ErrorCode::kInvalidData, "inconsistent counts on line " + std::to_string(lineno));
    }
    rows.push_back(r);
    stats.set_counts(r.a, r.b, r.inter);
  }
  // Unions are implied by the diagonal; check the file agrees.
  for (const auto& r : rows) {
    if (stats.union_count(r.a, r.b) != r.uni) {
      fail(ErrorCode::kInvalidData, "union count for '" + lexicon.label(r.a).name + "', '" +
                                        lexicon.label(r.b).name + "' disagrees with the diagonal");
    }
  }
  return stats;
}

void write_scatter(std::ostream& out, const CorrelationResult& result, const ClassLexicon& lexicon) {
  out.precision(10);
  out << "a\tb\tcosine\trelation\n";
  for (const auto& p : result.pairs) {
    out << lexicon.label(p.a).name << '\t' << lexicon.label(p.b).name << '\t' << p.cosine << '\t'
        << p.relation << '\n';
  }
}

}  // namespace occlear
