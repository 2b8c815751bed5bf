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
#include <span>
#include <vector>

#include "occlear/lexicon.hpp"
#include "occlear/relation.hpp"

namespace occlear {

// Image-level co-occurrence counts over the classes of a lexicon.
class CooccurrenceStats {
 public:
  CooccurrenceStats() = default;
  explicit CooccurrenceStats(std::size_t classes);

  std::size_t classes() const { return n_; }
  std::uint64_t image_total() const { return images_; }

  // Images containing both a and b.
  std::uint64_t intersection(int a, int b) const { return inter_[index(a, b)]; }
  // Images containing a or b.
  std::uint64_t union_count(int a, int b) const {
    return inter_[index(a, a)] + inter_[index(b, b)] - inter_[index(a, b)];
  }
  std::uint64_t occurrences(int a) const { return inter_[index(a, a)]; }

  // Counts one image whose present classes are `present` (duplicates are
  // ignored).
  void add_image(std::span<const int> present);

  // Associative merge of two count tables over the same classes.
  CooccurrenceStats& operator+=(const CooccurrenceStats& other);

  // Sets raw counts directly; used when loading a table file.
  void set_counts(int a, int b, std::uint64_t intersection);
  void set_image_total(std::uint64_t n) { images_ = n; }

  friend bool operator==(const CooccurrenceStats&, const CooccurrenceStats&) = default;

 private:
  std::size_t index(int a, int b) const { return std::size_t(a) * n_ + std::size_t(b); }

  std::size_t n_ = 0;
  std::uint64_t images_ = 0;
  std::vector<std::uint64_t> inter_;  // symmetric n x n, diagonal = occurrences
};

// Class presence per scene is membership in T u S.
CooccurrenceStats count_cooccurrence(std::span<const SceneContext> scenes, std::size_t classes);

// n(a and b) / n(a or b). Throws when the union is empty.
double relation_count(const CooccurrenceStats& stats, int a, int b);

// Sample Pearson coefficient. Throws on length mismatch, fewer than two
// samples, or a constant sequence.
double pearson(std::span<const double> xs, std::span<const double> ys);

struct CorrelationPair {
  int a = 0;
  int b = 0;
  double cosine = 0.0;
  double relation = 0.0;
};

struct CorrelationOptions {
  bool include_stuff_stuff = true;
  // Skip classes without an embedding vector instead of failing.
  bool skip_missing = false;
};

struct CorrelationResult {
  double coefficient = 0.0;
  std::vector<CorrelationPair> pairs;
  std::size_t skipped_missing = 0;
};

// Pearson between raw cosine similarity and R_ab over unordered pairs a < b
// with a non-empty union.
CorrelationResult correlate_relations(const ClassSpace& space, const CooccurrenceStats& stats,
                                      const CorrelationOptions& options = {});

// Table file: header "# occlear-cooccurrence v1", "images <n>", then
// "a<TAB>b<TAB>n_intersection<TAB>n_union" for a <= b with a non-empty
// union, classes by lexicon name.
void write_stats(std::ostream& out, const CooccurrenceStats& stats, const ClassLexicon& lexicon);
CooccurrenceStats read_stats(std::istream& in, const ClassLexicon& lexicon);

// "a<TAB>b<TAB>cosine<TAB>relation" rows for plotting.
void write_scatter(std::ostream& out, const CorrelationResult& result, const ClassLexicon& lexicon);

}  // namespace occlear
