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

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace occlear {

enum class ClassKind { kThing, kStuff };

std::string_view to_string(ClassKind kind);

struct ClassLabel {
  int id = 0;
  std::string name;
  ClassKind kind = ClassKind::kThing;
};

// One entry of a label file before ids are assigned.
struct LabelSpec {
  std::string name;
  ClassKind kind = ClassKind::kThing;
  std::vector<std::string> synonyms;
};

// Lowercases and splits on runs of non-alphanumeric ASCII characters.
std::vector<std::string> tokenize(std::string_view text);

// Single corpus token for a class name: "traffic light" -> "traffic_light".
std::string corpus_token_for(std::string_view name);

// Closed vocabulary of object classes plus the caption-token synonyms that
// map onto them. Immutable once built.
class ClassLexicon {
 public:
  ClassLexicon() = default;

  // Ids are assigned in input order. Throws on empty input, duplicate names,
  // empty synonyms, or a synonym claimed by two different labels.
  static ClassLexicon from_specs(std::span<const LabelSpec> specs);

  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }
  const std::vector<ClassLabel>& labels() const { return labels_; }
  const ClassLabel& label(int id) const;
  bool contains(int id) const { return id >= 0 && id < static_cast<int>(size()); }

  std::optional<int> find(std::string_view name) const;
  int id_of(std::string_view name) const;  // throws kNotFound

  const std::string& corpus_token(int id) const { return corpus_tokens_.at(id); }
  std::optional<int> find_corpus_token(std::string_view token) const;

  std::vector<int> ids_of_kind(ClassKind kind) const;

  // Keeps only tokens that name a class, in order. Multi-word synonyms are
  // matched longest-first; the last token of a candidate may additionally
  // have a trailing "es" or "s" stripped.
  std::vector<int> match_tokens(std::span<const std::string> tokens) const;

  // Synonym token sequences (space joined) -> label id.
  const std::map<std::string, int>& synonyms() const { return synonyms_; }

 private:
  std::vector<ClassLabel> labels_;
  std::vector<std::string> corpus_tokens_;
  std::unordered_map<std::string, int> by_name_;
  std::unordered_map<std::string, int> by_corpus_token_;
  std::map<std::string, int> synonyms_;
  std::size_t max_synonym_tokens_ = 0;
};

// Label file: JSON, either {"labels": [...]} or a bare array of
// {"name": str, "kind": "thing"|"stuff", "synonyms": [str, ...]}.
ClassLexicon parse_lexicon(std::string_view json_text);
ClassLexicon load_lexicon(const std::filesystem::path& path);

// Tab-separated "id<TAB>name<TAB>kind" table, one line per label.
std::string lexicon_id_table(const ClassLexicon& lexicon);

}  // namespace occlear
