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

#include "occlear/lexicon.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "occlear/error.hpp"

namespace occlear {
namespace {

bool is_alnum(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9');
}

char lower(char c) { return (c >= 'A' && c <= 'Z') ? char(c - 'A' + 'a') : c; }

std::string join(std::span<const std::string> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

ClassKind parse_kind(const std::string& s) {
  std::string k;
  for (char c : s) k += lower(c);
  if (k == "thing") return ClassKind::kThing;
  if (k == "stuff") return ClassKind::kStuff;
  fail(ErrorCode::kInvalidData, "unknown class kind '" + s + "'");
}

}  // namespace

std::string_view to_string(ClassKind kind) {
  return kind == ClassKind::kThing ? "thing" : "stuff";
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (is_alnum(c)) {
      cur += lower(c);
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::string corpus_token_for(std::string_view name) {
  std::string out;
  for (const auto& t : tokenize(name)) {
    if (!out.empty()) out += '_';
    out += t;
  }
  return out;
}

ClassLexicon ClassLexicon::from_specs(std::span<const LabelSpec> specs) {
  if (specs.empty()) fail(ErrorCode::kInvalidData, "label list is empty");

  ClassLexicon lex;
  for (const auto& spec : specs) {
    const int id = static_cast<int>(lex.labels_.size());
    const std::string token = corpus_token_for(spec.name);
    if (token.empty()) {
      fail(ErrorCode::kInvalidData, "label name '" + spec.name + "' has no alphanumeric characters");
    }
    if (lex.by_name_.count(spec.name) || lex.by_corpus_token_.count(token)) {
      fail(ErrorCode::kInvalidData, "duplicate label name '" + spec.name + "'");
    }
    lex.labels_.push_back({id, spec.name, spec.kind});
    lex.corpus_tokens_.push_back(token);
    lex.by_name_.emplace(spec.name, id);
    lex.by_corpus_token_.emplace(token, id);
  }

  auto add_synonym = [&lex](const std::string& surface, int id) {
    const auto tokens = tokenize(surface);
    if (tokens.empty()) {
      fail(ErrorCode::kInvalidData, "empty synonym for label '" + lex.labels_[id].name + "'");
    }
    const std::string key = join(tokens);
    auto [it, inserted] = lex.synonyms_.emplace(key, id);
    if (!inserted && it->second != id) {
      fail(ErrorCode::kInvalidData, "synonym '" + key + "' claimed by both '" +
                                        lex.labels_[it->second].name + "' and '" +
                                        lex.labels_[id].name + "'");
    }
    lex.max_synonym_tokens_ = std::max(lex.max_synonym_tokens_, tokens.size());
  };

  // Canonical names first so a synonym can never shadow another label's name.
  for (std::size_t i = 0; i < specs.size(); ++i) add_synonym(specs[i].name, int(i));
  for (std::size_t i = 0; i < specs.size(); ++i) {
    for (const auto& s : specs[i].synonyms) add_synonym(s, int(i));
  }
  return lex;
}

const ClassLabel& ClassLexicon::label(int id) const {
  if (!contains(id)) fail(ErrorCode::kNotFound, "class id " + std::to_string(id) + " out of range");
  return labels_[id];
}

std::optional<int> ClassLexicon::find(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it != by_name_.end()) return it->second;
  return find_corpus_token(corpus_token_for(name));
}

int ClassLexicon::id_of(std::string_view name) const {
  if (auto id = find(name)) return *id;
  fail(ErrorCode::kNotFound, "unknown class '" + std::string(name) + "'");
}

std::optional<int> ClassLexicon::find_corpus_token(std::string_view token) const {
  auto it = by_corpus_token_.find(std::string(token));
  if (it == by_corpus_token_.end()) return std::nullopt;
  return it->second;
}

std::vector<int> ClassLexicon::ids_of_kind(ClassKind kind) const {
  std::vector<int> out;
  for (const auto& l : labels_) {
    if (l.kind == kind) out.push_back(l.id);
  }
  return out;
}

std::vector<int> ClassLexicon::match_tokens(std::span<const std::string> tokens) const {
  std::vector<int> out;
  std::size_t i = 0;
  while (i < tokens.size()) {
    const std::size_t longest = std::min(max_synonym_tokens_, tokens.size() - i);
    bool matched = false;
    for (std::size_t len = longest; len >= 1 && !matched; --len) {
      std::string prefix = join(tokens.subspan(i, len - 1));
      if (!prefix.empty()) prefix += ' ';
      const std::string& last = tokens[i + len - 1];

      std::vector<std::string> candidates{last};
      if (last.size() > 2 && last.ends_with("es")) candidates.push_back(last.substr(0, last.size() - 2));
      if (last.size() > 1 && last.ends_with('s')) candidates.push_back(last.substr(0, last.size() - 1));

      for (const auto& c : candidates) {
        auto it = synonyms_.find(prefix + c);
        if (it != synonyms_.end()) {
          out.push_back(it->second);
          i += len;
          matched = true;
          break;
        }
      }
    }
    if (!matched) ++i;
  }
  return out;
}

ClassLexicon parse_lexicon(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kInvalidData, std::string("label file is not valid JSON: ") + e.what());
  }
  const nlohmann::json& arr = doc.is_object() && doc.contains("labels") ? doc["labels"] : doc;
  if (!arr.is_array()) fail(ErrorCode::kInvalidData, "label file must hold an array of labels");

  std::vector<LabelSpec> specs;
  for (const auto& item : arr) {
    if (!item.is_object() || !item.contains("name") || !item.contains("kind")) {
      fail(ErrorCode::kInvalidData, "label entry needs 'name' and 'kind'");
    }
    LabelSpec spec;
    spec.name = item["name"].get<std::string>();
    spec.kind = parse_kind(item["kind"].get<std::string>());
    if (item.contains("synonyms")) {
      spec.synonyms = item["synonyms"].get<std::vector<std::string>>();
    }
    specs.push_back(std::move(spec));
  }
  return ClassLexicon::from_specs(specs);
}

ClassLexicon load_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(std::filesystem::exists(path) ? ErrorCode::kIo : ErrorCode::kNotFound, "cannot open label file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_lexicon(ss.str());
}

std::string lexicon_id_table(const ClassLexicon& lexicon) {
  std::string out;
  for (const auto& l : lexicon.labels()) {
    out += std::to_string(l.id) + '\t' + l.name + '\t' + std::string(to_string(l.kind)) + '\n';
  }
  return out;
}

}  // namespace occlear
