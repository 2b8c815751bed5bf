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

#include "occlear/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "occlear/error.hpp"

namespace occlear {

Corpus build_corpus(std::span<const CaptionSet> captions,
                    const ClassLexicon& lexicon, CorpusMode mode) {
  Corpus corpus;
  corpus.mode = mode;
  std::set<std::int64_t> seen;
  for (const auto& set : captions) {
    if (set.captions.empty()) {
      fail(ErrorCode::kInvalidData, "image " + std::to_string(set.image_id) + " has no captions");
    }
    if (!seen.insert(set.image_id).second) {
      fail(ErrorCode::kInvalidData,
           "captions for image " + std::to_string(set.image_id) + " are split across groups");
    }
    std::vector<std::string> doc;
    for (const auto& caption : set.captions) {
      auto tokens = tokenize(caption);
      if (mode == CorpusMode::kOriginal) {
        doc.insert(doc.end(), std::make_move_iterator(tokens.begin()),
                   std::make_move_iterator(tokens.end()));
      } else {
        for (int id : lexicon.match_tokens(tokens)) doc.push_back(lexicon.corpus_token(id));
      }
    }
    corpus.documents.push_back(std::move(doc));
    corpus.image_ids.push_back(set.image_id);
  }
  return corpus;
}

std::vector<CaptionSet> parse_coco_captions(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kInvalidData, std::string("captions file is not valid JSON: ") + e.what());
  }
  const nlohmann::json& anns = doc.is_object() && doc.contains("annotations") ? doc["annotations"] : doc;
  if (!anns.is_array()) fail(ErrorCode::kInvalidData, "captions file has no annotation array");

  std::map<std::int64_t, std::vector<std::string>> grouped;
  for (const auto& a : anns) {
    if (!a.contains("image_id") || !a.contains("caption")) {
      fail(ErrorCode::kInvalidData, "caption annotation needs 'image_id' and 'caption'");
    }
    grouped[a["image_id"].get<std::int64_t>()].push_back(a["caption"].get<std::string>());
  }
  std::vector<CaptionSet> out;
  out.reserve(grouped.size());
  for (auto& [id, caps] : grouped) out.push_back({id, std::move(caps)});
  return out;
}

std::vector<CaptionSet> load_coco_captions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(std::filesystem::exists(path) ? ErrorCode::kIo : ErrorCode::kNotFound, "cannot open captions file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_coco_captions(ss.str());
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
  for (const auto& doc : corpus.documents) {
    for (std::size_t i = 0; i < doc.size(); ++i) {
      if (i) out << ' ';
      out << doc[i];
    }
    out << '\n';
  }
  if (!out) fail(ErrorCode::kIo, "failed writing corpus");
}

Corpus read_corpus(std::istream& in, CorpusMode mode) {
  Corpus corpus;
  corpus.mode = mode;
  std::string line;
  std::int64_t n = 0;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::vector<std::string> doc;
    for (std::string tok; ls >> tok;) {
      if (tok == corpus.eop_token) {
        fail(ErrorCode::kInvalidData, "EOP token inside a document on line " + std::to_string(n + 1));
      }
      doc.push_back(std::move(tok));
    }
    corpus.documents.push_back(std::move(doc));
    corpus.image_ids.push_back(n++);
  }
  return corpus;
}

IndexedCorpus index_corpus(const Corpus& corpus) {
  std::map<std::string, std::uint64_t> counts;
  for (const auto& doc : corpus.documents) {
    for (const auto& tok : doc) ++counts[tok];
  }
  std::vector<std::pair<std::string, std::uint64_t>> order(counts.begin(), counts.end());
  std::stable_sort(order.begin(), order.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  IndexedCorpus out;
  for (auto& [tok, c] : order) {
    out.vocab.index.emplace(tok, static_cast<int>(out.vocab.tokens.size()));
    out.vocab.tokens.push_back(tok);
    out.vocab.counts.push_back(c);
  }
  out.documents.reserve(corpus.documents.size());
  for (const auto& doc : corpus.documents) {
    std::vector<int> ids;
    ids.reserve(doc.size());
    for (const auto& tok : doc) ids.push_back(out.vocab.index.at(tok));
    out.documents.push_back(std::move(ids));
  }
  return out;
}

std::vector<int> flatten_with_eop(std::span<const std::vector<int>> documents, int window) {
  std::vector<int> flat;
  for (const auto& doc : documents) {
    flat.insert(flat.end(), doc.begin(), doc.end());
    flat.insert(flat.end(), static_cast<std::size_t>(std::max(window, 0)), kEopId);
  }
  return flat;
}

namespace {

void pairs_in_stream(std::span<const int> stream, int window,
                     const std::function<void(TokenPair)>& visit) {
  const auto n = static_cast<std::ptrdiff_t>(stream.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    if (stream[i] == kEopId) continue;
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - window);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, i + window);
    for (std::ptrdiff_t j = lo; j <= hi; ++j) {
      if (j == i || stream[j] == kEopId) continue;
      visit({stream[i], stream[j]});
    }
  }
}

}  // namespace

void for_each_pair(std::span<const std::vector<int>> documents, int window,
                   BoundaryMode mode, const std::function<void(TokenPair)>& visit) {
  if (window < 1) fail(ErrorCode::kInvalidArgument, "window must be >= 1");
  if (mode == BoundaryMode::kHardBoundary) {
    for (const auto& doc : documents) pairs_in_stream(doc, window, visit);
  } else {
    pairs_in_stream(flatten_with_eop(documents, window), window, visit);
  }
}

std::vector<TokenPair> generate_pairs(std::span<const std::vector<int>> documents,
                                      int window, BoundaryMode mode) {
  std::vector<TokenPair> out;
  for_each_pair(documents, window, mode, [&out](TokenPair p) { out.push_back(p); });
  return out;
}

}  // namespace occlear
