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
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "occlear/lexicon.hpp"

namespace occlear {

struct CaptionSet {
  std::int64_t image_id = 0;
  std::vector<std::string> captions;
};

enum class CorpusMode { kOriginal, kModified };

// Tokenizer output is purely alphanumeric, so this can never collide with a
// caption word.
inline constexpr std::string_view kEopToken = "</eop>";

struct Corpus {
  // One token sequence per image, in image order.
  std::vector<std::vector<std::string>> documents;
  std::vector<std::int64_t> image_ids;
  CorpusMode mode = CorpusMode::kOriginal;
  std::string eop_token{kEopToken};
};

// One document per image: the image's captions tokenized and concatenated in
// the given order. Modified mode keeps only class tokens (lexicon corpus
// token form). Images whose filtered document is empty are kept.
Corpus build_corpus(std::span<const CaptionSet> captions,
                    const ClassLexicon& lexicon, CorpusMode mode);

// COCO captions annotation file ({"annotations": [{image_id, caption}]}),
// grouped by image id ascending, captions kept in file order.
std::vector<CaptionSet> parse_coco_captions(std::string_view json_text);
std::vector<CaptionSet> load_coco_captions(const std::filesystem::path& path);

// One whitespace-joined document per line; empty documents are empty lines.
void write_corpus(std::ostream& out, const Corpus& corpus);
Corpus read_corpus(std::istream& in, CorpusMode mode = CorpusMode::kOriginal);

// Token <-> dense id mapping with occurrence counts. Ordered by descending
// count, ties broken by token.
struct Vocabulary {
  std::vector<std::string> tokens;
  std::vector<std::uint64_t> counts;
  std::unordered_map<std::string, int> index;

  std::size_t size() const { return tokens.size(); }
};

struct IndexedCorpus {
  Vocabulary vocab;
  std::vector<std::vector<int>> documents;
};

IndexedCorpus index_corpus(const Corpus& corpus);

enum class BoundaryMode {
  kHardBoundary,  // windows are clipped at document edges
  kLiteralEop,    // `window` EOP tokens are inserted between documents
};

inline constexpr int kEopId = -1;

struct TokenPair {
  int center = 0;
  int context = 0;
  friend bool operator==(const TokenPair&, const TokenPair&) = default;
  friend auto operator<=>(const TokenPair&, const TokenPair&) = default;
};

// Documents joined into one stream with `window` EOP ids after every
// document, as in the literal end-of-paragraph construction.
std::vector<int> flatten_with_eop(std::span<const std::vector<int>> documents, int window);

// Visits every skip-gram (center, context) pair with 1 <= |offset| <= window,
// centers in stream order, contexts left to right. Pairs touching an EOP id
// are never passed to `visit`. Throws if window < 1.
void for_each_pair(std::span<const std::vector<int>> documents, int window,
                   BoundaryMode mode, const std::function<void(TokenPair)>& visit);

std::vector<TokenPair> generate_pairs(std::span<const std::vector<int>> documents,
                                      int window, BoundaryMode mode);

}  // namespace occlear
