/*
 * Copyright 2026 The ERAlign Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef ERALIGN_FEATURES_H_
#define ERALIGN_FEATURES_H_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "eralign/common.h"

namespace eralign {

// Row i is the feature vector of node i. Rows are unit-norm, or all-zero for
// nodes with an empty name.
using FeatureMatrix = DenseMatrix;

// NFC-normalised, lowercased UTF-8.
std::string normalize_text(std::string_view text);

// Character bigrams of already-normalised text, as UTF-8 substrings. A single
// code point yields one bigram padded with a boundary marker; empty text
// yields none.
std::vector<std::string> char_bigrams(std::string_view normalized);

// Bigram -> column, numbered by first occurrence over the source names and
// then the target names.
class BigramVocab {
 public:
  static BigramVocab Build(std::span<const std::string> source_names,
                           std::span<const std::string> target_names);

  std::size_t size() const { return order_.size(); }
  std::optional<std::size_t> find(const std::string& bigram) const;
  const std::vector<std::string>& bigrams() const { return order_; }

 private:
  void Add(std::span<const std::string> names);

  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::string> order_;
};

// L2-normalised bigram count vectors of the names' surface forms.
FeatureMatrix bigram_features(std::span<const std::string> names,
                              const BigramVocab& vocab);

// Reads an EMB1 file and L2-normalises its rows. Throws ParseError on a bad
// header, truncated payload, row-count mismatch or non-finite value.
FeatureMatrix load_embeddings(const std::filesystem::path& path,
                              std::size_t expected_rows);

void save_embeddings(const std::filesystem::path& path,
                     const FeatureMatrix& features);

// Blockwise (semantic/√2 ⊕ lexical/√2). A missing block passes the other one
// through unchanged; both missing is an error.
FeatureMatrix concat_features(const std::optional<FeatureMatrix>& semantic,
                              const std::optional<FeatureMatrix>& lexical);

void normalize_rows(FeatureMatrix& features);

}  // namespace eralign

#endif  // ERALIGN_FEATURES_H_
