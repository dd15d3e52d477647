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

#include "eralign/features.h"

#include <cmath>
#include <fstream>

#include <unicode/normalizer2.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "binary_io.h"
#include "eralign/kg.h"

namespace eralign {

namespace {

// Pads single-code-point names so they still produce one bigram.
constexpr char kBoundary[] = "\x02";

// Byte offsets of each code point start, plus the end offset.
std::vector<std::size_t> CodePointBounds(std::string_view s) {
  std::vector<std::size_t> bounds;
  const auto* bytes = reinterpret_cast<const std::uint8_t*>(s.data());
  const auto len = static_cast<std::int32_t>(s.size());
  std::int32_t i = 0;
  while (i < len) {
    bounds.push_back(static_cast<std::size_t>(i));
    UChar32 c;
    U8_NEXT(bytes, i, len, c);
  }
  bounds.push_back(s.size());
  return bounds;
}

}  // namespace

std::string normalize_text(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  icu::UnicodeString u = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<std::int32_t>(text.size())));
  u.toLower();
  std::string out;
  if (U_SUCCESS(status)) {
    icu::UnicodeString composed = nfc->normalize(u, status);
    if (U_SUCCESS(status)) {
      composed.toUTF8String(out);
      return out;
    }
  }
  u.toUTF8String(out);
  return out;
}

std::vector<std::string> char_bigrams(std::string_view normalized) {
  std::vector<std::string> out;
  if (normalized.empty()) return out;
  const std::vector<std::size_t> b = CodePointBounds(normalized);
  const std::size_t n = b.size() - 1;
  if (n == 1) {
    out.push_back(std::string(normalized) + kBoundary);
    return out;
  }
  out.reserve(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    out.emplace_back(normalized.substr(b[k], b[k + 2] - b[k]));
  }
  return out;
}

BigramVocab BigramVocab::Build(std::span<const std::string> source_names,
                               std::span<const std::string> target_names) {
  BigramVocab vocab;
  vocab.Add(source_names);
  vocab.Add(target_names);
  return vocab;
}

void BigramVocab::Add(std::span<const std::string> names) {
  for (const std::string& name : names) {
    for (std::string& g : char_bigrams(normalize_text(surface_name(name)))) {
      if (index_.emplace(g, order_.size()).second) order_.push_back(g);
    }
  }
}

std::optional<std::size_t> BigramVocab::find(const std::string& bigram) const {
  auto it = index_.find(bigram);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void normalize_rows(FeatureMatrix& features) {
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    const double norm = features.row(i).cast<double>().norm();
    if (norm > 0.0) {
      features.row(i) =
          (features.row(i).cast<double>() / norm).cast<float>();
    }
  }
}

FeatureMatrix bigram_features(std::span<const std::string> names,
                              const BigramVocab& vocab) {
  FeatureMatrix out = FeatureMatrix::Zero(
      static_cast<Eigen::Index>(names.size()),
      static_cast<Eigen::Index>(vocab.size()));
  for (std::size_t i = 0; i < names.size(); ++i) {
    for (const std::string& g :
         char_bigrams(normalize_text(surface_name(names[i])))) {
      if (auto col = vocab.find(g)) {
        out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(*col)) +=
            1.0f;
      }
    }
  }
  normalize_rows(out);
  return out;
}

FeatureMatrix load_embeddings(const std::filesystem::path& path,
                              std::size_t expected_rows) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  char magic[4];
  if (!in.read(magic, 4) || std::string_view(magic, 4) != "EMB1") {
    throw ParseError(path.string(), 0, "bad magic, expected EMB1");
  }
  std::uint32_t rows = 0, dim = 0;
  if (!internal::ReadU32(in, rows) || !internal::ReadU32(in, dim)) {
    throw ParseError(path.string(), 0, "truncated header");
  }
  if (rows != expected_rows) {
    throw ParseError(path.string(), 0,
                     "row count mismatch: file has " + std::to_string(rows) +
                         " rows, graph has " + std::to_string(expected_rows));
  }
  FeatureMatrix out(static_cast<Eigen::Index>(rows),
                    static_cast<Eigen::Index>(dim));
  for (std::uint32_t i = 0; i < rows; ++i) {
    for (std::uint32_t d = 0; d < dim; ++d) {
      float v = 0.0f;
      if (!internal::ReadF32(in, v)) {
        throw ParseError(path.string(), 0,
                         "truncated payload at row " + std::to_string(i));
      }
      if (!std::isfinite(v)) {
        throw ParseError(path.string(), 0,
                         "non-finite value at row " + std::to_string(i));
      }
      out(i, d) = v;
    }
  }
  normalize_rows(out);
  return out;
}

void save_embeddings(const std::filesystem::path& path,
                     const FeatureMatrix& features) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write("EMB1", 4);
  internal::WriteU32(out, static_cast<std::uint32_t>(features.rows()));
  internal::WriteU32(out, static_cast<std::uint32_t>(features.cols()));
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    for (Eigen::Index d = 0; d < features.cols(); ++d) {
      internal::WriteF32(out, features(i, d));
    }
  }
  if (!out) throw Error("write failed: " + path.string());
}

FeatureMatrix concat_features(const std::optional<FeatureMatrix>& semantic,
                              const std::optional<FeatureMatrix>& lexical) {
  if (!semantic && !lexical) {
    throw InvalidArgument("concat_features: no feature block supplied");
  }
  if (!lexical) return *semantic;
  if (!semantic) return *lexical;
  if (semantic->rows() != lexical->rows()) {
    throw InvalidArgument("concat_features: row count mismatch (" +
                          std::to_string(semantic->rows()) + " vs " +
                          std::to_string(lexical->rows()) + ")");
  }
  const float scale = static_cast<float>(1.0 / std::sqrt(2.0));
  FeatureMatrix out(semantic->rows(), semantic->cols() + lexical->cols());
  out.leftCols(semantic->cols()) = *semantic * scale;
  out.rightCols(lexical->cols()) = *lexical * scale;
  return out;
}

}  // namespace eralign
