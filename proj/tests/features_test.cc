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
#include <cstring>
#include <limits>

#include <gtest/gtest.h>

#include "test_util.h"

namespace eralign {
namespace {

void WriteEmb(const std::filesystem::path& p, std::uint32_t rows,
              std::uint32_t dim, const std::vector<float>& values) {
  std::string bytes = "EMB1";
  const auto put = [&](const void* v) {
    bytes.append(static_cast<const char*>(v), 4);
  };
  put(&rows);
  put(&dim);
  for (float v : values) put(&v);
  testutil::WriteFile(p, bytes);
}

double Cosine(const FeatureMatrix& a, int i, const FeatureMatrix& b, int j) {
  return a.row(i).cast<double>().dot(b.row(j).cast<double>()) /
         (a.row(i).cast<double>().norm() * b.row(j).cast<double>().norm());
}

TEST(NormalizeTextTest, LowercasesAndComposes) {
  EXPECT_EQ(normalize_text("ÉCOLE"), "école");
  EXPECT_EQ(normalize_text("e\xCC\x81"), "\xC3\xA9");  // e + combining acute
  EXPECT_EQ(normalize_text("北京"), "北京");
}

TEST(CharBigramsTest, CodePointBigrams) {
  EXPECT_EQ(char_bigrams("abc"), (std::vector<std::string>{"ab", "bc"}));
  EXPECT_EQ(char_bigrams("北京市"), (std::vector<std::string>{"北京", "京市"}));
  EXPECT_EQ(char_bigrams("a").size(), 1u);
  EXPECT_TRUE(char_bigrams("").empty());
}

TEST(BigramFeaturesTest, OneHotAndRepeatedBigram) {
  const std::vector<std::string> names = {"ab", "aaa"};
  const BigramVocab vocab = BigramVocab::Build(names, {});
  const FeatureMatrix f = bigram_features(names, vocab);
  ASSERT_EQ(f.cols(), 2);
  EXPECT_FLOAT_EQ(f(0, *vocab.find("ab")), 1.0f);
  EXPECT_FLOAT_EQ(f(1, *vocab.find("aa")), 1.0f);
  EXPECT_FLOAT_EQ(f.row(0).norm(), 1.0f);
}

TEST(BigramFeaturesTest, ProportionalCountsHaveCosineOne) {
  const std::vector<std::string> s = {"abab"}, t = {"ab"};
  const BigramVocab vocab = BigramVocab::Build(s, t);
  const FeatureMatrix fs = bigram_features(s, vocab);
  const FeatureMatrix ft = bigram_features(t, vocab);
  // abab -> {ab:2, ba:1}; ab -> {ab:1}; direct count-vector cosine.
  EXPECT_NEAR(Cosine(fs, 0, ft, 0), 2.0 / std::sqrt(5.0), 1e-6);
  const std::vector<std::string> u = {"abab"}, v = {"ABAB"};
  const BigramVocab vocab2 = BigramVocab::Build(u, v);
  EXPECT_NEAR(Cosine(bigram_features(u, vocab2), 0, bigram_features(v, vocab2), 0),
              1.0, 1e-6);
}

TEST(BigramFeaturesTest, UsesSurfaceForm) {
  const std::vector<std::string> s = {"http://x.org/resource/New_York"};
  const std::vector<std::string> t = {"new york"};
  const BigramVocab vocab = BigramVocab::Build(s, t);
  EXPECT_NEAR(Cosine(bigram_features(s, vocab), 0, bigram_features(t, vocab), 0),
              1.0, 1e-6);
}

TEST(BigramFeaturesTest, EmptyNameGivesZeroRow) {
  const std::vector<std::string> s = {""};
  const BigramVocab vocab = BigramVocab::Build(s, std::vector<std::string>{"xy"});
  EXPECT_EQ(bigram_features(s, vocab).row(0).norm(), 0.0f);
}

TEST(LoadEmbeddingsTest, NormalizesRows) {
  testutil::TempDir dir;
  WriteEmb(dir / "e.emb", 2, 3, {1, 0, 0, 0, 2, 0});
  const FeatureMatrix f = load_embeddings(dir / "e.emb", 2);
  EXPECT_FLOAT_EQ(f(0, 0), 1.0f);
  EXPECT_FLOAT_EQ(f(1, 1), 1.0f);
  EXPECT_FLOAT_EQ(f(1, 0), 0.0f);
}

TEST(LoadEmbeddingsTest, RowCountMismatchNamesBothCounts) {
  testutil::TempDir dir;
  WriteEmb(dir / "e.emb", 2, 1, {1, 1});
  try {
    load_embeddings(dir / "e.emb", 5);
    FAIL();
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find('2'), std::string::npos);
    EXPECT_NE(msg.find('5'), std::string::npos);
  }
}

TEST(LoadEmbeddingsTest, NonFiniteNamesRow) {
  testutil::TempDir dir;
  WriteEmb(dir / "e.emb", 3, 1, {1, 1, std::numeric_limits<float>::quiet_NaN()});
  try {
    load_embeddings(dir / "e.emb", 3);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos) << e.what();
  }
}

TEST(LoadEmbeddingsTest, BadMagicAndTruncation) {
  testutil::TempDir dir;
  testutil::WriteFile(dir / "bad.emb", "EMB2\x01\0\0\0\x01\0\0\0");
  EXPECT_THROW(load_embeddings(dir / "bad.emb", 1), ParseError);
  WriteEmb(dir / "short.emb", 2, 2, {1, 2, 3});
  EXPECT_THROW(load_embeddings(dir / "short.emb", 2), ParseError);
}

TEST(LoadEmbeddingsTest, RoundTrip) {
  testutil::TempDir dir;
  FeatureMatrix f(2, 2);
  f << 0.6f, 0.8f, 1.0f, 0.0f;
  save_embeddings(dir / "r.emb", f);
  EXPECT_EQ(load_embeddings(dir / "r.emb", 2), f);
}

TEST(ConcatFeaturesTest, Blockwise) {
  FeatureMatrix s(1, 2), l(1, 2);
  s << 1, 0;
  l << 0, 1;
  const FeatureMatrix c = concat_features(s, l);
  ASSERT_EQ(c.cols(), 4);
  const float h = static_cast<float>(1.0 / std::sqrt(2.0));
  EXPECT_FLOAT_EQ(c(0, 0), h);
  EXPECT_FLOAT_EQ(c(0, 3), h);
  EXPECT_FLOAT_EQ(c.row(0).norm(), 1.0f);
  EXPECT_EQ(concat_features(s, std::nullopt), s);
  EXPECT_THROW(concat_features(std::nullopt, std::nullopt), InvalidArgument);
  EXPECT_THROW(concat_features(s, FeatureMatrix(2, 2)), InvalidArgument);
}

TEST(ConcatFeaturesTest, DotIsMeanOfBlockCosines) {
  FeatureMatrix s1(1, 3), s2(1, 3), l1(1, 2), l2(1, 2);
  s1 << 0.6f, 0.8f, 0.0f;
  s2 << 0.0f, 0.6f, 0.8f;
  l1 << 1.0f, 0.0f;
  l2 << 0.6f, 0.8f;
  const FeatureMatrix a = concat_features(s1, l1), b = concat_features(s2, l2);
  const double sem = s1.row(0).dot(s2.row(0)), lex = l1.row(0).dot(l2.row(0));
  EXPECT_NEAR(a.row(0).dot(b.row(0)), (sem + lex) / 2.0, 1e-6);
}

}  // namespace
}  // namespace eralign
