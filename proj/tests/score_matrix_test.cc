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

#include "eralign/score_matrix.h"

#include <gtest/gtest.h>

#include "test_util.h"

namespace eralign {
namespace {

TEST(ScoreMatrixTest, SparseReadsAbsentAsZero) {
  const ScoreMatrix m(2, 3, {{{2, 0.5f}}, {{0, -1.0f}}});
  EXPECT_EQ(m.value(0, 2), 0.5f);
  EXPECT_EQ(m.value(0, 1), 0.0f);
  EXPECT_EQ(m.row_max(0), 0.5f);
  EXPECT_EQ(m.row_max(1), 0.0f);
  const DenseMatrix d = m.to_dense();
  EXPECT_EQ(d(1, 0), -1.0f);
}

TEST(ScoreMatrixTest, RejectsNonFinite) {
  DenseMatrix d(1, 1);
  d(0, 0) = std::numeric_limits<float>::infinity();
  EXPECT_THROW(ScoreMatrix{d}, NumericError);
  EXPECT_THROW(ScoreMatrix(1, 2, {{{5, 1.0f}}}), InvalidArgument);
}

TEST(ScoreMatrixTest, SparsifyKeepsTopPerRowTiesLow) {
  DenseMatrix d(1, 4);
  d << 0.5f, 0.9f, 0.5f, 0.1f;
  const ScoreMatrix s = sparsify(d, 2);
  ASSERT_EQ(s.sparse_row(0).size(), 2u);
  EXPECT_EQ(s.value(0, 1), 0.9f);
  EXPECT_EQ(s.value(0, 0), 0.5f);
  EXPECT_EQ(s.value(0, 2), 0.0f);
}

TEST(Aln1Test, DenseAndSparseRoundTrip) {
  testutil::TempDir dir;
  DenseMatrix d(2, 3);
  d << 1, 2, 3, 4, 5, 6;
  save_aln1(dir / "d.aln1", ScoreMatrix(d));
  EXPECT_EQ(load_aln1(dir / "d.aln1"), ScoreMatrix(d));
  EXPECT_EQ(std::filesystem::file_size(dir / "d.aln1"), 13u + 6 * 4);

  const ScoreMatrix s(2, 5, {{{4, 0.25f}, {1, 0.5f}}, {}});
  save_aln1(dir / "s.aln1", s);
  const ScoreMatrix back = load_aln1(dir / "s.aln1");
  EXPECT_EQ(back, s);
  EXPECT_EQ(back.storage(), Storage::kCandidateSparse);
}

TEST(Aln1Test, HeaderLayout) {
  testutil::TempDir dir;
  DenseMatrix d(1, 1);
  d << 1.0f;
  save_aln1(dir / "x.aln1", ScoreMatrix(d));
  const std::string bytes = testutil::ReadFile(dir / "x.aln1");
  EXPECT_EQ(bytes.substr(0, 4), "ALN1");
  EXPECT_EQ(bytes.substr(4, 9), std::string("\x01\0\0\0\x01\0\0\0\0", 9));
  EXPECT_EQ(bytes.substr(13), std::string("\0\0\x80\x3f", 4));
}

TEST(Aln1Test, CorruptFilesAreRejected) {
  testutil::TempDir dir;
  testutil::WriteFile(dir / "magic", "ALN2");
  EXPECT_THROW(load_aln1(dir / "magic"), ParseError);
  testutil::WriteFile(dir / "tag", std::string("ALN1\x01\0\0\0\x01\0\0\0\x07", 13));
  EXPECT_THROW(load_aln1(dir / "tag"), ParseError);
  testutil::WriteFile(dir / "short", std::string("ALN1\x02\0\0\0\x01\0\0\0\0\0\0", 15));
  EXPECT_THROW(load_aln1(dir / "short"), ParseError);
  testutil::WriteFile(dir / "nan",
                      std::string("ALN1\x01\0\0\0\x01\0\0\0\0\0\0\xc0\x7f", 17));
  EXPECT_THROW(load_aln1(dir / "nan"), ParseError);
}

}  // namespace
}  // namespace eralign
