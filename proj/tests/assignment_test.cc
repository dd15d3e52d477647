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

#include "eralign/assignment.h"

#include <random>

#include <gtest/gtest.h>

#include "oracles.h"

namespace eralign {
namespace {

DenseMatrix Random(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  DenseMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = u(rng);
  return m;
}

oracle::Mat ToMat(const DenseMatrix& m) {
  oracle::Mat out(m.rows(), std::vector<double>(m.cols()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
  return out;
}

TEST(SinkhornTest, DominantDiagonal) {
  DenseMatrix x(2, 2);
  x << 10, 0, 0, 10;
  const DenseMatrix p = sinkhorn(x, {.temperature = 0.1, .iterations = 10});
  EXPECT_LT(p(0, 1), 1e-8);
  EXPECT_LT(p(1, 0), 1e-8);
  EXPECT_NEAR(p(0, 0), 1.0, 1e-6);
}

TEST(SinkhornTest, UniformIsFixedPoint) {
  const DenseMatrix x = DenseMatrix::Constant(5, 5, 3.0f);
  const DenseMatrix p = sinkhorn(x, {});
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) EXPECT_NEAR(p(i, j), 0.2, 1e-6);
}

TEST(SinkhornTest, RowsSumToOneAndColumnsNearOne) {
  const DenseMatrix p = sinkhorn(Random(30, 30, 3), {.temperature = 0.1, .iterations = 50});
  for (int i = 0; i < 30; ++i) {
    EXPECT_NEAR(p.row(i).sum(), 1.0, 1e-5);
    EXPECT_NEAR(p.col(i).sum(), 1.0, 1e-2);
  }
}

TEST(SinkhornTest, MatchesNaiveIteration) {
  const DenseMatrix x = Random(6, 4, 9);
  const double tau = 0.2;
  const int k = 3;
  oracle::Mat p = ToMat(x);
  for (auto& row : p) {
    const double m = *std::max_element(row.begin(), row.end());
    for (double& v : row) v = std::exp((v - m) / tau);
  }
  const auto row_norm = [&] {
    for (auto& row : p) {
      double s = 0;
      for (double v : row) s += v;
      for (double& v : row) v /= s;
    }
  };
  for (int it = 0; it < k; ++it) {
    row_norm();
    for (std::size_t j = 0; j < p[0].size(); ++j) {
      double s = 0;
      for (auto& row : p) s += row[j];
      for (auto& row : p) row[j] /= s;
    }
  }
  row_norm();
  const DenseMatrix got = sinkhorn(x, {.temperature = tau, .iterations = k});
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 4; ++j) EXPECT_NEAR(got(i, j), p[i][j], 1e-5);
}

TEST(SinkhornTest, InvalidInput) {
  DenseMatrix x(1, 1);
  x(0, 0) = std::nanf("");
  EXPECT_THROW(sinkhorn(x, {}), NumericError);
  EXPECT_THROW(sinkhorn(Random(2, 2, 1), {.temperature = 0.0}), InvalidArgument);
  EXPECT_THROW(sinkhorn(Random(2, 2, 1), {.iterations = 0}), InvalidArgument);
}

TEST(HungarianTest, SmallCases) {
  EXPECT_EQ(hungarian(DenseMatrix::Identity(4, 4)), (std::vector<int>{0, 1, 2, 3}));
  DenseMatrix swap(2, 2);
  swap << 0, 1, 1, 0;
  EXPECT_EQ(hungarian(swap), (std::vector<int>{1, 0}));
}

TEST(HungarianTest, MatchesExhaustiveSearch) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const DenseMatrix x = Random(7, 7, seed);
    const std::vector<int> got = hungarian(x);
    double value = 0;
    for (int i = 0; i < 7; ++i) value += x(i, got[i]);
    EXPECT_NEAR(value, oracle::BestAssignment(ToMat(x)), 1e-5) << "seed " << seed;
  }
}

TEST(HungarianTest, BeatsRandomPermutations) {
  const DenseMatrix x = Random(5, 5, 77);
  const std::vector<int> got = hungarian(x);
  double best = 0;
  for (int i = 0; i < 5; ++i) best += x(i, got[i]);
  std::mt19937_64 rng(1);
  std::vector<int> p = {0, 1, 2, 3, 4};
  for (int trial = 0; trial < 1000; ++trial) {
    std::shuffle(p.begin(), p.end(), rng);
    double v = 0;
    for (int i = 0; i < 5; ++i) v += x(i, p[i]);
    EXPECT_GE(best + 1e-9, v);
  }
}

TEST(HungarianTest, Rectangular) {
  DenseMatrix wide(2, 3);
  wide << 0, 0, 5, 4, 0, 0;
  EXPECT_EQ(hungarian(wide), (std::vector<int>{2, 0}));
  DenseMatrix tall(3, 2);
  tall << 0, 1, 9, 0, 0, 2;
  EXPECT_EQ(hungarian(tall), (std::vector<int>{-1, 0, 1}));
}

TEST(RowArgmaxTest, TiesToLowerColumn) {
  DenseMatrix x(2, 3);
  x << 1, 3, 3, 0, 0, 0;
  EXPECT_EQ(row_argmax(x), (std::vector<int>{1, 0}));
}

}  // namespace
}  // namespace eralign
