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

#include <cmath>
#include <limits>
#include <string>

#include "eralign/parallel.h"

namespace eralign {

namespace {

constexpr std::size_t kRowBlock = 256;

void NormalizeRows(DenseMatrix& s) {
  parallel_for_blocks(
      static_cast<std::size_t>(s.rows()), kRowBlock,
      [&](std::size_t begin, std::size_t end, std::size_t) {
        for (std::size_t i = begin; i < end; ++i) {
          auto row = s.row(static_cast<Eigen::Index>(i));
          const double sum = row.cast<double>().sum();
          if (sum > 0.0) row *= static_cast<float>(1.0 / sum);
        }
      });
}

void NormalizeCols(DenseMatrix& s) {
  const auto rows = static_cast<std::size_t>(s.rows());
  const std::size_t blocks = (rows + kRowBlock - 1) / kRowBlock;
  std::vector<Eigen::VectorXd> partial(blocks);
  parallel_for_blocks(rows, kRowBlock,
                      [&](std::size_t begin, std::size_t end, std::size_t b) {
                        partial[b] = s.middleRows(static_cast<Eigen::Index>(begin),
                                                  static_cast<Eigen::Index>(end - begin))
                                         .cast<double>()
                                         .colwise()
                                         .sum()
                                         .transpose();
                      });
  Eigen::VectorXd total = Eigen::VectorXd::Zero(s.cols());
  for (const auto& p : partial) total += p;
  Eigen::RowVectorXf inv(s.cols());
  for (Eigen::Index j = 0; j < s.cols(); ++j) {
    inv(j) = total(j) > 0.0 ? static_cast<float>(1.0 / total(j)) : 0.0f;
  }
  parallel_for_blocks(rows, kRowBlock,
                      [&](std::size_t begin, std::size_t end, std::size_t) {
                        for (std::size_t i = begin; i < end; ++i) {
                          s.row(static_cast<Eigen::Index>(i)).array() *=
                              inv.array();
                        }
                      });
}

}  // namespace

void SinkhornParams::Validate() const {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw InvalidArgument("sinkhorn temperature must be > 0");
  }
  if (iterations < 1) {
    throw InvalidArgument("sinkhorn iterations must be >= 1");
  }
}

DenseMatrix sinkhorn(const DenseMatrix& scores, const SinkhornParams& params) {
  params.Validate();
  if (!scores.allFinite()) {
    throw NumericError("sinkhorn: input contains non-finite values");
  }
  DenseMatrix s(scores.rows(), scores.cols());
  if (scores.size() == 0) return s;
  const double inv_tau = 1.0 / params.temperature;
  parallel_for_blocks(
      static_cast<std::size_t>(scores.rows()), kRowBlock,
      [&](std::size_t begin, std::size_t end, std::size_t) {
        for (std::size_t i = begin; i < end; ++i) {
          const auto r = static_cast<Eigen::Index>(i);
          const double max = scores.row(r).maxCoeff();
          for (Eigen::Index j = 0; j < scores.cols(); ++j) {
            s(r, j) = static_cast<float>(
                std::exp((static_cast<double>(scores(r, j)) - max) * inv_tau));
          }
        }
      });
  for (int k = 0; k < params.iterations; ++k) {
    NormalizeRows(s);
    NormalizeCols(s);
  }
  NormalizeRows(s);
  if (!s.allFinite()) {
    throw NumericError("sinkhorn: non-finite values after normalisation (tau=" +
                       std::to_string(params.temperature) + ")");
  }
  return s;
}

std::vector<int> hungarian(const DenseMatrix& profit) {
  const auto n_rows = static_cast<int>(profit.rows());
  const auto n_cols = static_cast<int>(profit.cols());
  if (n_rows == 0) return {};
  if (n_rows > n_cols) {
    const DenseMatrix transposed = profit.transpose();
    const std::vector<int> by_col = hungarian(transposed);
    std::vector<int> out(static_cast<std::size_t>(n_rows), -1);
    for (int c = 0; c < n_cols; ++c) {
      if (by_col[static_cast<std::size_t>(c)] >= 0) {
        out[static_cast<std::size_t>(by_col[static_cast<std::size_t>(c)])] = c;
      }
    }
    return out;
  }

  // Shortest augmenting paths with row/column potentials, minimising
  // -profit. Arrays are 1-based; index 0 is the virtual start column.
  const int n = n_rows, m = n_cols;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> match(m + 1, 0), way(m + 1, 0);
  std::vector<double> min_v(m + 1);
  std::vector<char> used(m + 1);
  auto cost = [&](int i, int j) {
    return -static_cast<double>(profit(i - 1, j - 1));
  };
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::fill(min_v.begin(), min_v.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0, j) - u[i0] - v[j];
        if (cur < min_v[j]) {
          min_v[j] = cur;
          way[j] = j0;
        }
        if (min_v[j] < delta) {
          delta = min_v[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          min_v[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> out(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= m; ++j) {
    if (match[j] != 0) out[static_cast<std::size_t>(match[j] - 1)] = j - 1;
  }
  return out;
}

std::vector<int> row_argmax(const DenseMatrix& scores) {
  std::vector<int> out(static_cast<std::size_t>(scores.rows()), -1);
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    if (scores.cols() == 0) continue;
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < scores.cols(); ++j) {
      if (scores(i, j) > scores(i, best)) best = j;
    }
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

}  // namespace eralign
