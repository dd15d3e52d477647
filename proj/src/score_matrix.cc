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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "binary_io.h"

namespace eralign {

ScoreMatrix::ScoreMatrix(DenseMatrix dense)
    : rows_(static_cast<std::size_t>(dense.rows())),
      cols_(static_cast<std::size_t>(dense.cols())),
      storage_(Storage::kDense),
      dense_(std::move(dense)) {
  if (!dense_.allFinite()) {
    throw NumericError("score matrix contains non-finite values");
  }
}

ScoreMatrix::ScoreMatrix(std::size_t rows, std::size_t cols,
                         std::vector<std::vector<SparseEntry>> entries)
    : rows_(rows),
      cols_(cols),
      storage_(Storage::kCandidateSparse),
      sparse_(std::move(entries)) {
  if (sparse_.size() != rows_) {
    throw InvalidArgument("score matrix: expected " + std::to_string(rows_) +
                          " sparse rows, got " + std::to_string(sparse_.size()));
  }
  for (const auto& row : sparse_) {
    for (const SparseEntry& e : row) {
      if (e.col >= cols_) {
        throw InvalidArgument("score matrix: column out of range");
      }
      if (!std::isfinite(e.value)) {
        throw NumericError("score matrix contains non-finite values");
      }
    }
  }
}

const DenseMatrix& ScoreMatrix::dense() const {
  if (!is_dense()) throw InvalidArgument("score matrix is not dense");
  return dense_;
}

DenseMatrix& ScoreMatrix::mutable_dense() {
  if (!is_dense()) throw InvalidArgument("score matrix is not dense");
  return dense_;
}

std::span<const SparseEntry> ScoreMatrix::sparse_row(std::size_t row) const {
  if (is_dense()) throw InvalidArgument("score matrix is not sparse");
  return sparse_[row];
}

std::vector<SparseEntry>& ScoreMatrix::mutable_sparse_row(std::size_t row) {
  if (is_dense()) throw InvalidArgument("score matrix is not sparse");
  return sparse_[row];
}

float ScoreMatrix::value(std::size_t row, std::size_t col) const {
  if (is_dense()) {
    return dense_(static_cast<Eigen::Index>(row),
                  static_cast<Eigen::Index>(col));
  }
  for (const SparseEntry& e : sparse_[row]) {
    if (e.col == col) return e.value;
  }
  return 0.0f;
}

float ScoreMatrix::row_max(std::size_t row) const {
  if (is_dense()) {
    if (cols_ == 0) return 0.0f;
    return dense_.row(static_cast<Eigen::Index>(row)).maxCoeff();
  }
  if (cols_ == 0) return 0.0f;
  float best = -std::numeric_limits<float>::infinity();
  for (const SparseEntry& e : sparse_[row]) best = std::max(best, e.value);
  // Absent entries read as 0.
  if (sparse_[row].size() < cols_) best = std::max(best, 0.0f);
  return best;
}

DenseMatrix ScoreMatrix::to_dense() const {
  if (is_dense()) return dense_;
  DenseMatrix out = DenseMatrix::Zero(static_cast<Eigen::Index>(rows_),
                                      static_cast<Eigen::Index>(cols_));
  for (std::size_t i = 0; i < rows_; ++i) {
    for (const SparseEntry& e : sparse_[i]) {
      out(static_cast<Eigen::Index>(i), e.col) = e.value;
    }
  }
  return out;
}

bool operator==(const ScoreMatrix& a, const ScoreMatrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_ || a.storage_ != b.storage_) {
    return false;
  }
  if (a.is_dense()) return a.dense_ == b.dense_;
  return a.sparse_ == b.sparse_;
}

ScoreMatrix sparsify(const DenseMatrix& scores, std::size_t per_row) {
  const auto rows = static_cast<std::size_t>(scores.rows());
  const auto cols = static_cast<std::size_t>(scores.cols());
  const std::size_t keep = std::min(per_row, cols);
  std::vector<std::vector<SparseEntry>> entries(rows);
  std::vector<std::uint32_t> order(cols);
  for (std::size_t i = 0; i < rows; ++i) {
    std::iota(order.begin(), order.end(), 0u);
    const auto row = scores.row(static_cast<Eigen::Index>(i));
    std::partial_sort(order.begin(), order.begin() + keep, order.end(),
                      [&](std::uint32_t a, std::uint32_t b) {
                        return row(a) > row(b) || (row(a) == row(b) && a < b);
                      });
    entries[i].reserve(keep);
    for (std::size_t k = 0; k < keep; ++k) {
      entries[i].push_back({order[k], row(order[k])});
    }
  }
  return ScoreMatrix(rows, cols, std::move(entries));
}

void save_aln1(const std::filesystem::path& path, const ScoreMatrix& scores) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write("ALN1", 4);
  internal::WriteU32(out, static_cast<std::uint32_t>(scores.rows()));
  internal::WriteU32(out, static_cast<std::uint32_t>(scores.cols()));
  const auto tag = static_cast<char>(scores.storage());
  out.write(&tag, 1);
  if (scores.is_dense()) {
    const DenseMatrix& m = scores.dense();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) internal::WriteF32(out, m(i, j));
    }
  } else {
    for (std::size_t i = 0; i < scores.rows(); ++i) {
      const auto row = scores.sparse_row(i);
      internal::WriteU32(out, static_cast<std::uint32_t>(row.size()));
      for (const SparseEntry& e : row) {
        internal::WriteU32(out, e.col);
        internal::WriteF32(out, e.value);
      }
    }
  }
  if (!out) throw Error("write failed: " + path.string());
}

ScoreMatrix load_aln1(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  char magic[4];
  if (!in.read(magic, 4) || std::string_view(magic, 4) != "ALN1") {
    throw ParseError(path.string(), 0, "bad magic, expected ALN1");
  }
  std::uint32_t rows = 0, cols = 0;
  char tag = 0;
  if (!internal::ReadU32(in, rows) || !internal::ReadU32(in, cols) ||
      !in.read(&tag, 1)) {
    throw ParseError(path.string(), 0, "truncated header");
  }
  const auto truncated = [&](std::uint32_t row) {
    return ParseError(path.string(), 0,
                      "truncated payload at row " + std::to_string(row));
  };
  const auto non_finite = [&](std::uint32_t row) {
    return ParseError(path.string(), 0,
                      "non-finite value at row " + std::to_string(row));
  };
  if (tag == static_cast<char>(Storage::kDense)) {
    DenseMatrix m(static_cast<Eigen::Index>(rows),
                  static_cast<Eigen::Index>(cols));
    for (std::uint32_t i = 0; i < rows; ++i) {
      for (std::uint32_t j = 0; j < cols; ++j) {
        float v = 0.0f;
        if (!internal::ReadF32(in, v)) throw truncated(i);
        if (!std::isfinite(v)) throw non_finite(i);
        m(i, j) = v;
      }
    }
    return ScoreMatrix(std::move(m));
  }
  if (tag != static_cast<char>(Storage::kCandidateSparse)) {
    throw ParseError(path.string(), 0, "unknown storage tag");
  }
  std::vector<std::vector<SparseEntry>> entries(rows);
  for (std::uint32_t i = 0; i < rows; ++i) {
    std::uint32_t count = 0;
    if (!internal::ReadU32(in, count)) throw truncated(i);
    if (count > cols) {
      throw ParseError(path.string(), 0,
                       "row " + std::to_string(i) + " has more entries than columns");
    }
    entries[i].resize(count);
    for (SparseEntry& e : entries[i]) {
      if (!internal::ReadU32(in, e.col) || !internal::ReadF32(in, e.value)) {
        throw truncated(i);
      }
      if (e.col >= cols) {
        throw ParseError(path.string(), 0,
                         "column out of range at row " + std::to_string(i));
      }
      if (!std::isfinite(e.value)) throw non_finite(i);
    }
  }
  return ScoreMatrix(rows, cols, std::move(entries));
}

}  // namespace eralign
