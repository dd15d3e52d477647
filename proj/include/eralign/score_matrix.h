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

#ifndef ERALIGN_SCORE_MATRIX_H_
#define ERALIGN_SCORE_MATRIX_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "eralign/common.h"

namespace eralign {

enum class Storage : std::uint8_t { kDense = 0, kCandidateSparse = 1 };

struct SparseEntry {
  std::uint32_t col = 0;
  float value = 0.0f;

  friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

// |source| x |target| alignment scores, either a full dense matrix or, per
// row, a list of (column, value) pairs. Values are always finite.
class ScoreMatrix {
 public:
  ScoreMatrix() = default;
  explicit ScoreMatrix(DenseMatrix dense);
  ScoreMatrix(std::size_t rows, std::size_t cols,
              std::vector<std::vector<SparseEntry>> entries);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Storage storage() const { return storage_; }
  bool is_dense() const { return storage_ == Storage::kDense; }

  // Requires dense storage.
  const DenseMatrix& dense() const;
  DenseMatrix& mutable_dense();

  // Requires candidate-sparse storage.
  std::span<const SparseEntry> sparse_row(std::size_t row) const;
  std::vector<SparseEntry>& mutable_sparse_row(std::size_t row);

  // Absent candidate-sparse entries read as 0.
  float value(std::size_t row, std::size_t col) const;
  float row_max(std::size_t row) const;

  DenseMatrix to_dense() const;

  friend bool operator==(const ScoreMatrix& a, const ScoreMatrix& b);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Storage storage_ = Storage::kDense;
  DenseMatrix dense_;
  std::vector<std::vector<SparseEntry>> sparse_;
};

// Keeps the top `per_row` entries of every row (ties to the lower column).
ScoreMatrix sparsify(const DenseMatrix& scores, std::size_t per_row);

// ALN1: "ALN1", u32 rows, u32 cols, u8 storage tag, then row-major f32 or,
// per row, u32 count followed by (u32 col, f32 value) pairs. Little-endian.
void save_aln1(const std::filesystem::path& path, const ScoreMatrix& scores);
ScoreMatrix load_aln1(const std::filesystem::path& path);

}  // namespace eralign

#endif  // ERALIGN_SCORE_MATRIX_H_
