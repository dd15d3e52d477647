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

// Assignment solvers: temperature-scaled Sinkhorn normalisation and the exact
// Hungarian method.

#ifndef ERALIGN_ASSIGNMENT_H_
#define ERALIGN_ASSIGNMENT_H_

#include <vector>

#include "eralign/common.h"

namespace eralign {

struct SinkhornParams {
  double temperature = 0.05;
  int iterations = 10;

  // Throws InvalidArgument unless temperature > 0 and iterations >= 1.
  void Validate() const;
};

// exp((X - rowmax) / τ), then `iterations` rounds of row normalisation
// followed by column normalisation, then one last row normalisation so rows
// sum to 1. Rows or columns whose mass underflowed to zero stay zero.
// Throws NumericError on non-finite input or output.
DenseMatrix sinkhorn(const DenseMatrix& scores, const SinkhornParams& params);

// Maximum-profit one-to-one assignment. Returns, per row, the assigned
// column, or -1 for rows left unassigned when rows > cols.
std::vector<int> hungarian(const DenseMatrix& profit);

// Per-row argmax, ties to the lower column; -1 for an empty row.
std::vector<int> row_argmax(const DenseMatrix& scores);

}  // namespace eralign

#endif  // ERALIGN_ASSIGNMENT_H_
