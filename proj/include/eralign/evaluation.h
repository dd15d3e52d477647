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

// Ranking metrics, detection quality and verification matrices, plus the
// JSON/text reports and the alignment TSV dump.

#ifndef ERALIGN_EVALUATION_H_
#define ERALIGN_EVALUATION_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "eralign/kg.h"
#include "eralign/score_matrix.h"
#include "eralign/verification.h"

namespace eralign {

using GroundTruth = std::vector<std::pair<EntityId, EntityId>>;

// Throws InvalidArgument when a source or target appears twice.
void validate_truth(const GroundTruth& truth);

// `src_key<TAB>tgt_key` lines, mapped through the graphs' on-disk ids.
GroundTruth load_truth(const std::filesystem::path& path,
                       const KnowledgeGraph& source,
                       const KnowledgeGraph& target);

// 1-based rank of each truth target in its row; equal-scored competitors
// rank ahead. In candidate-sparse rows absent entries read 0, and an absent
// true target ranks last.
std::vector<std::size_t> true_ranks(const ScoreMatrix& scores,
                                    const GroundTruth& truth);

struct RankingMetrics {
  std::map<std::size_t, double> hits;  // k -> Hit@k
  double mrr = 0.0;
  std::size_t evaluated = 0;
};

RankingMetrics hits_mrr(const ScoreMatrix& scores, const GroundTruth& truth,
                        std::span<const std::size_t> ks);

struct DetectionQuality {
  double auroc = 0.0;
  double aupr = 0.0;
};

// `erroneous[i]` marks positives; a lower metric means more likely
// erroneous. Throws InvalidArgument when only one class is present.
DetectionQuality detection_quality(std::span<const double> metric,
                                   const std::vector<bool>& erroneous);

struct VerificationMatrix {
  // Corrected (detected and cross-verified) sources, by correctness before
  // and after.
  std::size_t wrong_to_wrong = 0;
  std::size_t right_to_wrong = 0;
  std::size_t wrong_to_right = 0;
  std::size_t right_to_right = 0;
  // Detected but not cross-verified.
  std::size_t non_corrected_wrong = 0;
  std::size_t non_corrected_right = 0;
  // Never selected for verification.
  std::size_t non_detected_wrong = 0;
  std::size_t non_detected_right = 0;

  std::size_t corrected() const {
    return wrong_to_wrong + right_to_wrong + wrong_to_right + right_to_right;
  }
  std::size_t total() const {
    return corrected() + non_corrected_wrong + non_corrected_right +
           non_detected_wrong + non_detected_right;
  }
};

// `before`/`after` are argmax alignments (-1 when a row is empty). Only
// truth-covered sources are counted.
VerificationMatrix verification_matrix(std::span<const int> before,
                                       std::span<const int> after,
                                       std::span<const EntityId> detected,
                                       std::span<const EntityId> corrected,
                                       const GroundTruth& truth);

struct StepMetrics {
  std::string name;
  RankingMetrics ranking;
};

struct MetricsReport {
  std::vector<StepMetrics> steps;  // last step is the headline
  std::optional<RankingMetrics> relations;
  std::optional<DetectionQuality> confidence;
  std::optional<DetectionQuality> consistency;
  std::optional<VerificationMatrix> vmatrix;

  std::string ToJson() const;
  std::string ToText() const;
};

// Argmax per row; -1 for rows without entries.
std::vector<int> argmax_alignment(const ScoreMatrix& scores);

// Top-`k` targets per source row as `src_id<TAB>tgt_id<TAB>score<TAB>rank`
// using on-disk ids.
void write_alignment_tsv(const std::filesystem::path& path,
                         const ScoreMatrix& scores,
                         const KnowledgeGraph& source,
                         const KnowledgeGraph& target, std::size_t k);

}  // namespace eralign

#endif  // ERALIGN_EVALUATION_H_
