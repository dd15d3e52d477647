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

// Erroneous-alignment verification: detect doubtful rows by confidence and
// consistency, rerank their top-K candidates with a text scorer over
// linearised neighbour triples, and accept a correction only when the
// reranking from the target side agrees.

#ifndef ERALIGN_VERIFICATION_H_
#define ERALIGN_VERIFICATION_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "eralign/kg.h"
#include "eralign/score_matrix.h"
#include "eralign/scorer.h"

namespace eralign {

struct DetectionScores {
  std::vector<double> confidence;   // row max of the refined scores
  std::vector<double> consistency;  // cosine(initial row, refined row)
  // Rows whose cosine was undefined (zero norm); their consistency is 0.
  std::vector<EntityId> zero_norm_rows;
};

DetectionScores detection_scores(const ScoreMatrix& initial,
                                 const ScoreMatrix& refined);

// Smallest set {conf rank < m} ∪ {cons rank < m} holding at least
// ceil(fraction·n) entities, where ranks order entities by (metric, id) and
// m is found by bisection. Returned ids are ascending.
std::vector<EntityId> select_for_verification(const DetectionScores& scores,
                                              double target_fraction);

// "<entity>, which <rel> is <tail>, <rel> is <tail>." or "<entity>." when
// `triples` is empty. Names are rendered in surface form.
std::string linearize(const KnowledgeGraph& kg, EntityId entity,
                      std::span<const Triple> triples);

// Neighbour triples of `entity` by descending log(|T|/|T_r|), ties by
// relation id then tail id.
std::vector<Triple> order_source_triples(
    const KnowledgeGraph& kg, EntityId entity, std::size_t pooled_triple_count,
    std::span<const std::size_t> relation_counts);

// Greedy alignment of the target's neighbour triples to `source_order`: each
// source triple (i,p,i') in turn takes the unused target triple (j,q,j')
// maximising relations[p,q]·entities[i',j'] (ties to the earlier triple in
// the target's own inverse-frequency order). Leftovers follow in that order.
std::vector<Triple> order_target_triples(
    const KnowledgeGraph& target, EntityId entity,
    std::span<const Triple> source_order, const ScoreMatrix& relations,
    const ScoreMatrix& entities, std::size_t pooled_triple_count,
    std::span<const std::size_t> relation_counts);

struct VerificationParams {
  double target_fraction = 0.2;
  std::size_t candidates = 20;     // K
  std::size_t linearize_cap = 32;  // triples per linearised text

  void Validate() const;
};

// Builds the linearised texts used for reranking.
class Linearizer {
 public:
  Linearizer(const KnowledgeGraph& source, const KnowledgeGraph& target,
             const ScoreMatrix& relations, const ScoreMatrix& entities,
             std::size_t cap);

  std::string Source(EntityId i) const;
  // Text of target j with its triples ordered consistently with source i.
  std::string Target(EntityId j, EntityId i) const;

 private:
  std::vector<Triple> SourceOrder(EntityId i) const;

  const KnowledgeGraph& source_;
  const KnowledgeGraph& target_;
  const ScoreMatrix& relations_;
  const ScoreMatrix& entities_;
  std::size_t cap_;
  std::size_t pooled_;
  std::vector<std::size_t> source_counts_;
  std::vector<std::size_t> target_counts_;
};

struct RankedCandidate {
  EntityId id = 0;
  double scorer_score = 0.0;
  double prior = 0.0;
};

// Sorts target candidates of source `i` by descending scorer score, ties by
// descending prior score, then by input order.
std::vector<RankedCandidate> rerank(EntityId i,
                                    std::span<const EntityId> candidates,
                                    Scorer& scorer, const Linearizer& texts,
                                    const ScoreMatrix& entities);

// Same, for source candidates of target `j`.
std::vector<RankedCandidate> rerank_sources(EntityId j,
                                            std::span<const EntityId> candidates,
                                            Scorer& scorer,
                                            const Linearizer& texts,
                                            const ScoreMatrix& entities);

// Top-k columns of a row (ties to the lower column) and top-k rows of a
// column (ties to the lower row).
std::vector<EntityId> top_k_row(const ScoreMatrix& scores, std::size_t row,
                                std::size_t k);
std::vector<EntityId> top_k_col(const ScoreMatrix& scores, std::size_t col,
                                std::size_t k);

struct VerificationVerdict {
  EntityId source = 0;
  EntityId old_top = 0;
  EntityId proposed = 0;
  bool accepted = false;
  std::vector<EntityId> candidates;   // Cand(i), reranked order
  std::vector<double> scorer_scores;  // aligned with `candidates`
};

struct CorrectionResult {
  ScoreMatrix corrected;
  std::vector<VerificationVerdict> verdicts;  // ascending source id
};

// Cross-verification of every selected source. Accepted rows get the
// proposed target raised to row max + 1; all other rows are left untouched.
CorrectionResult cross_verify_and_correct(const ScoreMatrix& refined,
                                          std::span<const EntityId> selected,
                                          Scorer& scorer,
                                          const Linearizer& texts,
                                          std::size_t candidates);

struct VerificationResult {
  DetectionScores detection;
  std::vector<EntityId> selected;
  CorrectionResult correction;
};

// Detection, selection and correction in one call.
VerificationResult verify(const ScoreMatrix& initial_entities,
                          const ScoreMatrix& refined_entities,
                          const ScoreMatrix& refined_relations,
                          const KnowledgeGraph& source,
                          const KnowledgeGraph& target, Scorer& scorer,
                          const VerificationParams& params);

}  // namespace eralign

#endif  // ERALIGN_VERIFICATION_H_
