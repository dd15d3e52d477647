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

// Iterative fusion of entity- and relation-level scores by 1-hop neighbour
// triple matching.
//
// For a source/target pair (i, j) the fused score is
//
//   λ·S[i,j] + (1-λ) · Σ S[i',j'] · softmax_{(p,q)}(S_label[p,q])
//
// where the sum and the softmax run over every pair of neighbour triples
// (i,p,i') and (j,q,j'). Entity scores are fused over the reverse-augmented
// original graphs with relation scores as labels; relation scores over the
// dual graphs with entity scores as labels. Only the top-C candidates of each
// row are fused; the other entries decay to λ·S[i,j]. A pair with no
// neighbour triple on one side keeps its score.

#ifndef ERALIGN_REFINEMENT_H_
#define ERALIGN_REFINEMENT_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "eralign/alignment_init.h"
#include "eralign/assignment.h"
#include "eralign/kg.h"

namespace eralign {

struct Candidate {
  std::uint32_t col = 0;
  float score = 0.0f;
};

// Per source row, up to C distinct columns by descending score (ties to the
// lower column id).
struct CandidateSet {
  std::vector<std::vector<Candidate>> rows;

  std::span<const Candidate> row(std::size_t i) const { return rows[i]; }
};

CandidateSet build_candidates(const DenseMatrix& scores,
                              std::size_t per_row);

struct NeighborTriple {
  std::uint32_t label = 0;     // relation (entity for dual graphs)
  std::uint32_t neighbor = 0;  // other end of the triple
  double weight = 0.0;         // inverse-frequency weight of `label`
};

// Neighbour triples of T' per node, heaviest first (ties by label, then
// neighbour), truncated to `hub_cap` per node.
class NeighborIndex {
 public:
  static NeighborIndex Build(const KnowledgeGraph& kg,
                             std::size_t pooled_triple_count,
                             std::size_t hub_cap);

  std::size_t size() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::span<const NeighborTriple> of(std::size_t node) const {
    return {list_.data() + offsets_[node], list_.data() + offsets_[node + 1]};
  }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NeighborTriple> list_;
};

struct RefinementParams {
  double lambda = 0.5;
  int iterations = 2;
  std::size_t candidates = 50;
  std::size_t hub_cap = 64;

  void Validate() const;
};

struct RefinementContext {
  NeighborIndex source;
  NeighborIndex target;
  NeighborIndex dual_source;
  NeighborIndex dual_target;

  static RefinementContext Build(const AlignmentGraphs& graphs,
                                 std::size_t hub_cap);
};

struct ScorePair {
  DenseMatrix entities;
  DenseMatrix relations;
};

// One fusion iteration. Both outputs are computed from the inputs only.
// Throws InvalidArgument on shape mismatch or an empty candidate row.
ScorePair refine_step(const DenseMatrix& entity_scores,
                      const DenseMatrix& relation_scores,
                      const RefinementContext& context, double lambda,
                      const CandidateSet& entity_candidates,
                      const CandidateSet& relation_candidates);

// S_N after `params.iterations` steps, candidates rebuilt every iteration.
ScorePair fuse_scores(const DenseMatrix& initial_entities,
                      const DenseMatrix& initial_relations,
                      const AlignmentGraphs& graphs,
                      const RefinementParams& params);

// Sinkhorn of the fused scores: (Ŝ_ent, Ŝ_rel).
ScorePair refine(const DenseMatrix& initial_entities,
                 const DenseMatrix& initial_relations,
                 const AlignmentGraphs& graphs, const RefinementParams& params,
                 const SinkhornParams& sinkhorn_params);

}  // namespace eralign

#endif  // ERALIGN_REFINEMENT_H_
