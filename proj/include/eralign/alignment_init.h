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

// Structure-enhanced similarity over the original graphs (entities) and the
// dual graphs (relations), followed by Sinkhorn assignment.

#ifndef ERALIGN_ALIGNMENT_INIT_H_
#define ERALIGN_ALIGNMENT_INIT_H_

#include "eralign/assignment.h"
#include "eralign/features.h"
#include "eralign/kg.h"

namespace eralign {

// Source/target graphs together with their duals.
struct AlignmentGraphs {
  KnowledgeGraph source;
  KnowledgeGraph target;
  DualKnowledgeGraph dual_source;
  DualKnowledgeGraph dual_target;

  static AlignmentGraphs Build(KnowledgeGraph source, KnowledgeGraph target,
                               const DualOptions& dual_options = {});
};

struct AdjacencyPair {
  WeightedAdjacency source;
  WeightedAdjacency target;
};

// Adjacency of both graphs with |T| pooled over source and target.
AdjacencyPair pooled_adjacency(const KnowledgeGraph& source,
                               const KnowledgeGraph& target);

struct FeatureSet {
  FeatureMatrix source_entities;
  FeatureMatrix target_entities;
  FeatureMatrix source_relations;
  FeatureMatrix target_relations;
};

// Σ_{l=0..depth} (A_S^l H_S)(A_T^l H_T)^T, by iterated propagation.
DenseMatrix structure_similarity(const WeightedAdjacency& adj_source,
                                 const FeatureMatrix& h_source,
                                 const WeightedAdjacency& adj_target,
                                 const FeatureMatrix& h_target, int depth);

struct InitialAlignment {
  DenseMatrix entities;   // X̂_ent
  DenseMatrix relations;  // X̂_rel
};

InitialAlignment initial_alignments(const AlignmentGraphs& graphs,
                                    const FeatureSet& features, int depth,
                                    const SinkhornParams& params);

}  // namespace eralign

#endif  // ERALIGN_ALIGNMENT_INIT_H_
