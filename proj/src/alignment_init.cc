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

#include "eralign/alignment_init.h"

#include <algorithm>
#include <string>

#include <Eigen/SparseCore>

#include "eralign/parallel.h"

namespace eralign {

namespace {

// Row block for the similarity product; bounds the working set per task.
constexpr std::size_t kProductBlock = 2048;

// [H | A H | ... | A^depth H]
DenseMatrix StackPropagated(const WeightedAdjacency& adj,
                            const FeatureMatrix& h, int depth) {
  const Eigen::Index d = h.cols();
  DenseMatrix stacked(h.rows(), d * (depth + 1));
  stacked.leftCols(d) = h;
  if (depth > 0) {
    const Eigen::SparseMatrix<float, Eigen::RowMajor> a =
        adj.weights().cast<float>();
    DenseMatrix level = h;
    for (int l = 1; l <= depth; ++l) {
      DenseMatrix next = a * level;
      level.swap(next);
      stacked.middleCols(d * l, d) = level;
    }
  }
  return stacked;
}

}  // namespace

AlignmentGraphs AlignmentGraphs::Build(KnowledgeGraph source,
                                       KnowledgeGraph target,
                                       const DualOptions& dual_options) {
  AlignmentGraphs g;
  g.dual_source = build_dual(source, dual_options);
  g.dual_target = build_dual(target, dual_options);
  g.source = std::move(source);
  g.target = std::move(target);
  return g;
}

AdjacencyPair pooled_adjacency(const KnowledgeGraph& source,
                               const KnowledgeGraph& target) {
  const std::size_t pooled = source.num_triples() + target.num_triples();
  const auto counts_s = source.relation_counts();
  const auto counts_t = target.relation_counts();
  return {build_adjacency(source, pooled, counts_s),
          build_adjacency(target, pooled, counts_t)};
}

DenseMatrix structure_similarity(const WeightedAdjacency& adj_source,
                                 const FeatureMatrix& h_source,
                                 const WeightedAdjacency& adj_target,
                                 const FeatureMatrix& h_target, int depth) {
  if (depth < 0) throw InvalidArgument("structure_similarity: depth < 0");
  if (adj_source.rows() != h_source.rows() ||
      adj_target.rows() != h_target.rows()) {
    throw InvalidArgument(
        "structure_similarity: adjacency has " +
        std::to_string(adj_source.rows()) + "/" +
        std::to_string(adj_target.rows()) + " rows, features have " +
        std::to_string(h_source.rows()) + "/" +
        std::to_string(h_target.rows()));
  }
  if (h_source.cols() != h_target.cols()) {
    throw InvalidArgument("structure_similarity: feature dimensions differ (" +
                          std::to_string(h_source.cols()) + " vs " +
                          std::to_string(h_target.cols()) + ")");
  }
  const DenseMatrix fs = StackPropagated(adj_source, h_source, depth);
  const DenseMatrix ft = StackPropagated(adj_target, h_target, depth);
  const DenseMatrix ft_t = ft.transpose();
  DenseMatrix x(fs.rows(), ft.rows());
  parallel_for_blocks(
      static_cast<std::size_t>(fs.rows()), kProductBlock,
      [&](std::size_t begin, std::size_t end, std::size_t) {
        const auto b = static_cast<Eigen::Index>(begin);
        const auto len = static_cast<Eigen::Index>(end - begin);
        x.middleRows(b, len).noalias() = fs.middleRows(b, len) * ft_t;
      });
  return x;
}

InitialAlignment initial_alignments(const AlignmentGraphs& graphs,
                                    const FeatureSet& features, int depth,
                                    const SinkhornParams& params) {
  const AdjacencyPair ent = pooled_adjacency(graphs.source, graphs.target);
  const AdjacencyPair rel =
      pooled_adjacency(graphs.dual_source, graphs.dual_target);
  InitialAlignment out;
  out.entities = sinkhorn(
      structure_similarity(ent.source, features.source_entities, ent.target,
                           features.target_entities, depth),
      params);
  out.relations = sinkhorn(
      structure_similarity(rel.source, features.source_relations, rel.target,
                           features.target_relations, depth),
      params);
  return out;
}

}  // namespace eralign
