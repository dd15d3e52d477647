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

#include "eralign/refinement.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <tuple>

#include "eralign/parallel.h"

namespace eralign {

namespace {

constexpr std::size_t kRowBlock = 64;

// Fuses one level: `node_scores` are the scores being refined, `label_scores`
// weight the triple pairs.
DenseMatrix FuseLevel(const DenseMatrix& node_scores,
                      const DenseMatrix& label_scores,
                      const NeighborIndex& source, const NeighborIndex& target,
                      double lambda, const CandidateSet& candidates) {
  const auto rows = static_cast<std::size_t>(node_scores.rows());
  const auto cols = static_cast<std::size_t>(node_scores.cols());
  if (source.size() != rows || target.size() != cols) {
    throw InvalidArgument("refine_step: score matrix is " +
                          std::to_string(rows) + "x" + std::to_string(cols) +
                          " but graphs have " + std::to_string(source.size()) +
                          "/" + std::to_string(target.size()) + " nodes");
  }
  if (candidates.rows.size() != rows) {
    throw InvalidArgument("refine_step: candidate set has " +
                          std::to_string(candidates.rows.size()) +
                          " rows, expected " + std::to_string(rows));
  }
  for (std::size_t i = 0; i < rows; ++i) {
    if (cols > 0 && candidates.rows[i].empty()) {
      throw InvalidArgument("refine_step: empty candidate set for row " +
                            std::to_string(i));
    }
  }

  DenseMatrix out = node_scores;
  std::vector<char> target_isolated(cols);
  for (std::size_t j = 0; j < cols; ++j) target_isolated[j] = target.of(j).empty();

  parallel_for_blocks(rows, kRowBlock, [&](std::size_t begin, std::size_t end,
                                           std::size_t) {
    std::vector<double> exps;
    for (std::size_t i = begin; i < end; ++i) {
      const auto ni = source.of(i);
      if (ni.empty()) continue;
      const auto r = static_cast<Eigen::Index>(i);
      for (std::size_t j = 0; j < cols; ++j) {
        if (!target_isolated[j]) {
          out(r, static_cast<Eigen::Index>(j)) = static_cast<float>(
              lambda * node_scores(r, static_cast<Eigen::Index>(j)));
        }
      }
      for (const Candidate& cand : candidates.row(i)) {
        const auto nj = target.of(cand.col);
        if (nj.empty()) continue;
        exps.clear();
        double max_label = -std::numeric_limits<double>::infinity();
        for (const NeighborTriple& a : ni) {
          for (const NeighborTriple& b : nj) {
            const double l = label_scores(a.label, b.label);
            exps.push_back(l);
            max_label = std::max(max_label, l);
          }
        }
        double num = 0.0, den = 0.0;
        std::size_t k = 0;
        for (const NeighborTriple& a : ni) {
          for (const NeighborTriple& b : nj) {
            const double w = std::exp(exps[k++] - max_label);
            num += w * node_scores(a.neighbor, b.neighbor);
            den += w;
          }
        }
        const auto c = static_cast<Eigen::Index>(cand.col);
        out(r, c) = static_cast<float>(lambda * node_scores(r, c) +
                                       (1.0 - lambda) * (num / den));
      }
    }
  });
  return out;
}

}  // namespace

CandidateSet build_candidates(const DenseMatrix& scores, std::size_t per_row) {
  const auto rows = static_cast<std::size_t>(scores.rows());
  const auto cols = static_cast<std::size_t>(scores.cols());
  const std::size_t keep = std::min(per_row, cols);
  CandidateSet out;
  out.rows.resize(rows);
  parallel_for_blocks(rows, kRowBlock, [&](std::size_t begin, std::size_t end,
                                           std::size_t) {
    std::vector<std::uint32_t> order(cols);
    for (std::size_t i = begin; i < end; ++i) {
      const auto row = scores.row(static_cast<Eigen::Index>(i));
      std::iota(order.begin(), order.end(), 0u);
      std::partial_sort(order.begin(), order.begin() + keep, order.end(),
                        [&](std::uint32_t a, std::uint32_t b) {
                          return row(a) > row(b) ||
                                 (row(a) == row(b) && a < b);
                        });
      auto& dst = out.rows[i];
      dst.reserve(keep);
      for (std::size_t k = 0; k < keep; ++k) {
        dst.push_back({order[k], row(order[k])});
      }
    }
  });
  return out;
}

NeighborIndex NeighborIndex::Build(const KnowledgeGraph& kg,
                                   std::size_t pooled_triple_count,
                                   std::size_t hub_cap) {
  const auto counts = kg.relation_counts();
  NeighborIndex index;
  index.offsets_.reserve(kg.num_entities() + 1);
  index.offsets_.push_back(0);
  std::vector<NeighborTriple> local;
  for (EntityId e = 0; e < kg.num_entities(); ++e) {
    local.clear();
    for (const Triple& t : neighbor_triples(kg, e)) {
      local.push_back({t.relation, t.tail,
                       inverse_frequency(pooled_triple_count,
                                         counts[t.relation])});
    }
    std::stable_sort(local.begin(), local.end(),
                     [](const NeighborTriple& a, const NeighborTriple& b) {
                       return std::tie(b.weight, a.label, a.neighbor) <
                              std::tie(a.weight, b.label, b.neighbor);
                     });
    if (local.size() > hub_cap) local.resize(hub_cap);
    index.list_.insert(index.list_.end(), local.begin(), local.end());
    index.offsets_.push_back(index.list_.size());
  }
  return index;
}

void RefinementParams::Validate() const {
  if (!(lambda > 0.0 && lambda <= 1.0)) {
    throw InvalidArgument("refine.lambda must be in (0, 1]");
  }
  if (iterations < 0) throw InvalidArgument("refine.iterations must be >= 0");
  if (candidates < 1) throw InvalidArgument("refine.candidates must be >= 1");
  if (hub_cap < 1) throw InvalidArgument("refine.hub_cap must be >= 1");
}

RefinementContext RefinementContext::Build(const AlignmentGraphs& graphs,
                                           std::size_t hub_cap) {
  const std::size_t pooled =
      graphs.source.num_triples() + graphs.target.num_triples();
  const std::size_t dual_pooled =
      graphs.dual_source.num_triples() + graphs.dual_target.num_triples();
  return {NeighborIndex::Build(graphs.source, pooled, hub_cap),
          NeighborIndex::Build(graphs.target, pooled, hub_cap),
          NeighborIndex::Build(graphs.dual_source, dual_pooled, hub_cap),
          NeighborIndex::Build(graphs.dual_target, dual_pooled, hub_cap)};
}

ScorePair refine_step(const DenseMatrix& entity_scores,
                      const DenseMatrix& relation_scores,
                      const RefinementContext& context, double lambda,
                      const CandidateSet& entity_candidates,
                      const CandidateSet& relation_candidates) {
  if (!(lambda > 0.0 && lambda <= 1.0)) {
    throw InvalidArgument("refine_step: lambda must be in (0, 1]");
  }
  if (context.source.size() != static_cast<std::size_t>(entity_scores.rows()) ||
      context.dual_source.size() !=
          static_cast<std::size_t>(relation_scores.rows())) {
    throw InvalidArgument("refine_step: context does not match score shapes");
  }
  ScorePair out;
  out.entities = FuseLevel(entity_scores, relation_scores, context.source,
                           context.target, lambda, entity_candidates);
  out.relations = FuseLevel(relation_scores, entity_scores, context.dual_source,
                            context.dual_target, lambda, relation_candidates);
  return out;
}

ScorePair fuse_scores(const DenseMatrix& initial_entities,
                      const DenseMatrix& initial_relations,
                      const AlignmentGraphs& graphs,
                      const RefinementParams& params) {
  params.Validate();
  const RefinementContext context =
      RefinementContext::Build(graphs, params.hub_cap);
  ScorePair s{initial_entities, initial_relations};
  for (int n = 0; n < params.iterations; ++n) {
    const CandidateSet ce = build_candidates(s.entities, params.candidates);
    const CandidateSet cr = build_candidates(s.relations, params.candidates);
    s = refine_step(s.entities, s.relations, context, params.lambda, ce, cr);
  }
  return s;
}

ScorePair refine(const DenseMatrix& initial_entities,
                 const DenseMatrix& initial_relations,
                 const AlignmentGraphs& graphs, const RefinementParams& params,
                 const SinkhornParams& sinkhorn_params) {
  ScorePair fused =
      fuse_scores(initial_entities, initial_relations, graphs, params);
  return {sinkhorn(fused.entities, sinkhorn_params),
          sinkhorn(fused.relations, sinkhorn_params)};
}

}  // namespace eralign
