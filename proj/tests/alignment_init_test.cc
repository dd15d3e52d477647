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

#include <random>

#include <gtest/gtest.h>

#include "eralign/assignment.h"
#include "eralign/features.h"
#include "eralign/perturbation.h"
#include "oracles.h"

namespace eralign {
namespace {

KnowledgeGraph Graph(std::size_t n, std::size_t r, std::vector<Triple> triples) {
  std::vector<std::string> e(n), rn(r);
  for (std::size_t k = 0; k < n; ++k) e[k] = "e" + std::to_string(k);
  for (std::size_t k = 0; k < r; ++k) rn[k] = "r" + std::to_string(k);
  return KnowledgeGraph(e, rn, std::move(triples));
}

oracle::Mat ToMat(const DenseMatrix& m) {
  oracle::Mat out(m.rows(), std::vector<double>(m.cols()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
  return out;
}

oracle::Mat ToMat(const WeightedAdjacency& a) {
  oracle::Mat out(a.rows(), std::vector<double>(a.cols()));
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out[i][j] = a.value(i, j);
  return out;
}

DenseMatrix RandomFeatures(int rows, int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> g;
  DenseMatrix h(rows, dim);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < dim; ++j) h(i, j) = g(rng);
  h.rowwise().normalize();
  return h;
}

TEST(StructureSimilarityTest, DepthZeroIsInnerProduct) {
  const KnowledgeGraph s = Graph(3, 1, {{0, 0, 1}}), t = Graph(4, 1, {{2, 0, 3}});
  const AdjacencyPair adj = pooled_adjacency(s, t);
  const DenseMatrix hs = RandomFeatures(3, 5, 1), ht = RandomFeatures(4, 5, 2);
  const DenseMatrix x = structure_similarity(adj.source, hs, adj.target, ht, 0);
  EXPECT_TRUE(x.isApprox(hs * ht.transpose(), 1e-6f));
}

TEST(StructureSimilarityTest, PathGraphMatchesMatrixPowers) {
  const KnowledgeGraph s = Graph(3, 2, {{0, 0, 1}, {1, 1, 2}});
  const KnowledgeGraph t = Graph(3, 1, {{0, 0, 1}, {2, 0, 1}});
  const AdjacencyPair adj = pooled_adjacency(s, t);
  DenseMatrix hs(3, 2), ht(3, 2);
  hs << 1, 0, 0.6f, 0.8f, 0, 1;
  ht << 0, 1, 1, 0, 0.8f, 0.6f;
  const DenseMatrix x = structure_similarity(adj.source, hs, adj.target, ht, 2);
  std::vector<oracle::T3> rs = {{0, 0, 1}, {1, 1, 2}}, rt = {{0, 0, 1}, {2, 0, 1}};
  const oracle::Mat as = oracle::Adjacency(rs, 3, 4, {1, 1});
  const oracle::Mat at = oracle::Adjacency(rt, 3, 4, {2});
  const oracle::Mat expected =
      oracle::StructureSimilarity(as, ToMat(hs), at, ToMat(ht), 2);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_NEAR(x(i, j), expected[i][j], 1e-6);
}

TEST(StructureSimilarityTest, RandomGraphsMatchMatrixPowers) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const SynthPair p = synth_kg_pair({.entities = 12, .relations = 3,
                                       .mean_degree = 3.0, .seed = seed});
    const AdjacencyPair adj = pooled_adjacency(p.source, p.target);
    const DenseMatrix hs = RandomFeatures(12, 4, seed + 10);
    const DenseMatrix ht = RandomFeatures(12, 4, seed + 20);
    const DenseMatrix x = structure_similarity(adj.source, hs, adj.target, ht, 3);
    const oracle::Mat expected = oracle::StructureSimilarity(
        ToMat(adj.source), ToMat(hs), ToMat(adj.target), ToMat(ht), 3);
    for (int i = 0; i < 12; ++i)
      for (int j = 0; j < 12; ++j) EXPECT_NEAR(x(i, j), expected[i][j], 1e-5);
  }
}

TEST(StructureSimilarityTest, SelfSimilarityDominatesOnCycle) {
  std::vector<Triple> cycle;
  for (EntityId k = 0; k < 8; ++k) cycle.push_back({k, 0, (k + 1) % 8});
  const KnowledgeGraph g = Graph(8, 1, cycle);
  const AdjacencyPair adj = pooled_adjacency(g, g);
  const DenseMatrix h = DenseMatrix::Identity(8, 8);
  const DenseMatrix x = structure_similarity(adj.source, h, adj.target, h, 2);
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) {
      if (j != i) EXPECT_GT(x(i, i), x(i, j));
    }
  }
}

TEST(StructureSimilarityTest, ShapeErrors) {
  const KnowledgeGraph g = Graph(3, 1, {{0, 0, 1}});
  const AdjacencyPair adj = pooled_adjacency(g, g);
  EXPECT_THROW(structure_similarity(adj.source, RandomFeatures(2, 2, 1), adj.target,
                                    RandomFeatures(3, 2, 1), 1),
               InvalidArgument);
  EXPECT_THROW(structure_similarity(adj.source, RandomFeatures(3, 2, 1), adj.target,
                                    RandomFeatures(3, 3, 1), 1),
               InvalidArgument);
  EXPECT_THROW(structure_similarity(adj.source, RandomFeatures(3, 2, 1), adj.target,
                                    RandomFeatures(3, 2, 1), -1),
               InvalidArgument);
}

TEST(InitialAlignmentsTest, RecoversPermutationWithOrthogonalFeatures) {
  const SynthPair p = synth_kg_pair({.entities = 50, .relations = 5, .seed = 4});
  const AlignmentGraphs g = AlignmentGraphs::Build(p.source, p.target);
  FeatureSet f;
  f.source_entities = DenseMatrix::Identity(50, 50);
  f.target_entities = DenseMatrix::Zero(50, 50);
  for (const auto& [s, t] : p.entity_truth) f.target_entities(t, s) = 1.0f;
  f.source_relations = DenseMatrix::Identity(5, 5);
  f.target_relations = DenseMatrix::Zero(5, 5);
  for (const auto& [s, t] : p.relation_truth) f.target_relations(t, s) = 1.0f;
  const InitialAlignment init = initial_alignments(g, f, 2, {});
  const std::vector<int> ent = row_argmax(init.entities);
  for (const auto& [s, t] : p.entity_truth) EXPECT_EQ(ent[s], int(t));
  const std::vector<int> rel = row_argmax(init.relations);
  for (const auto& [s, t] : p.relation_truth) EXPECT_EQ(rel[s], int(t));
}

TEST(InitialAlignmentsTest, SelfAlignmentWithBigrams) {
  const SynthPair p = synth_kg_pair({.entities = 120, .relations = 8, .seed = 2});
  const AlignmentGraphs g = AlignmentGraphs::Build(p.source, p.source);
  const BigramVocab ev = BigramVocab::Build(p.source.entity_names(), p.source.entity_names());
  const BigramVocab rv = BigramVocab::Build(p.source.relation_names(), p.source.relation_names());
  const FeatureSet f{bigram_features(p.source.entity_names(), ev),
                     bigram_features(p.source.entity_names(), ev),
                     bigram_features(p.source.relation_names(), rv),
                     bigram_features(p.source.relation_names(), rv)};
  const InitialAlignment init = initial_alignments(g, f, 2, {});
  const std::vector<int> ent = row_argmax(init.entities);
  for (int i = 0; i < 120; ++i) EXPECT_EQ(ent[i], i);
}

}  // namespace
}  // namespace eralign
