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

#include "eralign/kg.h"

#include <cmath>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "eralign/perturbation.h"
#include "oracles.h"
#include "test_util.h"

namespace eralign {
namespace {

KnowledgeGraph Graph(std::size_t entities, std::size_t relations,
                     std::vector<Triple> triples) {
  std::vector<std::string> e, r;
  for (std::size_t k = 0; k < entities; ++k) e.push_back("e" + std::to_string(k));
  for (std::size_t k = 0; k < relations; ++k) r.push_back("r" + std::to_string(k));
  return KnowledgeGraph(e, r, std::move(triples));
}

std::set<Triple> AsSet(const std::vector<Triple>& v) { return {v.begin(), v.end()}; }

class LoadKgTest : public ::testing::Test {
 protected:
  void Write(const std::string& triples) {
    testutil::WriteFile(dir_ / "ent", "10\tParis\n12\tFrance\n15\tBerlin\n");
    testutil::WriteFile(dir_ / "rel", "7\tcapital\n9\tcountry\n");
    testutil::WriteFile(dir_ / "tri", triples);
  }
  KnowledgeGraph Load() { return load_kg(dir_ / "ent", dir_ / "rel", dir_ / "tri"); }

  testutil::TempDir dir_;
};

TEST_F(LoadKgTest, RemapsSparseIdsAndDropsDuplicates) {
  Write("12\t7\t10\n10\t9\t12\n12\t7\t10\n");
  const KnowledgeGraph kg = Load();
  EXPECT_EQ(kg.num_entities(), 3u);
  EXPECT_EQ(kg.num_relations(), 2u);
  ASSERT_EQ(kg.num_triples(), 2u);
  EXPECT_EQ(kg.triples()[0], (Triple{1, 0, 0}));
  EXPECT_EQ(kg.entity_key(2), 15);
  EXPECT_EQ(kg.entity_by_key(12), std::optional<EntityId>(1));
  EXPECT_FALSE(kg.entity_by_key(11).has_value());
  EXPECT_EQ(kg.entity_name(0), "Paris");
}

TEST_F(LoadKgTest, DanglingIdNamesTheLine) {
  Write("12\t7\t10\n999\t7\t10\n");
  try {
    Load();
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("999"), std::string::npos);
  }
}

TEST_F(LoadKgTest, WrongColumnCountIsReported) {
  Write("12\t7\n");
  try {
    Load();
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
  }
}

TEST_F(LoadKgTest, MissingFileIsReported) {
  Write("");
  EXPECT_THROW(load_kg(dir_ / "ent", dir_ / "rel", dir_ / "nope"), ParseError);
}

TEST(KnowledgeGraphTest, IndexesCoverEveryTripleOnce) {
  const KnowledgeGraph kg = Graph(4, 2, {{0, 0, 1}, {0, 1, 2}, {3, 1, 0}, {2, 0, 2}});
  std::size_t out = 0, in = 0;
  for (EntityId e = 0; e < 4; ++e) {
    for (auto k : kg.out_triples(e)) {
      EXPECT_EQ(kg.triples()[k].head, e);
      ++out;
    }
    for (auto k : kg.in_triples(e)) {
      EXPECT_EQ(kg.triples()[k].tail, e);
      ++in;
    }
  }
  EXPECT_EQ(out, 4u);
  EXPECT_EQ(in, 4u);
  EXPECT_EQ(kg.relation_counts(), (std::vector<std::size_t>{2, 2}));
}

TEST(ReverseAugmentTest, SmallCases) {
  EXPECT_EQ(AsSet(reverse_augment(Graph(2, 1, {{0, 0, 1}}))),
            (std::set<Triple>{{0, 0, 1}, {1, 0, 0}}));
  EXPECT_EQ(reverse_augment(Graph(1, 1, {{0, 0, 0}})).size(), 1u);
  EXPECT_EQ(reverse_augment(Graph(2, 1, {{0, 0, 1}, {1, 0, 0}})).size(), 2u);
}

TEST(NeighborTriplesTest, DegreeAndChain) {
  const KnowledgeGraph kg = Graph(4, 1, {{0, 0, 1}, {0, 0, 2}, {3, 0, 0}});
  EXPECT_EQ(neighbor_triples(kg, 0).size(), 3u);
  const KnowledgeGraph chain = Graph(4, 1, {{0, 0, 1}, {1, 0, 2}});
  EXPECT_EQ(AsSet(neighbor_triples(chain, 1)),
            (std::set<Triple>{{1, 0, 2}, {1, 0, 0}}));
  EXPECT_TRUE(neighbor_triples(chain, 3).empty());
}

TEST(NeighborTriplesTest, MatchesBruteForceAugmentation) {
  std::mt19937_64 rng(11);
  std::vector<Triple> triples;
  for (int k = 0; k < 40; ++k) {
    triples.push_back({EntityId(rng() % 12), RelationId(rng() % 3), EntityId(rng() % 12)});
  }
  const KnowledgeGraph kg = Graph(12, 3, triples);
  std::vector<oracle::T3> raw;
  for (const Triple& t : kg.triples()) raw.push_back({t.head, t.relation, t.tail});
  const auto aug = oracle::Augment(raw);
  for (EntityId e = 0; e < 12; ++e) {
    std::set<Triple> expected;
    for (const auto& x : aug) {
      if (x.h == e) expected.insert({x.h, x.r, x.t});
    }
    EXPECT_EQ(AsSet(neighbor_triples(kg, e)), expected) << "entity " << e;
  }
}

TEST(BuildDualTest, SharedEntityGivesSymmetricPair) {
  const DualKnowledgeGraph dual = build_dual(Graph(3, 2, {{0, 0, 1}, {1, 1, 2}}));
  EXPECT_EQ(dual.num_entities(), 2u);
  EXPECT_EQ(dual.num_relations(), 3u);
  EXPECT_EQ(AsSet(dual.triples()), (std::set<Triple>{{0, 1, 1}, {1, 1, 0}}));
}

TEST(BuildDualTest, SelfPairNeedsTwoIncidentTriples) {
  EXPECT_EQ(build_dual(Graph(3, 1, {{0, 0, 1}})).num_triples(), 0u);
  const DualKnowledgeGraph dual = build_dual(Graph(3, 1, {{0, 0, 1}, {1, 0, 2}}));
  EXPECT_EQ(AsSet(dual.triples()), (std::set<Triple>{{0, 1, 0}}));
}

TEST(BuildDualTest, CapKeepsRarestRelations) {
  // Entity 0 touches relations 0..3; relation 0 is the most frequent.
  const KnowledgeGraph kg = Graph(
      8, 4, {{0, 0, 1}, {2, 0, 3}, {4, 0, 5}, {0, 1, 2}, {0, 2, 3}, {0, 3, 4}});
  const DualKnowledgeGraph dual = build_dual(kg, {.relation_cap = 3});
  for (const Triple& t : dual.triples()) {
    if (t.relation == 0) {
      EXPECT_NE(t.head, 0u);
      EXPECT_NE(t.tail, 0u);
    }
  }
  EXPECT_EQ(dual.num_triples(), 12u);
}

TEST(BuildAdjacencyTest, SymmetricWeights) {
  const KnowledgeGraph kg = Graph(3, 2, {{0, 0, 1}, {0, 1, 2}});
  const std::vector<std::size_t> counts = {1, 1};
  const WeightedAdjacency a = build_adjacency(kg, 2, counts);
  EXPECT_DOUBLE_EQ(a.value(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(a.value(0, 2), 0.5);
}

TEST(BuildAdjacencyTest, HandComputedExample) {
  const KnowledgeGraph kg = Graph(5, 2, {{0, 0, 1}, {0, 1, 2}, {3, 1, 4}});
  const auto counts = kg.relation_counts();
  const WeightedAdjacency a = build_adjacency(kg, 3, counts);
  const double expected = std::log(3.0) / (std::log(3.0) + std::log(1.5));
  EXPECT_NEAR(a.value(0, 1), expected, 1e-9);
  EXPECT_NEAR(a.value(0, 1), 0.7304, 1e-4);
  EXPECT_NEAR(a.value(1, 0), 1.0, 1e-12);
}

TEST(BuildAdjacencyTest, IsolatedRowIsZero) {
  const KnowledgeGraph kg = Graph(3, 1, {{0, 0, 1}});
  const std::vector<std::size_t> counts = {1};
  const WeightedAdjacency a = build_adjacency(kg, 4, counts);
  EXPECT_EQ(a.row_sum(2), 0.0);
}

TEST(BuildAdjacencyTest, InconsistentCountsThrow) {
  const KnowledgeGraph kg = Graph(2, 1, {{0, 0, 1}});
  const std::vector<std::size_t> zero = {0};
  EXPECT_THROW(build_adjacency(kg, 4, zero), InvalidArgument);
}

TEST(BuildAdjacencyTest, MatchesOracleOnRandomGraphs) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SynthSpec spec{.entities = 15, .relations = 4, .mean_degree = 3.0, .seed = seed};
    const SynthPair pair = synth_kg_pair(spec);
    const KnowledgeGraph& kg = pair.source;
    const std::size_t pooled = 2 * kg.num_triples();
    std::vector<std::size_t> counts = kg.relation_counts();
    for (auto& c : counts) c = std::max<std::size_t>(1, 2 * c);
    const WeightedAdjacency a = build_adjacency(kg, pooled, counts);
    std::vector<oracle::T3> raw;
    for (const Triple& t : kg.triples()) raw.push_back({t.head, t.relation, t.tail});
    const oracle::Mat expected =
        oracle::Adjacency(raw, kg.num_entities(), pooled, counts);
    for (std::size_t i = 0; i < kg.num_entities(); ++i) {
      for (std::size_t j = 0; j < kg.num_entities(); ++j) {
        EXPECT_NEAR(a.value(i, j), expected[i][j], 1e-12) << i << "," << j;
      }
    }
  }
}

TEST(SurfaceNameTest, UriToText) {
  EXPECT_EQ(surface_name("http://dbpedia.org/resource/Football_League_One"),
            "Football League One");
  EXPECT_EQ(surface_name("plain_name"), "plain_name");
}

}  // namespace
}  // namespace eralign
