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

// Triple stores, reverse augmentation, dual graphs and the inverse-frequency
// weighted adjacency used for feature propagation.

#ifndef ERALIGN_KG_H_
#define ERALIGN_KG_H_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/SparseCore>

#include "eralign/common.h"

namespace eralign {

struct Triple {
  EntityId head = 0;
  RelationId relation = 0;
  EntityId tail = 0;

  friend auto operator<=>(const Triple&, const Triple&) = default;
};

// Immutable after construction. Duplicate triples are dropped (first
// occurrence wins) and every triple is indexed by its head and its tail.
class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;

  // Keys are the on-disk ids; when empty they default to 0..n-1.
  KnowledgeGraph(std::vector<std::string> entity_names,
                 std::vector<std::string> relation_names,
                 std::vector<Triple> triples,
                 std::vector<std::int64_t> entity_keys = {},
                 std::vector<std::int64_t> relation_keys = {});

  std::size_t num_entities() const { return entity_names_.size(); }
  std::size_t num_relations() const { return relation_names_.size(); }
  std::size_t num_triples() const { return triples_.size(); }

  const std::vector<Triple>& triples() const { return triples_; }
  const std::string& entity_name(EntityId e) const { return entity_names_[e]; }
  const std::string& relation_name(RelationId r) const {
    return relation_names_[r];
  }
  const std::vector<std::string>& entity_names() const { return entity_names_; }
  const std::vector<std::string>& relation_names() const {
    return relation_names_;
  }

  // Indices into triples() whose head (resp. tail) is `e`, in triple order.
  std::span<const std::uint32_t> out_triples(EntityId e) const;
  std::span<const std::uint32_t> in_triples(EntityId e) const;

  std::int64_t entity_key(EntityId e) const { return entity_keys_[e]; }
  std::int64_t relation_key(RelationId r) const { return relation_keys_[r]; }
  const std::vector<std::int64_t>& entity_keys() const { return entity_keys_; }
  const std::vector<std::int64_t>& relation_keys() const {
    return relation_keys_;
  }
  std::optional<EntityId> entity_by_key(std::int64_t key) const;

  // |T_r| for every relation.
  std::vector<std::size_t> relation_counts() const;

  // Copies with replaced names or a replaced triple set; keys are kept.
  KnowledgeGraph with_entity_names(std::vector<std::string> names) const;
  KnowledgeGraph with_relation_names(std::vector<std::string> names) const;
  KnowledgeGraph with_triples(std::vector<Triple> triples) const;

 private:
  std::vector<std::string> entity_names_;
  std::vector<std::string> relation_names_;
  std::vector<Triple> triples_;
  std::vector<std::int64_t> entity_keys_;
  std::vector<std::int64_t> relation_keys_;
  std::unordered_map<std::int64_t, EntityId> entity_by_key_;
  // CSR layout: out_offsets_[e]..out_offsets_[e+1] indexes out_list_.
  std::vector<std::uint32_t> out_offsets_, out_list_;
  std::vector<std::uint32_t> in_offsets_, in_list_;
};

// Nodes are the original relations, edge labels the original entities.
using DualKnowledgeGraph = KnowledgeGraph;

// Reads the DBP15K/OpenEA layout: `<id>\t<name>` name files and
// `<head>\t<relation>\t<tail>` triple files. Throws ParseError with the
// offending line for missing files, wrong column counts and dangling ids.
KnowledgeGraph load_kg(const std::filesystem::path& entity_name_file,
                       const std::filesystem::path& relation_name_file,
                       const std::filesystem::path& triple_file);

// T ∪ {(t,r,h)}: original triples first, then the reversals that are not
// already present.
std::vector<Triple> reverse_augment(const KnowledgeGraph& kg);

// Triples of T' headed by `entity`: its out-triples, then its in-triples
// reversed, skipping reversals already present.
std::vector<Triple> neighbor_triples(const KnowledgeGraph& kg,
                                     EntityId entity);

struct DualOptions {
  // Max relations paired per shared entity, lowest |T_r| first.
  std::size_t relation_cap = 32;
};

DualKnowledgeGraph build_dual(const KnowledgeGraph& kg,
                              const DualOptions& options = {});

// log(|T| / |T_r|); the per-edge weight of the structural adjacency.
double inverse_frequency(std::size_t pooled_triple_count,
                         std::size_t relation_count);

class WeightedAdjacency {
 public:
  using Storage = Eigen::SparseMatrix<double, Eigen::RowMajor>;

  WeightedAdjacency() = default;
  explicit WeightedAdjacency(Storage weights) : weights_(std::move(weights)) {}

  Eigen::Index rows() const { return weights_.rows(); }
  Eigen::Index cols() const { return weights_.cols(); }
  const Storage& weights() const { return weights_; }
  double value(Eigen::Index i, Eigen::Index j) const {
    return weights_.coeff(i, j);
  }
  double row_sum(Eigen::Index i) const;

 private:
  Storage weights_;
};

// Row-normalised inverse-frequency adjacency. Neighbourhoods are symmetric:
// a triple (h,r,t) makes h and t neighbours of each other. Throws
// InvalidArgument when a relation used by a triple has a zero count or
// `per_relation_counts` has the wrong size.
WeightedAdjacency build_adjacency(
    const KnowledgeGraph& kg, std::size_t pooled_triple_count,
    std::span<const std::size_t> per_relation_counts);

// Display form of a name: URIs are reduced to their last path segment with
// underscores turned into spaces; anything else is returned unchanged.
std::string surface_name(std::string_view name);

}  // namespace eralign

#endif  // ERALIGN_KG_H_
