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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <tuple>
#include <utility>

namespace eralign {

ParseError::ParseError(const std::string& file, std::size_t line,
                       const std::string& what)
    : Error(file + (line > 0 ? ":" + std::to_string(line) : std::string()) +
            ": " + what),
      file_(file),
      line_(line) {}

namespace {

void BuildIndex(std::size_t n, const std::vector<Triple>& triples,
                bool by_head, std::vector<std::uint32_t>& offsets,
                std::vector<std::uint32_t>& list) {
  offsets.assign(n + 1, 0);
  for (const Triple& t : triples) ++offsets[(by_head ? t.head : t.tail) + 1];
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  list.resize(triples.size());
  std::vector<std::uint32_t> cursor(offsets.begin(), offsets.end() - 1);
  for (std::uint32_t k = 0; k < triples.size(); ++k) {
    const Triple& t = triples[k];
    list[cursor[by_head ? t.head : t.tail]++] = k;
  }
}

std::vector<std::int64_t> Iota(std::size_t n) {
  std::vector<std::int64_t> v(n);
  std::iota(v.begin(), v.end(), std::int64_t{0});
  return v;
}

}  // namespace

KnowledgeGraph::KnowledgeGraph(std::vector<std::string> entity_names,
                               std::vector<std::string> relation_names,
                               std::vector<Triple> triples,
                               std::vector<std::int64_t> entity_keys,
                               std::vector<std::int64_t> relation_keys)
    : entity_names_(std::move(entity_names)),
      relation_names_(std::move(relation_names)),
      entity_keys_(std::move(entity_keys)),
      relation_keys_(std::move(relation_keys)) {
  if (entity_keys_.empty()) entity_keys_ = Iota(entity_names_.size());
  if (relation_keys_.empty()) relation_keys_ = Iota(relation_names_.size());
  if (entity_keys_.size() != entity_names_.size() ||
      relation_keys_.size() != relation_names_.size()) {
    throw InvalidArgument("knowledge graph: key/name count mismatch");
  }
  std::set<Triple> seen;
  triples_.reserve(triples.size());
  for (const Triple& t : triples) {
    if (t.head >= entity_names_.size() || t.tail >= entity_names_.size() ||
        t.relation >= relation_names_.size()) {
      throw InvalidArgument("knowledge graph: triple references unknown id");
    }
    if (seen.insert(t).second) triples_.push_back(t);
  }
  for (EntityId e = 0; e < entity_keys_.size(); ++e) {
    entity_by_key_.emplace(entity_keys_[e], e);
  }
  BuildIndex(entity_names_.size(), triples_, true, out_offsets_, out_list_);
  BuildIndex(entity_names_.size(), triples_, false, in_offsets_, in_list_);
}

std::span<const std::uint32_t> KnowledgeGraph::out_triples(EntityId e) const {
  return {out_list_.data() + out_offsets_[e],
          out_list_.data() + out_offsets_[e + 1]};
}

std::span<const std::uint32_t> KnowledgeGraph::in_triples(EntityId e) const {
  return {in_list_.data() + in_offsets_[e],
          in_list_.data() + in_offsets_[e + 1]};
}

std::optional<EntityId> KnowledgeGraph::entity_by_key(std::int64_t key) const {
  auto it = entity_by_key_.find(key);
  if (it == entity_by_key_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::size_t> KnowledgeGraph::relation_counts() const {
  std::vector<std::size_t> counts(num_relations(), 0);
  for (const Triple& t : triples_) ++counts[t.relation];
  return counts;
}

KnowledgeGraph KnowledgeGraph::with_entity_names(
    std::vector<std::string> names) const {
  if (names.size() != num_entities()) {
    throw InvalidArgument("with_entity_names: count mismatch");
  }
  return KnowledgeGraph(std::move(names), relation_names_, triples_,
                        entity_keys_, relation_keys_);
}

KnowledgeGraph KnowledgeGraph::with_relation_names(
    std::vector<std::string> names) const {
  if (names.size() != num_relations()) {
    throw InvalidArgument("with_relation_names: count mismatch");
  }
  return KnowledgeGraph(entity_names_, std::move(names), triples_,
                        entity_keys_, relation_keys_);
}

KnowledgeGraph KnowledgeGraph::with_triples(std::vector<Triple> triples) const {
  return KnowledgeGraph(entity_names_, relation_names_, std::move(triples),
                        entity_keys_, relation_keys_);
}

// ---------------------------------------------------------------------------
// Loading

namespace {

std::ifstream OpenOrThrow(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  return in;
}

bool ParseInt(std::string_view text, std::int64_t& out) {
  while (!text.empty() && (text.back() == '\r' || text.back() == ' ')) {
    text.remove_suffix(1);
  }
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  if (text.empty()) return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

struct NameTable {
  std::vector<std::string> names;
  std::vector<std::int64_t> keys;
  std::unordered_map<std::int64_t, std::uint32_t> index;
};

NameTable ReadNames(const std::filesystem::path& path) {
  std::ifstream in = OpenOrThrow(path);
  NameTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError(path.string(), line_no,
                       "malformed line: expected <id><TAB><name>");
    }
    std::int64_t key = 0;
    if (!ParseInt(std::string_view(line).substr(0, tab), key)) {
      throw ParseError(path.string(), line_no, "malformed id");
    }
    const auto id = static_cast<std::uint32_t>(table.names.size());
    if (!table.index.emplace(key, id).second) {
      throw ParseError(path.string(), line_no,
                       "duplicate id " + std::to_string(key));
    }
    table.keys.push_back(key);
    table.names.push_back(line.substr(tab + 1));
  }
  return table;
}

}  // namespace

KnowledgeGraph load_kg(const std::filesystem::path& entity_name_file,
                       const std::filesystem::path& relation_name_file,
                       const std::filesystem::path& triple_file) {
  NameTable entities = ReadNames(entity_name_file);
  NameTable relations = ReadNames(relation_name_file);

  std::ifstream in = OpenOrThrow(triple_file);
  std::vector<Triple> triples;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string_view> cols;
    std::string_view rest(line);
    for (;;) {
      const auto tab = rest.find('\t');
      cols.push_back(rest.substr(0, tab));
      if (tab == std::string_view::npos) break;
      rest.remove_prefix(tab + 1);
    }
    if (cols.size() != 3) {
      throw ParseError(triple_file.string(), line_no,
                       "malformed line: expected 3 columns, got " +
                           std::to_string(cols.size()));
    }
    std::int64_t ids[3];
    for (int c = 0; c < 3; ++c) {
      if (!ParseInt(cols[c], ids[c])) {
        throw ParseError(triple_file.string(), line_no, "malformed id");
      }
    }
    auto head = entities.index.find(ids[0]);
    auto rel = relations.index.find(ids[1]);
    auto tail = entities.index.find(ids[2]);
    if (head == entities.index.end() || tail == entities.index.end()) {
      const auto bad = head == entities.index.end() ? ids[0] : ids[2];
      throw ParseError(triple_file.string(), line_no,
                       "dangling entity id " + std::to_string(bad));
    }
    if (rel == relations.index.end()) {
      throw ParseError(triple_file.string(), line_no,
                       "dangling relation id " + std::to_string(ids[1]));
    }
    triples.push_back({head->second, rel->second, tail->second});
  }
  return KnowledgeGraph(std::move(entities.names), std::move(relations.names),
                        std::move(triples), std::move(entities.keys),
                        std::move(relations.keys));
}

// ---------------------------------------------------------------------------
// Triple-set transforms

std::vector<Triple> reverse_augment(const KnowledgeGraph& kg) {
  std::vector<Triple> out(kg.triples());
  std::set<Triple> seen(out.begin(), out.end());
  for (const Triple& t : kg.triples()) {
    const Triple rev{t.tail, t.relation, t.head};
    if (seen.insert(rev).second) out.push_back(rev);
  }
  return out;
}

std::vector<Triple> neighbor_triples(const KnowledgeGraph& kg,
                                     EntityId entity) {
  std::vector<Triple> out;
  const auto& triples = kg.triples();
  for (std::uint32_t k : kg.out_triples(entity)) out.push_back(triples[k]);
  const std::size_t n_out = out.size();
  for (std::uint32_t k : kg.in_triples(entity)) {
    const Triple& t = triples[k];
    const Triple rev{entity, t.relation, t.head};
    // A reversal duplicates an out-triple only when the reverse also exists
    // in T, which is rare; a linear scan of the out-triples suffices.
    const bool dup = std::find(out.begin(), out.begin() + n_out, rev) !=
                     out.begin() + n_out;
    if (!dup) out.push_back(rev);
  }
  return out;
}

DualKnowledgeGraph build_dual(const KnowledgeGraph& kg,
                              const DualOptions& options) {
  const std::vector<std::size_t> counts = kg.relation_counts();
  const auto& triples = kg.triples();
  std::vector<Triple> dual;
  // relation -> number of distinct incident triples at the current entity
  std::map<RelationId, std::size_t> incident;
  for (EntityId e = 0; e < kg.num_entities(); ++e) {
    incident.clear();
    for (std::uint32_t k : kg.out_triples(e)) ++incident[triples[k].relation];
    for (std::uint32_t k : kg.in_triples(e)) {
      if (triples[k].head != e) ++incident[triples[k].relation];
    }
    if (incident.empty()) continue;

    std::vector<RelationId> rels;
    rels.reserve(incident.size());
    for (const auto& [r, _] : incident) rels.push_back(r);
    if (rels.size() > options.relation_cap) {
      std::stable_sort(rels.begin(), rels.end(),
                       [&](RelationId a, RelationId b) {
                         return counts[a] < counts[b];
                       });
      rels.resize(options.relation_cap);
      std::sort(rels.begin(), rels.end());
    }
    for (std::size_t a = 0; a < rels.size(); ++a) {
      if (incident[rels[a]] >= 2) dual.push_back({rels[a], e, rels[a]});
      for (std::size_t b = a + 1; b < rels.size(); ++b) {
        dual.push_back({rels[a], e, rels[b]});
        dual.push_back({rels[b], e, rels[a]});
      }
    }
  }
  return DualKnowledgeGraph(kg.relation_names(), kg.entity_names(),
                            std::move(dual), kg.relation_keys(),
                            kg.entity_keys());
}

double inverse_frequency(std::size_t pooled_triple_count,
                         std::size_t relation_count) {
  return std::log(static_cast<double>(pooled_triple_count) /
                  static_cast<double>(relation_count));
}

double WeightedAdjacency::row_sum(Eigen::Index i) const {
  double sum = 0.0;
  for (Storage::InnerIterator it(weights_, i); it; ++it) sum += it.value();
  return sum;
}

WeightedAdjacency build_adjacency(
    const KnowledgeGraph& kg, std::size_t pooled_triple_count,
    std::span<const std::size_t> per_relation_counts) {
  if (per_relation_counts.size() != kg.num_relations()) {
    throw InvalidArgument("build_adjacency: expected " +
                          std::to_string(kg.num_relations()) +
                          " relation counts, got " +
                          std::to_string(per_relation_counts.size()));
  }
  // Distinct (i, j, r) incidences; each relation counts once per node pair.
  std::vector<Triple> links;
  links.reserve(2 * kg.num_triples());
  for (const Triple& t : kg.triples()) {
    if (per_relation_counts[t.relation] == 0) {
      throw InvalidArgument("build_adjacency: relation " +
                            std::to_string(t.relation) +
                            " is used but has zero count");
    }
    if (per_relation_counts[t.relation] > pooled_triple_count) {
      throw InvalidArgument(
          "build_adjacency: relation count exceeds pooled triple count");
    }
    links.push_back({t.head, t.relation, t.tail});
    links.push_back({t.tail, t.relation, t.head});
  }
  std::sort(links.begin(), links.end(), [](const Triple& a, const Triple& b) {
    return std::tie(a.head, a.tail, a.relation) <
           std::tie(b.head, b.tail, b.relation);
  });
  links.erase(std::unique(links.begin(), links.end()), links.end());

  const auto n = static_cast<Eigen::Index>(kg.num_entities());
  std::vector<double> row_total(kg.num_entities(), 0.0);
  std::vector<double> row_links(kg.num_entities(), 0.0);
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(links.size());
  for (const Triple& l : links) {
    const double w =
        inverse_frequency(pooled_triple_count, per_relation_counts[l.relation]);
    row_total[l.head] += w;
    row_links[l.head] += 1.0;
    entries.emplace_back(l.head, l.tail, w);
  }
  for (auto& e : entries) {
    const double total = row_total[e.row()];
    // Every relation of the row has weight log(1) = 0: the limit of equal
    // weights is uniform over the row's links.
    const double w = total > 0.0 ? e.value() / total : 1.0 / row_links[e.row()];
    e = Eigen::Triplet<double>(e.row(), e.col(), w);
  }
  WeightedAdjacency::Storage weights(n, n);
  weights.setFromTriplets(entries.begin(), entries.end());
  return WeightedAdjacency(std::move(weights));
}

std::string surface_name(std::string_view name) {
  if (name.find("://") == std::string_view::npos) return std::string(name);
  while (!name.empty() && name.back() == '/') name.remove_suffix(1);
  const auto slash = name.rfind('/');
  std::string out(slash == std::string_view::npos ? name
                                                  : name.substr(slash + 1));
  std::replace(out.begin(), out.end(), '_', ' ');
  return out;
}

}  // namespace eralign
