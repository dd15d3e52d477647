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

#include "eralign/perturbation.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <set>
#include <tuple>
#include <unordered_set>

namespace eralign {

namespace {

constexpr std::pair<const char*, const char*> kPhonetic[] = {
    {"intu", "into"}, {"o", "oe"},    {"li", "ri"},    {"ty", "ti"},
    {"cu", "ka"},     {"ca", "ka"},   {"ar", "al"},    {"tic", "th"},
    {"se", "th"},     {"nes", "nais"}, {"ud", "ade"},  {"Ji", "Gi"},
    {"fi", "fy"},     {"ps", "pus"},  {"er", "ar"},    {"our", "ur"},
    {"ar", "ur"},     {"la", "ra"},   {"ei", "ee"},    {"ny", "ni"},
    {"ew", "ou"},     {"ar", "or"},   {"or", "ol"},    {"ol", "oul"},
    {"ry", "ly"},     {"wi", "wy"},   {"ic", "ik"},
};

double UniformReal(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::string Attach(const std::string& name, std::mt19937_64& rng) {
  return name + (uniform_index(rng, 2) == 0 ? "s" : "e");
}

std::string Phonetic(const std::string& name, std::mt19937_64& rng) {
  // Eligible positions: where any pattern, in either direction, matches.
  std::vector<std::size_t> positions;
  for (std::size_t p = 0; p < name.size(); ++p) {
    for (const auto& [a, b] : kPhonetic) {
      if (name.compare(p, std::strlen(a), a) == 0 ||
          name.compare(p, std::strlen(b), b) == 0) {
        positions.push_back(p);
        break;
      }
    }
  }
  if (positions.empty()) return Attach(name, rng);
  const std::size_t p = positions[uniform_index(rng, positions.size())];
  for (const auto& [a, b] : kPhonetic) {
    const bool fwd = name.compare(p, std::strlen(a), a) == 0;
    const bool bwd = name.compare(p, std::strlen(b), b) == 0;
    if (!fwd && !bwd) continue;
    const bool use_fwd = fwd && (!bwd || uniform_index(rng, 2) == 0);
    const std::string from = use_fwd ? a : b;
    const std::string to = use_fwd ? b : a;
    return name.substr(0, p) + to + name.substr(p + from.size());
  }
  return Attach(name, rng);
}

std::string Missing(const std::string& name, std::mt19937_64& rng) {
  std::vector<std::size_t> sites;  // byte offsets that may be removed
  if (!name.empty() && (name.back() == 's' || name.back() == 'e')) {
    sites.push_back(name.size() - 1);
  }
  for (std::size_t p = 0; p < name.size(); ++p) {
    if (name[p] == ' ') sites.push_back(p);
  }
  if (sites.empty()) return Attach(name, rng);
  const std::size_t p = sites[uniform_index(rng, sites.size())];
  return name.substr(0, p) + name.substr(p + 1);
}

std::string RandomWord(const std::string& alphabet, std::size_t len,
                       std::mt19937_64& rng) {
  std::string w;
  for (std::size_t k = 0; k < len; ++k) {
    w += alphabet[uniform_index(rng, alphabet.size())];
  }
  return w;
}

std::vector<std::string> UniqueNames(std::size_t n, const std::string& alphabet,
                                     std::mt19937_64& rng) {
  std::unordered_set<std::string> seen;
  std::vector<std::string> out;
  out.reserve(n);
  while (out.size() < n) {
    std::string name = RandomWord(alphabet, 3 + uniform_index(rng, 6), rng);
    if (uniform_index(rng, 2) == 0) {
      name += ' ' + RandomWord(alphabet, 3 + uniform_index(rng, 6), rng);
    }
    if (seen.insert(name).second) out.push_back(std::move(name));
  }
  return out;
}

std::vector<std::uint32_t> Permutation(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::uint32_t> p(n);
  std::iota(p.begin(), p.end(), 0u);
  for (std::size_t k = n; k > 1; --k) {
    std::swap(p[k - 1], p[uniform_index(rng, k)]);
  }
  return p;
}

}  // namespace

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  if (n <= 1) return 0;
  const std::uint64_t bound = n;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return static_cast<std::size_t>(x % bound);
}

std::span<const std::pair<const char*, const char*>> phonetic_pairs() {
  return kPhonetic;
}

void NoiseSpec::Validate() const {
  if (!(level >= 0.0 && level <= 1.0)) {
    throw InvalidArgument("noise.level must be in [0, 1]");
  }
  if (level > 0.0 && categories.empty()) {
    throw InvalidArgument("noise.categories must not be empty when level > 0");
  }
}

std::string perturb_name(const std::string& name, NoiseCategory category,
                         std::mt19937_64& rng) {
  switch (category) {
    case NoiseCategory::kPhonetic:
      return Phonetic(name, rng);
    case NoiseCategory::kMissing:
      return Missing(name, rng);
    case NoiseCategory::kAttached:
      return Attach(name, rng);
  }
  return Attach(name, rng);
}

std::vector<std::string> inject_text_noise(
    const std::vector<std::string>& names, const NoiseSpec& spec) {
  spec.Validate();
  std::vector<std::string> out = names;
  const auto count = static_cast<std::size_t>(
      std::ceil(spec.level * static_cast<double>(names.size()) - 1e-9));
  if (count == 0) return out;
  std::mt19937_64 rng(spec.seed);
  const std::vector<std::uint32_t> order = Permutation(names.size(), rng);
  std::vector<std::uint32_t> chosen(order.begin(), order.begin() + count);
  std::sort(chosen.begin(), chosen.end());
  for (std::uint32_t k : chosen) {
    const NoiseCategory c =
        spec.categories[uniform_index(rng, spec.categories.size())];
    out[k] = perturb_name(names[k], c, rng);
  }
  return out;
}

KnowledgeGraph drop_triples(const KnowledgeGraph& kg, double ratio,
                            std::uint64_t seed) {
  if (!(ratio >= 0.0 && ratio < 1.0)) {
    throw InvalidArgument("drop ratio must be in [0, 1)");
  }
  const std::size_t n = kg.num_triples();
  const auto drop = static_cast<std::size_t>(
      std::floor(ratio * static_cast<double>(n) + 1e-9));
  std::mt19937_64 rng(seed);
  const std::vector<std::uint32_t> order = Permutation(n, rng);
  std::vector<char> dropped(n, 0);
  for (std::size_t k = 0; k < drop; ++k) dropped[order[k]] = 1;
  std::vector<Triple> kept;
  kept.reserve(n - drop);
  for (std::size_t k = 0; k < n; ++k) {
    if (!dropped[k]) kept.push_back(kg.triples()[k]);
  }
  return kg.with_triples(std::move(kept));
}

void SynthSpec::Validate() const {
  if (entities < 2) throw InvalidArgument("synth.entities must be >= 2");
  if (relations < 1) throw InvalidArgument("synth.relations must be >= 1");
  if (!(mean_degree >= 1.0)) {
    throw InvalidArgument("synth.degree must be >= 1");
  }
  if (alphabet.empty()) throw InvalidArgument("synth.alphabet must not be empty");
}

SynthPair synth_kg_pair(const SynthSpec& spec) {
  spec.Validate();
  std::mt19937_64 rng(spec.seed);
  const std::size_t n = spec.entities;
  const std::size_t r = spec.relations;

  // Zipf-like relation usage so relation frequencies differ.
  std::vector<double> cdf(r);
  double total = 0.0;
  for (std::size_t k = 0; k < r; ++k) cdf[k] = (total += 1.0 / double(k + 1));
  const auto pick_relation = [&] {
    const double u = UniformReal(rng) * total;
    return static_cast<RelationId>(
        std::min<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) -
                                  cdf.begin(),
                              r - 1));
  };

  const auto target_edges = std::max<std::size_t>(
      n - 1, static_cast<std::size_t>(std::llround(double(n) *
                                                   spec.mean_degree / 2.0)));
  std::set<std::tuple<EntityId, EntityId>> linked;
  std::vector<Triple> triples;
  const auto add = [&](EntityId a, EntityId b, RelationId rel) {
    if (a == b) return false;
    if (!linked.insert({std::min(a, b), std::max(a, b)}).second) return false;
    if (uniform_index(rng, 2) == 0) std::swap(a, b);
    triples.push_back({a, rel, b});
    return true;
  };

  const std::vector<std::uint32_t> tree_order = Permutation(n, rng);
  for (std::size_t k = 1; k < n; ++k) {
    const RelationId rel =
        k - 1 < r ? static_cast<RelationId>(k - 1) : pick_relation();
    add(tree_order[k], tree_order[uniform_index(rng, k)], rel);
  }
  const std::size_t max_edges = n * (n - 1) / 2;
  while (triples.size() < std::min(target_edges, max_edges)) {
    add(static_cast<EntityId>(uniform_index(rng, n)),
        static_cast<EntityId>(uniform_index(rng, n)), pick_relation());
  }
  std::sort(triples.begin(), triples.end());

  std::vector<std::string> entity_names = UniqueNames(n, spec.alphabet, rng);
  std::vector<std::string> relation_names = UniqueNames(r, spec.alphabet, rng);

  std::vector<std::uint32_t> ent_perm(n), rel_perm(r);
  std::iota(ent_perm.begin(), ent_perm.end(), 0u);
  std::iota(rel_perm.begin(), rel_perm.end(), 0u);
  if (!spec.identity) {
    ent_perm = Permutation(n, rng);
    rel_perm = Permutation(r, rng);
  }

  std::vector<std::string> t_entity_names(n), t_relation_names(r);
  for (std::size_t k = 0; k < n; ++k) t_entity_names[ent_perm[k]] = entity_names[k];
  for (std::size_t k = 0; k < r; ++k) t_relation_names[rel_perm[k]] = relation_names[k];
  std::vector<Triple> t_triples;
  t_triples.reserve(triples.size());
  for (const Triple& t : triples) {
    t_triples.push_back({ent_perm[t.head], rel_perm[t.relation], ent_perm[t.tail]});
  }
  std::sort(t_triples.begin(), t_triples.end());

  // On-disk style keys: source ids then target ids, disjoint as in DBP15K.
  std::vector<std::int64_t> s_keys(n), t_keys(n), s_rkeys(r), t_rkeys(r);
  std::iota(s_keys.begin(), s_keys.end(), std::int64_t{0});
  std::iota(t_keys.begin(), t_keys.end(), static_cast<std::int64_t>(n));
  std::iota(s_rkeys.begin(), s_rkeys.end(), std::int64_t{0});
  std::iota(t_rkeys.begin(), t_rkeys.end(), static_cast<std::int64_t>(r));

  SynthPair out;
  out.source = KnowledgeGraph(std::move(entity_names), std::move(relation_names),
                              std::move(triples), s_keys, s_rkeys);
  out.target = KnowledgeGraph(std::move(t_entity_names),
                              std::move(t_relation_names), std::move(t_triples),
                              t_keys, t_rkeys);
  for (std::size_t k = 0; k < n; ++k) {
    out.entity_truth.push_back({static_cast<EntityId>(k), ent_perm[k]});
  }
  for (std::size_t k = 0; k < r; ++k) {
    out.relation_truth.push_back({static_cast<RelationId>(k), rel_perm[k]});
  }
  return out;
}

}  // namespace eralign
