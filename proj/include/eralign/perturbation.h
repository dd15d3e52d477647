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

// Seeded perturbations for robustness runs: textual noise on names, triple
// dropping, and synthetic ground-truthed graph pairs.

#ifndef ERALIGN_PERTURBATION_H_
#define ERALIGN_PERTURBATION_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "eralign/kg.h"

namespace eralign {

enum class NoiseCategory : std::uint8_t { kPhonetic, kMissing, kAttached };

struct NoiseSpec {
  double level = 0.0;  // fraction of names perturbed
  std::vector<NoiseCategory> categories = {
      NoiseCategory::kPhonetic, NoiseCategory::kMissing,
      NoiseCategory::kAttached};
  std::uint64_t seed = 0;

  void Validate() const;
};

// Uniform index in [0, n) from a 64-bit engine; stable across standard
// libraries, unlike std::uniform_int_distribution.
std::size_t uniform_index(std::mt19937_64& rng, std::size_t n);

// Phonetic substitution pairs; each applies in both directions.
std::span<const std::pair<const char*, const char*>> phonetic_pairs();

// Applies one error of `category` to `name` (falling back to an attached
// character when the category has no applicable site).
std::string perturb_name(const std::string& name, NoiseCategory category,
                         std::mt19937_64& rng);

// Perturbs exactly ceil(level·n) names, chosen without replacement.
std::vector<std::string> inject_text_noise(
    const std::vector<std::string>& names, const NoiseSpec& spec);

// Removes floor(ratio·|T|) triples. Drop sets are nested in `ratio` for a
// fixed seed. Entities are kept even when isolated.
KnowledgeGraph drop_triples(const KnowledgeGraph& kg, double ratio,
                            std::uint64_t seed);

struct SynthSpec {
  std::size_t entities = 200;
  std::size_t relations = 20;
  double mean_degree = 4.0;
  std::string alphabet = "abcdefghijklmnopqrstuvwxyz";
  std::uint64_t seed = 0;
  bool identity = false;  // target ids equal source ids

  void Validate() const;
};

struct SynthPair {
  KnowledgeGraph source;
  KnowledgeGraph target;
  std::vector<std::pair<EntityId, EntityId>> entity_truth;
  std::vector<std::pair<RelationId, RelationId>> relation_truth;
};

// Random source graph (spanning tree plus random edges, skewed relation
// usage, unique word-like names) and an isomorphic target under a seeded
// permutation of entities and relations.
SynthPair synth_kg_pair(const SynthSpec& spec);

}  // namespace eralign

#endif  // ERALIGN_PERTURBATION_H_
