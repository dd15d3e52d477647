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

// Flat `key = value` pipeline configuration with `#` comments.

#ifndef ERALIGN_CONFIG_H_
#define ERALIGN_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eralign/assignment.h"
#include "eralign/common.h"
#include "eralign/kg.h"
#include "eralign/perturbation.h"
#include "eralign/refinement.h"
#include "eralign/scorer.h"
#include "eralign/verification.h"

namespace eralign {

// Every problem found in one validation pass.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

struct PipelineConfig {
  // Dataset in DBP15K layout, or a synthetic pair.
  std::filesystem::path data_dir;
  bool synthetic = false;

  bool bigram = true;
  std::filesystem::path entity_emb_source, entity_emb_target;
  std::filesystem::path relation_emb_source, relation_emb_target;

  int depth = 2;
  std::filesystem::path import_entities, import_relations;
  SinkhornParams sinkhorn;
  DualOptions dual;
  RefinementParams refine;
  VerificationParams verify;
  ScorerBinding scorer;

  NoiseSpec noise;
  double drop_ratio = 0.0;
  std::uint64_t drop_seed = 0;
  SynthSpec synth;

  std::filesystem::path output_dir = "out";
  std::vector<std::size_t> eval_ks = {1, 10};
  std::size_t dump_top = 10;
  std::filesystem::path eval_import;

  // Canonical `key = value` of every key, defaults included.
  std::map<std::string, std::string> values;
};

// Parses and validates config text; throws ConfigError listing every
// unknown key, type error and range error.
PipelineConfig parse_config(const std::string& text);
PipelineConfig load_config(const std::filesystem::path& path);

// Re-validates after command-line overrides (`key = value` pairs).
PipelineConfig apply_overrides(const PipelineConfig& base,
                               const std::map<std::string, std::string>& kv);

// All recognised keys, sorted.
std::vector<std::string> config_keys();

// FNV-1a 64 over the sorted `key=value` lines whose key starts with one of
// `prefixes`.
std::uint64_t config_hash(const PipelineConfig& config,
                          const std::vector<std::string>& prefixes);

}  // namespace eralign

#endif  // ERALIGN_CONFIG_H_
