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

// Staged pipeline: ingest -> align -> refine -> verify -> eval, with every
// intermediate persisted under the output directory.

#ifndef ERALIGN_PIPELINE_H_
#define ERALIGN_PIPELINE_H_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "eralign/config.h"
#include "eralign/evaluation.h"
#include "eralign/kg.h"

namespace eralign {

enum class Stage { kIngest, kAlign, kRefine, kVerify, kEval };

const char* stage_name(Stage stage);

// Config key prefixes that a stage and its upstream stages depend on.
std::vector<std::string> stage_key_prefixes(Stage stage);

// Source/target graphs in DBP15K layout plus optional reference pairs.
struct Dataset {
  KnowledgeGraph source;
  KnowledgeGraph target;
  GroundTruth entity_truth;    // empty without ref_ent_ids
  GroundTruth relation_truth;  // empty without ref_rel_ids
};

Dataset load_dataset(const std::filesystem::path& dir);
void write_dataset(const std::filesystem::path& dir, const Dataset& data);

// Dataset for the config: data.dir or a synthetic pair, then noise on the
// source names and triple dropping on the target.
Dataset prepare_dataset(const PipelineConfig& config);

// Runs one stage; upstream artifacts must exist and carry the config hash
// of the current configuration. Throws Error (ScorerError from verify).
void run_stage(const PipelineConfig& config, Stage stage);

void run_pipeline(const PipelineConfig& config, std::span<const Stage> stages);

// Report of the eval stage, as written to report.json.
MetricsReport evaluate_outputs(const PipelineConfig& config);

}  // namespace eralign

#endif  // ERALIGN_PIPELINE_H_
