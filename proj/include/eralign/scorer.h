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

// Semantic-similarity scorers used to rerank verification candidates.

#ifndef ERALIGN_SCORER_H_
#define ERALIGN_SCORER_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "eralign/kg.h"

namespace eralign {

// One directed comparison: source entity text against target entity text.
struct ScoreRequest {
  EntityId source = 0;
  EntityId target = 0;
  std::string_view source_text;
  std::string_view target_text;
};

class Scorer {
 public:
  virtual ~Scorer() = default;

  // One finite score per request, in request order. Throws ScorerError.
  virtual std::vector<double> Score(std::span<const ScoreRequest> requests) = 0;
};

// Cosine over character-trigram counts of the two texts.
class LexicalNgramScorer : public Scorer {
 public:
  std::vector<double> Score(std::span<const ScoreRequest> requests) override;

  static double Similarity(std::string_view a, std::string_view b);
};

// `src_id<TAB>tgt_id<TAB>score` rows keyed by on-disk ids. Pairs absent from
// the table score 0.
class PrecomputedTableScorer : public Scorer {
 public:
  static PrecomputedTableScorer Load(const std::filesystem::path& path,
                                     const KnowledgeGraph& source,
                                     const KnowledgeGraph& target);

  std::vector<double> Score(std::span<const ScoreRequest> requests) override;

 private:
  std::map<std::pair<EntityId, EntityId>, double> table_;
};

// Wraps a callable; used for ground-truth oracles and tests.
class FunctionScorer : public Scorer {
 public:
  using Fn = std::function<double(const ScoreRequest&)>;
  explicit FunctionScorer(Fn fn) : fn_(std::move(fn)) {}

  std::vector<double> Score(std::span<const ScoreRequest> requests) override;

 private:
  Fn fn_;
};

// Long-running worker speaking newline-delimited JSON over its stdin/stdout.
// The worker first prints {"ready": true}; each request
// {"id": n, "a": ..., "b": ...} gets one {"id": n, "score": x} reply, in any
// order. Requests of a batch are pipelined.
class ExternalProcessScorer : public Scorer {
 public:
  // Runs `command` through /bin/sh -c and waits for the ready line.
  explicit ExternalProcessScorer(const std::string& command);
  ~ExternalProcessScorer() override;

  ExternalProcessScorer(const ExternalProcessScorer&) = delete;
  ExternalProcessScorer& operator=(const ExternalProcessScorer&) = delete;

  std::vector<double> Score(std::span<const ScoreRequest> requests) override;

 private:
  bool ReadLine(std::string& line);
  void Shutdown();

  int pid_ = -1;
  int fd_ = -1;
  std::string buffer_;
  std::int64_t next_id_ = 0;
};

enum class ScorerKind { kLexicalNgram, kExternalProcess, kPrecomputedTable };

struct ScorerBinding {
  ScorerKind kind = ScorerKind::kLexicalNgram;
  std::string command;               // external-process
  std::filesystem::path table_path;  // precomputed-table
};

std::unique_ptr<Scorer> make_scorer(const ScorerBinding& binding,
                                    const KnowledgeGraph& source,
                                    const KnowledgeGraph& target);

}  // namespace eralign

#endif  // ERALIGN_SCORER_H_
