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

#include "eralign/pipeline.h"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <unordered_map>

#include "eralign/alignment_init.h"
#include "eralign/features.h"
#include "eralign/perturbation.h"
#include "eralign/refinement.h"
#include "eralign/score_matrix.h"
#include "eralign/scorer.h"
#include "eralign/verification.h"

namespace eralign {

namespace fs = std::filesystem;

namespace {

constexpr const char* kData = "data";
constexpr const char* kInitEnt = "init_entities.aln1";
constexpr const char* kInitRel = "init_relations.aln1";
constexpr const char* kRefEnt = "refined_entities.aln1";
constexpr const char* kRefRel = "refined_relations.aln1";
constexpr const char* kVerEnt = "verified_entities.aln1";
constexpr const char* kDetection = "detection.tsv";
constexpr const char* kVerdicts = "verdicts.tsv";

void Log(const std::string& msg) { std::cerr << "[eralign] " << msg << "\n"; }

std::string Format(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string HashHex(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return buf;
}

fs::path MetaPath(const fs::path& artifact) {
  fs::path p = artifact;
  p += ".meta";
  return p;
}

void WriteMeta(const fs::path& artifact, const PipelineConfig& config,
               Stage stage) {
  std::ofstream out(MetaPath(artifact), std::ios::binary);
  out << "stage " << stage_name(stage) << "\n"
      << "config_hash "
      << HashHex(config_hash(config, stage_key_prefixes(stage))) << "\n";
  if (!out) throw Error("cannot write " + MetaPath(artifact).string());
}

// Refuses artifacts that are missing or were produced by another config.
void CheckMeta(const fs::path& artifact, const PipelineConfig& config,
               Stage stage) {
  if (!fs::exists(artifact)) {
    throw Error("missing " + artifact.string() + "; run the " +
                stage_name(stage) + " stage first");
  }
  std::ifstream in(MetaPath(artifact));
  std::string line, recorded;
  while (std::getline(in, line)) {
    if (line.starts_with("config_hash ")) recorded = line.substr(12);
  }
  const std::string expected =
      HashHex(config_hash(config, stage_key_prefixes(stage)));
  if (recorded != expected) {
    throw Error(artifact.string() + " was produced with a different " +
                stage_name(stage) + " configuration (hash " +
                (recorded.empty() ? "missing" : recorded) + ", expected " +
                expected + "); rerun that stage");
  }
}

void WriteNames(const fs::path& path, const std::vector<std::string>& names,
                const std::vector<std::int64_t>& keys) {
  std::ofstream out(path, std::ios::binary);
  for (std::size_t k = 0; k < names.size(); ++k) {
    out << keys[k] << '\t' << names[k] << '\n';
  }
  if (!out) throw Error("cannot write " + path.string());
}

void WriteTriples(const fs::path& path, const KnowledgeGraph& kg) {
  std::ofstream out(path, std::ios::binary);
  for (const Triple& t : kg.triples()) {
    out << kg.entity_key(t.head) << '\t' << kg.relation_key(t.relation) << '\t'
        << kg.entity_key(t.tail) << '\n';
  }
  if (!out) throw Error("cannot write " + path.string());
}

GroundTruth LoadRelationTruth(const fs::path& path, const KnowledgeGraph& s,
                              const KnowledgeGraph& t) {
  std::unordered_map<std::int64_t, RelationId> sk, tk;
  for (RelationId r = 0; r < s.num_relations(); ++r) sk[s.relation_key(r)] = r;
  for (RelationId r = 0; r < t.num_relations(); ++r) tk[t.relation_key(r)] = r;
  std::ifstream in(path);
  GroundTruth truth;
  std::int64_t a = 0, b = 0;
  std::size_t line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::istringstream fields(line);
    if (!(fields >> a >> b) || !sk.contains(a) || !tk.contains(b)) {
      throw ParseError(path.string(), line_no, "bad relation pair");
    }
    truth.push_back({sk[a], tk[b]});
  }
  validate_truth(truth);
  return truth;
}

struct Loaded {
  Dataset data;
  AlignmentGraphs graphs;
};

Loaded LoadIngested(const PipelineConfig& config) {
  const fs::path dir = config.output_dir / kData;
  CheckMeta(dir / "triples_1", config, Stage::kIngest);
  Dataset data = load_dataset(dir);
  AlignmentGraphs graphs =
      AlignmentGraphs::Build(data.source, data.target, config.dual);
  return {std::move(data), std::move(graphs)};
}

FeatureMatrix Features(std::span<const std::string> names,
                       std::span<const std::string> other_names, bool source,
                       const fs::path& emb, bool bigram) {
  std::optional<FeatureMatrix> semantic, lexical;
  if (!emb.empty()) semantic = load_embeddings(emb, names.size());
  if (bigram) {
    const BigramVocab vocab = source ? BigramVocab::Build(names, other_names)
                                     : BigramVocab::Build(other_names, names);
    lexical = bigram_features(names, vocab);
  }
  return concat_features(semantic, lexical);
}

DenseMatrix LoadDense(const fs::path& path, std::size_t rows,
                      std::size_t cols) {
  const ScoreMatrix m = load_aln1(path);
  if (m.rows() != rows || m.cols() != cols) {
    throw Error(path.string() + " is " + std::to_string(m.rows()) + "x" +
                std::to_string(m.cols()) + ", expected " +
                std::to_string(rows) + "x" + std::to_string(cols));
  }
  return m.to_dense();
}

void SaveStage(const fs::path& path, const ScoreMatrix& m,
               const PipelineConfig& config, Stage stage) {
  save_aln1(path, m);
  WriteMeta(path, config, stage);
}

void RunIngest(const PipelineConfig& config) {
  const Dataset data = prepare_dataset(config);
  const fs::path dir = config.output_dir / kData;
  write_dataset(dir, data);
  WriteMeta(dir / "triples_1", config, Stage::kIngest);
  Log("ingest: source " + std::to_string(data.source.num_entities()) +
      " entities / " + std::to_string(data.source.num_triples()) +
      " triples, target " + std::to_string(data.target.num_entities()) +
      " entities / " + std::to_string(data.target.num_triples()) +
      " triples, " + std::to_string(data.entity_truth.size()) +
      " reference pairs");
}

void RunAlign(const PipelineConfig& config) {
  const Loaded in = LoadIngested(config);
  const AlignmentGraphs& g = in.graphs;
  InitialAlignment init;
  if (!config.import_entities.empty()) {
    init.entities = LoadDense(config.import_entities, g.source.num_entities(),
                              g.target.num_entities());
    init.relations = LoadDense(config.import_relations,
                               g.source.num_relations(),
                               g.target.num_relations());
    Log("align: imported initial scores");
  } else {
    FeatureSet f;
    f.source_entities =
        Features(g.source.entity_names(), g.target.entity_names(), true,
                 config.entity_emb_source, config.bigram);
    f.target_entities =
        Features(g.target.entity_names(), g.source.entity_names(), false,
                 config.entity_emb_target, config.bigram);
    f.source_relations =
        Features(g.source.relation_names(), g.target.relation_names(), true,
                 config.relation_emb_source, config.bigram);
    f.target_relations =
        Features(g.target.relation_names(), g.source.relation_names(), false,
                 config.relation_emb_target, config.bigram);
    init = initial_alignments(g, f, config.depth, config.sinkhorn);
    Log("align: initial scores computed (depth " +
        std::to_string(config.depth) + ")");
  }
  SaveStage(config.output_dir / kInitEnt, ScoreMatrix(std::move(init.entities)),
            config, Stage::kAlign);
  SaveStage(config.output_dir / kInitRel,
            ScoreMatrix(std::move(init.relations)), config, Stage::kAlign);
}

void RunRefine(const PipelineConfig& config) {
  const Loaded in = LoadIngested(config);
  const AlignmentGraphs& g = in.graphs;
  const fs::path out = config.output_dir;
  CheckMeta(out / kInitEnt, config, Stage::kAlign);
  CheckMeta(out / kInitRel, config, Stage::kAlign);
  const DenseMatrix ent = LoadDense(out / kInitEnt, g.source.num_entities(),
                                    g.target.num_entities());
  const DenseMatrix rel = LoadDense(out / kInitRel, g.source.num_relations(),
                                    g.target.num_relations());
  ScorePair refined = refine(ent, rel, g, config.refine, config.sinkhorn);
  SaveStage(out / kRefEnt, ScoreMatrix(std::move(refined.entities)), config,
            Stage::kRefine);
  SaveStage(out / kRefRel, ScoreMatrix(std::move(refined.relations)), config,
            Stage::kRefine);
  Log("refine: " + std::to_string(config.refine.iterations) +
      " iterations, lambda " + Format(config.refine.lambda));
}

void RunVerify(const PipelineConfig& config) {
  const Loaded in = LoadIngested(config);
  const AlignmentGraphs& g = in.graphs;
  const fs::path out = config.output_dir;
  CheckMeta(out / kInitEnt, config, Stage::kAlign);
  CheckMeta(out / kRefEnt, config, Stage::kRefine);
  CheckMeta(out / kRefRel, config, Stage::kRefine);
  const ScoreMatrix init = load_aln1(out / kInitEnt);
  const ScoreMatrix ent = load_aln1(out / kRefEnt);
  const ScoreMatrix rel = load_aln1(out / kRefRel);
  std::unique_ptr<Scorer> scorer = make_scorer(config.scorer, g.source, g.target);
  const VerificationResult result =
      verify(init, ent, rel, g.source, g.target, *scorer, config.verify);

  std::vector<char> selected(ent.rows());
  for (EntityId e : result.selected) selected[e] = 1;
  {
    std::ofstream det(out / kDetection, std::ios::binary);
    det << "src_id\tconfidence\tconsistency\tselected\n";
    for (std::size_t i = 0; i < ent.rows(); ++i) {
      det << g.source.entity_key(static_cast<EntityId>(i)) << '\t'
          << Format(result.detection.confidence[i]) << '\t'
          << Format(result.detection.consistency[i]) << '\t'
          << int(selected[i]) << '\n';
    }
    if (!det) throw Error("cannot write detection dump");
  }
  std::size_t accepted = 0;
  {
    std::ofstream log(out / kVerdicts, std::ios::binary);
    log << "src_id\told_top\tproposed\taccepted\n";
    for (const VerificationVerdict& v : result.correction.verdicts) {
      log << g.source.entity_key(v.source) << '\t'
          << g.target.entity_key(v.old_top) << '\t'
          << g.target.entity_key(v.proposed) << '\t' << int(v.accepted) << '\n';
      accepted += v.accepted ? 1 : 0;
    }
    if (!log) throw Error("cannot write verdict log");
  }
  SaveStage(out / kVerEnt, result.correction.corrected, config, Stage::kVerify);
  WriteMeta(out / kVerdicts, config, Stage::kVerify);
  Log("verify: " + std::to_string(result.selected.size()) + " selected, " +
      std::to_string(accepted) + " cross-verified");
}

void RunEval(const PipelineConfig& config) {
  const MetricsReport report = evaluate_outputs(config);
  const fs::path out = config.output_dir;
  std::ofstream(out / "report.json", std::ios::binary) << report.ToJson();
  std::ofstream(out / "report.txt", std::ios::binary) << report.ToText();
  std::cerr << report.ToText();
}

}  // namespace

const char* stage_name(Stage stage) {
  switch (stage) {
    case Stage::kIngest: return "ingest";
    case Stage::kAlign: return "align";
    case Stage::kRefine: return "refine";
    case Stage::kVerify: return "verify";
    case Stage::kEval: return "eval";
  }
  return "?";
}

std::vector<std::string> stage_key_prefixes(Stage stage) {
  std::vector<std::string> p = {"data.", "noise.", "drop.", "synth."};
  if (stage >= Stage::kAlign) {
    p.insert(p.end(), {"features.", "init.", "sinkhorn.", "kg."});
  }
  if (stage >= Stage::kRefine) p.push_back("refine.");
  if (stage >= Stage::kVerify) p.push_back("verify.");
  if (stage >= Stage::kEval) p.push_back("eval.");
  return p;
}

Dataset load_dataset(const fs::path& dir) {
  Dataset d;
  d.source = load_kg(dir / "ent_ids_1", dir / "rel_ids_1", dir / "triples_1");
  d.target = load_kg(dir / "ent_ids_2", dir / "rel_ids_2", dir / "triples_2");
  if (fs::exists(dir / "ref_ent_ids")) {
    d.entity_truth = load_truth(dir / "ref_ent_ids", d.source, d.target);
  }
  if (fs::exists(dir / "ref_rel_ids")) {
    d.relation_truth = LoadRelationTruth(dir / "ref_rel_ids", d.source, d.target);
  }
  return d;
}

void write_dataset(const fs::path& dir, const Dataset& d) {
  fs::create_directories(dir);
  WriteNames(dir / "ent_ids_1", d.source.entity_names(), d.source.entity_keys());
  WriteNames(dir / "rel_ids_1", d.source.relation_names(),
             d.source.relation_keys());
  WriteTriples(dir / "triples_1", d.source);
  WriteNames(dir / "ent_ids_2", d.target.entity_names(), d.target.entity_keys());
  WriteNames(dir / "rel_ids_2", d.target.relation_names(),
             d.target.relation_keys());
  WriteTriples(dir / "triples_2", d.target);
  {
    std::ofstream out(dir / "ref_ent_ids", std::ios::binary);
    for (const auto& [s, t] : d.entity_truth) {
      out << d.source.entity_key(s) << '\t' << d.target.entity_key(t) << '\n';
    }
  }
  if (!d.relation_truth.empty()) {
    std::ofstream out(dir / "ref_rel_ids", std::ios::binary);
    for (const auto& [s, t] : d.relation_truth) {
      out << d.source.relation_key(s) << '\t' << d.target.relation_key(t)
          << '\n';
    }
  }
}

Dataset prepare_dataset(const PipelineConfig& config) {
  Dataset d;
  if (config.synthetic) {
    SynthPair pair = synth_kg_pair(config.synth);
    d.source = std::move(pair.source);
    d.target = std::move(pair.target);
    d.entity_truth = std::move(pair.entity_truth);
    d.relation_truth.assign(pair.relation_truth.begin(),
                            pair.relation_truth.end());
  } else {
    if (config.data_dir.empty()) {
      throw ConfigError({"data.dir: required unless data.synthetic = true"});
    }
    d = load_dataset(config.data_dir);
  }
  if (config.noise.level > 0.0) {
    NoiseSpec rel_noise = config.noise;
    rel_noise.seed = config.noise.seed ^ 0x9e3779b97f4a7c15ull;
    d.source = d.source
                   .with_entity_names(
                       inject_text_noise(d.source.entity_names(), config.noise))
                   .with_relation_names(inject_text_noise(
                       d.source.relation_names(), rel_noise));
  }
  if (config.drop_ratio > 0.0) {
    d.target = drop_triples(d.target, config.drop_ratio, config.drop_seed);
  }
  return d;
}

void run_stage(const PipelineConfig& config, Stage stage) {
  fs::create_directories(config.output_dir);
  switch (stage) {
    case Stage::kIngest: return RunIngest(config);
    case Stage::kAlign: return RunAlign(config);
    case Stage::kRefine: return RunRefine(config);
    case Stage::kVerify: return RunVerify(config);
    case Stage::kEval: return RunEval(config);
  }
}

void run_pipeline(const PipelineConfig& config, std::span<const Stage> stages) {
  for (Stage s : stages) run_stage(config, s);
}

MetricsReport evaluate_outputs(const PipelineConfig& config) {
  const fs::path out = config.output_dir;
  const Loaded in = LoadIngested(config);
  const Dataset& d = in.data;
  MetricsReport report;
  if (d.entity_truth.empty()) {
    throw Error("eval: no reference pairs (ref_ent_ids) in the dataset");
  }
  if (!config.eval_import.empty()) {
    const ScoreMatrix m = load_aln1(config.eval_import);
    report.steps.push_back(
        {"imported", hits_mrr(m, d.entity_truth, config.eval_ks)});
    write_alignment_tsv(out / "alignment.tsv", m, d.source, d.target,
                        config.dump_top);
    return report;
  }

  CheckMeta(out / kInitEnt, config, Stage::kAlign);
  const ScoreMatrix init = load_aln1(out / kInitEnt);
  report.steps.push_back({"step1", hits_mrr(init, d.entity_truth, config.eval_ks)});
  const ScoreMatrix* last = &init;

  std::optional<ScoreMatrix> refined, refined_rel, verified;
  if (fs::exists(out / kRefEnt)) {
    CheckMeta(out / kRefEnt, config, Stage::kRefine);
    refined = load_aln1(out / kRefEnt);
    report.steps.push_back(
        {"step2", hits_mrr(*refined, d.entity_truth, config.eval_ks)});
    last = &*refined;
    if (!d.relation_truth.empty()) {
      refined_rel = load_aln1(out / kRefRel);
      report.relations = hits_mrr(*refined_rel, d.relation_truth, config.eval_ks);
    }
  } else if (!d.relation_truth.empty()) {
    report.relations =
        hits_mrr(load_aln1(out / kInitRel), d.relation_truth, config.eval_ks);
  }
  if (refined && fs::exists(out / kVerEnt)) {
    CheckMeta(out / kVerEnt, config, Stage::kVerify);
    CheckMeta(out / kVerdicts, config, Stage::kVerify);
    verified = load_aln1(out / kVerEnt);
    report.steps.push_back(
        {"step3", hits_mrr(*verified, d.entity_truth, config.eval_ks)});
    last = &*verified;

    const DetectionScores det = detection_scores(init, *refined);
    const std::vector<EntityId> selected =
        select_for_verification(det, config.verify.target_fraction);
    const std::vector<int> before = argmax_alignment(*refined);
    const std::vector<int> after = argmax_alignment(*verified);

    std::vector<double> conf, cons;
    std::vector<bool> wrong;
    for (const auto& [s, t] : d.entity_truth) {
      conf.push_back(det.confidence[s]);
      cons.push_back(det.consistency[s]);
      wrong.push_back(before[s] != static_cast<int>(t));
    }
    const auto errors = std::count(wrong.begin(), wrong.end(), true);
    if (errors > 0 && errors < static_cast<long>(wrong.size())) {
      report.confidence = detection_quality(conf, wrong);
      report.consistency = detection_quality(cons, wrong);
    }

    std::vector<EntityId> corrected;
    std::ifstream log(out / kVerdicts);
    std::string line;
    std::getline(log, line);  // header
    while (std::getline(log, line)) {
      std::istringstream fields(line);
      std::int64_t src = 0, old_top = 0, proposed = 0;
      int accepted = 0;
      if (!(fields >> src >> old_top >> proposed >> accepted)) {
        throw ParseError((out / kVerdicts).string(), 0, "malformed verdict");
      }
      const auto e = d.source.entity_by_key(src);
      if (!e) throw ParseError((out / kVerdicts).string(), 0, "unknown source");
      if (accepted) corrected.push_back(*e);
    }
    report.vmatrix =
        verification_matrix(before, after, selected, corrected, d.entity_truth);
  }
  write_alignment_tsv(out / "alignment.tsv", *last, d.source, d.target,
                      config.dump_top);
  return report;
}

}  // namespace eralign
