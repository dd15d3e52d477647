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

// The Python embedding bridge against the C++ EMB1 reader and the process
// scorer. Uses the bridge's download-free `hashed-trigram` encoder; set
// ERALIGN_BRIDGE_MODEL to a multilingual sentence-transformers model to also
// run the cross-lingual check.

#include <cmath>
#include <cstdlib>
#include <string>

#include <gtest/gtest.h>

#include "../vendor/json.hpp"
#include "eralign/config.h"
#include "eralign/features.h"
#include "eralign/perturbation.h"
#include "eralign/pipeline.h"
#include "eralign/scorer.h"
#include "test_util.h"

namespace eralign {
namespace {

namespace fs = std::filesystem;

std::string Bridge(const std::string& args) {
  return std::string(ERALIGN_PYTHON) + " " + ERALIGN_BRIDGE + " " + args;
}

bool BridgeAvailable() {
  const std::string probe = std::string(ERALIGN_PYTHON) + " -c 'import numpy' 2>/dev/null";
  return std::system(probe.c_str()) == 0;
}

int Export(const fs::path& names, const fs::path& out, const std::string& model = "hashed-trigram") {
  const std::string cmd = Bridge("export --model '" + model + "' --names '" + names.string() +
                                 "' --out '" + out.string() + "'");
  return std::system(cmd.c_str());
}

class EmbedBridgeTest : public ::testing::Test {
 protected:
  void SetUp() override {
    if (!BridgeAvailable()) GTEST_SKIP() << "python3 with numpy not available";
  }
  testutil::TempDir dir_;
};

TEST_F(EmbedBridgeTest, ExportHeaderAndRows) {
  testutil::WriteFile(dir_ / "names", "7\tParis\n3\thttp://dbpedia.org/resource/Paris\n9\tTokyo\n");
  ASSERT_EQ(Export(dir_ / "names", dir_ / "n.emb"), 0);
  const std::string raw = testutil::ReadFile(dir_ / "n.emb");
  ASSERT_GE(raw.size(), 12u);
  EXPECT_EQ(raw.substr(0, 4), "EMB1");
  const FeatureMatrix m = load_embeddings(dir_ / "n.emb", 3);
  EXPECT_EQ(m.rows(), 3);
  EXPECT_EQ(m.cols(), 256);
  // The URI reduces to the same surface name, so rows 0 and 1 coincide.
  EXPECT_NEAR(m.row(0).dot(m.row(1)), 1.0, 1e-5);
  EXPECT_LT(m.row(0).dot(m.row(2)), 0.9);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(m.row(i).norm(), 1.0, 1e-5);
  EXPECT_THROW(load_embeddings(dir_ / "n.emb", 4), ParseError);
}

TEST_F(EmbedBridgeTest, MalformedNameFileFails) {
  testutil::WriteFile(dir_ / "names", "no tab here\n");
  EXPECT_NE(Export(dir_ / "names", dir_ / "n.emb"), 0);
}

TEST_F(EmbedBridgeTest, WorkerProtocol) {
  ExternalProcessScorer s(Bridge("serve --model hashed-trigram"));
  const std::string a = "Football League One", b = "Tokyo Tower";
  const ScoreRequest same[] = {{0, 0, a, a}, {0, 1, a, b}};
  const auto out = s.Score(same);
  EXPECT_NEAR(out[0], 1.0, 1e-5);
  EXPECT_LT(out[1], out[0]);

  std::vector<std::string> texts;
  for (int i = 0; i < 1000; ++i) texts.push_back("entity " + std::to_string(i));
  std::vector<ScoreRequest> flood;
  for (int i = 0; i < 1000; ++i) flood.push_back({EntityId(i), 0, texts[i], texts[i]});
  const auto scores = s.Score(flood);
  ASSERT_EQ(scores.size(), 1000u);
  for (double x : scores) ASSERT_NEAR(x, 1.0, 1e-5);
}

TEST_F(EmbedBridgeTest, ReorderedSentenceBeatsUnrelated) {
  ExternalProcessScorer s(Bridge("serve --model hashed-trigram"));
  const std::string sentence =
      "Football League One, which relegation is Football League Championship, promotion is "
      "Football League Championship, promotion is Football League Two, relegation is Football "
      "League Two, league is Sheffield United F.C..";
  const std::string reordered =
      "Football League One, which promotion is Football League Championship, relegation is "
      "Football League Championship, promotion is Football League Two, relegation is Football "
      "League Two, league is Sheffield United F.C..";
  const std::string unrelated = "Tokyo Tower, which location is Minato, architect is Tachu Naito.";
  const ScoreRequest reqs[] = {{0, 0, sentence, reordered}, {0, 1, sentence, unrelated}};
  const auto out = s.Score(reqs);
  EXPECT_GT(out[0], out[1]);
}

TEST_F(EmbedBridgeTest, PipelineWithExportedEmbeddingsAndWorker) {
  SynthSpec spec;
  spec.entities = 60;
  spec.relations = 6;
  spec.seed = 4;
  SynthPair p = synth_kg_pair(spec);
  const fs::path data = dir_ / "data";
  write_dataset(data, {p.source, p.target, p.entity_truth,
                       {p.relation_truth.begin(), p.relation_truth.end()}});
  for (const char* f : {"ent_ids_1", "ent_ids_2", "rel_ids_1", "rel_ids_2"}) {
    ASSERT_EQ(Export(data / f, dir_ / (std::string(f) + ".emb")), 0) << f;
  }
  const PipelineConfig config = parse_config(
      "data.dir = " + data.string() + "\n" +
      "features.entity_emb_source = " + (dir_ / "ent_ids_1.emb").string() + "\n" +
      "features.entity_emb_target = " + (dir_ / "ent_ids_2.emb").string() + "\n" +
      "features.relation_emb_source = " + (dir_ / "rel_ids_1.emb").string() + "\n" +
      "features.relation_emb_target = " + (dir_ / "rel_ids_2.emb").string() + "\n" +
      "verify.scorer = process\n" +
      "verify.command = " + Bridge("serve --model hashed-trigram") + "\n" +
      "output.dir = " + (dir_ / "out").string() + "\n");
  const Stage all[] = {Stage::kIngest, Stage::kAlign, Stage::kRefine, Stage::kVerify,
                       Stage::kEval};
  run_pipeline(config, all);
  const auto r = nlohmann::json::parse(testutil::ReadFile(dir_ / "out" / "report.json"));
  EXPECT_DOUBLE_EQ(r["hits.1"].get<double>(), 1.0);
}

TEST_F(EmbedBridgeTest, CrossLingualModel) {
  const char* model = std::getenv("ERALIGN_BRIDGE_MODEL");
  if (model == nullptr || *model == '\0') GTEST_SKIP() << "ERALIGN_BRIDGE_MODEL not set";
  testutil::WriteFile(dir_ / "names", "0\tFrance\n1\t法国\n2\txqzvbw kjhh\n");
  ASSERT_EQ(Export(dir_ / "names", dir_ / "n.emb", model), 0);
  const FeatureMatrix m = load_embeddings(dir_ / "n.emb", 3);
  EXPECT_GT(m.row(0).dot(m.row(1)), m.row(0).dot(m.row(2)));
}

}  // namespace
}  // namespace eralign
