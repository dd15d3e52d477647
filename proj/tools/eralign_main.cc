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

// eralign: command-line front end for the alignment pipeline.
//
// Exit codes: 0 success, 1 validation error, 2 runtime error, 3 scorer
// process failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "eralign/config.h"
#include "eralign/parallel.h"
#include "eralign/perturbation.h"
#include "eralign/pipeline.h"

namespace {

using eralign::PipelineConfig;
using eralign::Stage;

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kRuntime = 2;
constexpr int kScorer = 3;

struct GlobalFlags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  std::vector<std::string> set;
};

PipelineConfig ResolveConfig(const GlobalFlags& flags) {
  PipelineConfig config = flags.config.empty()
                              ? eralign::parse_config("")
                              : eralign::load_config(flags.config);
  std::map<std::string, std::string> overrides;
  std::vector<std::string> problems;
  for (const std::string& kv : flags.set) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      problems.push_back("--set " + kv + ": expected key=value");
      continue;
    }
    overrides[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  if (!problems.empty()) throw eralign::ConfigError(std::move(problems));
  if (!flags.out.empty()) overrides["output.dir"] = flags.out;
  if (flags.seed) {
    const std::string s = std::to_string(*flags.seed);
    overrides["noise.seed"] = s;
    overrides["drop.seed"] = s;
    overrides["synth.seed"] = s;
  }
  return overrides.empty() ? config
                           : eralign::apply_overrides(config, overrides);
}

void RunNoise(const PipelineConfig& config, const std::string& input,
              const std::string& output) {
  std::ifstream in(input);
  if (!in) throw eralign::Error("cannot read " + input);
  std::vector<std::string> ids, names;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw eralign::ParseError(input, line_no, "expected <id><TAB><name>");
    }
    ids.push_back(line.substr(0, tab));
    names.push_back(line.substr(tab + 1));
  }
  const std::vector<std::string> noisy =
      eralign::inject_text_noise(names, config.noise);
  std::ofstream out(output, std::ios::binary);
  for (std::size_t k = 0; k < ids.size(); ++k) {
    out << ids[k] << '\t' << noisy[k] << '\n';
  }
  if (!out) throw eralign::Error("cannot write " + output);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unsupervised entity and relation alignment of two knowledge "
               "graphs"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalFlags flags;
  app.add_option("--config", flags.config, "key = value configuration file");
  app.add_option("--out", flags.out, "output directory (overrides output.dir)");
  app.add_option("--seed", flags.seed,
                 "seed for noise, triple dropping and synthesis");
  app.add_option("--threads", flags.threads, "worker threads (0 = all cores)");
  app.add_option("--set", flags.set, "extra key=value config overrides");

  struct Command {
    CLI::App* app;
    std::vector<Stage> stages;
  };
  std::vector<Command> commands = {
      {app.add_subcommand("ingest", "load, perturb and stage the dataset"),
       {Stage::kIngest}},
      {app.add_subcommand("align", "initial entity and relation alignment"),
       {Stage::kAlign}},
      {app.add_subcommand("refine", "neighbour-triple score refinement"),
       {Stage::kRefine}},
      {app.add_subcommand("verify", "detect and correct doubtful alignments"),
       {Stage::kVerify}},
      {app.add_subcommand("eval", "metrics report and alignment dump"),
       {Stage::kEval}},
      {app.add_subcommand("pipeline", "ingest, align, refine, verify, eval"),
       {Stage::kIngest, Stage::kAlign, Stage::kRefine, Stage::kVerify,
        Stage::kEval}},
  };
  CLI::App* synth = app.add_subcommand(
      "synth", "write a synthetic graph pair (DBP15K layout) to --out");
  CLI::App* noise = app.add_subcommand(
      "noise", "apply textual noise to an <id><TAB><name> file");
  std::string noise_in, noise_out;
  noise->add_option("input", noise_in, "name file")->required();
  noise->add_option("output", noise_out, "noised name file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    eralign::set_thread_budget(flags.threads > 0
                                   ? flags.threads
                                   : std::thread::hardware_concurrency());
    const PipelineConfig config = ResolveConfig(flags);
    if (synth->parsed()) {
      eralign::SynthPair pair = eralign::synth_kg_pair(config.synth);
      eralign::write_dataset(config.output_dir,
                             {std::move(pair.source), std::move(pair.target),
                              std::move(pair.entity_truth),
                              {pair.relation_truth.begin(),
                               pair.relation_truth.end()}});
      return kOk;
    }
    if (noise->parsed()) {
      RunNoise(config, noise_in, noise_out);
      return kOk;
    }
    for (const Command& c : commands) {
      if (c.app->parsed()) eralign::run_pipeline(config, c.stages);
    }
    return kOk;
  } catch (const eralign::ConfigError& e) {
    std::cerr << "eralign: " << e.what() << "\n";
    return kValidation;
  } catch (const eralign::ScorerError& e) {
    std::cerr << "eralign: scorer failure: " << e.what() << "\n";
    return kScorer;
  } catch (const std::exception& e) {
    std::cerr << "eralign: " << e.what() << "\n";
    return kRuntime;
  }
}
