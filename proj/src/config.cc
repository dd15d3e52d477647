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

#include "eralign/config.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace eralign {

namespace {

using Problem = std::optional<std::string>;

std::string Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string FormatDouble(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Problem ParseDouble(const std::string& s, double& out) {
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, out);
  if (ec != std::errc() || p != end || !std::isfinite(out)) {
    return "expected a number, got '" + s + "'";
  }
  return std::nullopt;
}

template <typename T>
Problem ParseInteger(const std::string& s, T& out) {
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, out);
  if (ec != std::errc() || p != end) {
    return "expected an integer, got '" + s + "'";
  }
  return std::nullopt;
}

Problem ParseBool(const std::string& s, bool& out) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") {
    out = true;
  } else if (s == "false" || s == "0" || s == "no" || s == "off") {
    out = false;
  } else {
    return "expected true/false, got '" + s + "'";
  }
  return std::nullopt;
}

std::vector<std::string> SplitList(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    item = Trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Applies a raw value to the config; returns a problem or sets `canonical`.
using Apply = std::function<Problem(PipelineConfig&, const std::string&,
                                    std::string&)>;

struct Field {
  const char* key;
  const char* fallback;
  Apply apply;
};

template <typename Getter>
Apply DoubleAt(Getter get, double lo, double hi, bool lo_open, bool hi_open) {
  return [=](PipelineConfig& c, const std::string& s, std::string& canon) -> Problem {
    double v = 0.0;
    if (auto p = ParseDouble(s, v)) return p;
    if ((lo_open ? v <= lo : v < lo) || (hi_open ? v >= hi : v > hi)) {
      return "value " + s + " out of range " + (lo_open ? "(" : "[") +
             FormatDouble(lo) + ", " + FormatDouble(hi) + (hi_open ? ")" : "]");
    }
    get(c) = v;
    canon = FormatDouble(v);
    return std::nullopt;
  };
}

template <typename T, typename Getter>
Apply IntegerAt(Getter get, long long lo) {
  return [=](PipelineConfig& c, const std::string& s, std::string& canon) -> Problem {
    long long v = 0;
    if (auto p = ParseInteger(s, v)) return p;
    if (v < lo) return "value " + s + " must be >= " + std::to_string(lo);
    get(c) = static_cast<T>(v);
    canon = std::to_string(v);
    return std::nullopt;
  };
}

template <typename Getter>
Apply SeedAt(Getter get) {
  return [=](PipelineConfig& c, const std::string& s, std::string& canon) -> Problem {
    std::uint64_t v = 0;
    if (auto p = ParseInteger(s, v)) return p;
    get(c) = v;
    canon = std::to_string(v);
    return std::nullopt;
  };
}

template <typename Getter>
Apply BoolAt(Getter get) {
  return [=](PipelineConfig& c, const std::string& s, std::string& canon) -> Problem {
    bool v = false;
    if (auto p = ParseBool(s, v)) return p;
    get(c) = v;
    canon = v ? "true" : "false";
    return std::nullopt;
  };
}

// `must_exist`: a non-empty value must name an existing file or directory.
template <typename Getter>
Apply PathAt(Getter get, bool must_exist) {
  return [=](PipelineConfig& c, const std::string& s, std::string& canon) -> Problem {
    if (must_exist && !s.empty() && !std::filesystem::exists(s)) {
      return "path does not exist: " + s;
    }
    get(c) = s;
    canon = s;
    return std::nullopt;
  };
}

#define AT(expr) [](PipelineConfig& c) -> auto& { return c.expr; }

const std::vector<Field>& Fields() {
  static const std::vector<Field> fields = {
      {"data.dir", "", PathAt(AT(data_dir), true)},
      {"data.synthetic", "false", BoolAt(AT(synthetic))},
      {"features.bigram", "true", BoolAt(AT(bigram))},
      {"features.entity_emb_source", "", PathAt(AT(entity_emb_source), true)},
      {"features.entity_emb_target", "", PathAt(AT(entity_emb_target), true)},
      {"features.relation_emb_source", "",
       PathAt(AT(relation_emb_source), true)},
      {"features.relation_emb_target", "",
       PathAt(AT(relation_emb_target), true)},
      {"init.depth", "2", IntegerAt<int>(AT(depth), 0)},
      {"init.import_entities", "", PathAt(AT(import_entities), true)},
      {"init.import_relations", "", PathAt(AT(import_relations), true)},
      {"sinkhorn.temperature", "0.05",
       DoubleAt(AT(sinkhorn.temperature), 0.0, HUGE_VAL, true, false)},
      {"sinkhorn.iterations", "10", IntegerAt<int>(AT(sinkhorn.iterations), 1)},
      {"kg.dual_cap", "32",
       IntegerAt<std::size_t>(AT(dual.relation_cap), 1)},
      {"refine.lambda", "0.5",
       DoubleAt(AT(refine.lambda), 0.0, 1.0, true, false)},
      {"refine.iterations", "2", IntegerAt<int>(AT(refine.iterations), 0)},
      {"refine.candidates", "50",
       IntegerAt<std::size_t>(AT(refine.candidates), 1)},
      {"refine.hub_cap", "64", IntegerAt<std::size_t>(AT(refine.hub_cap), 1)},
      {"verify.fraction", "0.2",
       DoubleAt(AT(verify.target_fraction), 0.0, 1.0, true, false)},
      {"verify.candidates", "20",
       IntegerAt<std::size_t>(AT(verify.candidates), 1)},
      {"verify.linearize_cap", "32",
       IntegerAt<std::size_t>(AT(verify.linearize_cap), 1)},
      {"verify.scorer", "lexical",
       [](PipelineConfig& c, const std::string& s, std::string& canon) -> Problem {
         if (s == "lexical") {
           c.scorer.kind = ScorerKind::kLexicalNgram;
         } else if (s == "process") {
           c.scorer.kind = ScorerKind::kExternalProcess;
         } else if (s == "table") {
           c.scorer.kind = ScorerKind::kPrecomputedTable;
         } else {
           return "expected lexical, process or table, got '" + s + "'";
         }
         canon = s;
         return std::nullopt;
       }},
      {"verify.command", "", PathAt(AT(scorer.command), false)},
      {"verify.table", "", PathAt(AT(scorer.table_path), true)},
      {"noise.level", "0", DoubleAt(AT(noise.level), 0.0, 1.0, false, false)},
      {"noise.categories", "phonetic,missing,attached",
       [](PipelineConfig& c, const std::string& s, std::string& canon) -> Problem {
         c.noise.categories.clear();
         canon.clear();
         for (const std::string& item : SplitList(s)) {
           if (item == "phonetic") {
             c.noise.categories.push_back(NoiseCategory::kPhonetic);
           } else if (item == "missing") {
             c.noise.categories.push_back(NoiseCategory::kMissing);
           } else if (item == "attached") {
             c.noise.categories.push_back(NoiseCategory::kAttached);
           } else {
             return "unknown noise category '" + item + "'";
           }
           canon += (canon.empty() ? "" : ",") + item;
         }
         return std::nullopt;
       }},
      {"noise.seed", "0", SeedAt(AT(noise.seed))},
      {"drop.ratio", "0", DoubleAt(AT(drop_ratio), 0.0, 1.0, false, true)},
      {"drop.seed", "0", SeedAt(AT(drop_seed))},
      {"synth.entities", "200", IntegerAt<std::size_t>(AT(synth.entities), 2)},
      {"synth.relations", "20", IntegerAt<std::size_t>(AT(synth.relations), 1)},
      {"synth.degree", "4",
       DoubleAt(AT(synth.mean_degree), 1.0, HUGE_VAL, false, false)},
      {"synth.alphabet", "abcdefghijklmnopqrstuvwxyz",
       [](PipelineConfig& c, const std::string& s, std::string& canon) -> Problem {
         if (s.empty()) return "alphabet must not be empty";
         for (char ch : s) {
           if (static_cast<unsigned char>(ch) < 0x21 ||
               static_cast<unsigned char>(ch) > 0x7e) {
             return "alphabet must be printable ASCII without spaces";
           }
         }
         c.synth.alphabet = s;
         canon = s;
         return std::nullopt;
       }},
      {"synth.seed", "0", SeedAt(AT(synth.seed))},
      {"synth.identity", "false", BoolAt(AT(synth.identity))},
      {"output.dir", "out", PathAt(AT(output_dir), false)},
      {"eval.ks", "1,10",
       [](PipelineConfig& c, const std::string& s, std::string& canon) -> Problem {
         c.eval_ks.clear();
         canon.clear();
         for (const std::string& item : SplitList(s)) {
           std::size_t k = 0;
           if (ParseInteger(item, k) || k == 0) {
             return "expected positive integers, got '" + item + "'";
           }
           c.eval_ks.push_back(k);
           canon += (canon.empty() ? "" : ",") + std::to_string(k);
         }
         if (c.eval_ks.empty()) return "at least one k is required";
         return std::nullopt;
       }},
      {"eval.dump_top", "10", IntegerAt<std::size_t>(AT(dump_top), 1)},
      {"eval.import", "", PathAt(AT(eval_import), true)},
  };
  return fields;
}

#undef AT

PipelineConfig Build(const std::map<std::string, std::string>& raw,
                     std::vector<std::string> problems) {
  PipelineConfig config;
  std::map<std::string, const Field*> by_key;
  for (const Field& f : Fields()) by_key[f.key] = &f;
  for (const auto& [key, value] : raw) {
    if (!by_key.contains(key)) problems.push_back("unknown key '" + key + "'");
  }
  for (const Field& f : Fields()) {
    const auto it = raw.find(f.key);
    const std::string value = it == raw.end() ? f.fallback : it->second;
    std::string canon;
    if (auto p = f.apply(config, value, canon)) {
      problems.push_back(std::string(f.key) + ": " + *p);
    } else {
      config.values[f.key] = canon;
    }
  }
  const auto pair_set = [&](const std::filesystem::path& a,
                            const std::filesystem::path& b, const char* what) {
    if (a.empty() != b.empty()) {
      problems.push_back(std::string(what) +
                         ": source and target embeddings must be given together");
    }
  };
  pair_set(config.entity_emb_source, config.entity_emb_target,
           "features.entity_emb_*");
  pair_set(config.relation_emb_source, config.relation_emb_target,
           "features.relation_emb_*");
  if (!config.bigram && config.entity_emb_source.empty()) {
    problems.push_back(
        "features: entity features disabled (no bigrams, no embeddings)");
  }
  if (!config.bigram && config.relation_emb_source.empty()) {
    problems.push_back(
        "features: relation features disabled (no bigrams, no embeddings)");
  }
  if (config.import_entities.empty() != config.import_relations.empty()) {
    problems.push_back(
        "init.import_*: entity and relation matrices must be imported together");
  }
  if (config.scorer.kind == ScorerKind::kExternalProcess &&
      config.scorer.command.empty()) {
    problems.push_back("verify.command: required when verify.scorer = process");
  }
  if (config.scorer.kind == ScorerKind::kPrecomputedTable &&
      config.scorer.table_path.empty()) {
    problems.push_back("verify.table: required when verify.scorer = table");
  }
  if (config.noise.level > 0.0 && config.noise.categories.empty()) {
    problems.push_back("noise.categories: empty while noise.level > 0");
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return config;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : Error([&] {
        std::string msg = "invalid configuration:";
        for (const std::string& p : problems) msg += "\n  " + p;
        return msg;
      }()),
      problems_(std::move(problems)) {}

PipelineConfig parse_config(const std::string& text) {
  std::map<std::string, std::string> raw;
  std::vector<std::string> problems;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      problems.push_back("line " + std::to_string(line_no) +
                         ": expected 'key = value'");
      continue;
    }
    const std::string key = Trim(line.substr(0, eq));
    const std::string value = Trim(line.substr(eq + 1));
    if (key.empty()) {
      problems.push_back("line " + std::to_string(line_no) + ": empty key");
      continue;
    }
    if (!raw.emplace(key, value).second) {
      problems.push_back("line " + std::to_string(line_no) + ": duplicate key '" +
                         key + "'");
    }
  }
  return Build(raw, std::move(problems));
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot read config file " + path.string()});
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

PipelineConfig apply_overrides(const PipelineConfig& base,
                               const std::map<std::string, std::string>& kv) {
  std::map<std::string, std::string> raw = base.values;
  for (const auto& [k, v] : kv) raw[k] = v;
  return Build(raw, {});
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const Field& f : Fields()) keys.push_back(f.key);
  std::sort(keys.begin(), keys.end());
  return keys;
}

std::uint64_t config_hash(const PipelineConfig& config,
                          const std::vector<std::string>& prefixes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const auto& [key, value] : config.values) {
    bool match = false;
    for (const std::string& p : prefixes) match = match || key.starts_with(p);
    if (!match) continue;
    for (char ch : key + "=" + value + "\n") {
      h ^= static_cast<unsigned char>(ch);
      h *= 0x100000001b3ull;
    }
  }
  return h;
}

}  // namespace eralign
