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

#include "eralign/evaluation.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "eralign/assignment.h"
#include "eralign/parallel.h"
#include "json.hpp"

namespace eralign {

namespace {

std::string FormatScore(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

void validate_truth(const GroundTruth& truth) {
  std::unordered_set<EntityId> sources, targets;
  for (const auto& [s, t] : truth) {
    if (!sources.insert(s).second) {
      throw InvalidArgument("ground truth lists source " + std::to_string(s) +
                            " twice");
    }
    if (!targets.insert(t).second) {
      throw InvalidArgument("ground truth lists target " + std::to_string(t) +
                            " twice");
    }
  }
}

GroundTruth load_truth(const std::filesystem::path& path,
                       const KnowledgeGraph& source,
                       const KnowledgeGraph& target) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  GroundTruth truth;
  std::unordered_set<EntityId> sources, targets;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::int64_t a = 0, b = 0;
    std::string extra;
    if (!(fields >> a >> b) || (fields >> extra)) {
      throw ParseError(path.string(), line_no,
                       "malformed line: expected src_id<TAB>tgt_id");
    }
    const auto s = source.entity_by_key(a);
    const auto t = target.entity_by_key(b);
    if (!s) {
      throw ParseError(path.string(), line_no,
                       "unknown source entity id " + std::to_string(a));
    }
    if (!t) {
      throw ParseError(path.string(), line_no,
                       "unknown target entity id " + std::to_string(b));
    }
    if (!sources.insert(*s).second || !targets.insert(*t).second) {
      throw ParseError(path.string(), line_no, "entity aligned twice");
    }
    truth.push_back({*s, *t});
  }
  return truth;
}

std::vector<std::size_t> true_ranks(const ScoreMatrix& scores,
                                    const GroundTruth& truth) {
  std::vector<std::size_t> ranks(truth.size());
  for (const auto& [s, t] : truth) {
    if (s >= scores.rows()) {
      throw InvalidArgument("truth source " + std::to_string(s) +
                            " outside score matrix rows");
    }
    if (t >= scores.cols()) {
      throw InvalidArgument("truth target " + std::to_string(t) +
                            " outside score matrix columns");
    }
  }
  parallel_for_blocks(truth.size(), 256, [&](std::size_t begin,
                                             std::size_t end, std::size_t) {
    for (std::size_t k = begin; k < end; ++k) {
      const auto [s, t] = truth[k];
      std::size_t ahead = 0;
      if (scores.is_dense()) {
        const auto row = scores.dense().row(s);
        const float v = row(t);
        for (Eigen::Index j = 0; j < row.size(); ++j) {
          if (j != static_cast<Eigen::Index>(t) && row(j) >= v) ++ahead;
        }
      } else {
        const auto row = scores.sparse_row(s);
        const auto it = std::find_if(row.begin(), row.end(),
                                     [&](const SparseEntry& e) {
                                       return e.col == t;
                                     });
        if (it == row.end()) {
          ahead = scores.cols() - 1;
        } else {
          for (const SparseEntry& e : row) {
            if (e.col != t && e.value >= it->value) ++ahead;
          }
          if (it->value <= 0.0f) ahead += scores.cols() - row.size();
        }
      }
      ranks[k] = ahead + 1;
    }
  });
  return ranks;
}

RankingMetrics hits_mrr(const ScoreMatrix& scores, const GroundTruth& truth,
                        std::span<const std::size_t> ks) {
  const std::vector<std::size_t> ranks = true_ranks(scores, truth);
  RankingMetrics m;
  m.evaluated = ranks.size();
  for (std::size_t k : ks) m.hits[k] = 0.0;
  if (ranks.empty()) return m;
  double rr = 0.0;
  for (std::size_t r : ranks) {
    rr += 1.0 / static_cast<double>(r);
    for (auto& [k, v] : m.hits) v += r <= k ? 1.0 : 0.0;
  }
  const auto n = static_cast<double>(ranks.size());
  for (auto& [k, v] : m.hits) v /= n;
  m.mrr = rr / n;
  return m;
}

DetectionQuality detection_quality(std::span<const double> metric,
                                   const std::vector<bool>& erroneous) {
  if (metric.size() != erroneous.size()) {
    throw InvalidArgument("detection_quality: metric/label size mismatch");
  }
  const std::size_t n = metric.size();
  const auto pos = static_cast<std::size_t>(
      std::count(erroneous.begin(), erroneous.end(), true));
  const std::size_t neg = n - pos;
  if (pos == 0 || neg == 0) {
    throw InvalidArgument("detection_quality: labels contain a single class");
  }
  // Ascending metric = descending suspicion.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return metric[a] < metric[b];
  });

  DetectionQuality q;
  double rank_sum = 0.0;  // midranks of positives, rank 1 = least suspicious
  double tp = 0.0, fp = 0.0, prev_recall = 0.0;
  for (std::size_t g = 0; g < n;) {
    std::size_t h = g;
    while (h < n && metric[order[h]] == metric[order[g]]) ++h;
    double group_pos = 0.0;
    for (std::size_t k = g; k < h; ++k) group_pos += erroneous[order[k]] ? 1 : 0;
    // Groups visited from most to least suspicious: rank from the top is n-h+1..n-g.
    const double midrank = (static_cast<double>(n - h + 1) +
                            static_cast<double>(n - g)) / 2.0;
    rank_sum += group_pos * midrank;
    tp += group_pos;
    fp += static_cast<double>(h - g) - group_pos;
    const double recall = tp / static_cast<double>(pos);
    q.aupr += (recall - prev_recall) * (tp / (tp + fp));
    prev_recall = recall;
    g = h;
  }
  const double p = static_cast<double>(pos), ng = static_cast<double>(neg);
  q.auroc = (rank_sum - p * (p + 1.0) / 2.0) / (p * ng);
  return q;
}

VerificationMatrix verification_matrix(std::span<const int> before,
                                       std::span<const int> after,
                                       std::span<const EntityId> detected,
                                       std::span<const EntityId> corrected,
                                       const GroundTruth& truth) {
  if (before.size() != after.size()) {
    throw InvalidArgument("verification_matrix: before/after size mismatch");
  }
  std::vector<char> is_detected(before.size()), is_corrected(before.size());
  for (EntityId e : detected) {
    if (e < before.size()) is_detected[e] = 1;
  }
  for (EntityId e : corrected) {
    if (e < before.size()) is_corrected[e] = 1;
  }
  VerificationMatrix m;
  for (const auto& [s, t] : truth) {
    if (s >= before.size()) {
      throw InvalidArgument("truth source outside alignment");
    }
    const bool was = before[s] == static_cast<int>(t);
    const bool now = after[s] == static_cast<int>(t);
    if (is_corrected[s]) {
      if (was) {
        (now ? m.right_to_right : m.right_to_wrong)++;
      } else {
        (now ? m.wrong_to_right : m.wrong_to_wrong)++;
      }
    } else if (is_detected[s]) {
      (was ? m.non_corrected_right : m.non_corrected_wrong)++;
    } else {
      (was ? m.non_detected_right : m.non_detected_wrong)++;
    }
  }
  return m;
}

std::vector<int> argmax_alignment(const ScoreMatrix& scores) {
  if (scores.is_dense()) return row_argmax(scores.dense());
  std::vector<int> out(scores.rows(), -1);
  for (std::size_t i = 0; i < scores.rows(); ++i) {
    const auto row = scores.sparse_row(i);
    float best = 0.0f;
    for (const SparseEntry& e : row) {
      if (out[i] < 0 || e.value > best ||
          (e.value == best && static_cast<int>(e.col) < out[i])) {
        out[i] = static_cast<int>(e.col);
        best = e.value;
      }
    }
  }
  return out;
}

std::string MetricsReport::ToJson() const {
  nlohmann::json j;
  const auto ranking = [](const RankingMetrics& m) {
    nlohmann::json r;
    for (const auto& [k, v] : m.hits) r["hits." + std::to_string(k)] = v;
    r["mrr"] = m.mrr;
    r["evaluated"] = m.evaluated;
    return r;
  };
  if (!steps.empty()) {
    const nlohmann::json headline = ranking(steps.back().ranking);
    for (const auto& [key, value] : headline.items()) j[key] = value;
    nlohmann::json per_step = nlohmann::json::object();
    for (const StepMetrics& s : steps) per_step[s.name] = ranking(s.ranking);
    j["steps"] = per_step;
  }
  if (relations) j["relations"] = ranking(*relations);
  if (confidence) {
    j["auroc.conf"] = confidence->auroc;
    j["aupr.conf"] = confidence->aupr;
  }
  if (consistency) {
    j["auroc.cons"] = consistency->auroc;
    j["aupr.cons"] = consistency->aupr;
  }
  if (vmatrix) {
    const VerificationMatrix& v = *vmatrix;
    j["vmatrix.wrong_to_wrong"] = v.wrong_to_wrong;
    j["vmatrix.right_to_wrong"] = v.right_to_wrong;
    j["vmatrix.wrong_to_right"] = v.wrong_to_right;
    j["vmatrix.right_to_right"] = v.right_to_right;
    j["vmatrix.non_corrected_wrong"] = v.non_corrected_wrong;
    j["vmatrix.non_corrected_right"] = v.non_corrected_right;
    j["vmatrix.non_detected_wrong"] = v.non_detected_wrong;
    j["vmatrix.non_detected_right"] = v.non_detected_right;
  }
  return j.dump(2) + "\n";
}

std::string MetricsReport::ToText() const {
  std::ostringstream out;
  const auto ranking = [&](const std::string& name, const RankingMetrics& m) {
    out << name << ":";
    for (const auto& [k, v] : m.hits) out << "  H@" << k << "=" << FormatScore(v);
    out << "  MRR=" << FormatScore(m.mrr) << "  (n=" << m.evaluated << ")\n";
  };
  for (const StepMetrics& s : steps) ranking(s.name, s.ranking);
  if (relations) ranking("relations", *relations);
  if (confidence) {
    out << "confidence:  AUROC=" << FormatScore(confidence->auroc)
        << "  AUPR=" << FormatScore(confidence->aupr) << "\n";
  }
  if (consistency) {
    out << "consistency: AUROC=" << FormatScore(consistency->auroc)
        << "  AUPR=" << FormatScore(consistency->aupr) << "\n";
  }
  if (vmatrix) {
    const VerificationMatrix& v = *vmatrix;
    const double c = static_cast<double>(v.corrected());
    const auto pct = [&](std::size_t x) {
      return c > 0 ? FormatScore(100.0 * static_cast<double>(x) / c) : "-";
    };
    out << "verification (corrected " << v.corrected() << "):"
        << "  x->x " << v.wrong_to_wrong << " (" << pct(v.wrong_to_wrong) << "%)"
        << "  v->x " << v.right_to_wrong << " (" << pct(v.right_to_wrong) << "%)"
        << "  x->v " << v.wrong_to_right << " (" << pct(v.wrong_to_right) << "%)"
        << "  v->v " << v.right_to_right << " (" << pct(v.right_to_right) << "%)\n"
        << "  non-corrected: x " << v.non_corrected_wrong << "  v "
        << v.non_corrected_right << "\n"
        << "  non-detected:  x " << v.non_detected_wrong << "  v "
        << v.non_detected_right << "\n";
  }
  return out.str();
}

void write_alignment_tsv(const std::filesystem::path& path,
                         const ScoreMatrix& scores,
                         const KnowledgeGraph& source,
                         const KnowledgeGraph& target, std::size_t k) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  for (std::size_t i = 0; i < scores.rows(); ++i) {
    const std::vector<EntityId> top = top_k_row(scores, i, k);
    for (std::size_t r = 0; r < top.size(); ++r) {
      out << source.entity_key(static_cast<EntityId>(i)) << '\t'
          << target.entity_key(top[r]) << '\t'
          << FormatScore(scores.value(i, top[r])) << '\t' << r + 1 << '\n';
    }
  }
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace eralign
