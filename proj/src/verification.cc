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

#include "eralign/verification.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

namespace eralign {

namespace {

// (col, value) pairs of a row sorted by column.
std::vector<SparseEntry> RowEntries(const ScoreMatrix& m, std::size_t row) {
  std::vector<SparseEntry> out;
  if (m.is_dense()) {
    const auto r = m.dense().row(static_cast<Eigen::Index>(row));
    out.reserve(m.cols());
    for (std::size_t j = 0; j < m.cols(); ++j) {
      out.push_back({static_cast<std::uint32_t>(j),
                     r(static_cast<Eigen::Index>(j))});
    }
    return out;
  }
  const auto sparse = m.sparse_row(row);
  out.assign(sparse.begin(), sparse.end());
  std::sort(out.begin(), out.end(),
            [](const SparseEntry& a, const SparseEntry& b) {
              return a.col < b.col;
            });
  return out;
}

// Cosine over the union of supports; nullopt when either norm is zero.
std::optional<double> RowCosine(const ScoreMatrix& a, const ScoreMatrix& b,
                                std::size_t row) {
  const auto ra = RowEntries(a, row);
  const auto rb = RowEntries(b, row);
  double dot = 0.0, na = 0.0, nb = 0.0;
  std::size_t x = 0, y = 0;
  while (x < ra.size() || y < rb.size()) {
    if (y == rb.size() || (x < ra.size() && ra[x].col < rb[y].col)) {
      na += double(ra[x].value) * ra[x].value;
      ++x;
    } else if (x == ra.size() || rb[y].col < ra[x].col) {
      nb += double(rb[y].value) * rb[y].value;
      ++y;
    } else {
      dot += double(ra[x].value) * rb[y].value;
      na += double(ra[x].value) * ra[x].value;
      nb += double(rb[y].value) * rb[y].value;
      ++x;
      ++y;
    }
  }
  if (na <= 0.0 || nb <= 0.0) return std::nullopt;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<std::size_t> RankOf(const std::vector<double>& metric) {
  std::vector<std::size_t> order(metric.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return metric[a] < metric[b];
                   });
  std::vector<std::size_t> rank(metric.size());
  for (std::size_t k = 0; k < order.size(); ++k) rank[order[k]] = k;
  return rank;
}

}  // namespace

DetectionScores detection_scores(const ScoreMatrix& initial,
                                 const ScoreMatrix& refined) {
  if (initial.rows() != refined.rows() || initial.cols() != refined.cols()) {
    throw InvalidArgument("detection_scores: shape mismatch");
  }
  DetectionScores out;
  out.confidence.resize(refined.rows());
  out.consistency.resize(refined.rows());
  for (std::size_t i = 0; i < refined.rows(); ++i) {
    out.confidence[i] = refined.row_max(i);
    if (auto cos = RowCosine(initial, refined, i)) {
      out.consistency[i] = *cos;
    } else {
      out.consistency[i] = 0.0;
      out.zero_norm_rows.push_back(static_cast<EntityId>(i));
    }
  }
  return out;
}

std::vector<EntityId> select_for_verification(const DetectionScores& scores,
                                              double target_fraction) {
  if (!(target_fraction > 0.0 && target_fraction <= 1.0)) {
    throw InvalidArgument("verify.fraction must be in (0, 1]");
  }
  const std::size_t n = scores.confidence.size();
  if (scores.consistency.size() != n) {
    throw InvalidArgument("select_for_verification: metric size mismatch");
  }
  const auto want = static_cast<std::size_t>(
      std::ceil(target_fraction * static_cast<double>(n) - 1e-9));
  const auto conf_rank = RankOf(scores.confidence);
  const auto cons_rank = RankOf(scores.consistency);
  const auto union_size = [&](std::size_t m) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      count += (conf_rank[i] < m || cons_rank[i] < m) ? 1 : 0;
    }
    return count;
  };
  std::size_t lo = 0, hi = n;  // union_size(hi) == n >= want
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (union_size(mid) >= want) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  std::vector<EntityId> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (conf_rank[i] < lo || cons_rank[i] < lo) {
      out.push_back(static_cast<EntityId>(i));
    }
  }
  return out;
}

std::string linearize(const KnowledgeGraph& kg, EntityId entity,
                      std::span<const Triple> triples) {
  std::string out = surface_name(kg.entity_name(entity));
  if (!triples.empty()) {
    out += ", which ";
    for (std::size_t k = 0; k < triples.size(); ++k) {
      if (k > 0) out += ", ";
      out += surface_name(kg.relation_name(triples[k].relation));
      out += " is ";
      out += surface_name(kg.entity_name(triples[k].tail));
    }
  }
  out += '.';
  return out;
}

std::vector<Triple> order_source_triples(
    const KnowledgeGraph& kg, EntityId entity, std::size_t pooled_triple_count,
    std::span<const std::size_t> relation_counts) {
  std::vector<Triple> triples = neighbor_triples(kg, entity);
  std::vector<double> weight(kg.num_relations());
  for (const Triple& t : triples) {
    weight[t.relation] =
        inverse_frequency(pooled_triple_count, relation_counts[t.relation]);
  }
  std::stable_sort(triples.begin(), triples.end(),
                   [&](const Triple& a, const Triple& b) {
                     return std::tie(weight[b.relation], a.relation, a.tail) <
                            std::tie(weight[a.relation], b.relation, b.tail);
                   });
  return triples;
}

std::vector<Triple> order_target_triples(
    const KnowledgeGraph& target, EntityId entity,
    std::span<const Triple> source_order, const ScoreMatrix& relations,
    const ScoreMatrix& entities, std::size_t pooled_triple_count,
    std::span<const std::size_t> relation_counts) {
  const std::vector<Triple> own =
      order_source_triples(target, entity, pooled_triple_count,
                           relation_counts);
  std::vector<char> used(own.size(), 0);
  std::vector<Triple> out;
  out.reserve(own.size());
  for (const Triple& s : source_order) {
    if (out.size() == own.size()) break;
    std::size_t best = own.size();
    double best_score = 0.0;
    for (std::size_t k = 0; k < own.size(); ++k) {
      if (used[k]) continue;
      const double score =
          static_cast<double>(relations.value(s.relation, own[k].relation)) *
          entities.value(s.tail, own[k].tail);
      if (best == own.size() || score > best_score) {
        best = k;
        best_score = score;
      }
    }
    used[best] = 1;
    out.push_back(own[best]);
  }
  for (std::size_t k = 0; k < own.size(); ++k) {
    if (!used[k]) out.push_back(own[k]);
  }
  return out;
}

void VerificationParams::Validate() const {
  if (!(target_fraction > 0.0 && target_fraction <= 1.0)) {
    throw InvalidArgument("verify.fraction must be in (0, 1]");
  }
  if (candidates < 1) throw InvalidArgument("verify.candidates must be >= 1");
  if (linearize_cap < 1) {
    throw InvalidArgument("verify.linearize_cap must be >= 1");
  }
}

Linearizer::Linearizer(const KnowledgeGraph& source,
                       const KnowledgeGraph& target,
                       const ScoreMatrix& relations,
                       const ScoreMatrix& entities, std::size_t cap)
    : source_(source),
      target_(target),
      relations_(relations),
      entities_(entities),
      cap_(cap),
      pooled_(source.num_triples() + target.num_triples()),
      source_counts_(source.relation_counts()),
      target_counts_(target.relation_counts()) {}

std::vector<Triple> Linearizer::SourceOrder(EntityId i) const {
  std::vector<Triple> order =
      order_source_triples(source_, i, pooled_, source_counts_);
  if (order.size() > cap_) order.resize(cap_);
  return order;
}

std::string Linearizer::Source(EntityId i) const {
  return linearize(source_, i, SourceOrder(i));
}

std::string Linearizer::Target(EntityId j, EntityId i) const {
  std::vector<Triple> order =
      order_target_triples(target_, j, SourceOrder(i), relations_, entities_,
                           pooled_, target_counts_);
  if (order.size() > cap_) order.resize(cap_);
  return linearize(target_, j, order);
}

namespace {

std::vector<RankedCandidate> SortRanked(std::vector<RankedCandidate> ranked) {
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const RankedCandidate& a, const RankedCandidate& b) {
                     if (a.scorer_score != b.scorer_score) {
                       return a.scorer_score > b.scorer_score;
                     }
                     return a.prior > b.prior;
                   });
  return ranked;
}

}  // namespace

std::vector<RankedCandidate> rerank(EntityId i,
                                    std::span<const EntityId> candidates,
                                    Scorer& scorer, const Linearizer& texts,
                                    const ScoreMatrix& entities) {
  const std::string source_text = texts.Source(i);
  std::vector<std::string> target_texts;
  target_texts.reserve(candidates.size());
  for (EntityId j : candidates) target_texts.push_back(texts.Target(j, i));
  std::vector<ScoreRequest> requests;
  requests.reserve(candidates.size());
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    requests.push_back({i, candidates[k], source_text, target_texts[k]});
  }
  const std::vector<double> scores = scorer.Score(requests);
  std::vector<RankedCandidate> ranked;
  ranked.reserve(candidates.size());
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    ranked.push_back({candidates[k], scores[k], entities.value(i, candidates[k])});
  }
  return SortRanked(std::move(ranked));
}

std::vector<RankedCandidate> rerank_sources(
    EntityId j, std::span<const EntityId> candidates, Scorer& scorer,
    const Linearizer& texts, const ScoreMatrix& entities) {
  std::vector<std::string> source_texts, target_texts;
  source_texts.reserve(candidates.size());
  target_texts.reserve(candidates.size());
  for (EntityId i : candidates) {
    source_texts.push_back(texts.Source(i));
    target_texts.push_back(texts.Target(j, i));
  }
  std::vector<ScoreRequest> requests;
  requests.reserve(candidates.size());
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    requests.push_back({candidates[k], j, source_texts[k], target_texts[k]});
  }
  const std::vector<double> scores = scorer.Score(requests);
  std::vector<RankedCandidate> ranked;
  ranked.reserve(candidates.size());
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    ranked.push_back({candidates[k], scores[k], entities.value(candidates[k], j)});
  }
  return SortRanked(std::move(ranked));
}

std::vector<EntityId> top_k_row(const ScoreMatrix& scores, std::size_t row,
                                std::size_t k) {
  std::vector<SparseEntry> entries = RowEntries(scores, row);
  const std::size_t keep = std::min(k, entries.size());
  std::partial_sort(entries.begin(), entries.begin() + keep, entries.end(),
                    [](const SparseEntry& a, const SparseEntry& b) {
                      return a.value > b.value ||
                             (a.value == b.value && a.col < b.col);
                    });
  std::vector<EntityId> out;
  out.reserve(keep);
  for (std::size_t n = 0; n < keep; ++n) out.push_back(entries[n].col);
  return out;
}

std::vector<EntityId> top_k_col(const ScoreMatrix& scores, std::size_t col,
                                std::size_t k) {
  std::vector<SparseEntry> entries;  // col field holds the row id here
  if (scores.is_dense()) {
    const auto c = scores.dense().col(static_cast<Eigen::Index>(col));
    entries.reserve(scores.rows());
    for (std::size_t i = 0; i < scores.rows(); ++i) {
      entries.push_back({static_cast<std::uint32_t>(i),
                         c(static_cast<Eigen::Index>(i))});
    }
  } else {
    for (std::size_t i = 0; i < scores.rows(); ++i) {
      for (const SparseEntry& e : scores.sparse_row(i)) {
        if (e.col == col) entries.push_back({static_cast<std::uint32_t>(i), e.value});
      }
    }
  }
  const std::size_t keep = std::min(k, entries.size());
  std::partial_sort(entries.begin(), entries.begin() + keep, entries.end(),
                    [](const SparseEntry& a, const SparseEntry& b) {
                      return a.value > b.value ||
                             (a.value == b.value && a.col < b.col);
                    });
  std::vector<EntityId> out;
  out.reserve(keep);
  for (std::size_t n = 0; n < keep; ++n) out.push_back(entries[n].col);
  return out;
}

CorrectionResult cross_verify_and_correct(const ScoreMatrix& refined,
                                          std::span<const EntityId> selected,
                                          Scorer& scorer,
                                          const Linearizer& texts,
                                          std::size_t candidates) {
  std::vector<EntityId> order(selected.begin(), selected.end());
  std::sort(order.begin(), order.end());
  order.erase(std::unique(order.begin(), order.end()), order.end());

  CorrectionResult result{refined, {}};
  for (EntityId i : order) {
    const std::vector<EntityId> cand = top_k_row(refined, i, candidates);
    if (cand.empty()) continue;
    const auto by_target = rerank(i, cand, scorer, texts, refined);
    VerificationVerdict verdict;
    verdict.source = i;
    verdict.old_top = cand.front();
    verdict.proposed = by_target.front().id;
    for (const RankedCandidate& r : by_target) {
      verdict.candidates.push_back(r.id);
      verdict.scorer_scores.push_back(r.scorer_score);
    }
    const std::vector<EntityId> back =
        top_k_col(refined, verdict.proposed, candidates);
    if (!back.empty()) {
      const auto by_source =
          rerank_sources(verdict.proposed, back, scorer, texts, refined);
      verdict.accepted = by_source.front().id == i;
    }
    result.verdicts.push_back(std::move(verdict));
  }

  // Commit in ascending source order; each correction only reads its own row.
  for (const VerificationVerdict& v : result.verdicts) {
    if (!v.accepted) continue;
    const float raised = refined.row_max(v.source) + 1.0f;
    if (result.corrected.is_dense()) {
      result.corrected.mutable_dense()(v.source, v.proposed) = raised;
    } else {
      auto& row = result.corrected.mutable_sparse_row(v.source);
      auto it = std::find_if(row.begin(), row.end(), [&](const SparseEntry& e) {
        return e.col == v.proposed;
      });
      if (it != row.end()) {
        it->value = raised;
      } else {
        row.push_back({v.proposed, raised});
      }
    }
  }
  return result;
}

VerificationResult verify(const ScoreMatrix& initial_entities,
                          const ScoreMatrix& refined_entities,
                          const ScoreMatrix& refined_relations,
                          const KnowledgeGraph& source,
                          const KnowledgeGraph& target, Scorer& scorer,
                          const VerificationParams& params) {
  params.Validate();
  VerificationResult out;
  out.detection = detection_scores(initial_entities, refined_entities);
  out.selected = select_for_verification(out.detection, params.target_fraction);
  const Linearizer texts(source, target, refined_relations, refined_entities,
                         params.linearize_cap);
  out.correction = cross_verify_and_correct(refined_entities, out.selected,
                                            scorer, texts, params.candidates);
  return out;
}

}  // namespace eralign
