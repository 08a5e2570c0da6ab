#pragma once

#include <algorithm>
#include <atomic>
#include <concepts>
#include <cstddef>
#include <future>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "ovdiff/alignment.hpp"
#include "ovdiff/entities.hpp"
#include "ovdiff/error.hpp"
#include "ovdiff/rdf.hpp"

namespace ovdiff {

/// An entity pair from (O, O') with its confidence, before thresholding.
struct ScoredPair {
  Iri e1;
  Iri e2;
  double confidence = 0.0;

  friend bool operator==(const ScoredPair&, const ScoredPair&) = default;
};

struct OvParams {
  double threshold = 0.90;
  std::size_t top_k = 3;

  void validate() const {
    if (!(threshold >= 0.0 && threshold <= 1.0)) throw Error("threshold must lie in [0, 1]");
    if (top_k < 1) throw Error("top-k must be at least 1");
  }
};

/// The four outputs of an OV task.
struct OvResult {
  Alignment remain;
  Alignment update;
  std::set<Iri> add;
  std::set<Iri> del;

  std::size_t matched() const noexcept { return remain.size() + update.size(); }
  friend bool operator==(const OvResult&, const OvResult&) = default;
};

/// Restricts candidate generation to subsets of O and O'.
struct Scope {
  std::set<Iri> source;
  std::set<Iri> target;
};

struct ScoringStats {
  std::size_t scored_pairs = 0;
};

/// Anything callable as double(const Entity&, const Entity&).
template <class F>
concept PairScorer = requires(const F& f, const Entity& a, const Entity& b) {
  { f(a, b) } -> std::convertible_to<double>;
};

namespace detail {

inline bool by_confidence_then_iri(const ScoredPair& a, const ScoredPair& b) {
  if (a.confidence != b.confidence) return a.confidence > b.confidence;
  return std::tie(a.e1, a.e2) < std::tie(b.e1, b.e2);
}

template <PairScorer F>
std::vector<ScoredPair> top_candidates(const Entity& source, const std::vector<const Entity*>& targets, const F& score,
                                       std::size_t k, std::size_t& scored) {
  std::vector<ScoredPair> row;
  for (const Entity* t : targets) {
    if (!same_kind_family(source.kind, t->kind)) continue;
    ++scored;
    double c = score(source, *t);
    if (c > 0.0) row.push_back({source.iri, t->iri, c});
  }
  std::sort(row.begin(), row.end(), by_confidence_then_iri);
  if (row.size() > k) row.resize(k);
  std::sort(row.begin(), row.end(), [](const ScoredPair& a, const ScoredPair& b) { return a.e2 < b.e2; });
  return row;
}

}  // namespace detail

/// For each source entity, the k best same-kind targets (ties by target IRI);
/// zero-confidence pairs are dropped. Output is ordered by (e1, e2) and does
/// not depend on `workers`.
template <PairScorer F>
std::vector<ScoredPair> candidate_pairs(const EntitySet& o, const EntitySet& o_prime, const F& score,
                                        const OvParams& params, const std::optional<Scope>& scope = std::nullopt,
                                        ScoringStats* stats = nullptr, std::size_t workers = 1) {
  params.validate();
  std::vector<const Entity*> sources, targets;
  for (const auto& e : o) {
    if (!scope || scope->source.count(e.iri)) sources.push_back(&e);
  }
  for (const auto& e : o_prime) {
    if (!scope || scope->target.count(e.iri)) targets.push_back(&e);
  }

  workers = std::max<std::size_t>(1, std::min(workers, sources.size()));
  std::vector<std::vector<ScoredPair>> rows(sources.size());
  std::vector<std::size_t> scored(workers, 0);
  auto work = [&](std::size_t w) {
    for (std::size_t i = w; i < sources.size(); i += workers) {
      rows[i] = detail::top_candidates(*sources[i], targets, score, params.top_k, scored[w]);
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::future<void>> jobs;
    for (std::size_t w = 0; w < workers; ++w) jobs.push_back(std::async(std::launch::async, work, w));
    for (auto& j : jobs) j.get();
  }

  std::vector<ScoredPair> out;
  for (auto& r : rows) out.insert(out.end(), r.begin(), r.end());
  if (stats) {
    for (std::size_t s : scored) stats->scored_pairs += s;
  }
  return out;
}

/// Greedy one-to-one matching: pairs in (confidence desc, e1, e2) order are
/// kept when confidence >= s and both endpoints are still free.
inline std::vector<ScoredPair> assign(std::vector<ScoredPair> pairs, const OvParams& params) {
  std::sort(pairs.begin(), pairs.end(), detail::by_confidence_then_iri);
  std::set<Iri> used1, used2;
  std::vector<ScoredPair> kept;
  for (auto& p : pairs) {
    if (p.confidence < params.threshold) break;
    if (used1.count(p.e1) || used2.count(p.e2)) continue;
    used1.insert(p.e1);
    used2.insert(p.e2);
    kept.push_back(std::move(p));
  }
  return kept;
}

/// Splits a one-to-one match set into remain (c = 1) and update (s <= c < 1);
/// unmatched entities of O' are added, unmatched entities of O deleted.
inline OvResult classify(const std::vector<ScoredPair>& matched, const EntitySet& o, const EntitySet& o_prime,
                         const OvParams& params) {
  std::set<Iri> used1, used2;
  OvResult r;
  for (const auto& p : matched) {
    if (!used1.insert(p.e1).second || !used2.insert(p.e2).second) {
      throw InvariantError("match set is not one-to-one at (" + p.e1.str() + ", " + p.e2.str() + ")");
    }
    if (p.confidence < params.threshold) {
      throw InvariantError("matched pair below threshold: (" + p.e1.str() + ", " + p.e2.str() + ")");
    }
    if (!o.contains(p.e1) || !o_prime.contains(p.e2)) {
      throw InvariantError("matched pair outside the ontologies: (" + p.e1.str() + ", " + p.e2.str() + ")");
    }
    Mapping m{p.e1, p.e2, MappingRelation::Equivalence, p.confidence};
    if (p.confidence == 1.0) {
      r.remain.insert(std::move(m));
    } else {
      r.update.insert(std::move(m));
    }
  }
  for (const auto& e : o) {
    if (!used1.count(e.iri)) r.del.insert(e.iri);
  }
  for (const auto& e : o_prime) {
    if (!used2.count(e.iri)) r.add.insert(e.iri);
  }
  return r;
}

template <class F>
void prepare_scorer(const F& score, const EntitySet& o, const EntitySet& o_prime) {
  if constexpr (requires { score.prepare(o, o_prime); }) score.prepare(o, o_prime);
}

template <PairScorer F>
OvResult diff_entities(const EntitySet& o, const EntitySet& o_prime, const F& score, const OvParams& params,
                       ScoringStats* stats = nullptr, std::size_t workers = 1) {
  prepare_scorer(score, o, o_prime);
  auto pairs = candidate_pairs(o, o_prime, score, params, std::nullopt, stats, workers);
  return classify(assign(std::move(pairs), params), o, o_prime, params);
}

/// extract_entities -> candidate_pairs -> assign -> classify.
template <PairScorer F>
OvResult diff(const TripleSet& o_doc, const TripleSet& o_prime_doc, const F& score, const OvParams& params,
              ScoringStats* stats = nullptr, std::size_t workers = 1) {
  return diff_entities(extract_entities(o_doc), extract_entities(o_prime_doc), score, params, stats, workers);
}

}  // namespace ovdiff
