#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ovdiff/alignment.hpp"
#include "ovdiff/engine.hpp"
#include "ovdiff/entities.hpp"
#include "ovdiff/error.hpp"
#include "ovdiff/matchers.hpp"

namespace ovdiff {

/// Alignments of O and O' to the same reference ontology. entity1 of every
/// cell is in O (resp. O'), entity2 in the reference ontology.
struct CrossRefPair {
  Alignment r_or;
  Alignment r_oprime_r;
  std::string reference_id;
};

enum class CrossRefPolicy { Strict, WarnAndDrop };

struct CrScopes {
  std::set<Iri> scope1;
  std::set<Iri> scope2;
  std::set<Iri> forced_delete;
  std::set<Iri> forced_add;
  Alignment prior;
  std::vector<std::string> warnings;
};

/// Joins the two cross-references on their reference-side entity; the
/// confidence of a chain is the smaller of its two links.
inline Alignment prior_alignment(const CrossRefPair& cr) {
  std::map<Iri, std::vector<const Mapping*>> by_ref;
  for (const auto& m : cr.r_oprime_r) by_ref[m.entity2].push_back(&m);
  Alignment out;
  out.onto1 = cr.r_or.onto1;
  out.onto2 = cr.r_oprime_r.onto1;
  for (const auto& m1 : cr.r_or) {
    auto it = by_ref.find(m1.entity2);
    if (it == by_ref.end()) continue;
    for (const Mapping* m2 : it->second) {
      out.insert_or_max({m1.entity1, m2->entity1, MappingRelation::Equivalence, std::min(m1.confidence, m2->confidence)});
    }
  }
  return out;
}

/// Union of the per-reference priors; a duplicated pair keeps its highest
/// confidence.
inline Alignment union_priors(const std::vector<CrossRefPair>& crs) {
  Alignment out;
  for (const auto& cr : crs) {
    for (const auto& m : prior_alignment(cr)) out.insert_or_max(m);
  }
  return out;
}

namespace detail {

inline Alignment checked_crossref(const Alignment& a, const EntitySet& side, const char* which, CrossRefPolicy policy,
                                  std::vector<std::string>& warnings) {
  Alignment out;
  out.onto1 = a.onto1;
  out.onto2 = a.onto2;
  out.meta = a.meta;
  for (const auto& m : a) {
    if (side.contains(m.entity1)) {
      out.insert(m);
      continue;
    }
    std::string msg = std::string("cross-reference entity not in ") + which;
    if (policy == CrossRefPolicy::Strict) throw ScopeError(m.entity1.str(), msg);
    warnings.push_back(msg + ": " + m.entity1.str() + " (dropped)");
  }
  return out;
}

}  // namespace detail

/// Entities taking part in any cross-reference leave the posterior scope;
/// those not joined by the prior are forced into delete (O) or add (O').
inline CrScopes restrict_scope(const EntitySet& o, const EntitySet& o_prime, const std::vector<CrossRefPair>& crs,
                               CrossRefPolicy policy = CrossRefPolicy::Strict) {
  CrScopes s;
  std::vector<CrossRefPair> checked;
  for (const auto& cr : crs) {
    checked.push_back({detail::checked_crossref(cr.r_or, o, "O", policy, s.warnings),
                       detail::checked_crossref(cr.r_oprime_r, o_prime, "O'", policy, s.warnings), cr.reference_id});
  }
  std::set<Iri> covered1, covered2;
  for (const auto& cr : checked) {
    for (const auto& m : cr.r_or) covered1.insert(m.entity1);
    for (const auto& m : cr.r_oprime_r) covered2.insert(m.entity1);
  }
  s.prior = union_priors(checked);
  std::set<Iri> prior1 = s.prior.entities1(), prior2 = s.prior.entities2();
  std::set_difference(covered1.begin(), covered1.end(), prior1.begin(), prior1.end(),
                      std::inserter(s.forced_delete, s.forced_delete.end()));
  std::set_difference(covered2.begin(), covered2.end(), prior2.begin(), prior2.end(),
                      std::inserter(s.forced_add, s.forced_add.end()));
  for (const auto& e : o) {
    if (!covered1.count(e.iri)) s.scope1.insert(e.iri);
  }
  for (const auto& e : o_prime) {
    if (!covered2.count(e.iri)) s.scope2.insert(e.iri);
  }
  return s;
}

/// Prior mappings as scored pairs. A pair whose display names are identical
/// scores 1 (remain); any other prior pair keeps its chain confidence capped
/// below 1 so it can only ever be an update. Cross-kind pairs are skipped.
inline std::vector<ScoredPair> prior_pairs(const CrScopes& scopes, const EntitySet& o, const EntitySet& o_prime) {
  std::vector<ScoredPair> out;
  for (const auto& m : scopes.prior) {
    const Entity* a = o.find(m.entity1);
    const Entity* b = o_prime.find(m.entity2);
    if (!a || !b || !same_kind_family(a->kind, b->kind)) continue;
    bool same_name = exact_score(normalize_name(display_name(*a)), normalize_name(display_name(*b))) == 1.0;
    out.push_back({m.entity1, m.entity2, same_name ? 1.0 : std::min(m.confidence, kMaxNonExact)});
  }
  return out;
}

inline Scope posterior_scope(const CrScopes& s) { return Scope{s.scope1, s.scope2}; }

/// Prior matches merged with a posterior matching restricted to the scopes
/// left uncovered by the cross-references.
template <PairScorer F>
OvResult diff_entities_with_cr(const EntitySet& o, const EntitySet& o_prime, const std::vector<CrossRefPair>& crs,
                               const F& score, const OvParams& params,
                               CrossRefPolicy policy = CrossRefPolicy::Strict, ScoringStats* stats = nullptr,
                               std::size_t workers = 1, std::vector<std::string>* warnings = nullptr) {
  params.validate();
  CrScopes scopes = restrict_scope(o, o_prime, crs, policy);
  if (warnings) warnings->insert(warnings->end(), scopes.warnings.begin(), scopes.warnings.end());
  auto matched = assign(prior_pairs(scopes, o, o_prime), params);
  if (!scopes.scope1.empty() && !scopes.scope2.empty()) {
    prepare_scorer(score, o, o_prime);
    auto posterior = assign(candidate_pairs(o, o_prime, score, params, posterior_scope(scopes), stats, workers), params);
    matched.insert(matched.end(), posterior.begin(), posterior.end());
  }
  return classify(matched, o, o_prime, params);
}

template <PairScorer F>
OvResult diff_with_cr(const TripleSet& o_doc, const TripleSet& o_prime_doc, const std::vector<CrossRefPair>& crs,
                      const F& score, const OvParams& params, CrossRefPolicy policy = CrossRefPolicy::Strict,
                      ScoringStats* stats = nullptr, std::size_t workers = 1,
                      std::vector<std::string>* warnings = nullptr) {
  return diff_entities_with_cr(extract_entities(o_doc), extract_entities(o_prime_doc), crs, score, params, policy,
                               stats, workers, warnings);
}

}  // namespace ovdiff
