#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ovdiff/alignment.hpp"
#include "ovdiff/alignment_io.hpp"
#include "ovdiff/crossref.hpp"
#include "ovdiff/entities.hpp"
#include "ovdiff/error.hpp"
#include "ovdiff/matchers.hpp"
#include "ovdiff/rdf.hpp"
#include "ovdiff/turtle.hpp"

namespace ovdiff {

/// Shares of remain, update, add and delete.
using Proportions = std::array<double, 4>;

inline constexpr Proportions kDefaultProportions{0.25, 0.25, 0.25, 0.25};
inline constexpr std::uint64_t kDefaultSeed = 42;

enum class ChangeKind { Remain, Update, Add, Delete };

/// Entity-level change assignment of the intermediate ontology.
struct ChangePlan {
  std::set<Iri> remain;
  /// Old IRI -> new display name (empty until plan_updates has run).
  std::map<Iri, std::string> update;
  std::set<Iri> add;
  std::set<Iri> del;
  std::uint64_t seed = kDefaultSeed;
  Proportions proportions = kDefaultProportions;

  /// Old IRI -> new IRI for every named update.
  std::map<Iri, Iri> renames() const;

  friend bool operator==(const ChangePlan&, const ChangePlan&) = default;
};

/// Same namespace as `old`, local name = `name` with every character outside
/// [A-Za-z0-9_-] replaced by '_'.
inline Iri renamed_iri(const Iri& old, std::string_view name) {
  std::string local;
  for (char c : name) {
    bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
    local += keep ? c : '_';
  }
  return Iri(std::string(old.namespace_part()) + local);
}

inline std::map<Iri, Iri> ChangePlan::renames() const {
  std::map<Iri, Iri> out;
  for (const auto& [iri, name] : update) {
    if (!name.empty()) out.emplace(iri, renamed_iri(iri, name));
  }
  return out;
}

namespace detail {

/// Unbiased draw from [0, n) using only the engine's raw output, so results
/// are identical across standard library implementations.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  for (;;) {
    std::uint64_t v = rng();
    if (v < limit) return v % n;
  }
}

template <class T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(v[i - 1], v[j]);
  }
}

// Stream separation between the assignment draw and the update draw.
inline constexpr std::uint64_t kUpdateStream = 0x9E3779B97F4A7C15ULL;

inline void validate_proportions(const Proportions& p) {
  double sum = 0;
  for (double x : p) {
    if (!(x >= 0.0)) throw Error("proportions must be non-negative");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw Error("proportions must sum to 1");
}

}  // namespace detail

/// Largest-remainder quotas: each category gets floor(p * n) and the leftover
/// goes to the largest fractional parts (lower category index on ties).
inline std::array<std::size_t, 4> category_quotas(std::size_t n, const Proportions& p) {
  detail::validate_proportions(p);
  std::array<std::size_t, 4> q{};
  std::array<double, 4> frac{};
  std::size_t total = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    double exact = p[i] * static_cast<double>(n);
    q[i] = static_cast<std::size_t>(std::floor(exact));
    frac[i] = exact - static_cast<double>(q[i]);
    total += q[i];
  }
  std::array<std::size_t, 4> order{0, 1, 2, 3};
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
  for (std::size_t i = 0; total < n; i = (i + 1) % 4) {
    if (p[order[i]] > 0.0) {
      ++q[order[i]];
      ++total;
    }
  }
  return q;
}

/// Seeded permutation of the entities split by category quotas.
inline ChangePlan assign_changes(const EntitySet& entities, std::uint64_t seed, const Proportions& proportions) {
  auto quotas = category_quotas(entities.size(), proportions);
  std::vector<Iri> order;
  for (const auto& e : entities) order.push_back(e.iri);
  std::mt19937_64 rng(seed);
  detail::shuffle(order, rng);

  ChangePlan plan;
  plan.seed = seed;
  plan.proportions = proportions;
  std::size_t i = 0;
  for (std::size_t k = 0; k < quotas[0]; ++k) plan.remain.insert(order[i++]);
  for (std::size_t k = 0; k < quotas[1]; ++k) plan.update.emplace(order[i++], std::string());
  for (std::size_t k = 0; k < quotas[2]; ++k) plan.add.insert(order[i++]);
  for (std::size_t k = 0; k < quotas[3]; ++k) plan.del.insert(order[i++]);
  return plan;
}

/// Pairs the display names of every reference mapping. Mappings whose
/// entities are not found in the documents are skipped and reported.
inline SynonymTable build_synonym_corpus(const Alignment& reference, const TripleSet& src_doc,
                                         const TripleSet& tgt_doc, std::vector<std::string>* warnings = nullptr) {
  EntitySet src = extract_entities(src_doc), tgt = extract_entities(tgt_doc);
  SynonymTable t;
  for (const auto& m : reference) {
    const Entity* a = src.find(m.entity1);
    const Entity* b = tgt.find(m.entity2);
    if (!a || !b) {
      // Accept references written target -> source as well.
      a = src.find(m.entity2);
      b = tgt.find(m.entity1);
    }
    if (!a || !b) {
      if (warnings) warnings->push_back("unresolvable reference mapping (" + m.entity1.str() + ", " + m.entity2.str() + ")");
      continue;
    }
    t.add(display_name(*a), display_name(*b));
  }
  return t;
}

/// Drops pairs whose two names both belong to entities of `entities`. Such
/// pairs can never serve as a rename, and leaving them in would let a
/// synonym matcher pair an added entity with a deleted one.
inline SynonymTable prune_internal_synonyms(const SynonymTable& corpus, const EntitySet& entities) {
  std::set<std::string> owned;
  for (const auto& e : entities) owned.insert(SynonymTable::key(display_name(e)));
  SynonymTable out;
  for (const auto& [a, b] : corpus.pairs()) {
    if (!(owned.count(SynonymTable::key(a)) && owned.count(SynonymTable::key(b)))) out.add(a, b);
  }
  return out;
}

/// Gives every update entity a new name drawn uniformly from its usable
/// synonyms; entities without one move uniformly to remain, add or delete.
///
/// A synonym is usable when its renamed IRI is fresh, its local name reads as
/// a name that normalizes like the synonym, and its normalized form is not the
/// display name or synonym of any other entity (nor another update's name).
/// These keep the generated version pair unambiguous for a synonym matcher.
inline ChangePlan plan_updates(ChangePlan plan, const SynonymTable& corpus, const EntitySet& entities,
                               const TripleSet& o_i) {
  std::mt19937_64 rng(plan.seed ^ detail::kUpdateStream);

  std::map<std::string, std::set<Iri>> owners;  // normalized display name -> entities
  for (const auto& e : entities) owners[SynonymTable::key(display_name(e))].insert(e.iri);
  std::set<std::string> iris_in_use;
  for (const auto& t : o_i) {
    if (const Iri* i = as_iri(t.subject)) iris_in_use.insert(i->str());
    if (const Iri* i = as_iri(t.object)) iris_in_use.insert(i->str());
    iris_in_use.insert(t.predicate.str());
  }
  std::set<std::string> names_taken;

  std::map<Iri, std::string> named;
  for (const auto& [iri, unnamed] : plan.update) {
    const Entity* e = entities.find(iri);
    std::vector<std::string> usable;
    if (e) {
      std::string own = display_name(*e);
      std::string own_key = SynonymTable::key(own);
      for (const auto& candidate : corpus.synonyms_of(own)) {
        std::string key = SynonymTable::key(candidate);
        if (key.empty() || key == own_key || owners.count(key) || names_taken.count(key)) continue;
        Iri fresh = renamed_iri(iri, candidate);
        std::string local(fresh.local_name());
        if (iris_in_use.count(fresh.str()) || !is_meaningful_name(local) || SynonymTable::key(local) != key) continue;
        bool ambiguous = false;
        for (const auto& other : corpus.synonyms_of(candidate)) {
          auto owner = owners.find(SynonymTable::key(other));
          if (owner != owners.end() && (owner->second.size() > 1 || !owner->second.count(iri))) ambiguous = true;
        }
        if (!ambiguous) usable.push_back(candidate);
      }
    }
    if (usable.empty()) {
      switch (detail::uniform_below(rng, 3)) {
        case 0: plan.remain.insert(iri); break;
        case 1: plan.add.insert(iri); break;
        default: plan.del.insert(iri); break;
      }
      continue;
    }
    const std::string& pick = usable[static_cast<std::size_t>(detail::uniform_below(rng, usable.size()))];
    names_taken.insert(SynonymTable::key(pick));
    iris_in_use.insert(renamed_iri(iri, pick).str());
    named.emplace(iri, pick);
  }
  plan.update = std::move(named);
  return plan;
}

namespace detail {

inline bool touches(const Triple& t, const std::set<Iri>& s) {
  auto hit = [&](const Term& term) {
    const Iri* i = as_iri(term);
    return i && s.count(*i);
  };
  return hit(t.subject) || s.count(t.predicate) || hit(t.object);
}

inline Term mapped(const Term& t, const std::map<Iri, Iri>& m) {
  if (const Iri* i = as_iri(t)) {
    if (auto it = m.find(*i); it != m.end()) return it->second;
  }
  return t;
}

}  // namespace detail

/// O: the intermediate ontology without any triple mentioning an add entity.
inline TripleSet derive_version_o(const TripleSet& o_i, const ChangePlan& plan) {
  TripleSet out;
  out.set_base(o_i.base());
  for (const auto& t : o_i) {
    if (!detail::touches(t, plan.add)) out.insert(t);
  }
  return out;
}

/// O': without triples mentioning a delete entity, then every IRI renamed
/// through the update map.
inline TripleSet derive_version_o_prime(const TripleSet& o_i, const ChangePlan& plan) {
  auto renames = plan.renames();
  TripleSet out;
  out.set_base(o_i.base());
  for (const auto& t : o_i) {
    if (detail::touches(t, plan.del)) continue;
    Term p = detail::mapped(t.predicate, renames);
    out.insert(Triple{detail::mapped(t.subject, renames), std::get<Iri>(p), detail::mapped(t.object, renames)});
  }
  return out;
}

inline VersionRefs emit_version_refs(const ChangePlan& plan) {
  VersionRefs r;
  r.remain.meta = standard_meta();
  r.update.meta = standard_meta();
  for (const auto& e : plan.remain) r.remain.insert({e, e, MappingRelation::Equivalence, 1.0});
  for (const auto& [old_iri, new_iri] : plan.renames()) {
    r.update.insert({old_iri, new_iri, MappingRelation::Equivalence, 1.0});
  }
  r.add = plan.add;
  r.del = plan.del;
  return r;
}

enum class IntermediateSide { Source, Target };

/// Orients `reference` so that entity1 belongs to the intermediate ontology.
inline Alignment orient_reference(const Alignment& reference, IntermediateSide side) {
  if (side == IntermediateSide::Source) return reference;
  Alignment out;
  out.onto1 = reference.onto2;
  out.onto2 = reference.onto1;
  out.meta = reference.meta;
  for (const auto& m : reference) out.insert({m.entity2, m.entity1, m.relation, m.confidence});
  return out;
}

/// r_or drops mappings touching add entities; r_o'r drops those touching
/// delete entities and renames update entities.
inline std::pair<Alignment, Alignment> derive_cr_references(const Alignment& reference, const ChangePlan& plan,
                                                            IntermediateSide side) {
  Alignment oriented = orient_reference(reference, side);
  auto renames = plan.renames();
  Alignment r_or, r_oprime_r;
  r_or.onto1 = r_oprime_r.onto1 = oriented.onto1;
  r_or.onto2 = r_oprime_r.onto2 = oriented.onto2;
  r_or.meta = r_oprime_r.meta = oriented.meta;
  for (const auto& m : oriented) {
    if (!plan.add.count(m.entity1) && !plan.add.count(m.entity2)) r_or.insert(m);
    if (!plan.del.count(m.entity1) && !plan.del.count(m.entity2)) {
      Mapping moved = m;
      if (auto it = renames.find(m.entity1); it != renames.end()) moved.entity1 = it->second;
      if (auto it = renames.find(m.entity2); it != renames.end()) moved.entity2 = it->second;
      r_oprime_r.insert(moved);
    }
  }
  return {std::move(r_or), std::move(r_oprime_r)};
}

struct TestbedBundle {
  TripleSet o;
  TripleSet o_prime;
  VersionRefs refs;
  Alignment r_or;
  Alignment r_oprime_r;
  SynonymTable synonyms;
  ChangePlan plan;
  Manifest manifest;
  std::vector<std::string> warnings;
};

/// Bundle file names.
namespace bundle_files {
inline constexpr const char* o = "o.ttl";
inline constexpr const char* o_prime = "o_prime.ttl";
inline constexpr const char* remain = "vr-remain.xml";
inline constexpr const char* update = "vr-update.xml";
inline constexpr const char* add = "vr-add.txt";
inline constexpr const char* del = "vr-delete.txt";
inline constexpr const char* r_or = "r_or.xml";
inline constexpr const char* r_oprime_r = "r_oprime_r.xml";
inline constexpr const char* synonyms = "synonyms.tsv";
inline constexpr const char* manifest = "manifest.json";
}  // namespace bundle_files

/// Runs every generation step: entity retrieval, change assignment, renaming
/// from the reference synonym corpus, version derivation, versioning
/// references and cross-references.
inline TestbedBundle generate(const TripleSet& src_doc, const TripleSet& tgt_doc, const Alignment& reference,
                              std::uint64_t seed = kDefaultSeed, const Proportions& proportions = kDefaultProportions,
                              IntermediateSide side = IntermediateSide::Source) {
  const TripleSet& o_i = side == IntermediateSide::Source ? src_doc : tgt_doc;
  EntitySet entities = extract_entities(o_i);

  TestbedBundle b;
  b.synonyms = prune_internal_synonyms(build_synonym_corpus(reference, src_doc, tgt_doc, &b.warnings), entities);
  b.plan = plan_updates(assign_changes(entities, seed, proportions), b.synonyms, entities, o_i);
  b.o = derive_version_o(o_i, b.plan);
  b.o_prime = derive_version_o_prime(o_i, b.plan);
  b.refs = emit_version_refs(b.plan);
  std::tie(b.r_or, b.r_oprime_r) = derive_cr_references(reference, b.plan, side);

  EntitySet eo = extract_entities(b.o), eo_prime = extract_entities(b.o_prime);
  std::vector<CrossRefPair> crs{{b.r_or, b.r_oprime_r, "reference"}};
  CrScopes scopes = restrict_scope(eo, eo_prime, crs, CrossRefPolicy::WarnAndDrop);
  b.warnings.insert(b.warnings.end(), scopes.warnings.begin(), scopes.warnings.end());

  Manifest& m = b.manifest;
  m.seed = seed;
  m.proportions = proportions;
  m.intermediate = side == IntermediateSide::Source ? "source" : "target";
  m.files = {{"o", bundle_files::o},
             {"o_prime", bundle_files::o_prime},
             {"vr_remain", bundle_files::remain},
             {"vr_update", bundle_files::update},
             {"vr_add", bundle_files::add},
             {"vr_delete", bundle_files::del},
             {"r_or", bundle_files::r_or},
             {"r_oprime_r", bundle_files::r_oprime_r},
             {"synonyms", bundle_files::synonyms}};
  m.counts = {{"entities_intermediate", entities.size()},
              {"entities_o", eo.size()},
              {"entities_o_prime", eo_prime.size()},
              {"remain", b.refs.remain.size()},
              {"update", b.refs.update.size()},
              {"add", b.refs.add.size()},
              {"delete", b.refs.del.size()},
              {"reference", reference.size()},
              {"r_or", b.r_or.size()},
              {"r_oprime_r", b.r_oprime_r.size()},
              {"synonym_pairs", b.synonyms.size()},
              {"triples_o", b.o.size()},
              {"triples_o_prime", b.o_prime.size()},
              {"uncovered_o", scopes.scope1.size()},
              {"uncovered_o_prime", scopes.scope2.size()}};
  return b;
}

inline void write_bundle(const TestbedBundle& b, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto path = [&](const char* name) { return (dir / name).string(); };
  write_file(path(bundle_files::o), write_turtle(b.o));
  write_file(path(bundle_files::o_prime), write_turtle(b.o_prime));
  write_file(path(bundle_files::remain), write_alignment(b.refs.remain));
  write_file(path(bundle_files::update), write_alignment(b.refs.update));
  write_file(path(bundle_files::add), write_entity_list(b.refs.add));
  write_file(path(bundle_files::del), write_entity_list(b.refs.del));
  write_file(path(bundle_files::r_or), write_alignment(b.r_or));
  write_file(path(bundle_files::r_oprime_r), write_alignment(b.r_oprime_r));
  write_file(path(bundle_files::synonyms), write_synonym_table(b.synonyms));
  write_file(path(bundle_files::manifest), write_manifest(b.manifest));
}

}  // namespace ovdiff
