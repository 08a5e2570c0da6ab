#pragma once

#include <string>
#include <string_view>

#include "ovdiff/engine.hpp"
#include "ovdiff/rdf.hpp"
#include "ovdiff/turtle.hpp"

namespace ovdiff {

inline constexpr std::string_view kChangelogNs = "https://w3id.org/ovdiff/changelog#";

inline const Iri& changelog_added_entity() {
  static const Iri i = vocab::term(kChangelogNs, "addedEntity");
  return i;
}

/// Version annotations for an OV result:
///   new owl:priorVersion old
///   deleted owl:deprecated true
///   new-entity dct:replaces old-entity      (one per update)
///   new chg:addedEntity added               (one per add)
inline TripleSet changelog_triples(const OvResult& result, const Iri& old_version, const Iri& new_version) {
  TripleSet doc;
  doc.insert({new_version, vocab::owl_prior_version(), old_version});
  for (const auto& e : result.del) {
    doc.insert({e, vocab::owl_deprecated(), Literal{"true", "", vocab::xsd_boolean()}});
  }
  for (const auto& m : result.update) doc.insert({m.entity2, vocab::dct_replaces(), m.entity1});
  for (const auto& e : result.add) doc.insert({new_version, changelog_added_entity(), e});
  return doc;
}

inline std::string emit_changelog(const OvResult& result, const Iri& old_version, const Iri& new_version) {
  PrefixMap prefixes = standard_prefixes();
  prefixes["chg"] = std::string(kChangelogNs);
  return write_turtle(changelog_triples(result, old_version, new_version), prefixes);
}

/// The subject of the first `a owl:Ontology` triple, if any.
inline std::optional<Iri> ontology_iri(const TripleSet& doc) {
  for (const auto& t : doc) {
    if (t.predicate == vocab::rdf_type() && std::holds_alternative<Iri>(t.object) &&
        std::get<Iri>(t.object) == vocab::owl_ontology()) {
      if (const Iri* s = as_iri(t.subject)) return *s;
    }
  }
  return std::nullopt;
}

}  // namespace ovdiff
