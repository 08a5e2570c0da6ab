#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <iterator>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ovdiff/rdf.hpp"

namespace ovdiff {

enum class EntityKind { Class, ObjectProperty, DataProperty, AnnotationProperty };

inline std::string_view to_string(EntityKind k) noexcept {
  switch (k) {
    case EntityKind::Class: return "Class";
    case EntityKind::ObjectProperty: return "ObjectProperty";
    case EntityKind::DataProperty: return "DataProperty";
    case EntityKind::AnnotationProperty: return "AnnotationProperty";
  }
  return "?";
}

/// Classes match classes, properties of any flavour match properties.
inline bool same_kind_family(EntityKind a, EntityKind b) noexcept {
  return (a == EntityKind::Class) == (b == EntityKind::Class);
}

struct Entity {
  Iri iri;
  EntityKind kind = EntityKind::Class;
  /// Annotation values in priority order: rdfs:label, skos:prefLabel,
  /// rdfs:comment, skos:definition.
  std::vector<std::string> labels;

  std::string local_name() const { return std::string(iri.local_name()); }

  friend bool operator==(const Entity&, const Entity&) = default;
};

/// Entities keyed by IRI.
class EntitySet {
 public:
  using container = std::map<Iri, Entity>;

  bool insert(Entity e) {
    Iri key = e.iri;
    return entities_.emplace(std::move(key), std::move(e)).second;
  }
  const Entity* find(const Iri& iri) const {
    auto it = entities_.find(iri);
    return it == entities_.end() ? nullptr : &it->second;
  }
  bool contains(const Iri& iri) const { return entities_.count(iri) > 0; }
  std::size_t size() const noexcept { return entities_.size(); }
  bool empty() const noexcept { return entities_.empty(); }

  struct const_iterator {
    using iterator_category = std::forward_iterator_tag;
    using value_type = Entity;
    using difference_type = std::ptrdiff_t;
    using pointer = const Entity*;
    using reference = const Entity&;

    container::const_iterator it;
    const Entity& operator*() const { return it->second; }
    const Entity* operator->() const { return &it->second; }
    const_iterator& operator++() {
      ++it;
      return *this;
    }
    const_iterator operator++(int) {
      auto old = *this;
      ++it;
      return old;
    }
    bool operator==(const const_iterator&) const = default;
  };
  const_iterator begin() const { return {entities_.begin()}; }
  const_iterator end() const { return {entities_.end()}; }

  friend bool operator==(const EntitySet&, const EntitySet&) = default;

 private:
  container entities_;
};

inline std::size_t count_entities(const EntitySet& s) noexcept { return s.size(); }

namespace detail {

inline bool is_datatype_range(const Iri& range) {
  return range == vocab::rdfs_literal() || range.str().rfind(vocab::xsd, 0) == 0 ||
         range == vocab::rdf_lang_string();
}

}  // namespace detail

/// Collects every named subject typed as a class or property. Blank nodes and
/// individuals are never entities. When a subject carries several typing
/// triples the most specific kind wins (OWL types over rdf:Property).
inline EntitySet extract_entities(const TripleSet& doc) {
  std::map<Iri, std::optional<EntityKind>> kinds;
  std::map<Iri, bool> generic_property;
  std::map<Iri, bool> datatype_range;

  auto rank = [](EntityKind k) { return static_cast<int>(k); };
  for (const auto& t : doc) {
    const Iri* subject = as_iri(t.subject);
    if (!subject) continue;
    if (t.predicate == vocab::rdfs_range()) {
      if (const Iri* r = as_iri(t.object); r && detail::is_datatype_range(*r)) datatype_range[*subject] = true;
      continue;
    }
    if (t.predicate != vocab::rdf_type()) continue;
    const Iri* type = as_iri(t.object);
    if (!type) continue;
    std::optional<EntityKind> k;
    if (*type == vocab::owl_class() || *type == vocab::rdfs_class()) {
      k = EntityKind::Class;
    } else if (*type == vocab::owl_object_property()) {
      k = EntityKind::ObjectProperty;
    } else if (*type == vocab::owl_datatype_property()) {
      k = EntityKind::DataProperty;
    } else if (*type == vocab::owl_annotation_property()) {
      k = EntityKind::AnnotationProperty;
    } else if (*type == vocab::rdf_property()) {
      generic_property[*subject] = true;
      kinds.try_emplace(*subject);
      continue;
    } else {
      continue;
    }
    auto& slot = kinds[*subject];
    if (!slot || rank(*k) < rank(*slot)) slot = k;
  }

  std::map<Iri, std::array<std::vector<std::string>, 4>> annotations;
  const std::array<const Iri*, 4> annotation_order = {&vocab::rdfs_label(), &vocab::skos_pref_label(),
                                                      &vocab::rdfs_comment(), &vocab::skos_definition()};
  for (const auto& t : doc) {
    const Iri* subject = as_iri(t.subject);
    const auto* lit = std::get_if<Literal>(&t.object);
    if (!subject || !lit || !kinds.count(*subject)) continue;
    for (std::size_t i = 0; i < annotation_order.size(); ++i) {
      if (t.predicate == *annotation_order[i]) annotations[*subject][i].push_back(lit->lexical);
    }
  }

  EntitySet out;
  for (auto& [iri, kind] : kinds) {
    Entity e{iri, EntityKind::Class, {}};
    if (kind) {
      e.kind = *kind;
    } else {
      e.kind = datatype_range.count(iri) ? EntityKind::DataProperty : EntityKind::ObjectProperty;
    }
    if (auto it = annotations.find(iri); it != annotations.end()) {
      for (auto& group : it->second) {
        for (auto& v : group) e.labels.push_back(v);
      }
    }
    out.insert(std::move(e));
  }
  return out;
}

/// True when `name` reads as words rather than an identifier code: it has an
/// alphabetic run of at least three letters and fewer digits than letters.
inline bool is_meaningful_name(std::string_view name) noexcept {
  std::size_t run = 0, longest = 0, letters = 0, digits = 0;
  for (char c : name) {
    bool alpha = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
    if (alpha) {
      ++letters;
      longest = std::max(longest, ++run);
    } else {
      run = 0;
      if (c >= '0' && c <= '9') ++digits;
    }
  }
  return longest >= 3 && digits < letters;
}

/// The name used for matching: the local name when it is meaningful, else
/// the first non-empty annotation, else the local name verbatim.
inline std::string display_name(const Entity& e) {
  std::string local = e.local_name();
  if (is_meaningful_name(local)) return local;
  for (const auto& l : e.labels) {
    if (!l.empty()) return l;
  }
  return local;
}

}  // namespace ovdiff
