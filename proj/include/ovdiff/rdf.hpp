#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

#include "ovdiff/error.hpp"

namespace ovdiff {

/// An absolute IRI, compared by exact string equality.
class Iri {
 public:
  Iri() = default;

  /// Throws FormatError unless `value` is non-empty and has a scheme.
  explicit Iri(std::string value) : value_(std::move(value)) {
    if (!is_absolute(value_)) {
      throw FormatError("not an absolute IRI: '" + value_ + "'");
    }
  }

  const std::string& str() const noexcept { return value_; }
  bool empty() const noexcept { return value_.empty(); }

  /// Fragment after '#', else the last path segment, else the part after ':'.
  std::string_view local_name() const noexcept {
    std::string_view v = value_;
    if (auto hash = v.rfind('#'); hash != std::string_view::npos) {
      return v.substr(hash + 1);
    }
    if (auto slash = v.rfind('/'); slash != std::string_view::npos) {
      return v.substr(slash + 1);
    }
    if (auto colon = v.find(':'); colon != std::string_view::npos) {
      return v.substr(colon + 1);
    }
    return v;
  }

  /// Everything up to and including the separator preceding local_name().
  std::string_view namespace_part() const noexcept {
    std::string_view v = value_;
    return v.substr(0, v.size() - local_name().size());
  }

  /// scheme ":" rest, where scheme = ALPHA *( ALPHA / DIGIT / "+" / "-" / "." )
  static bool is_absolute(std::string_view v) noexcept {
    auto colon = v.find(':');
    if (colon == std::string_view::npos || colon == 0) return false;
    auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); };
    if (!alpha(v[0])) return false;
    for (std::size_t i = 1; i < colon; ++i) {
      char c = v[i];
      if (!alpha(c) && !(c >= '0' && c <= '9') && c != '+' && c != '-' && c != '.') {
        return false;
      }
    }
    for (char c : v) {
      if (c == ' ' || c == '<' || c == '>' || c == '"' || c == '\n' || c == '\t') return false;
    }
    return true;
  }

  friend auto operator<=>(const Iri&, const Iri&) = default;
  friend bool operator==(const Iri&, const Iri&) = default;

 private:
  std::string value_;
};

struct BlankNode {
  std::string label;
  friend auto operator<=>(const BlankNode&, const BlankNode&) = default;
  friend bool operator==(const BlankNode&, const BlankNode&) = default;
};

struct Literal {
  std::string lexical;
  std::string language;         // empty when absent
  std::optional<Iri> datatype;  // absent for plain and language-tagged literals
  friend auto operator<=>(const Literal&, const Literal&) = default;
  friend bool operator==(const Literal&, const Literal&) = default;
};

using Term = std::variant<Iri, BlankNode, Literal>;

inline const Iri* as_iri(const Term& t) noexcept { return std::get_if<Iri>(&t); }
inline bool is_iri(const Term& t) noexcept { return std::holds_alternative<Iri>(t); }
inline bool is_blank(const Term& t) noexcept { return std::holds_alternative<BlankNode>(t); }

struct Triple {
  Term subject;  // Iri or BlankNode
  Iri predicate;
  Term object;
  friend auto operator<=>(const Triple&, const Triple&) = default;
  friend bool operator==(const Triple&, const Triple&) = default;
};

/// A set of triples with an optional base IRI. Iteration is in a total,
/// deterministic order.
class TripleSet {
 public:
  using container = std::set<Triple>;
  using const_iterator = container::const_iterator;

  TripleSet() = default;

  bool insert(Triple t) { return triples_.insert(std::move(t)).second; }
  bool erase(const Triple& t) { return triples_.erase(t) > 0; }
  bool contains(const Triple& t) const { return triples_.count(t) > 0; }
  std::size_t size() const noexcept { return triples_.size(); }
  bool empty() const noexcept { return triples_.empty(); }
  const_iterator begin() const noexcept { return triples_.begin(); }
  const_iterator end() const noexcept { return triples_.end(); }

  const std::optional<Iri>& base() const noexcept { return base_; }
  void set_base(std::optional<Iri> b) { base_ = std::move(b); }

  /// Equality is on the triples only; the base is a parsing artefact.
  friend bool operator==(const TripleSet& a, const TripleSet& b) { return a.triples_ == b.triples_; }

 private:
  container triples_;
  std::optional<Iri> base_;
};

namespace vocab {
inline constexpr std::string_view rdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view rdfs = "http://www.w3.org/2000/01/rdf-schema#";
inline constexpr std::string_view owl = "http://www.w3.org/2002/07/owl#";
inline constexpr std::string_view xsd = "http://www.w3.org/2001/XMLSchema#";
inline constexpr std::string_view skos = "http://www.w3.org/2004/02/skos/core#";
inline constexpr std::string_view dct = "http://purl.org/dc/terms/";

inline Iri term(std::string_view ns, std::string_view local) {
  std::string s(ns);
  s += local;
  return Iri(std::move(s));
}

inline const Iri& rdf_type() { static const Iri i = term(rdf, "type"); return i; }
inline const Iri& rdf_property() { static const Iri i = term(rdf, "Property"); return i; }
inline const Iri& rdf_lang_string() { static const Iri i = term(rdf, "langString"); return i; }
inline const Iri& rdf_first() { static const Iri i = term(rdf, "first"); return i; }
inline const Iri& rdf_rest() { static const Iri i = term(rdf, "rest"); return i; }
inline const Iri& rdf_nil() { static const Iri i = term(rdf, "nil"); return i; }
inline const Iri& rdfs_class() { static const Iri i = term(rdfs, "Class"); return i; }
inline const Iri& rdfs_label() { static const Iri i = term(rdfs, "label"); return i; }
inline const Iri& rdfs_comment() { static const Iri i = term(rdfs, "comment"); return i; }
inline const Iri& rdfs_range() { static const Iri i = term(rdfs, "range"); return i; }
inline const Iri& rdfs_literal() { static const Iri i = term(rdfs, "Literal"); return i; }
inline const Iri& rdfs_datatype() { static const Iri i = term(rdfs, "Datatype"); return i; }
inline const Iri& owl_class() { static const Iri i = term(owl, "Class"); return i; }
inline const Iri& owl_object_property() { static const Iri i = term(owl, "ObjectProperty"); return i; }
inline const Iri& owl_datatype_property() { static const Iri i = term(owl, "DatatypeProperty"); return i; }
inline const Iri& owl_annotation_property() { static const Iri i = term(owl, "AnnotationProperty"); return i; }
inline const Iri& owl_ontology() { static const Iri i = term(owl, "Ontology"); return i; }
inline const Iri& owl_prior_version() { static const Iri i = term(owl, "priorVersion"); return i; }
inline const Iri& owl_deprecated() { static const Iri i = term(owl, "deprecated"); return i; }
inline const Iri& xsd_string() { static const Iri i = term(xsd, "string"); return i; }
inline const Iri& xsd_boolean() { static const Iri i = term(xsd, "boolean"); return i; }
inline const Iri& xsd_integer() { static const Iri i = term(xsd, "integer"); return i; }
inline const Iri& xsd_decimal() { static const Iri i = term(xsd, "decimal"); return i; }
inline const Iri& xsd_double() { static const Iri i = term(xsd, "double"); return i; }
inline const Iri& skos_pref_label() { static const Iri i = term(skos, "prefLabel"); return i; }
inline const Iri& skos_definition() { static const Iri i = term(skos, "definition"); return i; }
inline const Iri& dct_replaces() { static const Iri i = term(dct, "replaces"); return i; }
}  // namespace vocab

}  // namespace ovdiff
