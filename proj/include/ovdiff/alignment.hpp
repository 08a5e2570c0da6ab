#pragma once

#include <cstddef>
#include <iterator>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>

#include "ovdiff/error.hpp"
#include "ovdiff/rdf.hpp"

namespace ovdiff {

/// Versioning only ever uses equivalence.
enum class MappingRelation { Equivalence };

struct Mapping {
  Iri entity1;
  Iri entity2;
  MappingRelation relation = MappingRelation::Equivalence;
  double confidence = 1.0;

  friend bool operator==(const Mapping&, const Mapping&) = default;
};

using IriPair = std::pair<Iri, Iri>;

/// A set of mappings with at most one cell per (entity1, entity2) pair,
/// iterated in lexicographic (entity1, entity2) order.
class Alignment {
 public:
  using container = std::map<IriPair, Mapping>;

  std::optional<Iri> onto1;
  std::optional<Iri> onto2;
  std::map<std::string, std::string> meta;

  /// Returns false, leaving the alignment unchanged, if the pair exists.
  bool insert(Mapping m) {
    check_confidence(m.confidence);
    IriPair key{m.entity1, m.entity2};
    return cells_.emplace(std::move(key), std::move(m)).second;
  }

  /// Inserts, or raises the stored confidence to `m.confidence`.
  void insert_or_max(Mapping m) {
    check_confidence(m.confidence);
    IriPair key{m.entity1, m.entity2};
    auto [it, inserted] = cells_.emplace(key, m);
    if (!inserted && m.confidence > it->second.confidence) it->second.confidence = m.confidence;
  }

  bool erase(const Iri& e1, const Iri& e2) { return cells_.erase({e1, e2}) > 0; }
  bool contains(const Iri& e1, const Iri& e2) const { return cells_.count({e1, e2}) > 0; }
  const Mapping* find(const Iri& e1, const Iri& e2) const {
    auto it = cells_.find({e1, e2});
    return it == cells_.end() ? nullptr : &it->second;
  }

  std::size_t size() const noexcept { return cells_.size(); }
  bool empty() const noexcept { return cells_.empty(); }

  struct const_iterator {
    using iterator_category = std::forward_iterator_tag;
    using value_type = Mapping;
    using difference_type = std::ptrdiff_t;
    using pointer = const Mapping*;
    using reference = const Mapping&;

    container::const_iterator it;
    const Mapping& operator*() const { return it->second; }
    const Mapping* operator->() const { return &it->second; }
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
  const_iterator begin() const { return {cells_.begin()}; }
  const_iterator end() const { return {cells_.end()}; }

  /// The (entity1, entity2) pairs, ignoring confidence.
  std::set<IriPair> pairs() const {
    std::set<IriPair> out;
    for (const auto& [k, v] : cells_) out.insert(k);
    return out;
  }
  std::set<Iri> entities1() const {
    std::set<Iri> out;
    for (const auto& [k, v] : cells_) out.insert(k.first);
    return out;
  }
  std::set<Iri> entities2() const {
    std::set<Iri> out;
    for (const auto& [k, v] : cells_) out.insert(k.second);
    return out;
  }

  friend bool operator==(const Alignment&, const Alignment&) = default;

 private:
  static void check_confidence(double c) {
    if (!(c >= 0.0 && c <= 1.0)) throw FormatError("confidence outside [0,1]: " + std::to_string(c));
  }

  container cells_;
};

/// Gold standard of an OV task.
struct VersionRefs {
  Alignment remain;
  Alignment update;
  std::set<Iri> add;
  std::set<Iri> del;

  friend bool operator==(const VersionRefs&, const VersionRefs&) = default;
};

/// Alignment-API header fields written by this toolkit.
inline std::map<std::string, std::string> standard_meta() {
  return {{"level", "0"}, {"type", "11"}, {"xml", "yes"}};
}

}  // namespace ovdiff
