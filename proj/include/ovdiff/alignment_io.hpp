#pragma once

#include <array>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <nlohmann/json.hpp>

#include "ovdiff/alignment.hpp"
#include "ovdiff/error.hpp"
#include "ovdiff/rdf.hpp"

namespace ovdiff {

inline constexpr std::string_view kAlignmentNs = "http://knowledgeweb.semanticweb.org/heterogeneity/alignment";

/// Shortest round-tripping decimal, padded to at least six fraction digits.
inline std::string format_confidence(double c) {
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), c, std::chars_format::fixed);
  std::string s(buf.data(), res.ptr);
  auto dot = s.find('.');
  if (dot == std::string::npos) {
    s += '.';
    dot = s.size() - 1;
  }
  while (s.size() - dot - 1 < 6) s += '0';
  return s;
}

inline double parse_decimal(std::string_view text, const std::string& what) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw FormatError("malformed " + what + ": '" + std::string(text) + "'");
  }
  return v;
}

namespace detail {

using boost::property_tree::ptree;

inline std::string_view xml_local(std::string_view name) {
  auto colon = name.find(':');
  return colon == std::string_view::npos ? name : name.substr(colon + 1);
}

inline const ptree* xml_child(const ptree& node, std::string_view local) {
  for (const auto& [name, child] : node) {
    if (xml_local(name) == local) return &child;
  }
  return nullptr;
}

inline std::optional<std::string> xml_attr(const ptree& node, std::string_view local) {
  if (auto attrs = node.get_child_optional("<xmlattr>")) {
    for (const auto& [name, v] : *attrs) {
      if (xml_local(name) == local) return v.data();
    }
  }
  return std::nullopt;
}

inline std::string trimmed(std::string s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

/// rdf:resource / rdf:about attribute, else text content.
inline std::string resource_of(const ptree& node) {
  if (auto r = xml_attr(node, "resource")) return *r;
  if (auto r = xml_attr(node, "about")) return *r;
  return trimmed(node.data());
}

inline std::optional<Iri> read_onto(const ptree& node) {
  if (const ptree* onto = xml_child(node, "Ontology")) {
    if (auto about = xml_attr(*onto, "about")) return Iri(*about);
  }
  std::string text = resource_of(node);
  if (text.empty()) return std::nullopt;
  return Iri(text);
}

inline const ptree* find_alignment(const ptree& node) {
  for (const auto& [name, child] : node) {
    if (name == "<xmlattr>" || name == "<xmlcomment>") continue;
    if (xml_local(name) == "Alignment") return &child;
    if (const ptree* deeper = find_alignment(child)) return deeper;
  }
  return nullptr;
}

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

inline Mapping read_cell(const ptree& cell) {
  const ptree* e1 = xml_child(cell, "entity1");
  const ptree* e2 = xml_child(cell, "entity2");
  const ptree* measure = xml_child(cell, "measure");
  if (!e1) throw FormatError("Cell without entity1");
  if (!e2) throw FormatError("Cell without entity2");
  if (!measure) throw FormatError("Cell without measure");
  Mapping m{Iri(resource_of(*e1)), Iri(resource_of(*e2)), MappingRelation::Equivalence,
            parse_decimal(measure->data(), "measure")};
  if (const ptree* rel = xml_child(cell, "relation")) {
    std::string r = trimmed(rel->data());
    if (r != "=") throw RelationError("unsupported relation '" + r + "'");
  }
  return m;
}

}  // namespace detail

/// Reads an OAEI Alignment-format document. Simple text children of the
/// Alignment element other than onto1/onto2/map become `meta` entries.
inline Alignment read_alignment(std::string_view xml) {
  using detail::ptree;
  ptree tree;
  try {
    std::istringstream in{std::string(xml)};
    boost::property_tree::read_xml(in, tree, boost::property_tree::xml_parser::no_comments);
  } catch (const boost::property_tree::xml_parser_error& e) {
    throw FormatError(std::string("malformed alignment XML: ") + e.what());
  }
  const ptree* root = detail::find_alignment(tree);
  if (!root) throw FormatError("no Alignment element");

  Alignment out;
  for (const auto& [name, child] : *root) {
    if (name == "<xmlattr>") continue;
    std::string_view local = detail::xml_local(name);
    if (local == "onto1") {
      out.onto1 = detail::read_onto(child);
    } else if (local == "onto2") {
      out.onto2 = detail::read_onto(child);
    } else if (local == "map") {
      for (const auto& [cname, cell] : child) {
        if (detail::xml_local(cname) != "Cell") continue;
        Mapping m = detail::read_cell(cell);
        if (!out.insert(m)) {
          throw FormatError("duplicate cell (" + m.entity1.str() + ", " + m.entity2.str() + ")");
        }
      }
    } else if (child.empty()) {
      out.meta[std::string(local)] = detail::trimmed(child.data());
    }
  }
  return out;
}

/// Deterministic Alignment-format document; cells in (entity1, entity2) order.
inline std::string write_alignment(const Alignment& a) {
  using detail::xml_escape;
  std::ostringstream os;
  os << "<?xml version='1.0' encoding='utf-8' standalone='no'?>\n"
     << "<rdf:RDF xmlns='" << kAlignmentNs << "#'\n"
     << "         xmlns:rdf='http://www.w3.org/1999/02/22-rdf-syntax-ns#'\n"
     << "         xmlns:xsd='http://www.w3.org/2001/XMLSchema#'\n"
     << "         xmlns:align='" << kAlignmentNs << "#'>\n"
     << "<Alignment>\n";
  for (const auto& [k, v] : a.meta) os << "  <" << k << ">" << xml_escape(v) << "</" << k << ">\n";
  auto onto = [&](const char* tag, const std::optional<Iri>& iri) {
    if (!iri) return;
    os << "  <" << tag << ">\n    <Ontology rdf:about=\"" << xml_escape(iri->str()) << "\"/>\n  </" << tag
       << ">\n";
  };
  onto("onto1", a.onto1);
  onto("onto2", a.onto2);
  for (const auto& m : a) {
    os << "  <map>\n    <Cell>\n"
       << "      <entity1 rdf:resource=\"" << xml_escape(m.entity1.str()) << "\"/>\n"
       << "      <entity2 rdf:resource=\"" << xml_escape(m.entity2.str()) << "\"/>\n"
       << "      <relation>=</relation>\n"
       << "      <measure rdf:datatype=\"xsd:float\">" << format_confidence(m.confidence) << "</measure>\n"
       << "    </Cell>\n  </map>\n";
  }
  os << "</Alignment>\n</rdf:RDF>\n";
  return os.str();
}

/// One absolute IRI per line; blank lines and '#' comments are skipped.
inline std::set<Iri> read_entity_list(std::string_view text) {
  std::set<Iri> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string line = detail::trimmed(std::string(text.substr(pos, nl - pos)));
    ++line_no;
    pos = nl + 1;
    if (line.empty() || line[0] == '#') continue;
    if (!Iri::is_absolute(line)) {
      throw FormatError("line " + std::to_string(line_no) + ": not an absolute IRI: '" + line + "'");
    }
    out.insert(Iri(line));
  }
  return out;
}

inline std::string write_entity_list(const std::set<Iri>& s) {
  std::string out;
  for (const auto& iri : s) {
    out += iri.str();
    out += '\n';
  }
  return out;
}

/// Parameters and counts describing a generated testbed bundle.
struct Manifest {
  std::uint64_t seed = 42;
  /// remain, update, add, delete
  std::array<double, 4> proportions{0.25, 0.25, 0.25, 0.25};
  /// Probabilities for re-assigning synonym-less update entities to
  /// remain, add, delete.
  std::array<double, 3> reassign{1.0 / 3, 1.0 / 3, 1.0 / 3};
  std::string intermediate = "source";
  std::map<std::string, std::string> files;
  std::map<std::string, std::uint64_t> counts;

  friend bool operator==(const Manifest&, const Manifest&) = default;
};

inline std::string write_manifest(const Manifest& m) {
  nlohmann::ordered_json j;
  j["seed"] = m.seed;
  j["proportions"] = {{"remain", m.proportions[0]},
                      {"update", m.proportions[1]},
                      {"add", m.proportions[2]},
                      {"delete", m.proportions[3]}};
  j["reassign"] = {{"remain", m.reassign[0]}, {"add", m.reassign[1]}, {"delete", m.reassign[2]}};
  j["intermediate"] = m.intermediate;
  j["files"] = m.files;
  j["counts"] = m.counts;
  return j.dump(2) + "\n";
}

inline Manifest read_manifest(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed manifest: ") + e.what());
  }
  auto require = [&](const nlohmann::json& obj, const char* key) -> const nlohmann::json& {
    if (!obj.is_object() || !obj.contains(key)) throw FormatError(std::string("manifest missing '") + key + "'");
    return obj.at(key);
  };
  Manifest m;
  try {
    m.seed = require(j, "seed").get<std::uint64_t>();
    const auto& p = require(j, "proportions");
    m.proportions = {require(p, "remain").get<double>(), require(p, "update").get<double>(),
                     require(p, "add").get<double>(), require(p, "delete").get<double>()};
    if (j.contains("reassign")) {
      const auto& r = j.at("reassign");
      m.reassign = {require(r, "remain").get<double>(), require(r, "add").get<double>(),
                    require(r, "delete").get<double>()};
    }
    m.intermediate = require(j, "intermediate").get<std::string>();
    m.files = require(j, "files").get<std::map<std::string, std::string>>();
    m.counts = require(j, "counts").get<std::map<std::string, std::uint64_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out << content;
}

}  // namespace ovdiff
