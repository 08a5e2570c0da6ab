#pragma once

#include <cctype>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ovdiff/error.hpp"
#include "ovdiff/rdf.hpp"

namespace ovdiff {

enum class RdfSyntax { NTriples, Turtle };

/// Picks the syntax from a file extension (.nt, .ttl). Throws UnsupportedSyntax
/// for anything else, including RDF/XML, which must be converted beforehand.
inline RdfSyntax syntax_for_path(std::string_view path) {
  auto dot = path.rfind('.');
  std::string ext = dot == std::string_view::npos ? std::string() : std::string(path.substr(dot + 1));
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == "nt") return RdfSyntax::NTriples;
  if (ext == "ttl") return RdfSyntax::Turtle;
  throw UnsupportedSyntax("unsupported RDF serialization '" + ext + "' for " + std::string(path) +
                          " (convert to Turtle or N-Triples first)");
}

inline RdfSyntax syntax_from_name(std::string_view name) {
  if (name == "ntriples" || name == "nt" || name == "n-triples") return RdfSyntax::NTriples;
  if (name == "turtle" || name == "ttl") return RdfSyntax::Turtle;
  throw UnsupportedSyntax("unsupported RDF syntax '" + std::string(name) + "'");
}

namespace detail {

inline void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

inline std::string remove_dot_segments(std::string_view path) {
  std::vector<std::string> out;
  std::size_t i = 0;
  bool absolute = !path.empty() && path[0] == '/';
  bool trailing = false;
  while (i <= path.size()) {
    auto next = path.find('/', i);
    if (next == std::string_view::npos) next = path.size();
    std::string_view seg = path.substr(i, next - i);
    trailing = false;
    if (seg == ".") {
      trailing = true;
    } else if (seg == "..") {
      if (!out.empty()) out.pop_back();
      trailing = true;
    } else if (!(seg.empty() && i == 0 && absolute)) {
      out.emplace_back(seg);
    }
    i = next + 1;
  }
  std::string r = absolute ? "/" : "";
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (k) r += '/';
    r += out[k];
  }
  if (trailing && (r.empty() || r.back() != '/')) r += '/';
  return r;
}

/// Reference resolution against an absolute base IRI.
inline std::string resolve_iri(std::string_view base, std::string_view ref) {
  if (Iri::is_absolute(ref)) return std::string(ref);
  auto scheme_end = base.find(':');
  std::string scheme(base.substr(0, scheme_end + 1));
  std::string_view rest = base.substr(scheme_end + 1);
  std::string authority;
  std::string_view path = rest;
  if (rest.substr(0, 2) == "//") {
    auto slash = rest.find_first_of("/?#", 2);
    if (slash == std::string_view::npos) slash = rest.size();
    authority = std::string(rest.substr(0, slash));
    path = rest.substr(slash);
  }
  auto qpos = path.find_first_of("?#");
  std::string_view base_path = path.substr(0, qpos);
  std::string_view base_query;
  if (qpos != std::string_view::npos && path[qpos] == '?') {
    auto h = path.find('#', qpos);
    base_query = path.substr(qpos, h == std::string_view::npos ? std::string_view::npos : h - qpos);
  }
  if (ref.empty()) return scheme + authority + std::string(base_path) + std::string(base_query);
  if (ref[0] == '#') return scheme + authority + std::string(base_path) + std::string(base_query) + std::string(ref);
  if (ref.substr(0, 2) == "//") return scheme + std::string(ref);
  if (ref[0] == '?') return scheme + authority + std::string(base_path) + std::string(ref);
  auto split = ref.find_first_of("?#");
  std::string_view ref_path = ref.substr(0, split);
  std::string_view ref_tail = split == std::string_view::npos ? std::string_view() : ref.substr(split);
  std::string merged;
  if (!ref_path.empty() && ref_path[0] == '/') {
    merged = std::string(ref_path);
  } else {
    auto last = base_path.rfind('/');
    if (last == std::string_view::npos) {
      merged = (authority.empty() ? "" : "/") + std::string(ref_path);
    } else {
      merged = std::string(base_path.substr(0, last + 1)) + std::string(ref_path);
    }
  }
  return scheme + authority + remove_dot_segments(merged) + std::string(ref_tail);
}

class RdfParser {
 public:
  RdfParser(std::string_view text, RdfSyntax syntax, std::optional<Iri> base)
      : text_(text), strict_(syntax == RdfSyntax::NTriples) {
    if (base) base_ = base->str();
  }

  TripleSet parse() {
    skip_ws();
    while (!at_end()) {
      if (strict_) {
        ntriples_statement();
      } else {
        statement();
      }
      skip_ws();
    }
    if (!base_.empty()) out_.set_base(Iri(base_));
    return std::move(out_);
  }

 private:
  std::string_view text_;
  bool strict_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
  std::string base_;
  std::map<std::string, std::string, std::less<>> prefixes_;
  std::set<std::string, std::less<>> used_labels_;
  std::size_t next_anon_ = 0;
  TripleSet out_;

  [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(line_, col_, msg); }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }
  char get() {
    if (at_end()) fail("unexpected end of input");
    char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }
  void expect(char c) {
    if (peek() != c || at_end()) fail(std::string("expected '") + c + "'");
    get();
  }
  bool starts_with(std::string_view s) const { return text_.substr(pos_, s.size()) == s; }
  bool starts_with_keyword_ci(std::string_view kw) const {
    if (text_.size() - pos_ < kw.size()) return false;
    for (std::size_t i = 0; i < kw.size(); ++i) {
      if (std::toupper(static_cast<unsigned char>(text_[pos_ + i])) != kw[i]) return false;
    }
    char after = peek(kw.size());
    return after == ' ' || after == '\t' || after == '\n' || after == '\r' || after == '<';
  }

  void skip_ws() {
    while (!at_end()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        get();
      } else if (c == '#') {
        while (!at_end() && peek() != '\n') get();
      } else {
        break;
      }
    }
  }

  // -- statements ----------------------------------------------------------

  void ntriples_statement() {
    Term s = peek() == '_' ? Term(blank_label()) : Term(iriref());
    skip_ws();
    Iri p = iriref();
    skip_ws();
    Term o;
    if (peek() == '<') {
      o = iriref();
    } else if (peek() == '_') {
      o = blank_label();
    } else if (peek() == '"') {
      o = literal();
    } else {
      fail("expected IRI, blank node or literal");
    }
    skip_ws();
    expect('.');
    out_.insert(Triple{std::move(s), std::move(p), std::move(o)});
  }

  void statement() {
    if (starts_with("@prefix")) {
      advance(7);
      prefix_decl();
      skip_ws();
      expect('.');
    } else if (starts_with("@base")) {
      advance(5);
      skip_ws();
      base_ = iriref().str();
      skip_ws();
      expect('.');
    } else if (starts_with_keyword_ci("PREFIX")) {
      advance(6);
      prefix_decl();
    } else if (starts_with_keyword_ci("BASE")) {
      advance(4);
      skip_ws();
      base_ = iriref().str();
    } else {
      triples();
      skip_ws();
      expect('.');
    }
  }

  void advance(std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) get();
  }

  void prefix_decl() {
    skip_ws();
    std::string name;
    while (!at_end() && peek() != ':') {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\n') fail("malformed prefix name");
      name += get();
    }
    expect(':');
    skip_ws();
    prefixes_[name] = iriref().str();
  }

  void triples() {
    if (peek() == '[') {
      Term s = blank_property_list();
      skip_ws();
      if (peek() != '.') predicate_object_list(s);
    } else {
      Term s = subject();
      skip_ws();
      predicate_object_list(s);
    }
  }

  Term subject() {
    char c = peek();
    if (c == '_' && peek(1) == ':') return blank_label();
    if (c == '(') return collection();
    return iri();
  }

  void predicate_object_list(const Term& s) {
    for (;;) {
      skip_ws();
      Iri p = verb();
      skip_ws();
      object_list(s, p);
      skip_ws();
      if (peek() != ';') break;
      while (peek() == ';') {
        get();
        skip_ws();
      }
      char c = peek();
      if (c == '.' || c == ']' || at_end()) break;
    }
  }

  Iri verb() {
    if (peek() == 'a') {
      char n = peek(1);
      if (n == ' ' || n == '\t' || n == '\n' || n == '\r' || n == '<' || n == '"' || n == '[' ||
          n == '(' || n == '_') {
        get();
        return vocab::rdf_type();
      }
    }
    return iri();
  }

  void object_list(const Term& s, const Iri& p) {
    for (;;) {
      skip_ws();
      Term o = object();
      out_.insert(Triple{s, p, std::move(o)});
      skip_ws();
      if (peek() != ',') break;
      get();
    }
  }

  Term object() {
    char c = peek();
    if (c == '<') return iriref();
    if (c == '_' && peek(1) == ':') return blank_label();
    if (c == '[') return blank_property_list();
    if (c == '(') return collection();
    if (c == '"' || c == '\'') return literal();
    if (c == '+' || c == '-' || c == '.' || (c >= '0' && c <= '9')) return numeric();
    if (starts_with("true") && !is_name_char(peek(4)) && peek(4) != ':') {
      advance(4);
      return Literal{"true", "", vocab::xsd_boolean()};
    }
    if (starts_with("false") && !is_name_char(peek(5)) && peek(5) != ':') {
      advance(5);
      return Literal{"false", "", vocab::xsd_boolean()};
    }
    return prefixed_name();
  }

  BlankNode fresh_blank() {
    for (;;) {
      std::string label = "genid" + std::to_string(next_anon_++);
      if (!used_labels_.count(label)) {
        used_labels_.insert(label);
        return BlankNode{label};
      }
    }
  }

  Term blank_property_list() {
    expect('[');
    skip_ws();
    BlankNode b = fresh_blank();
    if (peek() != ']') predicate_object_list(b);
    skip_ws();
    expect(']');
    return b;
  }

  Term collection() {
    expect('(');
    std::vector<Term> items;
    skip_ws();
    while (peek() != ')') {
      if (at_end()) fail("unterminated collection");
      items.push_back(object());
      skip_ws();
    }
    get();
    if (items.empty()) return vocab::rdf_nil();
    std::vector<BlankNode> nodes;
    for (std::size_t i = 0; i < items.size(); ++i) nodes.push_back(fresh_blank());
    for (std::size_t i = 0; i < items.size(); ++i) {
      out_.insert(Triple{nodes[i], vocab::rdf_first(), items[i]});
      Term rest = i + 1 < items.size() ? Term(nodes[i + 1]) : Term(vocab::rdf_nil());
      out_.insert(Triple{nodes[i], vocab::rdf_rest(), rest});
    }
    return nodes.front();
  }

  // -- terms ---------------------------------------------------------------

  Iri iri() {
    if (peek() == '<') return iriref();
    if (strict_) fail("expected IRI");
    return prefixed_name();
  }

  Iri make_iri(std::string raw) {
    if (Iri::is_absolute(raw)) return Iri(std::move(raw));
    if (strict_) fail("relative IRI not allowed in N-Triples: '" + raw + "'");
    if (base_.empty()) fail("relative IRI '" + raw + "' without a base");
    return Iri(resolve_iri(base_, raw));
  }

  Iri iriref() {
    expect('<');
    std::string raw;
    for (;;) {
      if (at_end()) fail("unterminated IRI");
      char c = get();
      if (c == '>') break;
      if (c == '\\') {
        char e = get();
        if (e == 'u') {
          append_utf8(raw, hex(4));
        } else if (e == 'U') {
          append_utf8(raw, hex(8));
        } else {
          fail("invalid escape in IRI");
        }
      } else if (c == ' ' || c == '\n' || c == '<' || c == '"' || c == '{' || c == '}' || c == '|' ||
                 c == '^' || c == '`') {
        fail(std::string("invalid character in IRI: '") + c + "'");
      } else {
        raw += c;
      }
    }
    return make_iri(std::move(raw));
  }

  static bool is_name_start(char c) {
    auto u = static_cast<unsigned char>(c);
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || u >= 0x80;
  }
  static bool is_name_char(char c) {
    return is_name_start(c) || (c >= '0' && c <= '9') || c == '-';
  }

  Iri prefixed_name() {
    if (strict_) fail("prefixed names are not allowed in N-Triples");
    std::string prefix;
    while (!at_end() && peek() != ':') {
      char c = peek();
      if (!(is_name_char(c) || c == '.')) fail(std::string("unexpected character '") + c + "'");
      prefix += get();
    }
    expect(':');
    auto it = prefixes_.find(prefix);
    if (it == prefixes_.end()) fail("undeclared prefix '" + prefix + "'");
    std::string local;
    for (;;) {
      char c = peek();
      if (at_end()) break;
      if (is_name_char(c) || c == ':' || (c >= '0' && c <= '9')) {
        local += get();
      } else if (c == '.') {
        // A dot may not end a local name.
        char n = peek(1);
        if (is_name_char(n) || n == ':' || n == '.' || n == '%' || n == '\\') {
          local += get();
        } else {
          break;
        }
      } else if (c == '%') {
        local += get();
        for (int i = 0; i < 2; ++i) {
          if (!std::isxdigit(static_cast<unsigned char>(peek()))) fail("malformed percent escape");
          local += get();
        }
      } else if (c == '\\') {
        get();
        char e = get();
        if (std::string_view("_~.-!$&'()*+,;=/?#@%").find(e) == std::string_view::npos) {
          fail("invalid local name escape");
        }
        local += e;
      } else {
        break;
      }
    }
    return make_iri(it->second + local);
  }

  BlankNode blank_label() {
    expect('_');
    expect(':');
    std::string label;
    while (!at_end()) {
      char c = peek();
      if (is_name_char(c) || (c >= '0' && c <= '9')) {
        label += get();
      } else if (c == '.' && (is_name_char(peek(1)) || (peek(1) >= '0' && peek(1) <= '9'))) {
        label += get();
      } else {
        break;
      }
    }
    if (label.empty()) fail("empty blank node label");
    used_labels_.insert(label);
    return BlankNode{label};
  }

  std::uint32_t hex(int digits) {
    std::uint32_t v = 0;
    for (int i = 0; i < digits; ++i) {
      char c = get();
      v <<= 4;
      if (c >= '0' && c <= '9') {
        v |= static_cast<std::uint32_t>(c - '0');
      } else if (c >= 'a' && c <= 'f') {
        v |= static_cast<std::uint32_t>(c - 'a' + 10);
      } else if (c >= 'A' && c <= 'F') {
        v |= static_cast<std::uint32_t>(c - 'A' + 10);
      } else {
        fail("invalid hex digit");
      }
    }
    return v;
  }

  void string_escape(std::string& out) {
    char e = get();
    switch (e) {
      case 't': out += '\t'; break;
      case 'b': out += '\b'; break;
      case 'n': out += '\n'; break;
      case 'r': out += '\r'; break;
      case 'f': out += '\f'; break;
      case '"': out += '"'; break;
      case '\'': out += '\''; break;
      case '\\': out += '\\'; break;
      case 'u': append_utf8(out, hex(4)); break;
      case 'U': append_utf8(out, hex(8)); break;
      default: fail(std::string("invalid string escape '\\") + e + "'");
    }
  }

  Literal literal() {
    char q = peek();
    if (strict_ && q != '"') fail("expected '\"'");
    std::string lex;
    bool long_form = !strict_ && peek(1) == q && peek(2) == q;
    if (long_form) {
      advance(3);
      for (;;) {
        if (at_end()) fail("unterminated long string");
        if (peek() == q && peek(1) == q && peek(2) == q) {
          // Up to two extra quotes may precede the closing delimiter.
          if (peek(3) != q) {
            advance(3);
            break;
          }
          lex += get();
          continue;
        }
        char c = get();
        if (c == '\\') {
          string_escape(lex);
        } else {
          lex += c;
        }
      }
    } else {
      get();
      for (;;) {
        if (at_end()) fail("unterminated string");
        char c = get();
        if (c == q) break;
        if (c == '\n' || c == '\r') fail("newline in string literal");
        if (c == '\\') {
          string_escape(lex);
        } else {
          lex += c;
        }
      }
    }
    Literal lit{std::move(lex), "", std::nullopt};
    if (peek() == '@') {
      get();
      std::string lang;
      while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '-')) {
        lang += get();
      }
      if (lang.empty()) fail("empty language tag");
      lit.language = std::move(lang);
    } else if (peek() == '^' && peek(1) == '^') {
      advance(2);
      Iri dt = iri();
      // xsd:string is the implicit datatype of simple literals.
      if (dt != vocab::xsd_string()) lit.datatype = std::move(dt);
    }
    return lit;
  }

  Literal numeric() {
    std::string lex;
    if (peek() == '+' || peek() == '-') lex += get();
    bool dot = false;
    bool exp = false;
    while (!at_end()) {
      char c = peek();
      if (c >= '0' && c <= '9') {
        lex += get();
      } else if (c == '.' && !dot && !exp && peek(1) >= '0' && peek(1) <= '9') {
        dot = true;
        lex += get();
      } else if ((c == 'e' || c == 'E') && !exp) {
        exp = true;
        lex += get();
        if (peek() == '+' || peek() == '-') lex += get();
      } else {
        break;
      }
    }
    bool has_digit = lex.find_first_of("0123456789") != std::string::npos;
    if (!has_digit) fail("malformed number");
    const Iri& dt = exp ? vocab::xsd_double() : dot ? vocab::xsd_decimal() : vocab::xsd_integer();
    return Literal{std::move(lex), "", dt};
  }
};

inline std::string escape_literal(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out;
}

inline bool safe_local_name(std::string_view s) {
  if (s.empty()) return false;
  auto start = [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  };
  if (!start(s[0])) return false;
  for (char c : s) {
    if (!start(c) && !(c >= '0' && c <= '9') && c != '-') return false;
  }
  return true;
}

}  // namespace detail

/// Parses an N-Triples or Turtle document. Prefixed names and relative IRIs
/// are expanded; anonymous blank nodes get document-scoped "genidN" labels.
inline TripleSet parse_rdf(std::string_view text, RdfSyntax syntax,
                           std::optional<Iri> base = std::nullopt) {
  return detail::RdfParser(text, syntax, std::move(base)).parse();
}

inline std::string term_to_ntriples(const Term& t) {
  if (auto iri = std::get_if<Iri>(&t)) return "<" + iri->str() + ">";
  if (auto b = std::get_if<BlankNode>(&t)) return "_:" + b->label;
  const auto& lit = std::get<Literal>(t);
  std::string s = "\"" + detail::escape_literal(lit.lexical) + "\"";
  if (!lit.language.empty()) {
    s += "@" + lit.language;
  } else if (lit.datatype) {
    s += "^^<" + lit.datatype->str() + ">";
  }
  return s;
}

/// One statement per line, in TripleSet order.
inline std::string write_ntriples(const TripleSet& doc) {
  std::string out;
  for (const auto& t : doc) {
    out += term_to_ntriples(t.subject);
    out += ' ';
    out += term_to_ntriples(t.predicate);
    out += ' ';
    out += term_to_ntriples(t.object);
    out += " .\n";
  }
  return out;
}

/// Prefix name -> namespace IRI.
using PrefixMap = std::map<std::string, std::string>;

inline PrefixMap standard_prefixes() {
  return {{"rdf", std::string(vocab::rdf)},   {"rdfs", std::string(vocab::rdfs)},
          {"owl", std::string(vocab::owl)},   {"xsd", std::string(vocab::xsd)},
          {"skos", std::string(vocab::skos)}, {"dct", std::string(vocab::dct)}};
}

/// Turtle output grouped by subject. IRIs are abbreviated with `prefixes`
/// when the remainder is a plain local name; the output is deterministic.
inline std::string write_turtle(const TripleSet& doc, const PrefixMap& prefixes = standard_prefixes()) {
  auto abbreviate = [&](const Iri& iri) -> std::string {
    std::string best;
    std::size_t best_len = 0;
    for (const auto& [name, ns] : prefixes) {
      if (ns.size() > best_len && iri.str().size() > ns.size() &&
          iri.str().compare(0, ns.size(), ns) == 0 &&
          detail::safe_local_name(std::string_view(iri.str()).substr(ns.size()))) {
        best = name + ":" + iri.str().substr(ns.size());
        best_len = ns.size();
      }
    }
    return best.empty() ? "<" + iri.str() + ">" : best;
  };
  auto term = [&](const Term& t, bool predicate_position) -> std::string {
    if (auto iri = std::get_if<Iri>(&t)) {
      if (predicate_position && *iri == vocab::rdf_type()) return "a";
      return abbreviate(*iri);
    }
    if (auto lit = std::get_if<Literal>(&t); lit && lit->datatype && lit->language.empty()) {
      return "\"" + detail::escape_literal(lit->lexical) + "\"^^" + abbreviate(*lit->datatype);
    }
    return term_to_ntriples(t);
  };

  std::ostringstream os;
  for (const auto& [name, ns] : prefixes) os << "@prefix " << name << ": <" << ns << "> .\n";
  if (!prefixes.empty()) os << "\n";

  const Term* current = nullptr;
  const Iri* current_pred = nullptr;
  for (const auto& t : doc) {
    if (current && *current == t.subject) {
      if (*current_pred == t.predicate) {
        os << " ,\n        " << term(t.object, false);
      } else {
        os << " ;\n    " << term(t.predicate, true) << " " << term(t.object, false);
      }
    } else {
      if (current) os << " .\n\n";
      os << term(t.subject, false) << "\n    " << term(t.predicate, true) << " " << term(t.object, false);
    }
    current = &t.subject;
    current_pred = &t.predicate;
  }
  if (current) os << " .\n";
  return os.str();
}

}  // namespace ovdiff
