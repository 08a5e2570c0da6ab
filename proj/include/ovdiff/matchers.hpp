#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ovdiff/entities.hpp"
#include "ovdiff/error.hpp"

namespace ovdiff {

/// Lowercase word tokens of a name. Never contains empty tokens.
struct TokenName {
  std::vector<std::string> tokens;

  std::string joined() const {
    std::string s;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (i) s += ' ';
      s += tokens[i];
    }
    return s;
  }
  friend bool operator==(const TokenName&, const TokenName&) = default;
};

/// Splits on camelCase and acronym boundaries, digit/letter boundaries and any
/// non-alphanumeric ASCII character, then lowercases.
inline TokenName normalize_name(std::string_view name) {
  enum class Cls { Sep, Lower, Upper, Digit };
  auto cls = [](char c) {
    if (c >= 'a' && c <= 'z') return Cls::Lower;
    if (c >= 'A' && c <= 'Z') return Cls::Upper;
    if (c >= '0' && c <= '9') return Cls::Digit;
    if (static_cast<unsigned char>(c) >= 0x80) return Cls::Lower;
    return Cls::Sep;
  };
  TokenName out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.tokens.push_back(std::move(cur));
    cur.clear();
  };
  for (std::size_t i = 0; i < name.size(); ++i) {
    char c = name[i];
    Cls k = cls(c);
    if (k == Cls::Sep) {
      flush();
      continue;
    }
    if (!cur.empty()) {
      Cls prev = cls(name[i - 1]);
      bool boundary = false;
      if (k == Cls::Upper && prev == Cls::Lower) boundary = true;
      if ((k == Cls::Digit) != (prev == Cls::Digit)) boundary = true;
      // "HTTPServer" -> http, server
      if (k == Cls::Upper && prev == Cls::Upper && i + 1 < name.size() && cls(name[i + 1]) == Cls::Lower) {
        boundary = true;
      }
      if (boundary) flush();
    }
    cur += k == Cls::Upper ? static_cast<char>(c - 'A' + 'a') : c;
  }
  flush();
  return out;
}

inline double exact_score(const TokenName& a, const TokenName& b) { return a == b ? 1.0 : 0.0; }

inline std::size_t levenshtein(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

/// 1 - distance / max length over the space-joined token strings.
inline double edit_score(const TokenName& a, const TokenName& b) {
  std::string ja = a.joined(), jb = b.joined();
  std::size_t longest = std::max(ja.size(), jb.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(levenshtein(ja, jb)) / static_cast<double>(longest);
}

inline double jaccard_score(const TokenName& a, const TokenName& b) {
  std::set<std::string> sa(a.tokens.begin(), a.tokens.end());
  std::set<std::string> sb(b.tokens.begin(), b.tokens.end());
  if (sa.empty() && sb.empty()) return 1.0;
  std::size_t inter = 0;
  for (const auto& t : sa) inter += sb.count(t);
  return static_cast<double>(inter) / static_cast<double>(sa.size() + sb.size() - inter);
}

/// Unordered pairs of display names that denote the same concept. Lookups
/// compare names after normalization, so "Conference_hall" and
/// "ConferenceHall" are the same key.
class SynonymTable {
 public:
  void add(const std::string& a, const std::string& b) {
    pairs_.insert(a < b ? std::pair{a, b} : std::pair{b, a});
    std::string ka = key(a), kb = key(b);
    keys_.insert(ka < kb ? std::pair{ka, kb} : std::pair{kb, ka});
    adjacent_[ka].insert(b);
    adjacent_[kb].insert(a);
  }

  bool contains(std::string_view a, std::string_view b) const {
    std::string ka = key(a), kb = key(b);
    return keys_.count(ka < kb ? std::pair{ka, kb} : std::pair{kb, ka}) > 0;
  }

  /// Display names paired with `name` (itself included if paired with itself).
  std::set<std::string> synonyms_of(std::string_view name) const {
    auto it = adjacent_.find(key(name));
    return it == adjacent_.end() ? std::set<std::string>{} : it->second;
  }

  std::size_t size() const noexcept { return pairs_.size(); }
  bool empty() const noexcept { return pairs_.empty(); }
  const std::set<std::pair<std::string, std::string>>& pairs() const noexcept { return pairs_; }

  friend bool operator==(const SynonymTable& a, const SynonymTable& b) { return a.pairs_ == b.pairs_; }

  static std::string key(std::string_view name) { return normalize_name(name).joined(); }

 private:
  std::set<std::pair<std::string, std::string>> pairs_;
  std::set<std::pair<std::string, std::string>> keys_;
  std::map<std::string, std::set<std::string>> adjacent_;
};

/// `value` if {a, b} is in the table, else 0.
inline double synonym_score(std::string_view a, std::string_view b, const SynonymTable& table, double value) {
  return table.contains(a, b) ? value : 0.0;
}

/// Tab-separated name pairs, one per line; '#' starts a comment line.
inline SynonymTable read_synonym_table(std::string_view text) {
  SynonymTable t;
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw FormatError("synonym table line " + std::to_string(line_no) + ": expected two tab-separated names");
    }
    t.add(std::string(line.substr(0, tab)), std::string(line.substr(tab + 1)));
  }
  return t;
}

inline std::string write_synonym_table(const SynonymTable& t) {
  std::string out;
  for (const auto& [a, b] : t.pairs()) out += a + "\t" + b + "\n";
  return out;
}

// -- embeddings -------------------------------------------------------------

/// Turns texts into vectors, one per input, in input order.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) = 0;
};

/// Cosine similarity clamped to [0, 1].
inline double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ShapeError("embedding lengths differ: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 || nb == 0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

/// Memoizes provider vectors. prefetch() issues batched requests with at most
/// `parallelism` in flight; lookups of unseen texts fall back to single calls.
class EmbeddingCache {
 public:
  explicit EmbeddingCache(std::shared_ptr<EmbeddingProvider> provider, std::size_t batch_size = 64,
                          std::size_t parallelism = 4)
      : provider_(std::move(provider)),
        batch_size_(std::max<std::size_t>(1, batch_size)),
        parallelism_(std::max<std::size_t>(1, parallelism)) {}

  void prefetch(const std::vector<std::string>& texts) {
    std::vector<std::string> missing;
    {
      std::lock_guard lock(mu_);
      std::set<std::string> seen;
      for (const auto& t : texts) {
        if (!vectors_.count(t) && seen.insert(t).second) missing.push_back(t);
      }
    }
    std::vector<std::vector<std::string>> batches;
    for (std::size_t i = 0; i < missing.size(); i += batch_size_) {
      batches.emplace_back(missing.begin() + static_cast<std::ptrdiff_t>(i),
                           missing.begin() + static_cast<std::ptrdiff_t>(std::min(missing.size(), i + batch_size_)));
    }
    for (std::size_t i = 0; i < batches.size(); i += parallelism_) {
      std::vector<std::future<std::vector<std::vector<double>>>> inflight;
      std::size_t end = std::min(batches.size(), i + parallelism_);
      for (std::size_t b = i; b < end; ++b) {
        inflight.push_back(std::async(std::launch::async, [this, &batches, b] { return fetch(batches[b]); }));
      }
      for (std::size_t b = i; b < end; ++b) store(batches[b], inflight[b - i].get());
    }
  }

  std::vector<double> vector(const std::string& text) {
    {
      std::lock_guard lock(mu_);
      if (auto it = vectors_.find(text); it != vectors_.end()) return it->second;
    }
    std::vector<std::string> one{text};
    auto v = fetch(one);
    store(one, v);
    return v.front();
  }

  std::size_t size() const {
    std::lock_guard lock(mu_);
    return vectors_.size();
  }

 private:
  std::vector<std::vector<double>> fetch(const std::vector<std::string>& texts) {
    auto v = provider_->embed(texts);
    if (v.size() != texts.size()) {
      throw ShapeError("provider returned " + std::to_string(v.size()) + " vectors for " +
                       std::to_string(texts.size()) + " texts");
    }
    return v;
  }
  void store(const std::vector<std::string>& texts, std::vector<std::vector<double>> vecs) {
    std::lock_guard lock(mu_);
    for (std::size_t i = 0; i < texts.size(); ++i) vectors_.emplace(texts[i], std::move(vecs[i]));
  }

  std::shared_ptr<EmbeddingProvider> provider_;
  std::size_t batch_size_;
  std::size_t parallelism_;
  mutable std::mutex mu_;
  std::map<std::string, std::vector<double>> vectors_;
};

inline double embedding_score(const std::string& a, const std::string& b, EmbeddingCache& cache) {
  auto va = cache.vector(a);
  auto vb = cache.vector(b);
  return cosine_similarity(va, vb);
}

// -- combined scoring -------------------------------------------------------

enum class Scorer { Exact, Edit, Jaccard, Synonym, Embedding };

inline Scorer scorer_from_name(std::string_view name) {
  if (name == "exact") return Scorer::Exact;
  if (name == "edit") return Scorer::Edit;
  if (name == "jaccard") return Scorer::Jaccard;
  if (name == "synonym") return Scorer::Synonym;
  if (name == "embedding") return Scorer::Embedding;
  throw Error("unknown matcher '" + std::string(name) + "'");
}

/// Upper bound for every non-exact signal; only name identity reaches 1.
inline constexpr double kMaxNonExact = 0.999999;

struct MatcherConfig {
  std::set<Scorer> scorers{Scorer::Exact, Scorer::Edit, Scorer::Jaccard};
  double synonym_value = 0.95;
  std::optional<std::string> embedding_endpoint;

  void validate() const {
    if (!(synonym_value > 0.0 && synonym_value < 1.0)) {
      throw Error("synonym score must lie in (0, 1)");
    }
  }
};

/// Scores an entity pair by the maximum of the enabled scorers. Safe to call
/// from several threads once constructed.
class Matcher {
 public:
  explicit Matcher(MatcherConfig cfg, SynonymTable synonyms = {}, std::shared_ptr<EmbeddingCache> embeddings = nullptr)
      : cfg_(std::move(cfg)), synonyms_(std::move(synonyms)), embeddings_(std::move(embeddings)) {
    cfg_.scorers.insert(Scorer::Exact);
    cfg_.validate();
    if (cfg_.scorers.count(Scorer::Embedding) && !embeddings_) {
      throw Error("embedding scorer enabled without a provider");
    }
  }

  const MatcherConfig& config() const noexcept { return cfg_; }

  /// Fetches embeddings for every display name up front (no-op otherwise).
  void prepare(const EntitySet& a, const EntitySet& b) const {
    if (!embeddings_ || !cfg_.scorers.count(Scorer::Embedding)) return;
    std::vector<std::string> names;
    for (const auto& e : a) names.push_back(display_name(e));
    for (const auto& e : b) names.push_back(display_name(e));
    embeddings_->prefetch(names);
  }

  double operator()(const Entity& e1, const Entity& e2) const { return score_names(display_name(e1), display_name(e2)); }

  double score_names(const std::string& n1, const std::string& n2) const {
    TokenName t1 = normalize_name(n1), t2 = normalize_name(n2);
    if (exact_score(t1, t2) == 1.0) return 1.0;
    double best = 0.0;
    for (Scorer s : cfg_.scorers) {
      switch (s) {
        case Scorer::Exact: break;
        case Scorer::Edit: best = std::max(best, edit_score(t1, t2)); break;
        case Scorer::Jaccard: best = std::max(best, jaccard_score(t1, t2)); break;
        case Scorer::Synonym: best = std::max(best, synonym_score(n1, n2, synonyms_, cfg_.synonym_value)); break;
        case Scorer::Embedding: best = std::max(best, embedding_score(n1, n2, *embeddings_)); break;
      }
    }
    return std::min(best, kMaxNonExact);
  }

 private:
  MatcherConfig cfg_;
  SynonymTable synonyms_;
  std::shared_ptr<EmbeddingCache> embeddings_;
};

}  // namespace ovdiff
