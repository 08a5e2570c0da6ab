#include <gtest/gtest.h>

#include <atomic>
#include <functional>
#include <random>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "ovdiff/embedding_http.hpp"
#include "test_support.hpp"

using namespace ovdiff;

namespace {

TokenName tok(std::vector<std::string> t) { return TokenName{std::move(t)}; }

/// Plain recursive edit distance, memoized; no shared code with the library.
std::size_t brute_levenshtein(const std::string& a, const std::string& b) {
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
  std::function<std::size_t(std::size_t, std::size_t)> d = [&](std::size_t i, std::size_t j) -> std::size_t {
    if (i == 0) return j;
    if (j == 0) return i;
    auto key = std::pair{i, j};
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::size_t best = std::min({d(i - 1, j) + 1, d(i, j - 1) + 1, d(i - 1, j - 1) + (a[i - 1] == b[j - 1] ? 0u : 1u)});
    return memo[key] = best;
  };
  return d(a.size(), b.size());
}

/// Serves canned vectors; unknown texts get a zero vector of the same length.
class StubProvider : public EmbeddingProvider {
 public:
  std::map<std::string, std::vector<double>> table;
  std::atomic<int> calls{0};
  std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) override {
    ++calls;
    std::vector<std::vector<double>> out;
    for (const auto& t : texts) {
      auto it = table.find(t);
      out.push_back(it == table.end() ? std::vector<double>(3, 0.0) : it->second);
    }
    return out;
  }
};

}  // namespace

TEST(NormalizeNameTest, Examples) {
  EXPECT_EQ(normalize_name("ConferenceVenuePlace").tokens, (std::vector<std::string>{"conference", "venue", "place"}));
  EXPECT_EQ(normalize_name("Conference_hall").tokens, (std::vector<std::string>{"conference", "hall"}));
  EXPECT_TRUE(normalize_name("").tokens.empty());
  EXPECT_EQ(normalize_name("isWrittenBy").tokens, (std::vector<std::string>{"is", "written", "by"}));
  EXPECT_EQ(normalize_name("has-authors  list").tokens, (std::vector<std::string>{"has", "authors", "list"}));
  EXPECT_EQ(normalize_name("HTTPServer2Go").tokens, (std::vector<std::string>{"http", "server", "2", "go"}));
  EXPECT_TRUE(normalize_name("__--  ").tokens.empty());
}

TEST(ExactScoreTest, Examples) {
  EXPECT_EQ(exact_score(normalize_name("Paper"), normalize_name("Paper")), 1.0);
  EXPECT_EQ(exact_score(normalize_name("writtenBy"), normalize_name("isWrittenBy")), 0.0);
  EXPECT_EQ(exact_score(normalize_name("Conference_hall"), normalize_name("ConferenceHall")), 1.0);
}

TEST(EditScoreTest, Examples) {
  EXPECT_EQ(edit_score(tok({"paper"}), tok({"paper"})), 1.0);
  EXPECT_EQ(edit_score(tok({"a"}), tok({"b"})), 0.0);
  EXPECT_EQ(edit_score(tok({}), tok({})), 1.0);
  std::string a = "written by", b = "is written by";
  double expected = 1.0 - static_cast<double>(brute_levenshtein(a, b)) / static_cast<double>(b.size());
  EXPECT_DOUBLE_EQ(edit_score(normalize_name("written by"), normalize_name("is written by")), expected);
}

TEST(EditScoreTest, LevenshteinAgreesWithBruteForce) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 300; ++i) {
    auto word = [&] {
      std::string s;
      std::size_t n = rng() % 9;
      for (std::size_t k = 0; k < n; ++k) s += static_cast<char>('a' + rng() % 4);
      return s;
    };
    std::string a = word(), b = word();
    ASSERT_EQ(levenshtein(a, b), brute_levenshtein(a, b)) << a << " / " << b;
  }
}

TEST(JaccardScoreTest, Examples) {
  EXPECT_EQ(jaccard_score(tok({"a", "b"}), tok({"b", "a"})), 1.0);
  EXPECT_EQ(jaccard_score(tok({"a"}), tok({"b"})), 0.0);
  EXPECT_EQ(jaccard_score(tok({}), tok({})), 1.0);
  EXPECT_DOUBLE_EQ(jaccard_score(tok({"conference", "venue", "place"}), tok({"conference", "hall"})), 0.25);
}

TEST(SynonymTest, ScoreAndSymmetry) {
  SynonymTable t;
  t.add("ConferenceVenuePlace", "Conference_hall");
  EXPECT_EQ(synonym_score("ConferenceVenuePlace", "Conference_hall", t, 0.95), 0.95);
  EXPECT_EQ(synonym_score("Conference_hall", "ConferenceVenuePlace", t, 0.95), 0.95);
  EXPECT_EQ(synonym_score("conference venue place", "ConferenceHall", t, 0.95), 0.95);
  EXPECT_EQ(synonym_score("Paper", "Conference_hall", t, 0.95), 0.0);

  std::mt19937_64 rng(8);
  SynonymTable r;
  std::vector<std::string> names;
  for (int i = 0; i < 30; ++i) names.push_back("Name" + std::string(1, static_cast<char>('A' + i % 26)) + std::to_string(i));
  for (int i = 0; i < 40; ++i) r.add(names[rng() % names.size()], names[rng() % names.size()]);
  for (int i = 0; i < 100; ++i) {
    const auto& a = names[rng() % names.size()];
    const auto& b = names[rng() % names.size()];
    EXPECT_EQ(synonym_score(a, b, r, 0.95), synonym_score(b, a, r, 0.95));
  }
}

TEST(SynonymTest, TableIo) {
  SynonymTable t;
  t.add("b", "a");
  t.add("ConferenceVenuePlace", "Conference_hall");
  EXPECT_EQ(read_synonym_table(write_synonym_table(t)), t);
  EXPECT_EQ(read_synonym_table("# c\n\nb\ta\r\nConference_hall\tConferenceVenuePlace\n"), t);
  EXPECT_THROW(read_synonym_table("no tab here\n"), FormatError);
  EXPECT_EQ(t.synonyms_of("ConferenceHall"), std::set<std::string>{"ConferenceVenuePlace"});
}

TEST(CosineTest, Values) {
  std::vector<double> a{1, 2, 3}, b{4, 5, 6}, o{0, 0, 1}, x{1, 0, 0};
  double dot = 1 * 4 + 2 * 5 + 3 * 6;
  double expected = dot / (std::sqrt(14.0) * std::sqrt(77.0));
  EXPECT_NEAR(cosine_similarity(a, b), expected, 1e-12);
  EXPECT_NEAR(cosine_similarity(a, a), 1.0, 1e-6);
  EXPECT_EQ(cosine_similarity(o, x), 0.0);
  std::vector<double> neg{-1, 0, 0};
  EXPECT_EQ(cosine_similarity(x, neg), 0.0);
  std::vector<double> shorter{1, 2};
  EXPECT_THROW(cosine_similarity(a, shorter), ShapeError);
}

TEST(EmbeddingTest, StubProviderAndCache) {
  auto stub = std::make_shared<StubProvider>();
  stub->table = {{"paper", {1, 2, 3}}, {"article", {4, 5, 6}}, {"x", {1, 0, 0}}, {"y", {0, 1, 0}}};
  EmbeddingCache cache(stub, 2, 2);
  cache.prefetch({"paper", "article", "x", "y", "paper"});
  EXPECT_EQ(cache.size(), 4u);
  int after_prefetch = stub->calls;
  EXPECT_EQ(after_prefetch, 2);  // two batches of two
  EXPECT_NEAR(embedding_score("paper", "paper", cache), 1.0, 1e-6);
  EXPECT_EQ(embedding_score("x", "y", cache), 0.0);
  EXPECT_NEAR(embedding_score("paper", "article", cache), 32.0 / (std::sqrt(14.0) * std::sqrt(77.0)), 1e-12);
  EXPECT_EQ(stub->calls, after_prefetch);
}

TEST(EmbeddingTest, ShapeMismatch) {
  struct Bad : EmbeddingProvider {
    std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) override {
      std::vector<std::vector<double>> out;
      for (std::size_t i = 0; i < texts.size(); ++i) out.push_back(std::vector<double>(i + 1, 1.0));
      return out;
    }
  };
  EmbeddingCache cache(std::make_shared<Bad>());
  cache.prefetch({"a", "b"});
  EXPECT_THROW(embedding_score("a", "b", cache), ShapeError);
  struct Short : EmbeddingProvider {
    std::vector<std::vector<double>> embed(const std::vector<std::string>&) override { return {}; }
  };
  EmbeddingCache empty(std::make_shared<Short>());
  EXPECT_THROW(empty.prefetch({"a"}), ShapeError);
}

namespace {

/// Local HTTP server speaking the embedding protocol.
class StubServer {
 public:
  explicit StubServer(int status = 200) {
    server_.Post("/embed", [status](const httplib::Request& req, httplib::Response& res) {
      if (status != 200) {
        res.status = status;
        return;
      }
      auto body = nlohmann::json::parse(req.body);
      nlohmann::json vectors = nlohmann::json::array();
      for (const auto& t : body.at("texts")) {
        std::string s = t.get<std::string>();
        vectors.push_back({static_cast<double>(s.size()), s.empty() ? 0.0 : static_cast<double>(s[0]), 1.0});
      }
      res.set_content(nlohmann::json{{"vectors", vectors}}.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/embed"; }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace

TEST(HttpEmbeddingTest, RoundTripThroughServer) {
  StubServer server;
  auto provider = std::make_shared<HttpEmbeddingProvider>(server.url(), 5);
  auto v = provider->embed({"ab", "xyz"});
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0], (std::vector<double>{2, 'a', 1}));
  EXPECT_EQ(v[1], (std::vector<double>{3, 'x', 1}));

  EmbeddingCache cache(provider);
  MatcherConfig cfg;
  cfg.scorers = {Scorer::Embedding};
  Matcher m(cfg, {}, std::make_shared<EmbeddingCache>(provider));
  double expected = cosine_similarity(v[0], v[1]);
  EXPECT_DOUBLE_EQ(std::min(expected, kMaxNonExact), m.score_names("ab", "xyz"));
}

TEST(HttpEmbeddingTest, Errors) {
  StubServer failing(500);
  std::string url = failing.url();
  EXPECT_THROW(HttpEmbeddingProvider(url, 5).embed({"a"}), ProviderError);
  EXPECT_THROW(HttpEmbeddingProvider("https://example.org/embed"), ProviderError);
  EXPECT_THROW(HttpEmbeddingProvider("not a url"), ProviderError);
  // Nothing listens on port 9 of the loopback interface.
  EXPECT_THROW(HttpEmbeddingProvider("http://127.0.0.1:9/embed", 2).embed({"a"}), ProviderError);
}

TEST(MatcherTest, CombinedScore) {
  SynonymTable syn;
  syn.add("ConferenceVenuePlace", "Conference_hall");
  MatcherConfig cfg;
  cfg.scorers = {Scorer::Synonym};
  Matcher m(cfg, syn);
  EXPECT_EQ(m.score_names("Paper", "paper"), 1.0);
  EXPECT_EQ(m.score_names("ConferenceVenuePlace", "Conference_hall"), 0.95);
  EXPECT_EQ(m.score_names("writtenBy", "isWrittenBy"), 0.0);

  Matcher lexical(MatcherConfig{});
  double s = lexical.score_names("writtenBy", "isWrittenBy");
  EXPECT_GT(s, 0.0);
  EXPECT_LT(s, 1.0);
  EXPECT_EQ(s, std::max(edit_score(normalize_name("writtenBy"), normalize_name("isWrittenBy")),
                        jaccard_score(normalize_name("writtenBy"), normalize_name("isWrittenBy"))));
}

TEST(MatcherTest, OneOnlyForIdenticalNames) {
  // Tokens reordered: jaccard is 1 but the names differ.
  Matcher m(MatcherConfig{});
  EXPECT_EQ(m.score_names("PaperReview", "ReviewPaper"), kMaxNonExact);
  EXPECT_THROW(Matcher(MatcherConfig{{Scorer::Embedding}, 0.95, {}}), Error);
  EXPECT_THROW(Matcher(MatcherConfig{{Scorer::Synonym}, 1.0, {}}), Error);
  EXPECT_THROW(scorer_from_name("fuzzy"), Error);
}

TEST(MatcherTest, PinnedSubjectAreaTopic) {
  ovdiff::testing::PinnedScorer pinned;
  pinned.pin("SubjectArea", "Topic", 0.92);
  Entity a{Iri("http://cmt#SubjectArea"), EntityKind::Class, {}};
  Entity b{Iri("http://conference#Topic"), EntityKind::Class, {}};
  EXPECT_EQ(pinned(a, b), 0.92);
}

TEST(MatcherTest, RangeSymmetryDeterminism) {
  auto cmt = extract_entities(ovdiff::testing::load_rdf("cmt.ttl"));
  auto conf = extract_entities(ovdiff::testing::load_rdf("conference.ttl"));
  Matcher m(MatcherConfig{});
  std::vector<Entity> as(cmt.begin(), cmt.end()), bs(conf.begin(), conf.end());
  for (std::size_t i = 0; i < as.size(); i += 3) {
    for (std::size_t j = 0; j < bs.size(); j += 2) {
      double s = m(as[i], bs[j]);
      ASSERT_GE(s, 0.0);
      ASSERT_LE(s, 1.0);
      ASSERT_EQ(s, m(bs[j], as[i]));
      ASSERT_EQ(s, m(as[i], bs[j]));
      ASSERT_EQ(s == 1.0, normalize_name(display_name(as[i])) == normalize_name(display_name(bs[j])));
    }
  }
}
