#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace ovdiff;

namespace {

const Iri kOld("http://cmt/v1");
const Iri kNew("http://cmt/v2");

std::size_t count_predicate(const TripleSet& doc, const Iri& p) {
  std::size_t n = 0;
  for (const auto& t : doc) n += t.predicate == p;
  return n;
}

}  // namespace

TEST(ChangelogTest, EmptyResult) {
  auto doc = parse_rdf(emit_changelog(OvResult{}, kOld, kNew), RdfSyntax::Turtle);
  ASSERT_EQ(doc.size(), 1u);
  EXPECT_TRUE(doc.contains({kNew, vocab::owl_prior_version(), kOld}));
}

TEST(ChangelogTest, OneDelete) {
  OvResult r;
  r.del.insert(Iri("http://cmt#Gone"));
  auto doc = parse_rdf(emit_changelog(r, kOld, kNew), RdfSyntax::Turtle);
  EXPECT_EQ(count_predicate(doc, vocab::owl_deprecated()), 1u);
  EXPECT_TRUE(doc.contains({Iri("http://cmt#Gone"), vocab::owl_deprecated(), Literal{"true", "", vocab::xsd_boolean()}}));
}

TEST(ChangelogTest, ParseBackCount) {
  auto cmt = ovdiff::testing::load_rdf("cmt.ttl");
  auto conf = ovdiff::testing::load_rdf("conference.ttl");
  auto ref = read_alignment(read_file(ovdiff::testing::data_path("cmt-conference.xml")));
  auto b = generate(cmt, conf, ref, 42);
  MatcherConfig cfg;
  cfg.scorers = {Scorer::Synonym};
  auto r = diff(b.o, b.o_prime, Matcher(cfg, b.synonyms), OvParams{});
  ASSERT_FALSE(r.update.empty() || r.add.empty() || r.del.empty());
  auto text = emit_changelog(r, kOld, kNew);
  auto doc = parse_rdf(text, RdfSyntax::Turtle);
  EXPECT_EQ(doc.size(), 1 + r.del.size() + r.update.size() + r.add.size());
  EXPECT_EQ(count_predicate(doc, vocab::dct_replaces()), r.update.size());
  EXPECT_EQ(count_predicate(doc, changelog_added_entity()), r.add.size());
  for (const auto& m : r.update) EXPECT_TRUE(doc.contains({m.entity2, vocab::dct_replaces(), m.entity1}));
  EXPECT_EQ(emit_changelog(r, kOld, kNew), text);
}

TEST(ChangelogTest, OntologyIri) {
  EXPECT_EQ(ontology_iri(ovdiff::testing::load_rdf("cmt.ttl")), std::optional<Iri>(Iri("http://cmt")));
  EXPECT_FALSE(ontology_iri(TripleSet{}).has_value());
}
