#include <gtest/gtest.h>

#include <filesystem>

#include <unistd.h>

#include "test_support.hpp"

using namespace ovdiff;
using ovdiff::testing::classes;
using ovdiff::testing::data_path;
using ovdiff::testing::load_rdf;

namespace {

EntitySet numbered_entities(std::size_t n) {
  EntitySet s;
  for (std::size_t i = 0; i < n; ++i) s.insert({Iri("http://x.org/e#E" + std::to_string(i)), EntityKind::Class, {}});
  return s;
}

std::size_t triples_touching(const TripleSet& doc, const Iri& iri) {
  std::size_t n = 0;
  for (const auto& t : doc) n += t.subject == Term(iri) || t.predicate == iri || t.object == Term(iri);
  return n;
}

bool mentions(const TripleSet& doc, const Iri& iri) { return triples_touching(doc, iri) > 0; }

struct Cmt {
  TripleSet src = load_rdf("cmt.ttl");
  TripleSet tgt = load_rdf("conference.ttl");
  Alignment ref = read_alignment(read_file(data_path("cmt-conference.xml")));
};

std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("ovdiff_testbed_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST(AssignChangesTest, AllRemain) {
  auto plan = assign_changes(numbered_entities(10), 42, {1, 0, 0, 0});
  EXPECT_EQ(plan.remain.size(), 10u);
  EXPECT_TRUE(plan.update.empty() && plan.add.empty() && plan.del.empty());
}

TEST(AssignChangesTest, DeterministicDisjointCovering) {
  auto entities = numbered_entities(200);
  auto a = assign_changes(entities, 42, kDefaultProportions);
  EXPECT_EQ(a, assign_changes(entities, 42, kDefaultProportions));
  EXPECT_NE(a, assign_changes(entities, 43, kDefaultProportions));
  std::map<Iri, int> seen;
  for (const auto& e : a.remain) ++seen[e];
  for (const auto& [e, n] : a.update) ++seen[e];
  for (const auto& e : a.add) ++seen[e];
  for (const auto& e : a.del) ++seen[e];
  EXPECT_EQ(seen.size(), 200u);
  for (const auto& [e, n] : seen) EXPECT_EQ(n, 1);
}

TEST(AssignChangesTest, QuotasWithinOne) {
  auto entities = numbered_entities(1000);
  for (const Proportions& p : {Proportions{0.25, 0.25, 0.25, 0.25}, Proportions{0.1, 0.2, 0.3, 0.4},
                               Proportions{1.0 / 3, 1.0 / 3, 1.0 / 3, 0.0}, Proportions{0.5, 0.5, 0, 0}}) {
    auto plan = assign_changes(entities, 42, p);
    std::array<std::size_t, 4> got{plan.remain.size(), plan.update.size(), plan.add.size(), plan.del.size()};
    for (std::size_t i = 0; i < 4; ++i) {
      double want = p[i] * 1000;
      EXPECT_LE(std::abs(static_cast<double>(got[i]) - want), 1.0) << i;
    }
  }
  EXPECT_THROW(assign_changes(entities, 42, {0.5, 0.5, 0.5, 0}), Error);
  EXPECT_THROW(assign_changes(entities, 42, {1.5, -0.5, 0, 0}), Error);
}

TEST(AssignChangesTest, SmallQuotasSumToN) {
  for (std::size_t n = 0; n < 40; ++n) {
    auto q = category_quotas(n, {0.1, 0.2, 0.3, 0.4});
    EXPECT_EQ(q[0] + q[1] + q[2] + q[3], n);
    auto z = category_quotas(n, {0.5, 0.0, 0.5, 0.0});
    EXPECT_EQ(z[1], 0u);
    EXPECT_EQ(z[3], 0u);
  }
}

TEST(SynonymCorpusTest, Examples) {
  auto src = classes("http://a#", {"ConferenceVenuePlace", "Paper"});
  auto tgt = classes("http://b#", {"Conference_hall", "Paper"});
  EXPECT_TRUE(build_synonym_corpus(Alignment{}, src, tgt).empty());
  Alignment ref;
  ref.insert({Iri("http://a#ConferenceVenuePlace"), Iri("http://b#Conference_hall"), MappingRelation::Equivalence, 1.0});
  auto t = build_synonym_corpus(ref, src, tgt);
  EXPECT_EQ(t.size(), 1u);
  EXPECT_TRUE(t.contains("ConferenceVenuePlace", "Conference_hall"));

  ref.insert({Iri("http://a#Missing"), Iri("http://b#Paper"), MappingRelation::Equivalence, 1.0});
  std::vector<std::string> warnings;
  auto t2 = build_synonym_corpus(ref, src, tgt, &warnings);
  EXPECT_EQ(t2.size(), 1u);
  EXPECT_EQ(warnings.size(), 1u);

  Cmt cmt;
  EXPECT_LE(build_synonym_corpus(cmt.ref, cmt.src, cmt.tgt).size(), cmt.ref.size());
}

TEST(SynonymCorpusTest, AnnotationFallbackForCodes) {
  auto src = parse_rdf(R"(
    @prefix owl: <http://www.w3.org/2002/07/owl#> .
    @prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
    <http://obo/MA_0000001> a owl:Class ; rdfs:label "heart" .
  )",
                       RdfSyntax::Turtle);
  auto tgt = classes("http://b#", {"Cardiac_organ"});
  Alignment ref;
  ref.insert({Iri("http://obo/MA_0000001"), Iri("http://b#Cardiac_organ"), MappingRelation::Equivalence, 1.0});
  EXPECT_TRUE(build_synonym_corpus(ref, src, tgt).contains("heart", "Cardiac_organ"));
}

TEST(PlanUpdatesTest, SingleSynonymChosen) {
  auto doc = classes("http://a#", {"Chairman", "Paper"});
  auto entities = extract_entities(doc);
  ChangePlan plan;
  plan.remain.insert(Iri("http://a#Paper"));
  plan.update.emplace(Iri("http://a#Chairman"), "");
  SynonymTable t;
  t.add("Chairman", "Chair");
  auto named = plan_updates(plan, t, entities, doc);
  ASSERT_EQ(named.update.size(), 1u);
  EXPECT_EQ(named.update.at(Iri("http://a#Chairman")), "Chair");
  EXPECT_EQ(named.renames().at(Iri("http://a#Chairman")), Iri("http://a#Chair"));
}

TEST(PlanUpdatesTest, NoSynonymsReassignsEverything) {
  auto entities = numbered_entities(300);
  TripleSet doc;
  for (const auto& e : entities) doc.insert({e.iri, vocab::rdf_type(), vocab::owl_class()});
  auto plan = assign_changes(entities, 42, kDefaultProportions);
  auto before = plan;
  auto after = plan_updates(plan, SynonymTable{}, entities, doc);
  EXPECT_TRUE(after.update.empty());
  EXPECT_EQ(after.remain.size() + after.add.size() + after.del.size(), 300u);
  // Each of the three targets received some of the 75 re-assigned entities.
  EXPECT_GT(after.remain.size(), before.remain.size());
  EXPECT_GT(after.add.size(), before.add.size());
  EXPECT_GT(after.del.size(), before.del.size());
  EXPECT_EQ(after, plan_updates(plan, SynonymTable{}, entities, doc));
}

TEST(PlanUpdatesTest, RejectsNamesThatWouldCollide) {
  auto doc = classes("http://a#", {"Chairman", "Chair"});
  auto entities = extract_entities(doc);
  ChangePlan plan;
  plan.update.emplace(Iri("http://a#Chairman"), "");
  plan.remain.insert(Iri("http://a#Chair"));
  SynonymTable t;
  t.add("Chairman", "Chair");  // already the name of another entity
  auto named = plan_updates(plan, t, entities, doc);
  EXPECT_TRUE(named.update.empty());
}

TEST(DeriveVersionsTest, RuleA) {
  auto o_i = load_rdf("cmt.ttl");
  ChangePlan empty;
  EXPECT_EQ(derive_version_o(o_i, empty), o_i);
  EXPECT_EQ(derive_version_o_prime(o_i, empty), o_i);

  Iri x("http://cmt#Paper");
  std::size_t touching = triples_touching(o_i, x);
  ASSERT_GT(touching, 2u);
  ChangePlan plan;
  plan.add.insert(x);
  auto o = derive_version_o(o_i, plan);
  EXPECT_EQ(o.size(), o_i.size() - touching);
  EXPECT_FALSE(mentions(o, x));
  EXPECT_EQ(derive_version_o_prime(o_i, plan), o_i);
}

TEST(DeriveVersionsTest, RuleB) {
  auto o_i = load_rdf("cmt.ttl");
  Iri gone("http://cmt#Review"), old("http://cmt#writtenBy");
  ChangePlan plan;
  plan.del.insert(gone);
  plan.update.emplace(old, "isWrittenBy");
  Iri fresh("http://cmt#isWrittenBy");
  auto op = derive_version_o_prime(o_i, plan);
  EXPECT_EQ(op.size(), o_i.size() - triples_touching(o_i, gone));
  EXPECT_FALSE(mentions(op, gone));
  EXPECT_FALSE(mentions(op, old));
  // Every former position of the old IRI now holds the new one.
  std::size_t kept_old = 0;
  for (const auto& t : o_i) {
    bool touches_gone = t.subject == Term(gone) || t.predicate == gone || t.object == Term(gone);
    bool touches_old = t.subject == Term(old) || t.predicate == old || t.object == Term(old);
    if (touches_old && !touches_gone) ++kept_old;
  }
  EXPECT_EQ(triples_touching(op, fresh), kept_old);
}

TEST(VersionRefsTest, Examples) {
  ChangePlan all_remain;
  for (const auto& e : numbered_entities(5)) all_remain.remain.insert(e.iri);
  auto refs = emit_version_refs(all_remain);
  EXPECT_EQ(refs.remain.size(), 5u);
  for (const auto& m : refs.remain) EXPECT_EQ(m.entity1, m.entity2);
  EXPECT_TRUE(refs.update.empty() && refs.add.empty() && refs.del.empty());

  auto doc = classes("http://a#", {"Chairman", "Paper", "Gone", "Fresh"});
  ChangePlan plan;
  plan.remain.insert(Iri("http://a#Paper"));
  plan.update.emplace(Iri("http://a#Chairman"), "Chair");
  plan.del.insert(Iri("http://a#Gone"));
  plan.add.insert(Iri("http://a#Fresh"));
  auto r = emit_version_refs(plan);
  EXPECT_EQ(r.remain.size(), 1u);
  EXPECT_TRUE(r.update.contains(Iri("http://a#Chairman"), Iri("http://a#Chair")));
  EXPECT_EQ(r.add.size(), 1u);
  EXPECT_EQ(r.del.size(), 1u);
}

TEST(CrReferencesTest, Examples) {
  Cmt cmt;
  ChangePlan none;
  auto [a, b] = derive_cr_references(cmt.ref, none, IntermediateSide::Source);
  EXPECT_EQ(a, cmt.ref);
  EXPECT_EQ(b, cmt.ref);

  ChangePlan add_only;
  add_only.add.insert(Iri("http://cmt#Person"));
  auto [a2, b2] = derive_cr_references(cmt.ref, add_only, IntermediateSide::Source);
  EXPECT_EQ(b2, cmt.ref);
  EXPECT_EQ(a2.size(), cmt.ref.size() - 1);

  ChangePlan upd;
  upd.update.emplace(Iri("http://cmt#SubjectArea"), "Topic");
  auto [a3, b3] = derive_cr_references(cmt.ref, upd, IntermediateSide::Source);
  EXPECT_TRUE(b3.contains(Iri("http://cmt#Topic"), Iri("http://conference#Topic")));
  EXPECT_FALSE(b3.contains(Iri("http://cmt#SubjectArea"), Iri("http://conference#Topic")));
  EXPECT_TRUE(a3.contains(Iri("http://cmt#SubjectArea"), Iri("http://conference#Topic")));

  auto [a4, b4] = derive_cr_references(cmt.ref, none, IntermediateSide::Target);
  EXPECT_TRUE(a4.contains(Iri("http://conference#Topic"), Iri("http://cmt#SubjectArea")));
}

TEST(GenerateTest, CmtBundleIsDeterministic) {
  Cmt cmt;
  auto a = generate(cmt.src, cmt.tgt, cmt.ref, 42);
  auto b = generate(cmt.src, cmt.tgt, cmt.ref, 42);
  auto d1 = temp_dir("a"), d2 = temp_dir("b");
  write_bundle(a, d1);
  write_bundle(b, d2);
  for (const auto& entry : std::filesystem::directory_iterator(d1)) {
    EXPECT_EQ(read_file(entry.path().string()), read_file((d2 / entry.path().filename()).string()))
        << entry.path().filename();
  }
  EXPECT_EQ(a.plan, b.plan);
  EXPECT_NE(a.plan, generate(cmt.src, cmt.tgt, cmt.ref, 7).plan);
  std::filesystem::remove_all(d1);
  std::filesystem::remove_all(d2);
}

TEST(GenerateTest, CmtBundleInvariants) {
  Cmt cmt;
  auto b = generate(cmt.src, cmt.tgt, cmt.ref, 42);
  const auto& c = b.manifest.counts;
  auto n_o = count_entities(extract_entities(b.o));
  auto n_op = count_entities(extract_entities(b.o_prime));
  EXPECT_EQ(n_o, c.at("entities_o"));
  EXPECT_EQ(n_op, c.at("entities_o_prime"));
  EXPECT_EQ(n_o, c.at("entities_intermediate") - c.at("add"));
  EXPECT_EQ(n_o + n_op, 2 * (c.at("remain") + c.at("update")) + c.at("add") + c.at("delete"));
  EXPECT_GT(c.at("update"), 0u);

  for (const auto& e : b.refs.add) EXPECT_FALSE(mentions(b.o, e)) << e.str();
  for (const auto& e : b.refs.del) EXPECT_FALSE(mentions(b.o_prime, e)) << e.str();
  for (const auto& m : b.refs.update) EXPECT_FALSE(mentions(b.o_prime, m.entity1)) << m.entity1.str();

  // Cross-reference scopes agree with the recorded uncovered counts.
  auto scopes = restrict_scope(extract_entities(b.o), extract_entities(b.o_prime), {{b.r_or, b.r_oprime_r, "ref"}});
  EXPECT_EQ(scopes.scope1.size(), c.at("uncovered_o"));
  EXPECT_EQ(scopes.scope2.size(), c.at("uncovered_o_prime"));
  EXPECT_EQ(read_manifest(write_manifest(b.manifest)), b.manifest);
}

TEST(GenerateTest, SynonymMatcherRecoversReferences) {
  Cmt cmt;
  for (std::uint64_t seed : {42u, 1u, 2u, 3u}) {
    for (auto side : {IntermediateSide::Source, IntermediateSide::Target}) {
      auto b = generate(cmt.src, cmt.tgt, cmt.ref, seed, kDefaultProportions, side);
      MatcherConfig cfg;
      cfg.scorers = {Scorer::Synonym};
      auto r = diff(b.o, b.o_prime, Matcher(cfg, b.synonyms), OvParams{});
      EXPECT_EQ(r.remain.pairs(), b.refs.remain.pairs()) << seed;
      EXPECT_EQ(r.update.pairs(), b.refs.update.pairs()) << seed;
      EXPECT_EQ(r.add, b.refs.add) << seed;
      EXPECT_EQ(r.del, b.refs.del) << seed;
    }
  }
}

TEST(GenerateTest, TargetIntermediate) {
  Cmt cmt;
  auto b = generate(cmt.src, cmt.tgt, cmt.ref, 42, kDefaultProportions, IntermediateSide::Target);
  EXPECT_EQ(b.manifest.intermediate, "target");
  EXPECT_EQ(b.manifest.counts.at("entities_intermediate"), 79u);
  for (const auto& m : b.r_or) EXPECT_EQ(m.entity1.namespace_part(), "http://conference#");
}

TEST(SynonymCorpusTest, InternalPairsPruned) {
  auto entities = extract_entities(classes("http://a#", {"Conference", "Conference_volume", "Paper"}));
  SynonymTable t;
  t.add("Conference", "Conference_volume");
  t.add("Paper", "Article");
  auto pruned = prune_internal_synonyms(t, entities);
  EXPECT_EQ(pruned.size(), 1u);
  EXPECT_TRUE(pruned.contains("Paper", "Article"));
}
