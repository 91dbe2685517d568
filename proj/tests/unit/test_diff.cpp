#include <doctest.h>

#include "aicard/card_json.hpp"
#include "aicard/diff.hpp"
#include "testkit.hpp"

using namespace aicard;

namespace {

AICard fixture() { return parseCardJson(testkit::readFile(testkit::sourcePath("fixtures/proctify.aicard.json"))); }

ChangeSet unite(const ChangeSet& a, const ChangeSet& b) {
  ChangeSet u = a;
  u.added.insert(u.added.end(), b.added.begin(), b.added.end());
  u.removed.insert(u.removed.end(), b.removed.begin(), b.removed.end());
  u.modified.insert(u.modified.end(), b.modified.begin(), b.modified.end());
  return u;
}

}  // namespace

TEST_SUITE("diff") {
  TEST_CASE("identical cards give an empty change set") {
    CHECK(diffCards(fixture(), fixture()).empty());
  }

  TEST_CASE("single score edit") {
    AICard b = fixture();
    b.quality[0].score = 0.92;
    ChangeSet cs = diffCards(fixture(), b);
    REQUIRE(cs.size() == 1);
    REQUIRE(cs.modified.size() == 1);
    CHECK(cs.modified[0].path == "quality[Accuracy].score");
    CHECK(cs.modified[0].oldValue == 0.9);
    CHECK(cs.modified[0].newValue == 0.92);
  }

  TEST_CASE("new risk entry is one addition under the risk list") {
    AICard b = fixture();
    RiskEntry r;
    r.id = "https://example.org/proctify/risks/new";
    r.label = "New";
    r.impacts = {{ImpactArea::Society, "Trust"}};
    b.riskProfile.risks.push_back(r);
    ChangeSet cs = diffCards(fixture(), b);
    REQUIRE(cs.size() == 1);
    REQUIRE(cs.added.size() == 1);
    CHECK(cs.added[0].path.rfind("riskProfile.risks[", 0) == 0);
    CHECK(applyChangeSet(fixture(), cs) == b);
  }

  TEST_CASE("bracket keys are escaped") {
    AICard a = fixture(), b = fixture();
    b.general.aiTechniques.push_back("odd]key\\x");
    canonicalize(b);
    ChangeSet cs = diffCards(a, b);
    REQUIRE(cs.added.size() == 1);
    CHECK(cs.added[0].path == "general.aiTechniques[odd\\]key\\\\x]");
    CHECK(applyChangeSet(a, cs) == b);
  }

  TEST_CASE("substantial-modification examples") {
    CHECK_FALSE(isSubstantialModification(ChangeSet{}).substantial);

    AICard b = fixture();
    b.intendedUse.purpose = "Grading essays";
    auto verdict = isSubstantialModification(diffCards(fixture(), b));
    CHECK(verdict.substantial);
    CHECK(verdict.triggers == std::vector<std::string>{"intendedUse.purpose"});

    AICard c = fixture();
    c.meta.contact = "new@proctify.example";
    CHECK_FALSE(isSubstantialModification(diffCards(fixture(), c)).substantial);
  }

  TEST_CASE("each path family triggers") {
    AICard a = fixture();
    AICard m = a;
    m.general.modality.kind = Modality::EmbeddedInProduct;
    CHECK(isSubstantialModification(diffCards(a, m)).substantial);
    AICard h = a;
    h.humanInvolvement->automationLevel = AutomationLevel::FullyAutonomous;
    CHECK(isSubstantialModification(diffCards(a, h)).substantial);
    AICard s = a;
    s.riskProfile.summary[ImpactArea::Environment] = {};
    CHECK(isSubstantialModification(diffCards(a, s)).substantial);
    AICard q = a;
    q.quality[1].score = 0.7;
    CHECK_FALSE(isSubstantialModification(diffCards(a, q)).substantial);
    CHECK(substantialPathFamilies().size() == 4);
  }

  TEST_CASE("diff is empty exactly for equal cards and replays") {
    testkit::Rng rng(3);
    for (int i = 0; i < 200; ++i) {
      AICard a = testkit::randomCard(rng);
      AICard b = testkit::coin(rng, 0.3) ? testkit::randomCard(rng) : testkit::mutateCard(rng, a);
      ChangeSet cs = diffCards(a, b);
      CHECK(cs.empty() == (a == b));
      CHECK(applyChangeSet(a, cs) == b);
      CHECK(diffCards(b, b).empty());
    }
  }

  TEST_CASE("heuristic is monotone under union") {
    testkit::Rng rng(4);
    for (int i = 0; i < 200; ++i) {
      AICard base = testkit::randomCard(rng);
      ChangeSet x = diffCards(base, testkit::mutateCard(rng, base));
      ChangeSet y = diffCards(base, testkit::mutateCard(rng, testkit::mutateCard(rng, base)));
      bool sx = isSubstantialModification(x).substantial;
      bool sy = isSubstantialModification(y).substantial;
      CHECK(isSubstantialModification(unite(x, y)).substantial == (sx || sy));
    }
  }

  TEST_CASE("json form") {
    AICard b = fixture();
    b.quality[0].score = 0.92;
    auto j = changeSetToJson(diffCards(fixture(), b));
    CHECK(j["modified"][0]["path"] == "quality[Accuracy].score");
    CHECK(j["added"].empty());
  }
}
