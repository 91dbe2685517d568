#include <doctest.h>

#include <algorithm>

#include "aicard/card_json.hpp"
#include "aicard/rules.hpp"
#include "testkit.hpp"

using namespace aicard;

namespace {

AICard fixture() { return parseCardJson(testkit::readFile(testkit::sourcePath("fixtures/proctify.aicard.json"))); }

UsePolicy fixturePolicy() {
  return policyFromJson(nlohmann::json::parse(testkit::readFile(testkit::sourcePath("fixtures/proctify.policy.json"))));
}

RuleError::Kind loadErrorKind(std::string_view text) {
  try {
    loadRuleBase(text);
  } catch (const RuleError& e) {
    return e.kind();
  }
  FAIL("no error");
  return RuleError::Kind::SyntaxError;
}

int maxRank(const IntendedUse& use, const std::vector<RiskClassRule>& rules) {
  int best = severityRank(RiskTier::MinimalRisk);
  for (const auto& r : rules) {
    bool all = std::all_of(r.conditions.begin(), r.conditions.end(),
                           [&](const FieldCondition& c) { return conditionHolds(c, use); });
    if (all) best = std::max(best, severityRank(r.tier));
  }
  return best;
}

}  // namespace

TEST_SUITE("rules") {
  TEST_CASE("fixture is high risk under the education rule") {
    auto r = classify(fixture().intendedUse, defaultRuleBase());
    CHECK((r.tier == RiskTier::HighRisk));
    REQUIRE_FALSE(r.matchedRules.empty());
    CHECK(r.matchedRules[0].ruleId == "annex3-3d-education-proctoring");
    CHECK(r.matchedRules[0].citation.find("Annex III point 3") != std::string::npos);
    CHECK_FALSE(r.matchedRules[0].explanation.empty());
  }

  TEST_CASE("social scoring is unacceptable") {
    IntendedUse u{"Public administration", "Social scoring of citizens for benefit eligibility", "Scoring",
                  "Municipality", {"Citizens"}};
    CHECK((classify(u, defaultRuleBase()).tier == RiskTier::Unacceptable));
  }

  TEST_CASE("no match is minimal risk") {
    IntendedUse u{"Retail", "Recommending products", "Ranking", "Shop", {"Customers"}};
    auto r = classify(u, defaultRuleBase());
    CHECK((r.tier == RiskTier::MinimalRisk));
    CHECK(r.matchedRules.empty());
  }

  TEST_CASE("matching is whole-word and case-insensitive") {
    CHECK(containsWords("Online EXAMS for students", "exams"));
    CHECK(containsWords("a social  scoring tool", "social scoring"));
    CHECK_FALSE(containsWords("examsheet", "exams"));
    CHECK(containsWords("pre-exams", "pre"));
    CHECK_FALSE(containsWords("a smart tool", "art"));
    IntendedUse u{"Education", "x", "y", "Educational Institutions", {"Adults", "Children"}};
    CHECK(conditionHolds({UseField::Deployer, MatchKind::Exact, {"educational institutions"}}, u));
    CHECK_FALSE(conditionHolds({UseField::Deployer, MatchKind::Exact, {"educational"}}, u));
    CHECK(conditionHolds({UseField::Subject, MatchKind::Keywords, {"children"}}, u));
    CHECK(conditionHolds({UseField::Domain, MatchKind::Regex, {"^edu"}}, u));
  }

  TEST_CASE("rule file errors") {
    CHECK((loadErrorKind("tier = HighRisk") == RuleError::Kind::SyntaxError));
    CHECK((loadErrorKind("[rule.a]\ntier = Severe\ncondition = domain keywords \"x\"") == RuleError::Kind::SyntaxError));
    CHECK((loadErrorKind("[rule.a]\ntier = HighRisk\ncondition = domain keywords \"x\"\n"
                         "[rule.a]\ntier = HighRisk\ncondition = domain keywords \"y\"") ==
           RuleError::Kind::DuplicateRuleId));
    CHECK((loadErrorKind("[rule.a]\ntier = HighRisk\ncondition = domain regex \"([\"") == RuleError::Kind::InvalidRegex));
    try {
      loadRuleBase("[rule.a]\ntier = HighRisk\n\ncondition = nope keywords \"x\"");
      FAIL("no error");
    } catch (const RuleError& e) {
      CHECK(e.line() == 4);
    }
  }

  TEST_CASE("shipped rule file equals the embedded rule base") {
    CHECK(testkit::readFile(testkit::sourcePath("data/default.rules")) == std::string(defaultRuleBaseText()));
    auto again = loadRuleBase(serializeRuleBase(defaultRuleBase()));
    CHECK(again == defaultRuleBase());
  }

  TEST_CASE("tier is the most severe matching rule") {
    testkit::Rng rng(53);
    for (int i = 0; i < 300; ++i) {
      std::vector<RiskClassRule> rules;
      for (std::size_t k = testkit::pick(rng, 6); k > 0; --k) rules.push_back(testkit::randomRule(rng, "r" + std::to_string(k)));
      IntendedUse use = testkit::randomUse(rng);
      auto r = classify(use, rules);
      CHECK(severityRank(r.tier) == maxRank(use, rules));
    }
  }

  TEST_CASE("adding a rule never lowers the tier") {
    testkit::Rng rng(59);
    for (int i = 0; i < 300; ++i) {
      std::vector<RiskClassRule> rules;
      for (std::size_t k = testkit::pick(rng, 5); k > 0; --k) rules.push_back(testkit::randomRule(rng, "r" + std::to_string(k)));
      IntendedUse use = testkit::randomUse(rng);
      int before = severityRank(classify(use, rules).tier);
      rules.push_back(testkit::randomRule(rng, "extra"));
      CHECK(severityRank(classify(use, rules).tier) >= before);
    }
  }

  TEST_CASE("explanations are sound and rule order is irrelevant") {
    testkit::Rng rng(61);
    for (int i = 0; i < 200; ++i) {
      std::vector<RiskClassRule> rules;
      for (std::size_t k = testkit::pick(rng, 6); k > 0; --k) rules.push_back(testkit::randomRule(rng, "r" + std::to_string(k)));
      IntendedUse use = testkit::randomUse(rng);
      auto r = classify(use, rules);
      for (const auto& m : r.matchedRules) {
        auto rule = std::find_if(rules.begin(), rules.end(), [&](const RiskClassRule& x) { return x.id == m.ruleId; });
        REQUIRE(rule != rules.end());
        CHECK(m.explanation.size() == rule->conditions.size());
        for (const auto& c : rule->conditions) CHECK(conditionHolds(c, use));
      }
      auto shuffled = rules;
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      CHECK(classificationToJson(classify(use, shuffled)) == classificationToJson(r));
    }
  }

  TEST_CASE("fixture policy") {
    UsePolicy p = fixturePolicy();
    IntendedUse use = fixture().intendedUse;
    CHECK((evaluatePolicy(p, use, "deploy").verdict == Verdict::Permitted));
    CHECK((evaluatePolicy(p, use, "modify").verdict == Verdict::Permitted));
    CHECK((evaluatePolicy(p, use, "sell").verdict == Verdict::Unspecified));
    use.subjects.push_back("Children under 16");
    auto d = evaluatePolicy(p, use, "deploy");
    CHECK((d.verdict == Verdict::Prohibited));
    REQUIRE(d.matchedStatements.size() == 2);
    CHECK(d.matchedStatements[0].prohibition);
    CHECK_FALSE(d.matchedStatements[1].prohibition);
  }

  TEST_CASE("policy json errors and round trip") {
    CHECK_THROWS_AS(policyFromJson(nlohmann::json::parse(R"({"permissions": []})")), RuleError);
    CHECK_THROWS_AS(policyFromJson(nlohmann::json::parse(R"({"allow": []})")), RuleError);
    CHECK_THROWS_AS(policyFromJson(nlohmann::json::parse(
                        R"({"permissions": [{"action": "a", "constraints": [{"field": "domain", "exact": "x", "regex": "y"}]}]})")),
                    RuleError);
    UsePolicy p = fixturePolicy();
    UsePolicy q = policyFromJson(nlohmann::json::parse(policyToJson(p).dump()));
    CHECK(q.permissions == p.permissions);
    CHECK(q.prohibitions == p.prohibitions);
  }

  TEST_CASE("deny overrides") {
    testkit::Rng rng(67);
    for (int i = 0; i < 300; ++i) {
      UsePolicy p = testkit::randomPolicy(rng);
      IntendedUse use = testkit::randomUse(rng);
      for (const std::string action : {"deploy", "modify"}) {
        auto holds = [&](const UseStatement& s) {
          return s.action == action && std::all_of(s.constraints.begin(), s.constraints.end(),
                                                   [&](const FieldCondition& c) { return conditionHolds(c, use); });
        };
        bool denied = std::any_of(p.prohibitions.begin(), p.prohibitions.end(), holds);
        bool allowed = std::any_of(p.permissions.begin(), p.permissions.end(), holds);
        Verdict expected = denied ? Verdict::Prohibited : allowed ? Verdict::Permitted : Verdict::Unspecified;
        CHECK((evaluatePolicy(p, use, action).verdict == expected));
      }
    }
  }
}
