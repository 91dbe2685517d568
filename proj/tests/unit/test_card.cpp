#include <doctest.h>

#include "aicard/card.hpp"
#include "aicard/card_json.hpp"
#include "testkit.hpp"

using namespace aicard;

namespace {

AICard fixture() { return parseCardJson(testkit::readFile(testkit::sourcePath("fixtures/proctify.aicard.json"))); }

CardJsonError::Kind jsonErrorKind(std::string_view text) {
  try {
    parseCardJson(text);
  } catch (const CardJsonError& e) {
    return e.kind();
  }
  FAIL("no error");
  return CardJsonError::Kind::JsonMalformed;
}

}  // namespace

TEST_SUITE("card") {
  TEST_CASE("enum spellings round trip") {
    for (auto v : allValues<ControlLevel>()) CHECK((enumFromString<ControlLevel>(aicard::toString(v)) == v));
    CHECK(enumNames<ControlLevel>().size() == 6);
    CHECK(enumNames<AutomationLevel>().size() == 5);
    CHECK(enumNames<Level>().size() == 5);
    CHECK_FALSE(enumFromString<Level>("Extreme"));
  }

  TEST_CASE("dates") {
    auto d = parseDate("2024-02-29");
    REQUIRE(d);
    CHECK(formatDate(*d) == "2024-02-29");
    CHECK_FALSE(parseDate("2023-02-29"));
    CHECK_FALSE(parseDate("2024-2-1"));
  }

  TEST_CASE("fixture is valid and describes the proctoring system") {
    AICard c = fixture();
    CHECK(checkCard(c).empty());
    CHECK(c.general.systemName == "Proctify");
    CHECK(c.components.size() == 2);
    CHECK(c.riskProfile.risks.size() == 4);
    CHECK((c.humanInvolvement->perActor.at(ActorRole::AISubject).controlLevel == ControlLevel::CanChallenge));
  }

  TEST_CASE("invariants are reported with paths") {
    AICard c = fixture();
    c.general.providers.clear();
    c.quality[0].score = 1.5;
    c.components[1].name = c.components[0].name;
    c.dataProcessing->personalDataCategories.clear();
    auto issues = checkCard(c);
    auto has = [&](const std::string& p) {
      return std::any_of(issues.begin(), issues.end(), [&](const CardIssue& i) { return i.path == p; });
    };
    CHECK(has("general.providers"));
    CHECK(has("quality[0].score"));
    CHECK(has("components[1].name"));
    CHECK(has("dataProcessing.personalDataCategories"));
    CHECK_THROWS_AS(requireValid(c), InvariantViolation);
  }

  TEST_CASE("future issuance date is reported only against a reference day") {
    AICard c = fixture();
    Date before{std::chrono::year{2024}, std::chrono::April, std::chrono::day{1}};
    CHECK(checkCard(c).empty());
    CHECK(checkCard(c, before).size() == 1);
  }

  TEST_CASE("canonicalize sorts and deduplicates sets") {
    AICard c = fixture();
    c.intendedUse.subjects = {"b", "a", "b"};
    c.riskProfile.risks[0].measures.push_back(c.riskProfile.risks[0].measures[0]);
    canonicalize(c);
    CHECK(c.intendedUse.subjects == std::vector<std::string>{"a", "b"});
    CHECK(c.riskProfile.risks[0].measures.size() == 2);
  }

  TEST_CASE("json serialization is deterministic and lossless") {
    AICard c = fixture();
    std::string once = serializeCardJson(c);
    CHECK(once.back() == '\n');
    CHECK(serializeCardJson(parseCardJson(once)) == once);
    CHECK(parseCardJson(once) == c);
  }

  TEST_CASE("json errors") {
    CHECK((jsonErrorKind("{ not json") == CardJsonError::Kind::JsonMalformed));
    CHECK((jsonErrorKind("[]") == CardJsonError::Kind::SchemaViolation));
    CHECK((jsonErrorKind("{}") == CardJsonError::Kind::SchemaViolation));
    CHECK((jsonErrorKind(R"({"meta": {}, "bogus": 1})") == CardJsonError::Kind::SchemaViolation));

    auto doc = nlohmann::ordered_json::parse(testkit::readFile(testkit::sourcePath("fixtures/proctify.aicard.json")));
    doc["humanInvolvement"]["subject"]["controlLevel"] = "CanVeto";
    try {
      cardFromJson(doc);
      FAIL("no error");
    } catch (const CardJsonError& e) {
      CHECK((e.kind() == CardJsonError::Kind::UnknownEnumValue));
      CHECK(e.path() == "humanInvolvement.subject.controlLevel");
      CHECK(e.detail() == "CanVeto");
    }
  }

  TEST_CASE("unknown nested keys move into extensions") {
    auto doc = nlohmann::ordered_json::parse(testkit::readFile(testkit::sourcePath("fixtures/proctify.aicard.json")));
    doc["general"]["futureField"] = "kept";
    AICard c = cardFromJson(doc);
    CHECK(c.extensions.dump().find("kept") != std::string::npos);
    AICard again = parseCardJson(serializeCardJson(c));
    CHECK(again == c);
  }

  TEST_CASE("blank card has every section") {
    AICard c = blankCard();
    CHECK(c.dataProcessing);
    CHECK(c.humanInvolvement);
    CHECK(c.quality.size() == 3);
    CHECK(parseCardJson(serializeCardJson(c)) == c);
  }

  TEST_CASE("random cards round trip through JSON") {
    testkit::Rng rng(2024);
    for (int i = 0; i < 200; ++i) {
      AICard c = testkit::randomCard(rng);
      REQUIRE(checkCard(c).empty());
      std::string text = serializeCardJson(c);
      CHECK(parseCardJson(text) == c);
      CHECK(cardFromJson(cardToJson(c)) == c);
    }
  }
}
