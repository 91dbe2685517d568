#include <doctest.h>

#include <map>
#include <set>

#include "aicard/card_graph.hpp"
#include "aicard/card_json.hpp"
#include "aicard/turtle.hpp"
#include "testkit.hpp"

using namespace aicard;

namespace {

AICard fixture() { return parseCardJson(testkit::readFile(testkit::sourcePath("fixtures/proctify.aicard.json"))); }

CardGraphError::Kind graphErrorKind(const Graph& g) {
  try {
    graphToCard(g);
  } catch (const CardGraphError& e) {
    return e.kind();
  }
  FAIL("no error");
  return CardGraphError::Kind::MalformedValue;
}

// Leaf and container paths of a card document, with list indexes written
// as [] and per-actor / per-area keys as *.
void collectPaths(const nlohmann::ordered_json& j, const std::string& path, std::set<std::string>& leaves,
                  std::set<std::string>& containers) {
  const bool keyed = path == "riskProfile.summary";
  if (j.is_object() && path != "extensions") {
    if (!path.empty()) containers.insert(path);
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (path.empty() && it.key() == "@contextIri") continue;
      std::string key = it.key();
      if (path == "humanInvolvement" && (key == "endUser" || key == "subject")) {
        containers.insert(path + "." + key);
        key = "*";
      }
      if (keyed) key = "*";
      collectPaths(it.value(), path.empty() ? key : path + "." + key, leaves, containers);
    }
    if (keyed) leaves.insert(path + ".*.area");
    return;
  }
  if (j.is_array() && !j.empty() && j.front().is_object()) {
    containers.insert(path);
    for (const auto& e : j) collectPaths(e, path + "[]", leaves, containers);
    return;
  }
  leaves.insert(path);
}

}  // namespace

TEST_SUITE("mapping") {
  TEST_CASE("fixture graph matches the shipped Turtle file") {
    Graph g = cardToGraph(fixture());
    CHECK(serializeTurtle(g) == testkit::readFile(testkit::sourcePath("fixtures/proctify.ttl")));
  }

  TEST_CASE("fixture graph gives back the subject's control level") {
    Graph g = parseTurtle(testkit::readFile(testkit::sourcePath("fixtures/proctify.ttl")));
    AICard c = graphToCard(g);
    CHECK((c.humanInvolvement->perActor.at(ActorRole::AISubject).controlLevel == ControlLevel::CanChallenge));
    CHECK(c == fixture());
  }

  TEST_CASE("node IRIs hang off the specification URL") {
    AICard c = fixture();
    CHECK(cardNodeIri(c, "system") == "https://example.org/proctify/aicard.ttl#system");
    c.meta.machineReadableSpecUrl += "#frag";
    CHECK(cardNodeIri(c, "system") == "https://example.org/proctify/aicard.ttl#system");
  }

  TEST_CASE("empty graph reports the missing system name") {
    try {
      graphToCard(Graph{});
      FAIL("no error");
    } catch (const CardGraphError& e) {
      CHECK((e.kind() == CardGraphError::Kind::MissingMandatory));
      CHECK(e.section() == "general");
      CHECK(e.field() == "systemName");
    }
  }

  TEST_CASE("graph errors") {
    Graph g = cardToGraph(fixture());
    const Term system = Term::iri(cardNodeIri(fixture(), "system"));

    Graph two = g;
    two.add(Term::iri("https://example.org/other#system"), Term::iri(ns::kRdfType), vocab("AISystem"));
    CHECK((graphErrorKind(two) == CardGraphError::Kind::MultipleSystems));

    Graph badLevel = g;
    Term risk = badLevel.objects(system, vocab("hasRisk")).front();
    for (const auto& o : badLevel.objects(risk, vocab("hasSeverity"))) badLevel.erase(Triple(risk, vocab("hasSeverity"), o));
    badLevel.add(risk, vocab("hasSeverity"), vocab("Extreme"));
    CHECK((graphErrorKind(badLevel) == CardGraphError::Kind::MalformedLevel));

    Graph noPublisher = g;
    for (const auto& t : noPublisher.match(std::nullopt, vocab("publisher"), std::nullopt)) noPublisher.erase(t);
    CHECK((graphErrorKind(noPublisher) == CardGraphError::Kind::MissingMandatory));

    // Content gaps are left to shape validation.
    Graph noPurpose = g;
    for (const auto& o : noPurpose.objects(system, vocab("hasPurpose"))) noPurpose.erase(Triple(system, vocab("hasPurpose"), o));
    CHECK(graphToCard(noPurpose).intendedUse.purpose.empty());
  }

  TEST_CASE("unmapped triples are reported, not fatal") {
    Graph g = cardToGraph(fixture());
    g.add(Term::iri("https://example.org/x"), Term::iri("https://example.org/p"), Term::literal("v"));
    std::vector<std::string> warnings;
    AICard c = graphToCard(g, &warnings);
    CHECK(c == fixture());
    CHECK(warnings.size() == 1);
  }

  TEST_CASE("invalid cards are refused unless the check is off") {
    AICard c = fixture();
    c.intendedUse.purpose.clear();
    CHECK_THROWS_AS(cardToGraph(c), InvariantViolation);
    Graph g = cardToGraph(c, false);
    CHECK(g.objects(Term::iri(cardNodeIri(c, "system")), vocab("hasPurpose")).empty());
  }

  TEST_CASE("random cards round trip through the graph and Turtle") {
    testkit::Rng rng(99);
    for (int i = 0; i < 200; ++i) {
      AICard c = testkit::randomCard(rng);
      Graph g = cardToGraph(c);
      CHECK(graphToCard(g) == c);
      Graph back = parseTurtle(serializeTurtle(g));
      CHECK(back == g);
      CHECK(graphToCard(back) == c);
    }
  }

  TEST_CASE("vocabulary table covers every field exactly once") {
    AICard c = fixture();
    c.quality[0].note = "n";
    c.extensions = {{"x", 1}};
    std::set<std::string> leaves, containers;
    collectPaths(cardToJson(c), "", leaves, containers);

    std::map<std::string, int> rows;
    for (const auto& e : vocabularyTable()) {
      ++rows[e.fieldPath];
      CHECK(isAbsoluteIri(std::string(kVocab) + e.term));
    }
    for (const auto& [path, n] : rows) {
      INFO(path);
      CHECK(n == 1);
      CHECK((leaves.count(path) + containers.count(path)) == 1);
    }
    for (const auto& leaf : leaves) {
      INFO(leaf);
      CHECK(rows.count(leaf) == 1);
    }
  }

  TEST_CASE("every predicate the mapping emits is documented") {
    std::set<std::string> documented;
    for (const auto& e : vocabularyTable()) documented.insert(std::string(kVocab) + e.term);
    for (const auto& t : vocabularyStructuralTerms()) documented.insert(std::string(kVocab) + t);
    documented.insert(ns::kRdfType);
    documented.insert(std::string(ns::kRdfs) + "label");
    testkit::Rng rng(5);
    for (int i = 0; i < 50; ++i) {
      Graph g = cardToGraph(testkit::randomCard(rng));
      for (const auto& t : g.triples()) {
        INFO(t.predicate.value());
        CHECK(documented.count(t.predicate.value()) == 1);
      }
    }
  }

  TEST_CASE("vocabulary document lists every row") {
    const std::string doc = testkit::readFile(testkit::sourcePath("docs/vocabulary.md"));
    for (const auto& e : vocabularyTable()) {
      INFO(e.fieldPath);
      CHECK(doc.find("| `" + e.fieldPath + "` | `aicard:" + e.term + "` |") != std::string::npos);
    }
    for (const auto& t : vocabularyStructuralTerms()) CHECK(doc.find("`aicard:" + t + "`") != std::string::npos);
    for (const auto& t : vocabularyClasses()) CHECK(doc.find("`aicard:" + t + "`") != std::string::npos);
  }
}
