#include <doctest.h>

#include "aicard/card_graph.hpp"
#include "aicard/card_json.hpp"
#include "aicard/shapes.hpp"
#include "aicard/turtle.hpp"
#include "testkit.hpp"

using namespace aicard;

namespace {

AICard fixture() { return parseCardJson(testkit::readFile(testkit::sourcePath("fixtures/proctify.aicard.json"))); }

const std::string kEx = "http://v.org/";

NodeShape personShape() {
  PropertyConstraint name;
  name.path = kEx + "name";
  name.minCount = 1;
  name.maxCount = 1;
  name.datatype = ns::kXsdString;
  return NodeShape{kEx + "PersonShape", kEx + "Person", {name}, Severity::Violation};
}

}  // namespace

TEST_SUITE("shapes") {
  TEST_CASE("fixture conforms to the built-in shapes") {
    auto report = validate(cardToGraph(fixture()), builtinCardShapes());
    CHECK(report.conforms);
    CHECK(report.results.empty());
  }

  TEST_CASE("missing purpose is one violation at hasPurpose") {
    AICard c = fixture();
    c.intendedUse.purpose.clear();
    auto report = validate(cardToGraph(c, false), builtinCardShapes());
    CHECK_FALSE(report.conforms);
    REQUIRE(report.results.size() == 1);
    CHECK(report.results[0].path == std::string(kVocab) + "hasPurpose");
    CHECK(report.results[0].constraintKind == "minCount");
  }

  TEST_CASE("missing quality dimension is reported") {
    AICard c = fixture();
    c.quality.erase(c.quality.begin() + 1);
    auto report = validate(cardToGraph(c), builtinCardShapes());
    REQUIRE(report.results.size() == 1);
    CHECK(report.results[0].constraintKind == "hasValue");
  }

  TEST_CASE("absent dpia is only a warning") {
    AICard c = fixture();
    c.dataProcessing->dpiaConducted.reset();
    auto report = validate(cardToGraph(c), builtinCardShapes());
    CHECK(report.conforms);
    CHECK((report.count(Severity::Warning) == 1));
  }

  TEST_CASE("each facet") {
    Graph g;
    const Term alice = Term::iri(kEx + "alice");
    g.add(alice, Term::iri(ns::kRdfType), Term::iri(kEx + "Person"));
    g.add(alice, Term::iri(kEx + "name"), Term::literal("5", ns::kXsdInteger));
    g.add(alice, Term::iri(kEx + "name"), Term::literal("Alice"));
    auto report = validate(g, {personShape()});
    CHECK_FALSE(report.conforms);
    REQUIRE(report.results.size() == 2);
    CHECK(report.results[0].constraintKind == "datatype");
    CHECK(report.results[1].constraintKind == "maxCount");

    NodeShape s = personShape();
    s.constraints[0] = PropertyConstraint{kEx + "name", {}, {}, {}, NodeKind::IriNode, {}, "^A", {}};
    report = validate(g, {s});
    CHECK(report.results.size() == 3);  // two node kinds, one pattern
  }

  TEST_CASE("nodes without the target class are ignored") {
    Graph g;
    g.add(Term::iri(kEx + "bob"), Term::iri(kEx + "name"), Term::integer(1));
    CHECK(validate(g, {personShape()}).conforms);
  }

  TEST_CASE("malformed shapes and bad regexes") {
    NodeShape s = personShape();
    s.constraints[0].minCount = 3;
    CHECK_THROWS_AS(checkShape(s), ShapeError);
    s = personShape();
    s.constraints.push_back(s.constraints[0]);
    CHECK_THROWS_AS(validate(Graph{}, {s}), ShapeError);
    s = personShape();
    s.constraints[0] = PropertyConstraint{kEx + "name", {}, {}, {}, {}, {}, {}, {}};
    CHECK_THROWS_AS(checkShape(s), ShapeError);
    s = personShape();
    s.constraints[0].pattern = "([";
    try {
      validate(Graph{}, {s});
      FAIL("no error");
    } catch (const ShapeError& e) {
      CHECK((e.kind() == ShapeError::Kind::InvalidRegex));
      CHECK(e.path() == kEx + "name");
    }
  }

  TEST_CASE("engine matches the brute-force checker") {
    testkit::Rng rng(17);
    for (int i = 0; i < 300; ++i) {
      Graph g = testkit::randomShapeGraph(rng);
      std::vector<NodeShape> shapes{testkit::randomShape(rng)};
      if (testkit::coin(rng)) shapes.push_back(testkit::randomShape(rng));
      auto report = validate(g, shapes);
      auto expected = testkit::oracleValidate(g, shapes);
      CHECK(testkit::resultKeys(report) == expected);
    }
  }

  TEST_CASE("violations are sound and deterministic") {
    testkit::Rng rng(19);
    for (int i = 0; i < 100; ++i) {
      Graph g = testkit::randomShapeGraph(rng);
      std::vector<NodeShape> shapes{testkit::randomShape(rng)};
      auto a = validate(g, shapes);
      auto b = validate(g, shapes);
      CHECK(reportToJson(a) == reportToJson(b));
      for (const auto& r : a.results) {
        CHECK(g.contains(Triple(r.focusNode, Term::iri(ns::kRdfType), Term::iri(shapes[0].targetClass))));
      }
    }
  }

  TEST_CASE("raising a minCount never removes violations") {
    testkit::Rng rng(23);
    for (int i = 0; i < 100; ++i) {
      Graph g = testkit::randomShapeGraph(rng);
      NodeShape s = testkit::randomShape(rng);
      NodeShape stricter = s;
      auto& pc = stricter.constraints[0];
      pc.minCount = pc.minCount.value_or(0) + 1;
      if (pc.maxCount && *pc.maxCount < *pc.minCount) pc.maxCount = pc.minCount;
      if (s.constraints[0].maxCount != pc.maxCount) continue;
      CHECK(validate(g, {stricter}).results.size() >= validate(g, {s}).results.size());
    }
  }

  TEST_CASE("shape graph round trip") {
    auto shapes = builtinCardShapes();
    auto back = shapesFromGraph(parseTurtle(serializeTurtle(shapesToGraph(shapes))));
    normalizeShapes(back);
    normalizeShapes(shapes);
    CHECK(back == shapes);

    auto shipped = shapesFromGraph(parseTurtle(testkit::readFile(testkit::sourcePath("data/card.shapes.ttl"))));
    normalizeShapes(shipped);
    CHECK(shipped == shapes);

    testkit::Rng rng(29);
    for (int i = 0; i < 100; ++i) {
      std::vector<NodeShape> random{testkit::randomShape(rng)};
      random[0].id += "x";
      std::vector<NodeShape> parsed = shapesFromGraph(parseTurtle(serializeTurtle(shapesToGraph(random))));
      normalizeShapes(parsed);
      normalizeShapes(random);
      CHECK(parsed == random);
    }
  }

  TEST_CASE("report renderings") {
    AICard c = fixture();
    c.intendedUse.purpose.clear();
    auto report = validate(cardToGraph(c, false), builtinCardShapes());
    auto j = reportToJson(report);
    CHECK(j["conforms"] == false);
    CHECK(j["violations"] == 1);
    CHECK(reportToText(report).find("hasPurpose") != std::string::npos);
  }
}
