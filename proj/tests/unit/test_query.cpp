#include <doctest.h>

#include <algorithm>

#include "aicard/card_graph.hpp"
#include "aicard/query.hpp"
#include "aicard/turtle.hpp"
#include "testkit.hpp"

using namespace aicard;

namespace {

Graph fixtureGraph() { return parseTurtle(testkit::readFile(testkit::sourcePath("fixtures/proctify.ttl"))); }

QueryError::Kind errorKind(std::string_view text) {
  try {
    parseRequest(text);
  } catch (const QueryError& e) {
    return e.kind();
  }
  FAIL("no error");
  return QueryError::Kind::SyntaxError;
}

Graph chain() {
  Graph g;
  for (int i = 0; i < 4; ++i) {
    g.add(Term::iri("http://e/n" + std::to_string(i)), Term::iri("http://e/next"),
          Term::iri("http://e/n" + std::to_string(i + 1)));
  }
  return g;
}

}  // namespace

TEST_SUITE("query") {
  TEST_CASE("parses select with prefixes, lists and filters") {
    auto q = parseSelect(R"(PREFIX e: <http://e/>
select distinct ?a ?c where {
  ?a e:next ?b ; e:next ?b2 .
  ?b e:next ?c .
  FILTER(?a != ?c)
})");
    CHECK(q.distinct);
    CHECK(q.projectedVars == std::vector<std::string>{"a", "c"});
    CHECK(q.where.size() == 3);
    CHECK(q.filters.size() == 1);
    CHECK_FALSE(q.filters[0].equal);
  }

  TEST_CASE("star projects every variable in order") {
    auto q = parseSelect("SELECT * { ?x <http://e/p> ?y . ?y <http://e/p> ?z }");
    CHECK(q.projectedVars == std::vector<std::string>{"x", "y", "z"});
  }

  TEST_CASE("parse errors") {
    CHECK((errorKind("SELECT ?x WHERE { ?x <http://e/p> }") == QueryError::Kind::SyntaxError));
    CHECK((errorKind("SELECT ?x WHERE { ?x zz:p ?y }") == QueryError::Kind::UndefinedPrefix));
    CHECK((errorKind("SELECT ?q WHERE { ?x <http://e/p> ?y }") == QueryError::Kind::InvalidQuery));
    CHECK((errorKind("INSERT { ?z <http://e/p> 1 } WHERE { ?x <http://e/p> ?y }") == QueryError::Kind::InvalidQuery));
    try {
      parseRequest("SELECT ?x WHERE {\n  ?x <http://e/p> }");
      FAIL("no error");
    } catch (const QueryError& e) {
      CHECK(e.line() == 2);
      CHECK(e.column() > 0);
    }
  }

  TEST_CASE("chain join") {
    auto q = parseSelect("SELECT ?a ?c { ?a <http://e/next> ?b . ?b <http://e/next> ?c }");
    auto rows = evaluateSelect(chain(), q);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].at("a") == Term::iri("http://e/n0"));
    CHECK(rows[2].at("c") == Term::iri("http://e/n4"));
  }

  TEST_CASE("no match gives no rows") {
    auto q = parseSelect("SELECT ?a { ?a <http://e/missing> ?b }");
    CHECK(evaluateSelect(chain(), q).empty());
  }

  TEST_CASE("blank nodes in patterns are constants") {
    Graph g;
    g.add(Term::blank("x"), Term::iri("http://e/p"), Term::literal("1"));
    g.add(Term::blank("y"), Term::iri("http://e/p"), Term::literal("2"));
    auto q = parseSelect("SELECT ?v { _:x <http://e/p> ?v }");
    auto rows = evaluateSelect(g, q);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].at("v") == Term::literal("1"));
  }

  TEST_CASE("fixture query returns the rights measures") {
    Graph g = fixtureGraph();
    auto q = parseSelect(testkit::readFile(testkit::sourcePath("fixtures/rights-measures.select")), g.prefixes());
    auto rows = evaluateSelect(g, q);
    CHECK(rows.size() == 3);
    auto text = solutionsToText(q.projectedVars, rows);
    CHECK(text.rfind("?m\t?label\n", 0) == 0);
    auto j = solutionsToJson(q.projectedVars, rows);
    CHECK(j["results"].size() == 3);
  }

  TEST_CASE("engine equals the enumeration oracle") {
    testkit::Rng rng(41);
    for (int i = 0; i < 200; ++i) {
      Graph g = testkit::randomSmallGraph(rng, 80);
      SelectQuery q = testkit::randomSelect(rng, 4);
      CHECK(testkit::engineRows(g, q) == testkit::oracleSelect(g, q));
    }
  }

  TEST_CASE("pattern order does not change the answer") {
    testkit::Rng rng(43);
    for (int i = 0; i < 200; ++i) {
      Graph g = testkit::randomSmallGraph(rng, 80);
      SelectQuery q = testkit::randomSelect(rng, 4);
      SelectQuery r = q;
      std::shuffle(r.where.begin(), r.where.end(), rng);
      CHECK(testkit::engineRows(g, q) == testkit::engineRows(g, r));
    }
  }

  TEST_CASE("distinct is idempotent and a subset") {
    testkit::Rng rng(47);
    for (int i = 0; i < 100; ++i) {
      Graph g = testkit::randomSmallGraph(rng, 80);
      SelectQuery q = testkit::randomSelect(rng, 3);
      q.distinct = false;
      auto all = testkit::engineRows(g, q);
      q.distinct = true;
      auto once = testkit::engineRows(g, q);
      auto dedup = all;
      dedup.erase(std::unique(dedup.begin(), dedup.end()), dedup.end());
      CHECK(once == dedup);
    }
  }

  TEST_CASE("update uses the pre-state") {
    Graph g = chain();
    auto u = parseUpdate(
        "DELETE { ?a <http://e/next> ?b } INSERT { ?b <http://e/next> ?a } WHERE { ?a <http://e/next> ?b }");
    auto r = applyUpdate(g, u);
    CHECK(r.stats.deleted == 4);
    CHECK(r.stats.inserted == 4);
    CHECK(r.graph.size() == 4);
    CHECK(r.graph.contains(Triple(Term::iri("http://e/n1"), Term::iri("http://e/next"), Term::iri("http://e/n0"))));
    CHECK(g == chain());
  }

  TEST_CASE("insert counts only new triples") {
    auto u = parseUpdate("INSERT { ?a <http://e/next> ?b . ?a <http://e/tag> 1 } WHERE { ?a <http://e/next> ?b }");
    auto r = applyUpdate(chain(), u);
    CHECK(r.stats.deleted == 0);
    CHECK(r.stats.inserted == 4);
  }

  TEST_CASE("failed instantiation leaves nothing changed") {
    Graph g;
    g.add(Term::iri("http://e/s"), Term::iri("http://e/p"), Term::literal("lit"));
    g.add(Term::iri("http://e/t"), Term::iri("http://e/p"), Term::iri("http://e/o"));
    auto u = parseUpdate("DELETE { ?s <http://e/p> ?o } INSERT { ?o <http://e/q> ?s } WHERE { ?s <http://e/p> ?o }");
    try {
      applyUpdate(g, u);
      FAIL("no error");
    } catch (const QueryError& e) {
      CHECK((e.kind() == QueryError::Kind::InvalidInstantiation));
    }
    CHECK(g.size() == 2);
  }

  TEST_CASE("measure replacement on the fixture") {
    Graph g = fixtureGraph();
    auto count = [](const Graph& h, const std::string& label) {
      auto q = parseSelect("PREFIX aicard: <urn:x-aicard:ns#>\nSELECT ?r { ?r aicard:hasMeasure ?m . ?m aicard:measureLabel \"" +
                           label + "\" }");
      return evaluateSelect(h, q).size();
    };
    const std::string oldLabel = "Conduct rigorous and frequent accuracy testing";
    std::size_t before = count(g, oldLabel);
    REQUIRE(before == 2);
    auto u = parseUpdate(testkit::readFile(testkit::sourcePath("fixtures/replace-measure.update")), g.prefixes());
    auto r = applyUpdate(g, u);
    CHECK(r.stats.deleted == before);
    CHECK(r.stats.inserted == before);
    CHECK(count(r.graph, oldLabel) == 0);
  }
}
