#include <doctest.h>

#include <algorithm>

#include "aicard/graph.hpp"
#include "testkit.hpp"

using namespace aicard;

namespace {
Term ex(const std::string& local) { return Term::iri("http://ex.org/" + local); }
}  // namespace

TEST_SUITE("graph") {
  TEST_CASE("term canonical forms") {
    CHECK(ex("a").canonical() == "<http://ex.org/a>");
    CHECK(Term::blank("b0").canonical() == "_:b0");
    CHECK(Term::literal("x").canonical() == "\"x\"");
    CHECK(Term::langLiteral("x", "en").canonical() == "\"x\"@en");
    CHECK(Term::integer(-4).canonical() == "\"-4\"^^<http://www.w3.org/2001/XMLSchema#integer>");
    CHECK(Term::boolean(true).value() == "true");
    CHECK(Term::literal("a\"b\n").canonical() == "\"a\\\"b\\n\"");
  }

  TEST_CASE("term order puts IRIs before blanks before literals") {
    std::vector<Term> v{Term::literal("a"), Term::blank("z"), ex("z"), Term::blank("a"), ex("a")};
    std::sort(v.begin(), v.end());
    CHECK(v[0] == ex("a"));
    CHECK(v[1] == ex("z"));
    CHECK(v[2].isBlank());
    CHECK(v[4].isLiteral());
  }

  TEST_CASE("malformed terms and triples are rejected") {
    CHECK_THROWS_AS(Term::iri("relative/path"), MalformedTerm);
    CHECK_THROWS_AS(Term::iri("http://ex.org/a b"), MalformedTerm);
    CHECK_THROWS_AS(Triple(Term::literal("s"), ex("p"), ex("o")), MalformedTerm);
    CHECK_THROWS_AS(Triple(ex("s"), Term::blank("p"), ex("o")), MalformedTerm);
    CHECK_THROWS_AS(Variable("bad name"), std::exception);
  }

  TEST_CASE("set semantics and indexes") {
    Graph g;
    CHECK(g.add(ex("s"), ex("p"), ex("o")));
    CHECK_FALSE(g.add(ex("s"), ex("p"), ex("o")));
    g.add(ex("s"), ex("p"), Term::literal("v"));
    g.add(ex("t"), ex("q"), ex("s"));
    CHECK(g.size() == 3);
    CHECK(g.indexesConsistent());
    CHECK(g.postingSize(0, ex("s")) == 2);
    CHECK(g.postingSize(2, ex("s")) == 1);
    CHECK(g.objects(ex("s"), ex("p")).size() == 2);
    CHECK(g.subjects(ex("q"), ex("s")) == std::vector<Term>{ex("t")});
    CHECK(g.erase(Triple(ex("s"), ex("p"), ex("o"))));
    CHECK_FALSE(g.erase(Triple(ex("s"), ex("p"), ex("o"))));
    CHECK(g.indexesConsistent());
    CHECK(g.postingSize(0, ex("s")) == 1);
  }

  TEST_CASE("free functions leave the input untouched") {
    Graph g;
    g.add(ex("s"), ex("p"), ex("o"));
    Graph h = insert(g, Triple(ex("s"), ex("p"), ex("o2")));
    CHECK(g.size() == 1);
    CHECK(h.size() == 2);
    Graph k = remove(h, Triple(ex("s"), ex("p"), ex("o")));
    CHECK(h.size() == 2);
    CHECK(k.size() == 1);
  }

  TEST_CASE("pattern matching with repeated variables") {
    Graph g;
    g.add(ex("a"), ex("p"), ex("a"));
    g.add(ex("a"), ex("p"), ex("b"));
    TriplePattern loop{Variable("x"), ex("p"), Variable("x")};
    CHECK(g.match(loop).size() == 1);
    TriplePattern any{Variable("x"), Variable("y"), Variable("z")};
    CHECK(matchPattern(g, any).size() == 2);
    CHECK(g.match(std::nullopt, std::nullopt, ex("b")).size() == 1);
  }

  TEST_CASE("prefix expansion and compaction") {
    Graph g;
    g.setPrefix("ex", "http://ex.org/");
    CHECK(g.expand("ex:a") == std::optional<std::string>("http://ex.org/a"));
    CHECK_FALSE(g.expand("zz:a"));
    CHECK(g.compact("http://ex.org/a") == std::optional<std::string>("ex:a"));
    CHECK_THROWS_AS(g.setPrefix("bad", "not-absolute"), MalformedTerm);
  }

  TEST_CASE("merge relabels blank nodes of the second graph") {
    Graph a, b;
    a.add(Term::blank("m0"), ex("p"), ex("o"));
    b.add(Term::blank("x"), ex("p"), ex("o"));
    b.add(Term::blank("y"), ex("p"), ex("o"));
    Graph m = merge(a, b);
    CHECK(m.size() == 3);
    auto blanks = m.blankNodes();
    CHECK(blanks.count(Term::blank("m0")) == 1);
    CHECK(blanks.count(Term::blank("m1")) == 1);
    CHECK(blanks.count(Term::blank("m2")) == 1);
  }

  TEST_CASE("merge keeps the first prefix binding and warns") {
    Graph a, b;
    a.setPrefix("ex", "http://ex.org/");
    b.setPrefix("ex", "http://other.org/");
    std::vector<std::string> warnings;
    Graph m = merge(a, b, &warnings);
    CHECK(m.prefixes().at("ex") == "http://ex.org/");
    CHECK(warnings.size() == 1);
  }

  TEST_CASE("isomorphism up to blank relabelling") {
    Graph a, b;
    a.add(Term::blank("x"), ex("p"), Term::blank("y"));
    a.add(Term::blank("y"), ex("p"), Term::blank("x"));
    b.add(Term::blank("u"), ex("p"), Term::blank("v"));
    b.add(Term::blank("v"), ex("p"), Term::blank("u"));
    CHECK(isomorphic(a, b));
    b.add(Term::blank("v"), ex("p"), Term::blank("v"));
    CHECK_FALSE(isomorphic(a, b));

    // Two triangles versus one hexagon: equal degree sequences.
    Graph tri, hex;
    for (int i = 0; i < 3; ++i) {
      tri.add(Term::blank("a" + std::to_string(i)), ex("e"), Term::blank("a" + std::to_string((i + 1) % 3)));
      tri.add(Term::blank("b" + std::to_string(i)), ex("e"), Term::blank("b" + std::to_string((i + 1) % 3)));
    }
    for (int i = 0; i < 6; ++i) {
      hex.add(Term::blank("h" + std::to_string(i)), ex("e"), Term::blank("h" + std::to_string((i + 1) % 6)));
    }
    CHECK_FALSE(isomorphic(tri, hex));
  }

  TEST_CASE("isomorphism is invariant under random relabelling") {
    testkit::Rng rng(7);
    for (int round = 0; round < 50; ++round) {
      Graph g = testkit::randomTurtleGraph(rng, 40);
      Graph h;
      for (const auto& t : g.triples()) {
        auto relabel = [](const Term& x) { return x.isBlank() ? Term::blank("r" + x.value() + "z") : x; };
        h.add(relabel(t.subject), t.predicate, relabel(t.object));
      }
      CHECK(isomorphic(g, h));
    }
  }
}
