#include <doctest.h>

#include <cmath>
#include <numbers>
#include <regex>
#include <set>

#include "aicard/card_json.hpp"
#include "aicard/render.hpp"
#include "testkit.hpp"

using namespace aicard;

namespace {

AICard fixture() { return parseCardJson(testkit::readFile(testkit::sourcePath("fixtures/proctify.aicard.json"))); }

std::string htmlEscape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out += c;
    }
  }
  return out;
}

// Tag names in document order must nest properly.
bool balanced(const std::string& html) {
  static const std::set<std::string> voids{"meta", "br", "hr", "img", "link", "input"};
  static const std::regex tag(R"(<(/?)([a-zA-Z][a-zA-Z0-9]*)[^>]*?(/?)>)");
  std::vector<std::string> stack;
  for (auto it = std::sregex_iterator(html.begin(), html.end(), tag); it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    std::string name = m[2];
    if (m[3] == "/" || voids.count(name)) continue;
    if (m[1] == "/") {
      if (stack.empty() || stack.back() != name) return false;
      stack.pop_back();
    } else {
      stack.push_back(name);
    }
  }
  return stack.empty();
}

std::vector<std::pair<double, double>> scorePoints(const std::string& svg) {
  std::smatch m;
  REQUIRE(std::regex_search(svg, m, std::regex(R"re(<polygon class="score" points="([^"]*)")re")));
  std::vector<std::pair<double, double>> pts;
  std::string s = m[1];
  std::regex pair(R"((-?[0-9.]+),(-?[0-9.]+))");
  for (auto it = std::sregex_iterator(s.begin(), s.end(), pair); it != std::sregex_iterator(); ++it) {
    pts.emplace_back(std::stod((*it)[1]), std::stod((*it)[2]));
  }
  return pts;
}

}  // namespace

TEST_SUITE("render") {
  TEST_CASE("nine headings in order") {
    std::string html = renderHtml(fixture());
    std::size_t pos = 0;
    for (const auto& h : sectionHeadings()) {
      std::size_t at = html.find("<h2>" + htmlEscape(h) + "</h2>", pos);
      INFO(h);
      REQUIRE(at != std::string::npos);
      pos = at;
    }
    CHECK(sectionHeadings().size() == 9);
  }

  TEST_CASE("rendering is deterministic and self-contained") {
    std::string a = renderHtml(fixture());
    CHECK(a == renderHtml(fixture()));
    CHECK(balanced(a));
    for (const char* banned : {"<script", "<link", "<img", "src=", "href=", "url(", "@import"}) {
      INFO(banned);
      CHECK(a.find(banned) == std::string::npos);
    }
    CHECK(a.rfind("<!DOCTYPE html>", 0) == 0);
  }

  TEST_CASE("spec URL can be left out") {
    RenderOptions o;
    o.includeMachineReadableLink = false;
    CHECK(renderHtml(fixture(), o).find("https://example.org/proctify/aicard.ttl") == std::string::npos);
    CHECK(renderHtml(fixture()).find("https://example.org/proctify/aicard.ttl") != std::string::npos);
  }

  TEST_CASE("empty sections say so") {
    AICard c = fixture();
    c.predeterminedChanges.clear();
    c.components.clear();
    std::string html = renderHtml(c);
    CHECK(html.find("Not documented") != std::string::npos);
    CHECK(balanced(html));
    CHECK(balanced(renderHtml(blankCard())));
  }

  TEST_CASE("random cards render balanced pages holding their values") {
    testkit::Rng rng(71);
    for (int i = 0; i < 100; ++i) {
      AICard c = testkit::randomCard(rng);
      std::string html = renderHtml(c);
      CHECK(balanced(html));
      std::vector<std::string> values{c.general.systemName, c.intendedUse.purpose, c.intendedUse.domain,
                                      c.intendedUse.deployer, c.meta.publisher};
      for (const auto& comp : c.components) values.push_back(comp.name);
      for (const auto& r : c.riskProfile.risks) {
        values.push_back(r.label);
        for (const auto& m : r.measures) values.push_back(m.label);
      }
      for (const auto& q : c.quality) values.push_back(q.dimension);
      for (const auto& s : c.compliance.regulations) values.push_back(s);
      for (const auto& v : values) {
        INFO(v);
        CHECK(html.find(htmlEscape(v)) != std::string::npos);
      }
    }
  }

  TEST_CASE("radar geometry matches trigonometry") {
    testkit::Rng rng(73);
    for (int i = 0; i < 100; ++i) {
      std::vector<QualityMetric> m;
      const std::size_t n = 3 + testkit::pick(rng, 6);
      for (std::size_t k = 0; k < n; ++k) {
        m.push_back({"d" + std::to_string(k), std::uniform_real_distribution<double>(0, 1)(rng), std::nullopt});
      }
      const int size = 100 + static_cast<int>(testkit::pick(rng, 500));
      auto pts = scorePoints(renderRadarSvg(m, size));
      REQUIRE(pts.size() == n);
      for (std::size_t k = 0; k < n; ++k) {
        const double angle = 2 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
        const double r = m[k].score * 0.35 * size;
        CHECK(std::abs(pts[k].first - (size / 2.0 + r * std::sin(angle))) <= 0.01);
        CHECK(std::abs(pts[k].second - (size / 2.0 - r * std::cos(angle))) <= 0.01);
      }
    }
  }

  TEST_CASE("radar needs three dimensions and a sane size") {
    std::vector<QualityMetric> two{{"a", 0.5, {}}, {"b", 0.5, {}}};
    try {
      renderRadarSvg(two);
      FAIL("no error");
    } catch (const RenderError& e) {
      CHECK((e.kind() == RenderError::Kind::TooFewDimensions));
    }
    two.push_back({"c", 0.5, {}});
    CHECK_THROWS_AS(renderRadarSvg(two, 50), RenderError);
    RenderOptions o;
    o.locale = "de";
    CHECK_THROWS_AS(renderHtml(fixture(), o), RenderError);
  }

  TEST_CASE("coordinate formatting") {
    CHECK(formatCoord(-0.001) == "0.00");
    CHECK(formatCoord(1.005) == "1.00");
    CHECK(formatCoord(12.346) == "12.35");
  }

  TEST_CASE("summary is short") {
    std::string s = renderSummary(fixture());
    CHECK(std::count(s.begin(), s.end(), '\n') <= 40);
    CHECK(s.find("Proctify") != std::string::npos);
  }

  TEST_CASE("humanize") {
    CHECK(humanize("CanReverseExPost") == "Can reverse ex post");
    CHECK(humanize("AIFactsheet") == "AI factsheet");
  }
}
