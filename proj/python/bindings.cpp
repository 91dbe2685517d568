#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "aicard/card_graph.hpp"
#include "aicard/card_json.hpp"
#include "aicard/diff.hpp"
#include "aicard/query.hpp"
#include "aicard/render.hpp"
#include "aicard/rules.hpp"
#include "aicard/shapes.hpp"
#include "aicard/turtle.hpp"

namespace py = pybind11;
using namespace aicard;

// Documents cross the boundary as text: card JSON, Turtle, report JSON.
namespace {

Graph graphOf(const std::string& text, bool isJson) {
  return isJson ? cardToGraph(parseCardJson(text), false) : parseTurtle(text);
}

std::string validateText(const std::string& text, bool isJson, const std::optional<std::string>& shapesTtl) {
  Graph g = graphOf(text, isJson);
  auto shapes = shapesTtl ? shapesFromGraph(parseTurtle(*shapesTtl)) : builtinCardShapes();
  return reportToJson(validate(g, shapes)).dump();
}

std::string classifyText(const std::string& cardJson, const std::optional<std::string>& rulesText) {
  AICard c = parseCardJson(cardJson);
  auto rules = rulesText ? loadRuleBase(*rulesText) : defaultRuleBase();
  return classificationToJson(classify(c.intendedUse, rules)).dump();
}

std::string queryText(const std::string& ttl, const std::string& select) {
  Graph g = parseTurtle(ttl);
  SelectQuery q = parseSelect(select, g.prefixes());
  return solutionsToJson(q.projectedVars, evaluateSelect(g, q)).dump();
}

py::tuple updateText(const std::string& ttl, const std::string& request) {
  Graph g = parseTurtle(ttl);
  auto r = applyUpdate(g, parseUpdate(request, g.prefixes()));
  return py::make_tuple(serializeTurtle(r.graph), r.stats.deleted, r.stats.inserted);
}

std::string policyText(const std::string& cardJson, const std::string& policyJson, const std::string& action) {
  AICard c = parseCardJson(cardJson);
  return decisionToJson(evaluatePolicy(policyFromJson(nlohmann::json::parse(policyJson)), c.intendedUse, action)).dump();
}

std::string renderText(const std::string& cardJson, int radarSize, bool includeSpecLink) {
  RenderOptions o;
  o.radarSize = radarSize;
  o.includeMachineReadableLink = includeSpecLink;
  return renderHtml(parseCardJson(cardJson), o);
}

std::string diffText(const std::string& oldJson, const std::string& newJson) {
  auto cs = diffCards(parseCardJson(oldJson), parseCardJson(newJson));
  auto j = changeSetToJson(cs);
  auto sm = isSubstantialModification(cs);
  j["substantial"] = sm.substantial;
  j["triggers"] = sm.triggers;
  return j.dump();
}

}  // namespace

PYBIND11_MODULE(_aicard, m) {
  m.doc() = "Native core of the aicard package";

  static py::exception<Error> error(m, "AICardError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, e.what());
    } catch (const nlohmann::json::exception& e) {
      py::set_error(error, e.what());
    }
  });

  m.def("normalize_card", [](const std::string& j) { return serializeCardJson(parseCardJson(j)); }, py::arg("card_json"));
  m.def("blank_card", [] { return serializeCardJson(blankCard()); });
  m.def("check_card", [](const std::string& j) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& i : checkCard(parseCardJson(j))) out.emplace_back(i.path, i.message);
    return out;
  }, py::arg("card_json"));
  m.def("card_to_turtle", [](const std::string& j) { return serializeTurtle(cardToGraph(parseCardJson(j))); },
        py::arg("card_json"));
  m.def("turtle_to_card", [](const std::string& t) { return serializeCardJson(graphToCard(parseTurtle(t))); },
        py::arg("turtle"));
  m.def("canonical_turtle", [](const std::string& t) { return serializeTurtle(parseTurtle(t)); }, py::arg("turtle"));
  m.def("isomorphic", [](const std::string& a, const std::string& b) { return isomorphic(parseTurtle(a), parseTurtle(b)); },
        py::arg("a"), py::arg("b"));
  m.def("validate", &validateText, py::arg("text"), py::arg("is_json"), py::arg("shapes_turtle") = py::none());
  m.def("classify", &classifyText, py::arg("card_json"), py::arg("rules_text") = py::none());
  m.def("default_rules", [] { return std::string(defaultRuleBaseText()); });
  m.def("query", &queryText, py::arg("turtle"), py::arg("select"));
  m.def("update", &updateText, py::arg("turtle"), py::arg("request"));
  m.def("policy_check", &policyText, py::arg("card_json"), py::arg("policy_json"), py::arg("action"));
  m.def("render_html", &renderText, py::arg("card_json"), py::arg("radar_size") = 320,
        py::arg("include_spec_link") = true);
  m.def("render_summary", [](const std::string& j) { return renderSummary(parseCardJson(j)); }, py::arg("card_json"));
  m.def("diff", &diffText, py::arg("old_json"), py::arg("new_json"));
}
