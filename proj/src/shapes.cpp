#include "aicard/shapes.hpp"

#include <algorithm>
#include <map>
#include <regex>
#include <set>
#include <tuple>

#include "aicard/card.hpp"
#include "aicard/card_graph.hpp"

namespace aicard {

namespace {

Term sh(std::string_view local) { return Term::iri(std::string(kShapesNs) + std::string(local)); }
Term rdfType() { return Term::iri(ns::kRdfType); }

std::string ac(std::string_view local) { return std::string(kVocab) + std::string(local); }

std::string describe(const Term& t) { return t.canonical(); }

struct Compiled {
  const NodeShape* shape;
  std::vector<std::optional<std::regex>> patterns;
};

Compiled compile(const NodeShape& shape) {
  checkShape(shape);
  Compiled c{&shape, {}};
  for (const auto& pc : shape.constraints) {
    if (!pc.pattern) {
      c.patterns.emplace_back();
      continue;
    }
    try {
      c.patterns.emplace_back(std::regex(*pc.pattern, std::regex::ECMAScript));
    } catch (const std::regex_error& e) {
      throw ShapeError(ShapeError::Kind::InvalidRegex, shape.id, pc.path, e.what());
    }
  }
  return c;
}

bool nodeKindMatches(NodeKind k, const Term& t) {
  switch (k) {
    case NodeKind::IriNode: return t.isIri();
    case NodeKind::LiteralNode: return t.isLiteral();
    case NodeKind::BlankOrIri: return t.isIri() || t.isBlank();
  }
  return false;
}

void checkNode(const Graph& g, const Compiled& c, const Term& focus, std::vector<ValidationResult>& out) {
  const NodeShape& shape = *c.shape;
  auto report = [&](const PropertyConstraint& pc, std::string kind, std::string message) {
    out.push_back({focus, shape.id, pc.path, std::move(kind), std::move(message), shape.severity});
  };
  for (std::size_t i = 0; i < shape.constraints.size(); ++i) {
    const auto& pc = shape.constraints[i];
    const auto values = g.objects(focus, Term::iri(pc.path));
    const std::size_t n = values.size();
    if (pc.minCount && n < *pc.minCount) {
      report(pc, "minCount", "expected at least " + std::to_string(*pc.minCount) + " value(s), found " + std::to_string(n));
    }
    if (pc.maxCount && n > *pc.maxCount) {
      report(pc, "maxCount", "expected at most " + std::to_string(*pc.maxCount) + " value(s), found " + std::to_string(n));
    }
    if (pc.hasValue && std::find(values.begin(), values.end(), *pc.hasValue) == values.end()) {
      report(pc, "hasValue", "missing required value " + describe(*pc.hasValue));
    }
    for (const auto& v : values) {
      if (pc.datatype && !(v.isLiteral() && v.datatype() == *pc.datatype)) {
        report(pc, "datatype", "value " + describe(v) + " is not a literal of datatype <" + *pc.datatype + ">");
      }
      if (pc.nodeKind && !nodeKindMatches(*pc.nodeKind, v)) {
        report(pc, "nodeKind", "value " + describe(v) + " is not of node kind " + std::string(toString(*pc.nodeKind)));
      }
      if (pc.inList && std::find(pc.inList->begin(), pc.inList->end(), v) == pc.inList->end()) {
        report(pc, "in", "value " + describe(v) + " is not one of the " + std::to_string(pc.inList->size()) +
                             " allowed values");
      }
      if (c.patterns[i] && (v.isBlank() || !std::regex_search(v.value(), *c.patterns[i]))) {
        report(pc, "pattern", "value " + describe(v) + " does not match /" + *pc.pattern + "/");
      }
    }
  }
}

PropertyConstraint prop(std::string_view local) {
  PropertyConstraint pc;
  pc.path = ac(local);
  return pc;
}

PropertyConstraint exactlyOne(std::string_view local) {
  auto pc = prop(local);
  pc.minCount = 1;
  pc.maxCount = 1;
  return pc;
}

PropertyConstraint atLeastOne(std::string_view local) {
  auto pc = prop(local);
  pc.minCount = 1;
  return pc;
}

PropertyConstraint typed(PropertyConstraint pc, const std::string& datatype) {
  pc.datatype = datatype;
  return pc;
}

template <typename E>
PropertyConstraint oneOf(std::string_view local, bool includeOther = true) {
  auto pc = exactlyOne(local);
  std::vector<Term> terms;
  for (auto v : allValues<E>()) {
    if (!includeOther && toString(v) == "Other") continue;
    terms.push_back(vocab(toString(v)));
  }
  std::sort(terms.begin(), terms.end());
  pc.inList = std::move(terms);
  return pc;
}

NodeShape shape(std::string_view local, std::string_view cls, std::vector<PropertyConstraint> cs,
                Severity sev = Severity::Violation) {
  return NodeShape{std::string(kShapesNs) + std::string(local), ac(cls), std::move(cs), sev};
}

std::optional<std::size_t> countValue(const Graph& g, const Term& node, const char* p, const std::string& shapeId) {
  auto vals = g.objects(node, sh(p));
  if (vals.empty()) return std::nullopt;
  if (vals.size() > 1 || !vals[0].isLiteral() || vals[0].datatype() != ns::kXsdInteger) {
    throw ShapeError(ShapeError::Kind::MalformedShape, shapeId, "", std::string("bad ") + p);
  }
  try {
    long long v = std::stoll(vals[0].value());
    if (v < 0) throw std::out_of_range(p);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw ShapeError(ShapeError::Kind::MalformedShape, shapeId, "", std::string("bad ") + p);
  }
}

std::optional<Term> single(const Graph& g, const Term& node, const char* p, const std::string& shapeId) {
  auto vals = g.objects(node, sh(p));
  if (vals.empty()) return std::nullopt;
  if (vals.size() > 1) throw ShapeError(ShapeError::Kind::MalformedShape, shapeId, "", std::string("repeated ") + p);
  return vals[0];
}

}  // namespace

std::string_view toString(NodeKind k) {
  switch (k) {
    case NodeKind::IriNode: return "IriNode";
    case NodeKind::LiteralNode: return "LiteralNode";
    case NodeKind::BlankOrIri: return "BlankOrIri";
  }
  return "?";
}

std::string_view toString(Severity s) { return s == Severity::Violation ? "Violation" : "Warning"; }

bool PropertyConstraint::hasFacet() const {
  return minCount || maxCount || datatype || nodeKind || inList || pattern || hasValue;
}

std::size_t ValidationReport::count(Severity s) const {
  return static_cast<std::size_t>(
      std::count_if(results.begin(), results.end(), [s](const ValidationResult& r) { return r.severity == s; }));
}

ShapeError::ShapeError(Kind kind, std::string shapeId, std::string path, const std::string& detail)
    : Error(std::string(kind == Kind::InvalidRegex ? "invalid-regex" : "malformed-shape") + " in " + shapeId +
            (path.empty() ? "" : " at " + path) + ": " + detail),
      kind_(kind),
      shapeId_(std::move(shapeId)),
      path_(std::move(path)) {}

void checkShape(const NodeShape& shape) {
  auto bad = [&](const std::string& path, const std::string& why) {
    throw ShapeError(ShapeError::Kind::MalformedShape, shape.id, path, why);
  };
  if (shape.targetClass.empty()) bad("", "empty targetClass");
  std::set<std::string> paths;
  for (const auto& pc : shape.constraints) {
    if (!isAbsoluteIri(pc.path)) bad(pc.path, "path is not an absolute IRI");
    if (!paths.insert(pc.path).second) bad(pc.path, "repeated path");
    if (!pc.hasFacet()) bad(pc.path, "no facet set");
    if (pc.minCount && pc.maxCount && *pc.minCount > *pc.maxCount) bad(pc.path, "minCount > maxCount");
  }
}

ValidationReport validate(const Graph& g, const std::vector<NodeShape>& shapes) {
  std::vector<Compiled> compiled;
  compiled.reserve(shapes.size());
  for (const auto& s : shapes) compiled.push_back(compile(s));

  ValidationReport rep;
  for (const auto& c : compiled) {
    for (const auto& focus : g.subjects(rdfType(), Term::iri(c.shape->targetClass))) {
      checkNode(g, c, focus, rep.results);
    }
  }
  std::sort(rep.results.begin(), rep.results.end(), [](const ValidationResult& a, const ValidationResult& b) {
    return std::tie(a.focusNode, a.path, a.shapeId, a.constraintKind, a.message) <
           std::tie(b.focusNode, b.path, b.shapeId, b.constraintKind, b.message);
  });
  rep.conforms = rep.count(Severity::Violation) == 0;
  return rep;
}

std::vector<NodeShape> builtinCardShapes() {
  const std::string str = ns::kXsdString;
  const std::string boolean = ns::kXsdBoolean;

  auto nonBlank = [](PropertyConstraint pc) {
    pc.pattern = "\\S";
    return pc;
  };
  auto iriValued = [](PropertyConstraint pc) {
    pc.nodeKind = NodeKind::IriNode;
    return pc;
  };

  auto language = typed(exactlyOne("language"), str);
  language.pattern = "^[A-Za-z]{2,3}(-[A-Za-z0-9]{1,8})*$";
  auto score = typed(exactlyOne("score"), ns::kXsdDecimal);
  score.pattern = "^(0(\\.[0-9]+)?|1(\\.0+)?)$";

  std::vector<NodeShape> shapes{
      shape("CardShape", "AICard",
            {iriValued(exactlyOne("describesSystem")), nonBlank(typed(exactlyOne("cardVersion"), str)),
             typed(exactlyOne("issuanceDate"), ns::kXsdDate), language, nonBlank(typed(exactlyOne("publisher"), str)),
             nonBlank(typed(exactlyOne("contact"), str)), iriValued(exactlyOne("machineReadableSpec"))}),
      shape("SystemShape", "AISystem",
            {nonBlank(typed(exactlyOne("name"), str)), nonBlank(typed(exactlyOne("version"), str)),
             exactlyOne("hasModality"), atLeastOne("hasProvider"), exactlyOne("hasDomain"), exactlyOne("hasPurpose"),
             exactlyOne("hasCapability"), exactlyOne("hasDeployer"), atLeastOne("hasSubject"),
             exactlyOne("hasDataProcessing"), exactlyOne("hasHumanInvolvement")}),
      shape("ComponentShape", "Component",
            {nonBlank(typed(exactlyOne("componentName"), str)), nonBlank(typed(exactlyOne("documentation"), str))}),
      shape("DataProcessingShape", "DataProcessing",
            {typed(exactlyOne("processesPersonalData"), boolean), typed(exactlyOne("includesNonPersonalData"), boolean),
             typed(exactlyOne("includesAnonymisedData"), boolean), typed(exactlyOne("includesLicencedData"), boolean)}),
      shape("PersonalDataShape", "PersonalDataProcessing", {atLeastOne("personalDataCategory")}),
      shape("DpiaShape", "PersonalDataProcessing", {typed(exactlyOne("dpiaConducted"), boolean)}, Severity::Warning),
      shape("HumanInvolvementShape", "HumanInvolvement",
            {oneOf<AutomationLevel>("automationLevel"), exactlyOne("hasEndUserInvolvement"),
             exactlyOne("hasSubjectInvolvement")}),
      shape("ActorInvolvementShape", "ActorInvolvement",
            {oneOf<ControlLevel>("hasControlLevel"), typed(exactlyOne("isIntended"), boolean),
             typed(exactlyOne("isActive"), boolean), typed(exactlyOne("isInformed"), boolean)}),
      shape("AreaSummaryShape", "RiskAreaSummary",
            {oneOf<ImpactArea>("summarisesArea"), oneOf<Level>("hasLikelihood"), oneOf<Level>("hasSeverity"),
             oneOf<Level>("hasResidualRisk")}),
      shape("RiskShape", "Risk",
            {atLeastOne("hasImpact"), oneOf<Level>("hasLikelihood"), oneOf<Level>("hasSeverity"),
             oneOf<Level>("hasResidualRisk")}),
      shape("ImpactShape", "Impact", {oneOf<ImpactArea>("concernsArea")}),
      shape("RiskMeasureShape", "RiskMeasure", {oneOf<MeasureKind>("measureType")}),
      shape("QualityMeasurementShape", "QualityMeasurement",
            {nonBlank(typed(exactlyOne("qualityDimension"), str)), score}),
  };
  for (const char* dim : {"Accuracy", "Robustness", "Cybersecurity"}) {
    auto pc = prop("hasQualityDimension");
    pc.hasValue = Term::literal(dim);
    shapes.push_back(shape(std::string("Quality") + dim + "Shape", "AISystem", {pc}));
  }
  normalizeShapes(shapes);
  return shapes;
}

void normalizeShapes(std::vector<NodeShape>& shapes) {
  for (auto& s : shapes) {
    for (auto& pc : s.constraints) {
      if (pc.inList) std::sort(pc.inList->begin(), pc.inList->end());
    }
  }
  std::sort(shapes.begin(), shapes.end(), [](const NodeShape& a, const NodeShape& b) { return a.id < b.id; });
}

Graph shapesToGraph(const std::vector<NodeShape>& shapes) {
  Graph g;
  g.setPrefix(std::string(kShapesPrefix), std::string(kShapesNs));
  g.setPrefix(std::string(kVocabPrefix), std::string(kVocab));
  g.setPrefix("rdf", std::string(ns::kRdf));
  g.setPrefix("xsd", std::string(ns::kXsd));
  auto count = [](std::size_t n) { return Term::integer(static_cast<long long>(n)); };
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    const auto& s = shapes[i];
    checkShape(s);
    const Term node = Term::iri(s.id);
    g.add(node, rdfType(), sh("NodeShape"));
    g.add(node, sh("targetClass"), Term::iri(s.targetClass));
    g.add(node, sh("severity"), sh(toString(s.severity)));
    for (std::size_t k = 0; k < s.constraints.size(); ++k) {
      const auto& pc = s.constraints[k];
      const Term p = Term::blank("s" + std::to_string(i) + "p" + std::to_string(k));
      g.add(node, sh("property"), p);
      g.add(p, sh("order"), count(k));
      g.add(p, sh("path"), Term::iri(pc.path));
      if (pc.minCount) g.add(p, sh("minCount"), count(*pc.minCount));
      if (pc.maxCount) g.add(p, sh("maxCount"), count(*pc.maxCount));
      if (pc.datatype) g.add(p, sh("datatype"), Term::iri(*pc.datatype));
      if (pc.nodeKind) g.add(p, sh("nodeKind"), sh(toString(*pc.nodeKind)));
      if (pc.inList) {
        // An empty list still has to survive the round trip.
        if (pc.inList->empty()) g.add(p, sh("inEmpty"), Term::boolean(true));
        for (const auto& t : *pc.inList) g.add(p, sh("in"), t);
      }
      if (pc.pattern) g.add(p, sh("pattern"), Term::literal(*pc.pattern));
      if (pc.hasValue) g.add(p, sh("hasValue"), *pc.hasValue);
    }
  }
  return g;
}

std::vector<NodeShape> shapesFromGraph(const Graph& g) {
  std::vector<NodeShape> out;
  for (const auto& node : g.subjects(rdfType(), sh("NodeShape"))) {
    NodeShape s;
    s.id = node.isIri() ? node.value() : node.canonical();
    auto target = single(g, node, "targetClass", s.id);
    if (!target || !target->isIri()) throw ShapeError(ShapeError::Kind::MalformedShape, s.id, "", "missing targetClass");
    s.targetClass = target->value();
    if (auto sev = single(g, node, "severity", s.id)) {
      if (*sev == sh("Warning")) {
        s.severity = Severity::Warning;
      } else if (*sev != sh("Violation")) {
        throw ShapeError(ShapeError::Kind::MalformedShape, s.id, "", "unknown severity " + sev->canonical());
      }
    }
    std::vector<std::pair<std::size_t, PropertyConstraint>> props;
    for (const auto& p : g.objects(node, sh("property"))) {
      PropertyConstraint pc;
      auto path = single(g, p, "path", s.id);
      if (!path || !path->isIri()) throw ShapeError(ShapeError::Kind::MalformedShape, s.id, "", "property without path");
      pc.path = path->value();
      pc.minCount = countValue(g, p, "minCount", s.id);
      pc.maxCount = countValue(g, p, "maxCount", s.id);
      if (auto dt = single(g, p, "datatype", s.id)) pc.datatype = dt->value();
      if (auto nk = single(g, p, "nodeKind", s.id)) {
        for (auto k : {NodeKind::IriNode, NodeKind::LiteralNode, NodeKind::BlankOrIri}) {
          if (*nk == sh(toString(k))) pc.nodeKind = k;
        }
        if (!pc.nodeKind) throw ShapeError(ShapeError::Kind::MalformedShape, s.id, pc.path, "unknown nodeKind");
      }
      auto in = g.objects(p, sh("in"));
      if (!in.empty() || !g.objects(p, sh("inEmpty")).empty()) {
        std::sort(in.begin(), in.end());
        pc.inList = std::move(in);
      }
      if (auto pat = single(g, p, "pattern", s.id)) pc.pattern = pat->value();
      pc.hasValue = single(g, p, "hasValue", s.id);
      std::size_t order = countValue(g, p, "order", s.id).value_or(props.size());
      props.emplace_back(order, std::move(pc));
    }
    std::stable_sort(props.begin(), props.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [_, pc] : props) s.constraints.push_back(std::move(pc));
    checkShape(s);
    out.push_back(std::move(s));
  }
  normalizeShapes(out);
  return out;
}

nlohmann::ordered_json reportToJson(const ValidationReport& r) {
  nlohmann::ordered_json out;
  out["conforms"] = r.conforms;
  out["violations"] = r.count(Severity::Violation);
  out["warnings"] = r.count(Severity::Warning);
  out["results"] = nlohmann::ordered_json::array();
  for (const auto& res : r.results) {
    out["results"].push_back({{"focusNode", res.focusNode.canonical()},
                              {"shape", res.shapeId},
                              {"path", res.path},
                              {"constraint", res.constraintKind},
                              {"severity", toString(res.severity)},
                              {"message", res.message}});
  }
  return out;
}

std::string reportToText(const ValidationReport& r) {
  std::string out = std::string("conforms: ") + (r.conforms ? "true" : "false") + "\n";
  for (const auto& res : r.results) {
    out += std::string(toString(res.severity)) + " " + res.focusNode.canonical() + " <" + res.path + "> " +
           res.constraintKind + ": " + res.message + "\n";
  }
  return out;
}

}  // namespace aicard
