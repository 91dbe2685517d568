#include "aicard/card_graph.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <map>
#include <set>

namespace aicard {

Term vocab(std::string_view local) { return Term::iri(std::string(kVocab) + std::string(local)); }

const std::vector<VocabularyEntry>& vocabularyTable() {
  static const std::vector<VocabularyEntry> table{
      {"meta.cardVersion", "cardVersion", "Version of the card document"},
      {"meta.issuanceDate", "issuanceDate", "Date the card was issued (xsd:date)"},
      {"meta.language", "language", "BCP 47 language tag of the card"},
      {"meta.publisher", "publisher", "Party publishing the card"},
      {"meta.contact", "contact", "Contact e-mail address or URL"},
      {"meta.machineReadableSpecUrl", "machineReadableSpec", "Where the machine-readable card is published"},
      {"general.systemName", "name", "Name of the AI system"},
      {"general.systemVersion", "version", "Version of the AI system"},
      {"general.modality", "hasModality", "Standalone software, safety component, embedded, or a free label"},
      {"general.aiTechniques", "usesTechnique", "Main AI techniques used"},
      {"general.providers", "hasProvider", "AI provider organisation"},
      {"general.developers", "hasDeveloper", "AI developer organisation"},
      {"general.providers[].name", "organisationName", "Organisation name"},
      {"general.providers[].url", "organisationUrl", "Organisation web address"},
      {"general.developers[].name", "organisationName", "Organisation name"},
      {"general.developers[].url", "organisationUrl", "Organisation web address"},
      {"intendedUse.domain", "hasDomain", "Domain the system is intended to be used within"},
      {"intendedUse.purpose", "hasPurpose", "End goal of using the system"},
      {"intendedUse.capability", "hasCapability", "AI capability enabling the purpose"},
      {"intendedUse.deployer", "hasDeployer", "Entity using the system"},
      {"intendedUse.subjects", "hasSubject", "Entities subjected to the system's outputs"},
      {"components", "hasComponent", "Incorporated component (inverse: isComponentOf)"},
      {"components[].name", "componentName", "Component name"},
      {"components[].version", "componentVersion", "Component version"},
      {"components[].kind", "componentKind", "Model, dataset, general-purpose AI system, software, or a free label"},
      {"components[].docLinkOrId", "documentation", "Link to, or identifier of, the component's documentation"},
      {"components[].infoSheetKind", "infoSheetKind", "Kind of information sheet documenting the component"},
      {"dataProcessing", "hasDataProcessing", "Data-processing section node"},
      {"dataProcessing.processesPersonalData", "processesPersonalData", "Whether personal data is processed"},
      {"dataProcessing.personalDataCategories", "personalDataCategory", "Category of personal data processed"},
      {"dataProcessing.dpiaConducted", "dpiaConducted", "Whether a DPIA was conducted"},
      {"dataProcessing.includesNonPersonalData", "includesNonPersonalData", "Non-personal data processed"},
      {"dataProcessing.includesAnonymisedData", "includesAnonymisedData", "Anonymised data processed"},
      {"dataProcessing.includesLicencedData", "includesLicencedData", "Licenced data processed"},
      {"humanInvolvement", "hasHumanInvolvement", "Human-involvement section node"},
      {"humanInvolvement.automationLevel", "automationLevel", "Level of automation"},
      {"humanInvolvement.endUser", "hasEndUserInvolvement", "Involvement of AI end-users"},
      {"humanInvolvement.subject", "hasSubjectInvolvement", "Involvement of AI subjects"},
      {"humanInvolvement.*.intended", "isIntended", "Involvement is as intended"},
      {"humanInvolvement.*.active", "isActive", "Actor actively interacts with the system"},
      {"humanInvolvement.*.informed", "isInformed", "Actor is informed an AI system is in place"},
      {"humanInvolvement.*.controlLevel", "hasControlLevel", "Control the actor has over outputs"},
      {"riskProfile.summary", "hasAreaSummary", "Risk summary for one impact area"},
      {"riskProfile.summary.*.area", "summarisesArea", "Impact area the summary covers"},
      {"riskProfile.summary.*.likelihood", "hasLikelihood", "Likelihood level"},
      {"riskProfile.summary.*.severity", "hasSeverity", "Severity level"},
      {"riskProfile.summary.*.residualRisk", "hasResidualRisk", "Residual risk level"},
      {"riskProfile.measureFlags", "appliesMeasureType", "Kind of measure applied to control risks"},
      {"riskProfile.risks", "hasRisk", "Identified risk"},
      {"riskProfile.risks[].id", "hasRisk", "Risk node IRI"},
      {"riskProfile.risks[].label", "riskLabel", "Risk description"},
      {"riskProfile.risks[].sources", "hasRiskSource", "Source of the risk"},
      {"riskProfile.risks[].consequences", "hasConsequence", "Consequence of the risk"},
      {"riskProfile.risks[].impacts", "hasImpact", "Impact of the risk"},
      {"riskProfile.risks[].impacts[].area", "concernsArea", "Impact area affected"},
      {"riskProfile.risks[].impacts[].description", "impactDescription", "What is impacted"},
      {"riskProfile.risks[].likelihood", "hasLikelihood", "Likelihood level"},
      {"riskProfile.risks[].severity", "hasSeverity", "Severity level"},
      {"riskProfile.risks[].residualRisk", "hasResidualRisk", "Residual risk level"},
      {"riskProfile.risks[].measures", "hasMeasure", "Measure applied to the risk"},
      {"riskProfile.risks[].measures[].label", "measureLabel", "Measure description"},
      {"riskProfile.risks[].measures[].kind", "measureType", "Kind of measure"},
      {"quality", "hasQualityMetric", "Quality measurement (also hasQualityDimension on the system)"},
      {"quality[].dimension", "qualityDimension", "Quality dimension measured"},
      {"quality[].score", "score", "Score in [0, 1] (xsd:decimal)"},
      {"quality[].note", "note", "Free-text note"},
      {"predeterminedChanges", "hasPredeterminedChange", "Pre-determined change"},
      {"predeterminedChanges[].subjectOfChange", "changeSubject", "What changes"},
      {"predeterminedChanges[].frequency", "changeFrequency", "How often it changes"},
      {"predeterminedChanges[].impactOnPerformanceAndRisks", "changeImpact", "Effect on performance and risks"},
      {"compliance.regulations", "compliesWithRegulation", "Regulation complied with"},
      {"compliance.standards", "conformsToStandard", "Standard conformed to"},
      {"compliance.codesOfConduct", "followsCodeOfConduct", "Code of conduct followed"},
      {"extensions", "extensions", "Extension bag as an rdf:JSON literal"},
  };
  return table;
}

std::vector<std::string> vocabularyStructuralTerms() {
  return {"describesSystem", "hasQualityDimension", "isComponentOf", "order"};
}

std::vector<std::string> vocabularyClasses() {
  std::vector<std::string> out{"AICard",          "AISystem",        "Domain",           "Purpose",
                               "AICapability",    "AIDeployer",      "AISubject",        "AIProvider",
                               "AIDeveloper",     "Component",       "DataProcessing",   "PersonalDataProcessing",
                               "HumanInvolvement", "ActorInvolvement", "RiskAreaSummary", "Risk",
                               "Impact",          "RiskMeasure",     "QualityMeasurement", "PredeterminedChange"};
  auto add = [&](const auto& names) {
    for (auto n : names) out.emplace_back(n);
  };
  add(enumNames<Modality>());
  add(enumNames<ComponentKind>());
  add(enumNames<InfoSheetKind>());
  add(enumNames<AutomationLevel>());
  add(enumNames<ControlLevel>());
  add(enumNames<ImpactArea>());
  add(enumNames<Level>());
  add(enumNames<MeasureKind>());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

CardGraphError::CardGraphError(Kind kind, std::string section, std::string field, const std::string& detail)
    : Error(std::string(toString(kind)) + "(" + section + (field.empty() ? "" : ", " + field) + ")" +
            (detail.empty() ? "" : ": " + detail)),
      kind_(kind),
      section_(std::move(section)),
      field_(std::move(field)) {}

std::string_view toString(CardGraphError::Kind kind) {
  switch (kind) {
    case CardGraphError::Kind::MissingMandatory: return "missing-mandatory";
    case CardGraphError::Kind::MultipleSystems: return "multiple-systems";
    case CardGraphError::Kind::MalformedLevel: return "malformed-level";
    case CardGraphError::Kind::MalformedValue: return "malformed-value";
  }
  return "error";
}

namespace {

const Term& rdfType() {
  static const Term t = Term::iri(ns::kRdfType);
  return t;
}

const Term& rdfsLabel() {
  static const Term t = Term::iri(std::string(ns::kRdfs) + "label");
  return t;
}

/// Percent-encodes everything outside [A-Za-z0-9_-] so distinct labels mint
/// distinct IRIs.
std::string encodeLocal(std::string_view s) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  for (char c : s) {
    auto u = static_cast<unsigned char>(c);
    if ((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '-') {
      out += c;
    } else {
      out += '%';
      out += hex[u >> 4];
      out += hex[u & 0xF];
    }
  }
  return out;
}

std::string baseIri(const AICard& card) {
  const auto& url = card.meta.machineReadableSpecUrl;
  if (!isAbsoluteIri(url)) return "urn:x-aicard:draft#";
  return url.substr(0, url.find('#')) + "#";
}

std::string formatScore(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
  std::string s(buf, res.ptr);
  if (s.find('.') == std::string::npos) s += ".0";
  return s;
}

Term str(const std::string& s) { return Term::literal(s); }

template <typename E>
Term enumTerm(E v) {
  return vocab(toString(v));
}

template <typename E>
Term labelledTerm(const Labelled<E>& v) {
  if (v.kind == E::Other) return Term::literal(v.otherLabel);
  return enumTerm(v.kind);
}

class Builder {
 public:
  Builder(const AICard& card, bool strict) : card_(card), strict_(strict), base_(baseIri(card)) {
    g_.setPrefix(std::string(kVocabPrefix), std::string(kVocab));
    g_.setPrefix("rdf", std::string(ns::kRdf));
    g_.setPrefix("rdfs", std::string(ns::kRdfs));
    g_.setPrefix("xsd", std::string(ns::kXsd));
  }

  Graph build() {
    const Term cardNode = node("card");
    const Term system = node("system");
    add(cardNode, rdfType(), vocab("AICard"));
    add(cardNode, vocab("describesSystem"), system);
    add(system, rdfType(), vocab("AISystem"));

    buildMeta(cardNode);
    buildGeneral(system);
    buildIntendedUse(system);
    buildComponents(system);
    buildDataProcessing(system);
    buildHumanInvolvement(system);
    buildRiskProfile(system);
    buildQuality(system);
    buildChanges(system);
    buildCompliance(system);
    if (card_.extensions.is_object() && !card_.extensions.empty()) {
      add(cardNode, vocab("extensions"), Term::literal(card_.extensions.dump(), ns::kRdfJson));
    }
    return std::move(g_);
  }

 private:
  Term node(std::string_view local) const { return Term::iri(base_ + std::string(local)); }

  void add(const Term& s, const Term& p, const Term& o) { g_.add(Triple(s, p, o)); }

  void addString(const Term& s, std::string_view p, const std::string& v) {
    if (!v.empty() || strict_) add(s, vocab(p), str(v));
  }

  void addOrder(const Term& s, std::size_t i) { add(s, vocab("order"), Term::integer(static_cast<long long>(i))); }

  void buildMeta(const Term& cardNode) {
    const auto& m = card_.meta;
    addString(cardNode, "cardVersion", m.cardVersion);
    if (m.issuanceDate.ok()) {
      add(cardNode, vocab("issuanceDate"), Term::literal(formatDate(m.issuanceDate), ns::kXsdDate));
    }
    addString(cardNode, "language", m.language);
    addString(cardNode, "publisher", m.publisher);
    addString(cardNode, "contact", m.contact);
    if (isAbsoluteIri(m.machineReadableSpecUrl)) {
      add(cardNode, vocab("machineReadableSpec"), Term::iri(m.machineReadableSpecUrl));
    }
  }

  void buildOrgs(const Term& system, const std::vector<OrganisationRef>& orgs, std::string_view role,
                 std::string_view predicate, std::string_view cls) {
    for (std::size_t i = 0; i < orgs.size(); ++i) {
      Term org = node(std::string(role) + "-" + std::to_string(i));
      add(system, vocab(predicate), org);
      add(org, rdfType(), vocab(cls));
      addOrder(org, i);
      addString(org, "organisationName", orgs[i].name);
      if (isAbsoluteIri(orgs[i].url)) add(org, vocab("organisationUrl"), Term::iri(orgs[i].url));
    }
  }

  void buildGeneral(const Term& system) {
    const auto& g = card_.general;
    addString(system, "name", g.systemName);
    addString(system, "version", g.systemVersion);
    add(system, vocab("hasModality"), labelledTerm(g.modality));
    for (const auto& t : g.aiTechniques) add(system, vocab("usesTechnique"), str(t));
    buildOrgs(system, g.providers, "provider", "hasProvider", "AIProvider");
    buildOrgs(system, g.developers, "developer", "hasDeveloper", "AIDeveloper");
  }

  void labelledNode(const Term& system, std::string_view predicate, std::string_view local, std::string_view cls,
                    const std::string& label) {
    if (label.empty() && !strict_) return;
    Term n = node(local);
    add(system, vocab(predicate), n);
    add(n, rdfType(), vocab(cls));
    add(n, rdfsLabel(), str(label));
  }

  void buildIntendedUse(const Term& system) {
    const auto& u = card_.intendedUse;
    labelledNode(system, "hasDomain", "domain", "Domain", u.domain);
    labelledNode(system, "hasPurpose", "purpose", "Purpose", u.purpose);
    labelledNode(system, "hasCapability", "capability", "AICapability", u.capability);
    labelledNode(system, "hasDeployer", "deployer", "AIDeployer", u.deployer);
    for (const auto& s : u.subjects) {
      labelledNode(system, "hasSubject", "subject-" + encodeLocal(s), "AISubject", s);
    }
  }

  void buildComponents(const Term& system) {
    for (std::size_t i = 0; i < card_.components.size(); ++i) {
      const auto& c = card_.components[i];
      Term n = isAbsoluteIri(c.docLinkOrId) ? Term::iri(c.docLinkOrId) : node("component-" + encodeLocal(c.name));
      add(system, vocab("hasComponent"), n);
      add(n, vocab("isComponentOf"), system);
      add(n, rdfType(), vocab("Component"));
      addOrder(n, i);
      addString(n, "componentName", c.name);
      addString(n, "componentVersion", c.version);
      add(n, vocab("componentKind"), labelledTerm(c.kind));
      addString(n, "documentation", c.docLinkOrId);
      if (c.infoSheetKind) add(n, vocab("infoSheetKind"), labelledTerm(*c.infoSheetKind));
    }
  }

  void buildDataProcessing(const Term& system) {
    if (!card_.dataProcessing) return;
    const auto& d = *card_.dataProcessing;
    Term n = node("data-processing");
    add(system, vocab("hasDataProcessing"), n);
    add(n, rdfType(), vocab("DataProcessing"));
    if (d.processesPersonalData) add(n, rdfType(), vocab("PersonalDataProcessing"));
    add(n, vocab("processesPersonalData"), Term::boolean(d.processesPersonalData));
    for (const auto& c : d.personalDataCategories) add(n, vocab("personalDataCategory"), str(c));
    if (d.dpiaConducted) add(n, vocab("dpiaConducted"), Term::boolean(*d.dpiaConducted));
    add(n, vocab("includesNonPersonalData"), Term::boolean(d.includesNonPersonalData));
    add(n, vocab("includesAnonymisedData"), Term::boolean(d.includesAnonymisedData));
    add(n, vocab("includesLicencedData"), Term::boolean(d.includesLicencedData));
  }

  void buildHumanInvolvement(const Term& system) {
    if (!card_.humanInvolvement) return;
    const auto& h = *card_.humanInvolvement;
    Term n = node("human-involvement");
    add(system, vocab("hasHumanInvolvement"), n);
    add(n, rdfType(), vocab("HumanInvolvement"));
    add(n, vocab("automationLevel"), enumTerm(h.automationLevel));
    for (const auto& [role, a] : h.perActor) {
      Term actor = node("actor-" + std::string(toString(role)));
      add(n, vocab(role == ActorRole::EndUser ? "hasEndUserInvolvement" : "hasSubjectInvolvement"), actor);
      add(actor, rdfType(), vocab("ActorInvolvement"));
      add(actor, vocab("isIntended"), Term::boolean(a.intended));
      add(actor, vocab("isActive"), Term::boolean(a.active));
      add(actor, vocab("isInformed"), Term::boolean(a.informed));
      add(actor, vocab("hasControlLevel"), enumTerm(a.controlLevel));
    }
  }

  void buildRiskProfile(const Term& system) {
    const auto& rp = card_.riskProfile;
    for (const auto& [area, s] : rp.summary) {
      Term n = node("area-summary-" + std::string(toString(area)));
      add(system, vocab("hasAreaSummary"), n);
      add(n, rdfType(), vocab("RiskAreaSummary"));
      add(n, vocab("summarisesArea"), enumTerm(area));
      add(n, vocab("hasLikelihood"), enumTerm(s.likelihood));
      add(n, vocab("hasSeverity"), enumTerm(s.severity));
      add(n, vocab("hasResidualRisk"), enumTerm(s.residualRisk));
    }
    for (auto kind : rp.measureFlags) add(system, vocab("appliesMeasureType"), enumTerm(kind));

    for (std::size_t i = 0; i < rp.risks.size(); ++i) {
      const auto& r = rp.risks[i];
      Term risk = isAbsoluteIri(r.id) ? Term::iri(r.id) : node("risk-" + std::to_string(i));
      add(system, vocab("hasRisk"), risk);
      add(risk, rdfType(), vocab("Risk"));
      addOrder(risk, i);
      addString(risk, "riskLabel", r.label);
      for (const auto& s : r.sources) add(risk, vocab("hasRiskSource"), str(s));
      for (const auto& c : r.consequences) add(risk, vocab("hasConsequence"), str(c));
      for (std::size_t k = 0; k < r.impacts.size(); ++k) {
        Term imp = Term::iri(risk.value() + "-impact-" + std::to_string(k));
        add(risk, vocab("hasImpact"), imp);
        add(imp, rdfType(), vocab("Impact"));
        addOrder(imp, k);
        add(imp, vocab("concernsArea"), enumTerm(r.impacts[k].area));
        addString(imp, "impactDescription", r.impacts[k].description);
      }
      add(risk, vocab("hasLikelihood"), enumTerm(r.likelihood));
      add(risk, vocab("hasSeverity"), enumTerm(r.severity));
      add(risk, vocab("hasResidualRisk"), enumTerm(r.residualRisk));
      for (const auto& m : r.measures) {
        Term mn = node("measure-" + std::string(toString(m.kind)) + "-" + encodeLocal(m.label));
        add(risk, vocab("hasMeasure"), mn);
        add(mn, rdfType(), vocab("RiskMeasure"));
        add(mn, vocab("measureLabel"), str(m.label));
        add(mn, vocab("measureType"), enumTerm(m.kind));
      }
    }
  }

  void buildQuality(const Term& system) {
    for (std::size_t i = 0; i < card_.quality.size(); ++i) {
      const auto& q = card_.quality[i];
      Term n = node("quality-" + encodeLocal(q.dimension));
      add(system, vocab("hasQualityMetric"), n);
      add(system, vocab("hasQualityDimension"), str(q.dimension));
      add(n, rdfType(), vocab("QualityMeasurement"));
      addOrder(n, i);
      add(n, vocab("qualityDimension"), str(q.dimension));
      add(n, vocab("score"), Term::literal(formatScore(q.score), ns::kXsdDecimal));
      if (q.note) add(n, vocab("note"), str(*q.note));
    }
  }

  void buildChanges(const Term& system) {
    for (std::size_t i = 0; i < card_.predeterminedChanges.size(); ++i) {
      const auto& c = card_.predeterminedChanges[i];
      Term n = node("change-" + std::to_string(i));
      add(system, vocab("hasPredeterminedChange"), n);
      add(n, rdfType(), vocab("PredeterminedChange"));
      addOrder(n, i);
      addString(n, "changeSubject", c.subjectOfChange);
      add(n, vocab("changeFrequency"), str(c.frequency));
      add(n, vocab("changeImpact"), str(c.impactOnPerformanceAndRisks));
    }
  }

  void buildCompliance(const Term& system) {
    const auto& c = card_.compliance;
    for (const auto& v : c.regulations) add(system, vocab("compliesWithRegulation"), str(v));
    for (const auto& v : c.standards) add(system, vocab("conformsToStandard"), str(v));
    for (const auto& v : c.codesOfConduct) add(system, vocab("followsCodeOfConduct"), str(v));
  }

  const AICard& card_;
  bool strict_;
  std::string base_;
  Graph g_;
};

// ----------------------------------------------------------------------------

/// Reads the card graph, remembering which triples were interpreted.
class Reader {
 public:
  explicit Reader(const Graph& g) : g_(g) {}

  std::vector<Term> objects(const Term& s, std::string_view p) { return objects(s, vocab(p)); }

  std::vector<Term> objects(const Term& s, const Term& p) {
    auto out = g_.objects(s, p);
    for (const auto& o : out) used_.insert(Triple(s, p, o));
    return out;
  }

  std::optional<Term> one(const Term& s, std::string_view p) {
    auto all = g_.objects(s, vocab(p));
    if (all.empty()) return std::nullopt;
    used_.insert(Triple(s, vocab(p), all.front()));
    return all.front();
  }

  void touch(const Term& s, const Term& p, const Term& o) {
    Triple t(s, p, o);
    if (g_.contains(t)) used_.insert(t);
  }
  void touchType(const Term& s, std::string_view cls) { touch(s, rdfType(), vocab(cls)); }

  std::string string(const Term& s, std::string_view p) {
    auto v = one(s, p);
    if (!v || !v->isLiteral()) return {};
    return v->value();
  }

  std::string mandatoryString(const Term& s, std::string_view p, const char* section, const char* field) {
    auto v = one(s, p);
    if (!v || !v->isLiteral()) throw CardGraphError(CardGraphError::Kind::MissingMandatory, section, field);
    return v->value();
  }

  bool boolean(const Term& s, std::string_view p) {
    auto v = one(s, p);
    return v && v->isLiteral() && v->value() == "true";
  }

  std::optional<bool> optBoolean(const Term& s, std::string_view p) {
    auto v = one(s, p);
    if (!v) return std::nullopt;
    return v->isLiteral() && v->value() == "true";
  }

  std::vector<std::string> strings(const Term& s, std::string_view p) {
    std::vector<std::string> out;
    for (const auto& o : objects(s, p)) {
      if (o.isLiteral()) out.push_back(o.value());
    }
    return out;
  }

  /// Objects of (s, p) sorted by their `order` value.
  std::vector<Term> ordered(const Term& s, std::string_view p) {
    std::vector<std::pair<long long, Term>> items;
    for (const auto& o : objects(s, p)) {
      long long k = std::numeric_limits<long long>::max();
      if (auto ord = one(o, "order"); ord && ord->isLiteral()) {
        long long parsed = 0;
        const auto& lex = ord->value();
        auto res = std::from_chars(lex.data(), lex.data() + lex.size(), parsed);
        if (res.ec == std::errc{}) k = parsed;
      }
      items.emplace_back(k, o);
    }
    std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first < b.first;
      return a.second < b.second;
    });
    std::vector<Term> out;
    for (auto& [k, t] : items) out.push_back(std::move(t));
    return out;
  }

  template <typename E>
  std::optional<E> enumFrom(const Term& t) const {
    if (!t.isIri()) return std::nullopt;
    std::string_view v = t.value();
    if (v.substr(0, kVocab.size()) != kVocab) return std::nullopt;
    auto e = enumFromString<E>(v.substr(kVocab.size()));
    if (e && toString(*e) == "Other") return std::nullopt;
    return e;
  }

  template <typename E>
  E enumValue(const Term& s, std::string_view p, const char* section, const char* field) {
    auto v = one(s, p);
    if (!v) throw CardGraphError(CardGraphError::Kind::MissingMandatory, section, field);
    auto e = enumFrom<E>(*v);
    if (!e) {
      auto kind = std::is_same_v<E, Level> ? CardGraphError::Kind::MalformedLevel : CardGraphError::Kind::MalformedValue;
      throw CardGraphError(kind, section, field, v->canonical());
    }
    return *e;
  }

  template <typename E>
  Labelled<E> labelled(const Term& s, std::string_view p, const char* section, const char* field) {
    auto v = one(s, p);
    Labelled<E> out;
    if (!v) return out;
    if (v->isLiteral()) {
      out.kind = E::Other;
      out.otherLabel = v->value();
      return out;
    }
    auto e = enumFrom<E>(*v);
    if (!e) throw CardGraphError(CardGraphError::Kind::MalformedValue, section, field, v->canonical());
    out.kind = *e;
    return out;
  }

  std::string labelOf(const Term& n) {
    auto all = g_.objects(n, rdfsLabel());
    if (all.empty() || !all.front().isLiteral()) return {};
    used_.insert(Triple(n, rdfsLabel(), all.front()));
    return all.front().value();
  }

  void warnings(std::vector<std::string>& out) const {
    for (const auto& t : g_.triples()) {
      if (!used_.count(t)) out.push_back("unmapped triple ignored: " + toString(t));
    }
  }

 private:
  const Graph& g_;
  std::set<Triple> used_;
};

}  // namespace

std::string cardNodeIri(const AICard& card, std::string_view local) { return baseIri(card) + std::string(local); }

Graph cardToGraph(const AICard& card, bool checkInvariants) {
  if (checkInvariants) requireValid(card);
  return Builder(card, checkInvariants).build();
}

AICard graphToCard(const Graph& g, std::vector<std::string>* warnings) {
  auto systems = g.subjects(rdfType(), vocab("AISystem"));
  if (systems.empty()) throw CardGraphError(CardGraphError::Kind::MissingMandatory, "general", "systemName");
  if (systems.size() > 1) {
    throw CardGraphError(CardGraphError::Kind::MultipleSystems, "general", "",
                         std::to_string(systems.size()) + " AISystem nodes");
  }
  const Term system = systems.front();
  Reader r(g);
  r.touchType(system, "AISystem");
  AICard card;

  // Metadata lives on the card node describing the system.
  std::optional<Term> cardNode;
  for (const auto& c : g.subjects(vocab("describesSystem"), system)) {
    if (g.contains(Triple(c, rdfType(), vocab("AICard")))) {
      cardNode = c;
      break;
    }
  }
  if (!cardNode) throw CardGraphError(CardGraphError::Kind::MissingMandatory, "meta", "cardVersion", "no AICard node");
  r.touchType(*cardNode, "AICard");
  r.touch(*cardNode, vocab("describesSystem"), system);
  card.meta.cardVersion = r.mandatoryString(*cardNode, "cardVersion", "meta", "cardVersion");
  auto date = parseDate(r.mandatoryString(*cardNode, "issuanceDate", "meta", "issuanceDate"));
  if (!date) throw CardGraphError(CardGraphError::Kind::MalformedValue, "meta", "issuanceDate");
  card.meta.issuanceDate = *date;
  card.meta.language = r.mandatoryString(*cardNode, "language", "meta", "language");
  card.meta.publisher = r.mandatoryString(*cardNode, "publisher", "meta", "publisher");
  card.meta.contact = r.mandatoryString(*cardNode, "contact", "meta", "contact");
  auto spec = r.one(*cardNode, "machineReadableSpec");
  if (!spec || !spec->isIri()) {
    throw CardGraphError(CardGraphError::Kind::MissingMandatory, "meta", "machineReadableSpecUrl");
  }
  card.meta.machineReadableSpecUrl = spec->value();
  if (auto ext = r.one(*cardNode, "extensions"); ext && ext->isLiteral()) {
    try {
      card.extensions = nlohmann::json::parse(ext->value());
    } catch (const nlohmann::json::parse_error&) {
      throw CardGraphError(CardGraphError::Kind::MalformedValue, "extensions", "", "not JSON");
    }
  }

  // General
  card.general.systemName = r.mandatoryString(system, "name", "general", "systemName");
  card.general.systemVersion = r.string(system, "version");
  card.general.modality = r.labelled<Modality>(system, "hasModality", "general", "modality");
  card.general.aiTechniques = r.strings(system, "usesTechnique");
  auto orgs = [&](std::string_view predicate, std::string_view cls) {
    std::vector<OrganisationRef> out;
    for (const auto& o : r.ordered(system, predicate)) {
      r.touchType(o, cls);
      OrganisationRef ref;
      ref.name = r.string(o, "organisationName");
      if (auto url = r.one(o, "organisationUrl"); url && url->isIri()) ref.url = url->value();
      out.push_back(std::move(ref));
    }
    return out;
  };
  card.general.providers = orgs("hasProvider", "AIProvider");
  card.general.developers = orgs("hasDeveloper", "AIDeveloper");

  // Intended use
  auto label = [&](std::string_view predicate, std::string_view cls) -> std::string {
    auto n = r.one(system, predicate);
    if (!n) return {};
    r.touchType(*n, cls);
    return r.labelOf(*n);
  };
  card.intendedUse.domain = label("hasDomain", "Domain");
  card.intendedUse.purpose = label("hasPurpose", "Purpose");
  card.intendedUse.capability = label("hasCapability", "AICapability");
  card.intendedUse.deployer = label("hasDeployer", "AIDeployer");
  for (const auto& s : r.objects(system, "hasSubject")) {
    r.touchType(s, "AISubject");
    card.intendedUse.subjects.push_back(r.labelOf(s));
  }

  // Components
  for (const auto& c : r.ordered(system, "hasComponent")) {
    r.touchType(c, "Component");
    r.touch(c, vocab("isComponentOf"), system);
    ComponentRef ref;
    ref.name = r.string(c, "componentName");
    ref.version = r.string(c, "componentVersion");
    ref.kind = r.labelled<ComponentKind>(c, "componentKind", "components", "kind");
    ref.docLinkOrId = r.string(c, "documentation");
    if (r.one(c, "infoSheetKind")) {
      ref.infoSheetKind = r.labelled<InfoSheetKind>(c, "infoSheetKind", "components", "infoSheetKind");
    }
    card.components.push_back(std::move(ref));
  }

  // Data processing
  if (auto n = r.one(system, "hasDataProcessing")) {
    r.touchType(*n, "DataProcessing");
    r.touchType(*n, "PersonalDataProcessing");
    DataProcessing d;
    d.processesPersonalData = r.boolean(*n, "processesPersonalData");
    d.personalDataCategories = r.strings(*n, "personalDataCategory");
    d.dpiaConducted = r.optBoolean(*n, "dpiaConducted");
    d.includesNonPersonalData = r.boolean(*n, "includesNonPersonalData");
    d.includesAnonymisedData = r.boolean(*n, "includesAnonymisedData");
    d.includesLicencedData = r.boolean(*n, "includesLicencedData");
    card.dataProcessing = std::move(d);
  }

  // Human involvement
  if (auto n = r.one(system, "hasHumanInvolvement")) {
    r.touchType(*n, "HumanInvolvement");
    HumanInvolvement h;
    h.automationLevel = r.enumValue<AutomationLevel>(*n, "automationLevel", "humanInvolvement", "automationLevel");
    for (ActorRole role : allValues<ActorRole>()) {
      bool endUser = role == ActorRole::EndUser;
      auto actor = r.one(*n, endUser ? "hasEndUserInvolvement" : "hasSubjectInvolvement");
      if (!actor) continue;
      r.touchType(*actor, "ActorInvolvement");
      ActorInvolvement a;
      a.intended = r.boolean(*actor, "isIntended");
      a.active = r.boolean(*actor, "isActive");
      a.informed = r.boolean(*actor, "isInformed");
      a.controlLevel = r.enumValue<ControlLevel>(*actor, "hasControlLevel", "humanInvolvement",
                                                 endUser ? "endUser.controlLevel" : "subject.controlLevel");
      h.perActor[role] = a;
    }
    card.humanInvolvement = std::move(h);
  }

  // Risk profile
  for (const auto& n : r.objects(system, "hasAreaSummary")) {
    r.touchType(n, "RiskAreaSummary");
    auto area = r.enumValue<ImpactArea>(n, "summarisesArea", "riskProfile", "summary");
    AreaSummary s;
    s.likelihood = r.enumValue<Level>(n, "hasLikelihood", "riskProfile", "summary.likelihood");
    s.severity = r.enumValue<Level>(n, "hasSeverity", "riskProfile", "summary.severity");
    s.residualRisk = r.enumValue<Level>(n, "hasResidualRisk", "riskProfile", "summary.residualRisk");
    card.riskProfile.summary[area] = s;
  }
  for (const auto& f : r.objects(system, "appliesMeasureType")) {
    auto kind = r.enumFrom<MeasureKind>(f);
    if (!kind) throw CardGraphError(CardGraphError::Kind::MalformedValue, "riskProfile", "measureFlags", f.canonical());
    card.riskProfile.measureFlags.insert(*kind);
  }
  for (const auto& n : r.ordered(system, "hasRisk")) {
    r.touchType(n, "Risk");
    RiskEntry e;
    e.id = n.value();
    e.label = r.string(n, "riskLabel");
    e.sources = r.strings(n, "hasRiskSource");
    e.consequences = r.strings(n, "hasConsequence");
    for (const auto& imp : r.ordered(n, "hasImpact")) {
      r.touchType(imp, "Impact");
      Impact i;
      i.area = r.enumValue<ImpactArea>(imp, "concernsArea", "riskProfile", "risks.impacts.area");
      i.description = r.string(imp, "impactDescription");
      e.impacts.push_back(std::move(i));
    }
    e.likelihood = r.enumValue<Level>(n, "hasLikelihood", "riskProfile", "risks.likelihood");
    e.severity = r.enumValue<Level>(n, "hasSeverity", "riskProfile", "risks.severity");
    e.residualRisk = r.enumValue<Level>(n, "hasResidualRisk", "riskProfile", "risks.residualRisk");
    for (const auto& m : r.objects(n, "hasMeasure")) {
      r.touchType(m, "RiskMeasure");
      Measure measure;
      measure.label = r.string(m, "measureLabel");
      measure.kind = r.enumValue<MeasureKind>(m, "measureType", "riskProfile", "risks.measures.kind");
      e.measures.push_back(std::move(measure));
    }
    card.riskProfile.risks.push_back(std::move(e));
  }

  // Quality
  for (const auto& dim : g.objects(system, vocab("hasQualityDimension"))) r.touch(system, vocab("hasQualityDimension"), dim);
  for (const auto& n : r.ordered(system, "hasQualityMetric")) {
    r.touchType(n, "QualityMeasurement");
    QualityMetric q;
    q.dimension = r.string(n, "qualityDimension");
    auto scoreText = r.string(n, "score");
    auto res = std::from_chars(scoreText.data(), scoreText.data() + scoreText.size(), q.score);
    if (res.ec != std::errc{} || res.ptr != scoreText.data() + scoreText.size()) {
      throw CardGraphError(CardGraphError::Kind::MalformedValue, "quality", "score", scoreText);
    }
    if (r.one(n, "note")) q.note = r.string(n, "note");
    card.quality.push_back(std::move(q));
  }

  // Pre-determined changes
  for (const auto& n : r.ordered(system, "hasPredeterminedChange")) {
    r.touchType(n, "PredeterminedChange");
    PredeterminedChange c;
    c.subjectOfChange = r.string(n, "changeSubject");
    c.frequency = r.string(n, "changeFrequency");
    c.impactOnPerformanceAndRisks = r.string(n, "changeImpact");
    card.predeterminedChanges.push_back(std::move(c));
  }

  // Regulations & certification
  card.compliance.regulations = r.strings(system, "compliesWithRegulation");
  card.compliance.standards = r.strings(system, "conformsToStandard");
  card.compliance.codesOfConduct = r.strings(system, "followsCodeOfConduct");

  if (warnings) r.warnings(*warnings);
  canonicalize(card);
  return card;
}

}  // namespace aicard
