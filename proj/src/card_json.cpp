#include "aicard/card_json.hpp"

#include <set>

namespace aicard {

using ojson = nlohmann::ordered_json;

CardJsonError::CardJsonError(Kind kind, std::string path, std::string detail)
    : Error(std::string(toString(kind)) + (path.empty() ? "" : " at " + path) + ": " + detail),
      kind_(kind),
      path_(std::move(path)),
      detail_(std::move(detail)) {}

std::string_view toString(CardJsonError::Kind kind) {
  switch (kind) {
    case CardJsonError::Kind::JsonMalformed: return "json-malformed";
    case CardJsonError::Kind::SchemaViolation: return "schema-violation";
    case CardJsonError::Kind::UnknownEnumValue: return "unknown-enum-value";
  }
  return "error";
}

// ----------------------------------------------------------------------------
// Writing

namespace {

template <typename E>
ojson labelledToJson(const Labelled<E>& v) {
  if (v.kind == E::Other) return ojson{{"other", v.otherLabel}};
  return std::string(toString(v.kind));
}

ojson stringList(const std::vector<std::string>& v) {
  ojson out = ojson::array();
  for (const auto& s : v) out.push_back(s);
  return out;
}

ojson orgsToJson(const std::vector<OrganisationRef>& orgs) {
  ojson out = ojson::array();
  for (const auto& o : orgs) {
    ojson j;
    j["name"] = o.name;
    if (!o.url.empty()) j["url"] = o.url;
    out.push_back(std::move(j));
  }
  return out;
}

ojson actorToJson(const ActorInvolvement& a) {
  ojson j;
  j["intended"] = a.intended;
  j["active"] = a.active;
  j["informed"] = a.informed;
  j["controlLevel"] = toString(a.controlLevel);
  return j;
}

const char* actorKey(ActorRole role) { return role == ActorRole::EndUser ? "endUser" : "subject"; }

}  // namespace

ojson cardToJson(const AICard& card) {
  ojson doc;
  doc["@contextIri"] = kCardContextIri;

  ojson meta;
  meta["cardVersion"] = card.meta.cardVersion;
  meta["issuanceDate"] = formatDate(card.meta.issuanceDate);
  meta["language"] = card.meta.language;
  meta["publisher"] = card.meta.publisher;
  meta["contact"] = card.meta.contact;
  meta["machineReadableSpecUrl"] = card.meta.machineReadableSpecUrl;
  doc["meta"] = std::move(meta);

  ojson general;
  general["systemName"] = card.general.systemName;
  general["systemVersion"] = card.general.systemVersion;
  general["modality"] = labelledToJson(card.general.modality);
  general["aiTechniques"] = stringList(card.general.aiTechniques);
  general["providers"] = orgsToJson(card.general.providers);
  general["developers"] = orgsToJson(card.general.developers);
  doc["general"] = std::move(general);

  ojson use;
  use["domain"] = card.intendedUse.domain;
  use["purpose"] = card.intendedUse.purpose;
  use["capability"] = card.intendedUse.capability;
  use["deployer"] = card.intendedUse.deployer;
  use["subjects"] = stringList(card.intendedUse.subjects);
  doc["intendedUse"] = std::move(use);

  ojson components = ojson::array();
  for (const auto& c : card.components) {
    ojson j;
    j["name"] = c.name;
    j["version"] = c.version;
    j["kind"] = labelledToJson(c.kind);
    j["docLinkOrId"] = c.docLinkOrId;
    if (c.infoSheetKind) j["infoSheetKind"] = labelledToJson(*c.infoSheetKind);
    components.push_back(std::move(j));
  }
  doc["components"] = std::move(components);

  if (const auto& dp = card.dataProcessing) {
    ojson j;
    j["processesPersonalData"] = dp->processesPersonalData;
    j["personalDataCategories"] = stringList(dp->personalDataCategories);
    if (dp->dpiaConducted) j["dpiaConducted"] = *dp->dpiaConducted;
    j["includesNonPersonalData"] = dp->includesNonPersonalData;
    j["includesAnonymisedData"] = dp->includesAnonymisedData;
    j["includesLicencedData"] = dp->includesLicencedData;
    doc["dataProcessing"] = std::move(j);
  }

  if (const auto& hi = card.humanInvolvement) {
    ojson j;
    j["automationLevel"] = toString(hi->automationLevel);
    for (ActorRole role : allValues<ActorRole>()) {
      auto it = hi->perActor.find(role);
      if (it != hi->perActor.end()) j[actorKey(role)] = actorToJson(it->second);
    }
    doc["humanInvolvement"] = std::move(j);
  }

  ojson risk;
  ojson summary = ojson::object();
  for (const auto& [area, s] : card.riskProfile.summary) {
    ojson j;
    j["likelihood"] = toString(s.likelihood);
    j["severity"] = toString(s.severity);
    j["residualRisk"] = toString(s.residualRisk);
    summary[std::string(toString(area))] = std::move(j);
  }
  risk["summary"] = std::move(summary);
  ojson flags = ojson::array();
  for (auto f : card.riskProfile.measureFlags) flags.push_back(toString(f));
  risk["measureFlags"] = std::move(flags);
  ojson risks = ojson::array();
  for (const auto& r : card.riskProfile.risks) {
    ojson j;
    j["id"] = r.id;
    j["label"] = r.label;
    j["sources"] = stringList(r.sources);
    j["consequences"] = stringList(r.consequences);
    ojson impacts = ojson::array();
    for (const auto& i : r.impacts) impacts.push_back(ojson{{"area", toString(i.area)}, {"description", i.description}});
    j["impacts"] = std::move(impacts);
    j["likelihood"] = toString(r.likelihood);
    j["severity"] = toString(r.severity);
    j["residualRisk"] = toString(r.residualRisk);
    ojson measures = ojson::array();
    for (const auto& m : r.measures) measures.push_back(ojson{{"label", m.label}, {"kind", toString(m.kind)}});
    j["measures"] = std::move(measures);
    risks.push_back(std::move(j));
  }
  risk["risks"] = std::move(risks);
  doc["riskProfile"] = std::move(risk);

  ojson quality = ojson::array();
  for (const auto& q : card.quality) {
    ojson j;
    j["dimension"] = q.dimension;
    j["score"] = q.score;
    if (q.note) j["note"] = *q.note;
    quality.push_back(std::move(j));
  }
  doc["quality"] = std::move(quality);

  ojson changes = ojson::array();
  for (const auto& c : card.predeterminedChanges) {
    ojson j;
    j["subjectOfChange"] = c.subjectOfChange;
    j["frequency"] = c.frequency;
    j["impactOnPerformanceAndRisks"] = c.impactOnPerformanceAndRisks;
    changes.push_back(std::move(j));
  }
  doc["predeterminedChanges"] = std::move(changes);

  ojson compliance;
  compliance["regulations"] = stringList(card.compliance.regulations);
  compliance["standards"] = stringList(card.compliance.standards);
  compliance["codesOfConduct"] = stringList(card.compliance.codesOfConduct);
  doc["compliance"] = std::move(compliance);

  if (card.extensions.is_object() && !card.extensions.empty()) {
    doc["extensions"] = ojson::parse(card.extensions.dump());
  }
  return doc;
}

std::string serializeCardJson(const AICard& card) { return cardToJson(card).dump(2) + "\n"; }

// ----------------------------------------------------------------------------
// Reading

namespace {

/// Walks one JSON object, tracking the keys consumed so the rest can be
/// routed to the extensions bag.
class ObjectReader {
 public:
  ObjectReader(const ojson& obj, std::string path, nlohmann::json& extensions)
      : obj_(obj), path_(std::move(path)), extensions_(extensions) {
    if (!obj_.is_object()) schema(path_, "expected an object");
  }

  ~ObjectReader() = default;
  ObjectReader(const ObjectReader&) = delete;
  ObjectReader& operator=(const ObjectReader&) = delete;

  [[noreturn]] static void schema(const std::string& path, const std::string& why) {
    throw CardJsonError(CardJsonError::Kind::SchemaViolation, path, why);
  }

  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const ojson* find(const std::string& key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end() || it->is_null()) return nullptr;
    return &*it;
  }

  const ojson& require(const std::string& key) {
    const ojson* v = find(key);
    if (!v) schema(child(key), "missing mandatory field");
    return *v;
  }

  std::string str(const std::string& key, bool mandatory = false) {
    const ojson* v = mandatory ? &require(key) : find(key);
    if (!v) return {};
    if (!v->is_string()) schema(child(key), "expected a string");
    return v->get<std::string>();
  }

  bool boolean(const std::string& key) {
    const ojson* v = find(key);
    if (!v) return false;
    if (!v->is_boolean()) schema(child(key), "expected a boolean");
    return v->get<bool>();
  }

  std::optional<bool> optBoolean(const std::string& key) {
    const ojson* v = find(key);
    if (!v) return std::nullopt;
    if (!v->is_boolean()) schema(child(key), "expected a boolean");
    return v->get<bool>();
  }

  std::vector<std::string> strings(const std::string& key) {
    std::vector<std::string> out;
    const ojson* v = find(key);
    if (!v) return out;
    if (!v->is_array()) schema(child(key), "expected an array of strings");
    for (std::size_t i = 0; i < v->size(); ++i) {
      if (!(*v)[i].is_string()) schema(child(key) + "[" + std::to_string(i) + "]", "expected a string");
      out.push_back((*v)[i].get<std::string>());
    }
    return out;
  }

  const ojson* array(const std::string& key) {
    const ojson* v = find(key);
    if (v && !v->is_array()) schema(child(key), "expected an array");
    return v;
  }

  template <typename E>
  E enumValue(const std::string& key, std::optional<E> fallback = std::nullopt) {
    const ojson* v = fallback ? find(key) : &require(key);
    if (!v) return *fallback;
    if (!v->is_string()) schema(child(key), "expected a string");
    auto s = v->get<std::string>();
    auto e = enumFromString<E>(s);
    if (!e) throw CardJsonError(CardJsonError::Kind::UnknownEnumValue, child(key), s);
    return *e;
  }

  template <typename E>
  Labelled<E> labelled(const std::string& key, bool mandatory) {
    const ojson* v = mandatory ? &require(key) : find(key);
    Labelled<E> out;
    if (!v) return out;
    if (v->is_object()) {
      if (v->size() != 1 || !v->contains("other") || !(*v)["other"].is_string()) {
        schema(child(key), "expected {\"other\": <label>}");
      }
      out.kind = E::Other;
      out.otherLabel = (*v)["other"].get<std::string>();
      return out;
    }
    if (!v->is_string()) schema(child(key), "expected a string or {\"other\": <label>}");
    auto s = v->get<std::string>();
    auto e = enumFromString<E>(s);
    if (!e || *e == E::Other) throw CardJsonError(CardJsonError::Kind::UnknownEnumValue, child(key), s);
    out.kind = *e;
    return out;
  }

  /// Routes unconsumed keys into the extensions bag.
  void finish() {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) extensions_[child(it.key())] = nlohmann::json::parse(it.value().dump());
    }
  }

 private:
  const ojson& obj_;
  std::string path_;
  nlohmann::json& extensions_;
  std::set<std::string> seen_;
};

std::vector<OrganisationRef> readOrgs(ObjectReader& r, const std::string& key, nlohmann::json& ext) {
  std::vector<OrganisationRef> out;
  const ojson* arr = r.array(key);
  if (!arr) return out;
  for (std::size_t i = 0; i < arr->size(); ++i) {
    ObjectReader o((*arr)[i], r.child(key) + "[" + std::to_string(i) + "]", ext);
    out.push_back({o.str("name"), o.str("url")});
    o.finish();
  }
  return out;
}

ActorInvolvement readActor(const ojson& j, const std::string& path, nlohmann::json& ext) {
  ObjectReader r(j, path, ext);
  ActorInvolvement a;
  a.intended = r.boolean("intended");
  a.active = r.boolean("active");
  a.informed = r.boolean("informed");
  a.controlLevel = r.enumValue<ControlLevel>("controlLevel");
  r.finish();
  return a;
}

}  // namespace

AICard cardFromJson(const ojson& doc) {
  if (!doc.is_object()) throw CardJsonError(CardJsonError::Kind::SchemaViolation, "", "document must be an object");
  static const std::set<std::string> kTopLevel{
      "@contextIri", "meta",    "general",      "intendedUse", "components", "dataProcessing", "humanInvolvement",
      "riskProfile", "quality", "predeterminedChanges", "compliance", "extensions"};
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!kTopLevel.count(it.key())) {
      throw CardJsonError(CardJsonError::Kind::SchemaViolation, it.key(), "unknown top-level key");
    }
  }

  AICard card;
  nlohmann::json& ext = card.extensions;
  if (auto it = doc.find("extensions"); it != doc.end() && !it->is_null()) {
    if (!it->is_object()) throw CardJsonError(CardJsonError::Kind::SchemaViolation, "extensions", "expected an object");
    ext = nlohmann::json::parse(it->dump());
  }
  if (auto it = doc.find("@contextIri"); it != doc.end() && !it->is_string()) {
    throw CardJsonError(CardJsonError::Kind::SchemaViolation, "@contextIri", "expected a string");
  }

  auto section = [&](const char* key) -> const ojson* {
    auto it = doc.find(key);
    if (it == doc.end() || it->is_null()) return nullptr;
    return &*it;
  };

  {
    const ojson* m = section("meta");
    if (!m) throw CardJsonError(CardJsonError::Kind::SchemaViolation, "meta", "missing mandatory section");
    ObjectReader r(*m, "meta", ext);
    card.meta.cardVersion = r.str("cardVersion", true);
    auto dateText = r.str("issuanceDate", true);
    auto date = parseDate(dateText);
    if (!date) ObjectReader::schema("meta.issuanceDate", "expected an ISO 8601 date (YYYY-MM-DD)");
    card.meta.issuanceDate = *date;
    card.meta.language = r.str("language", true);
    card.meta.publisher = r.str("publisher", true);
    card.meta.contact = r.str("contact", true);
    card.meta.machineReadableSpecUrl = r.str("machineReadableSpecUrl", true);
    r.finish();
  }

  if (const ojson* g = section("general")) {
    ObjectReader r(*g, "general", ext);
    card.general.systemName = r.str("systemName");
    card.general.systemVersion = r.str("systemVersion");
    card.general.modality = r.labelled<Modality>("modality", false);
    card.general.aiTechniques = r.strings("aiTechniques");
    card.general.providers = readOrgs(r, "providers", ext);
    card.general.developers = readOrgs(r, "developers", ext);
    r.finish();
  }

  if (const ojson* u = section("intendedUse")) {
    ObjectReader r(*u, "intendedUse", ext);
    card.intendedUse.domain = r.str("domain");
    card.intendedUse.purpose = r.str("purpose");
    card.intendedUse.capability = r.str("capability");
    card.intendedUse.deployer = r.str("deployer");
    card.intendedUse.subjects = r.strings("subjects");
    r.finish();
  }

  if (const ojson* cs = section("components")) {
    if (!cs->is_array()) ObjectReader::schema("components", "expected an array");
    for (std::size_t i = 0; i < cs->size(); ++i) {
      ObjectReader r((*cs)[i], "components[" + std::to_string(i) + "]", ext);
      ComponentRef c;
      c.name = r.str("name");
      c.version = r.str("version");
      c.kind = r.labelled<ComponentKind>("kind", false);
      c.docLinkOrId = r.str("docLinkOrId");
      if (r.find("infoSheetKind")) c.infoSheetKind = r.labelled<InfoSheetKind>("infoSheetKind", true);
      r.finish();
      card.components.push_back(std::move(c));
    }
  }

  if (const ojson* d = section("dataProcessing")) {
    ObjectReader r(*d, "dataProcessing", ext);
    DataProcessing dp;
    dp.processesPersonalData = r.boolean("processesPersonalData");
    dp.personalDataCategories = r.strings("personalDataCategories");
    dp.dpiaConducted = r.optBoolean("dpiaConducted");
    dp.includesNonPersonalData = r.boolean("includesNonPersonalData");
    dp.includesAnonymisedData = r.boolean("includesAnonymisedData");
    dp.includesLicencedData = r.boolean("includesLicencedData");
    r.finish();
    card.dataProcessing = std::move(dp);
  }

  if (const ojson* h = section("humanInvolvement")) {
    ObjectReader r(*h, "humanInvolvement", ext);
    HumanInvolvement hi;
    hi.automationLevel = r.enumValue<AutomationLevel>("automationLevel");
    for (ActorRole role : allValues<ActorRole>()) {
      std::string key = actorKey(role);
      if (const ojson* a = r.find(key)) hi.perActor[role] = readActor(*a, r.child(key), ext);
    }
    r.finish();
    card.humanInvolvement = std::move(hi);
  }

  if (const ojson* rp = section("riskProfile")) {
    ObjectReader r(*rp, "riskProfile", ext);
    if (const ojson* s = r.find("summary")) {
      if (!s->is_object()) ObjectReader::schema("riskProfile.summary", "expected an object");
      for (auto it = s->begin(); it != s->end(); ++it) {
        std::string path = "riskProfile.summary." + it.key();
        auto area = enumFromString<ImpactArea>(it.key());
        if (!area) throw CardJsonError(CardJsonError::Kind::UnknownEnumValue, path, it.key());
        ObjectReader a(it.value(), path, ext);
        AreaSummary sum;
        sum.likelihood = a.enumValue<Level>("likelihood");
        sum.severity = a.enumValue<Level>("severity");
        sum.residualRisk = a.enumValue<Level>("residualRisk");
        a.finish();
        card.riskProfile.summary[*area] = sum;
      }
    }
    if (const ojson* flags = r.array("measureFlags")) {
      for (std::size_t i = 0; i < flags->size(); ++i) {
        std::string path = "riskProfile.measureFlags[" + std::to_string(i) + "]";
        if (!(*flags)[i].is_string()) ObjectReader::schema(path, "expected a string");
        auto s = (*flags)[i].get<std::string>();
        auto k = enumFromString<MeasureKind>(s);
        if (!k) throw CardJsonError(CardJsonError::Kind::UnknownEnumValue, path, s);
        card.riskProfile.measureFlags.insert(*k);
      }
    }
    if (const ojson* risks = r.array("risks")) {
      for (std::size_t i = 0; i < risks->size(); ++i) {
        std::string path = "riskProfile.risks[" + std::to_string(i) + "]";
        ObjectReader e((*risks)[i], path, ext);
        RiskEntry entry;
        entry.id = e.str("id", true);
        entry.label = e.str("label");
        entry.sources = e.strings("sources");
        entry.consequences = e.strings("consequences");
        if (const ojson* imps = e.array("impacts")) {
          for (std::size_t k = 0; k < imps->size(); ++k) {
            ObjectReader ir((*imps)[k], path + ".impacts[" + std::to_string(k) + "]", ext);
            Impact imp;
            imp.area = ir.enumValue<ImpactArea>("area");
            imp.description = ir.str("description");
            ir.finish();
            entry.impacts.push_back(std::move(imp));
          }
        }
        entry.likelihood = e.enumValue<Level>("likelihood");
        entry.severity = e.enumValue<Level>("severity");
        entry.residualRisk = e.enumValue<Level>("residualRisk");
        if (const ojson* ms = e.array("measures")) {
          for (std::size_t k = 0; k < ms->size(); ++k) {
            ObjectReader mr((*ms)[k], path + ".measures[" + std::to_string(k) + "]", ext);
            Measure m;
            m.label = mr.str("label", true);
            m.kind = mr.enumValue<MeasureKind>("kind");
            mr.finish();
            entry.measures.push_back(std::move(m));
          }
        }
        e.finish();
        card.riskProfile.risks.push_back(std::move(entry));
      }
    }
    r.finish();
  }

  if (const ojson* qs = section("quality")) {
    if (!qs->is_array()) ObjectReader::schema("quality", "expected an array");
    for (std::size_t i = 0; i < qs->size(); ++i) {
      std::string path = "quality[" + std::to_string(i) + "]";
      ObjectReader r((*qs)[i], path, ext);
      QualityMetric q;
      q.dimension = r.str("dimension", true);
      const ojson& score = r.require("score");
      if (!score.is_number()) ObjectReader::schema(path + ".score", "expected a number");
      q.score = score.get<double>();
      if (r.find("note")) q.note = r.str("note");
      r.finish();
      card.quality.push_back(std::move(q));
    }
  }

  if (const ojson* pcs = section("predeterminedChanges")) {
    if (!pcs->is_array()) ObjectReader::schema("predeterminedChanges", "expected an array");
    for (std::size_t i = 0; i < pcs->size(); ++i) {
      ObjectReader r((*pcs)[i], "predeterminedChanges[" + std::to_string(i) + "]", ext);
      PredeterminedChange c;
      c.subjectOfChange = r.str("subjectOfChange");
      c.frequency = r.str("frequency");
      c.impactOnPerformanceAndRisks = r.str("impactOnPerformanceAndRisks");
      r.finish();
      card.predeterminedChanges.push_back(std::move(c));
    }
  }

  if (const ojson* c = section("compliance")) {
    ObjectReader r(*c, "compliance", ext);
    card.compliance.regulations = r.strings("regulations");
    card.compliance.standards = r.strings("standards");
    card.compliance.codesOfConduct = r.strings("codesOfConduct");
    r.finish();
  }

  canonicalize(card);
  return card;
}

AICard parseCardJson(std::string_view text) {
  ojson doc;
  try {
    doc = ojson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw CardJsonError(CardJsonError::Kind::JsonMalformed, "", e.what());
  }
  return cardFromJson(doc);
}

AICard blankCard() {
  AICard c;
  c.meta.cardVersion = "1.0";
  c.meta.issuanceDate = Date{std::chrono::year{2024}, std::chrono::January, std::chrono::day{1}};
  c.meta.language = "en";
  c.meta.publisher = "";
  c.meta.contact = "";
  c.meta.machineReadableSpecUrl = "https://example.org/my-system/aicard.ttl";
  c.dataProcessing = DataProcessing{};
  HumanInvolvement hi;
  hi.perActor[ActorRole::EndUser] = {};
  hi.perActor[ActorRole::AISubject] = {};
  c.humanInvolvement = hi;
  for (auto* dim : {"Accuracy", "Robustness", "Cybersecurity"}) c.quality.push_back({dim, 0.0, std::nullopt});
  return c;
}

}  // namespace aicard
