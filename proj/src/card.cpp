#include "aicard/card.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

namespace aicard {

template <>
const std::vector<std::string_view>& enumNames<Modality>() {
  static const std::vector<std::string_view> names{"StandaloneSoftware", "SafetyComponentOfProduct",
                                                   "EmbeddedInProduct", "Other"};
  return names;
}

template <>
const std::vector<std::string_view>& enumNames<ComponentKind>() {
  static const std::vector<std::string_view> names{"Model", "Dataset", "GeneralPurposeAISystem", "Software",
                                                   "Other"};
  return names;
}

template <>
const std::vector<std::string_view>& enumNames<InfoSheetKind>() {
  static const std::vector<std::string_view> names{"Datasheet", "ModelCard", "AIFactsheet", "Other"};
  return names;
}

template <>
const std::vector<std::string_view>& enumNames<AutomationLevel>() {
  static const std::vector<std::string_view> names{"FullyAutonomous", "HighAutomation", "ConditionalAutomation",
                                                   "PartialAutomation", "FullyHumanControlled"};
  return names;
}

template <>
const std::vector<std::string_view>& enumNames<ActorRole>() {
  static const std::vector<std::string_view> names{"EndUser", "AISubject"};
  return names;
}

template <>
const std::vector<std::string_view>& enumNames<ControlLevel>() {
  static const std::vector<std::string_view> names{"CanOptIn",   "CanOptOut",        "CanChallenge",
                                                   "CanCorrect", "CanReverseExPost", "CannotOptOut"};
  return names;
}

template <>
const std::vector<std::string_view>& enumNames<ImpactArea>() {
  static const std::vector<std::string_view> names{"HealthAndSafety", "FundamentalRights", "Society",
                                                   "Environment"};
  return names;
}

template <>
const std::vector<std::string_view>& enumNames<Level>() {
  static const std::vector<std::string_view> names{"VeryLow", "Low", "Moderate", "High", "VeryHigh"};
  return names;
}

template <>
const std::vector<std::string_view>& enumNames<MeasureKind>() {
  static const std::vector<std::string_view> names{"Technical", "HumanOversight", "Cybersecurity", "Transparency",
                                                   "Logging"};
  return names;
}

std::string formatDate(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()), static_cast<unsigned>(d.month()),
                static_cast<unsigned>(d.day()));
  return buf;
}

std::optional<Date> parseDate(std::string_view iso) {
  if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') return std::nullopt;
  auto digits = [&](std::size_t from, std::size_t n) -> std::optional<int> {
    int v = 0;
    for (std::size_t i = from; i < from + n; ++i) {
      if (iso[i] < '0' || iso[i] > '9') return std::nullopt;
      v = v * 10 + (iso[i] - '0');
    }
    return v;
  };
  auto y = digits(0, 4);
  auto m = digits(5, 2);
  auto d = digits(8, 2);
  if (!y || !m || !d) return std::nullopt;
  Date date{std::chrono::year{*y}, std::chrono::month{static_cast<unsigned>(*m)},
            std::chrono::day{static_cast<unsigned>(*d)}};
  if (!date.ok()) return std::nullopt;
  return date;
}

namespace {

void sortUnique(std::vector<std::string>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

bool isLanguageTag(const std::string& tag) {
  try {
    Term::langLiteral("", tag);
    return true;
  } catch (const MalformedTerm&) {
    return false;
  }
}

template <typename E>
void checkLabelled(const Labelled<E>& v, const std::string& path, std::vector<CardIssue>& out) {
  if (v.kind == E::Other && v.otherLabel.empty()) out.push_back({path, "Other requires a label"});
  if (v.kind != E::Other && !v.otherLabel.empty()) out.push_back({path, "label only allowed with Other"});
}

void checkOrganisations(const std::vector<OrganisationRef>& orgs, const std::string& path,
                        std::vector<CardIssue>& out) {
  for (std::size_t i = 0; i < orgs.size(); ++i) {
    std::string p = path + "[" + std::to_string(i) + "]";
    if (orgs[i].name.empty()) out.push_back({p + ".name", "must be nonempty"});
    if (!orgs[i].url.empty() && !isAbsoluteIri(orgs[i].url)) out.push_back({p + ".url", "must be an absolute IRI"});
  }
}

}  // namespace

void canonicalize(AICard& card) {
  sortUnique(card.general.aiTechniques);
  sortUnique(card.intendedUse.subjects);
  if (card.dataProcessing) sortUnique(card.dataProcessing->personalDataCategories);
  for (auto& r : card.riskProfile.risks) {
    sortUnique(r.sources);
    sortUnique(r.consequences);
    std::sort(r.measures.begin(), r.measures.end());
    r.measures.erase(std::unique(r.measures.begin(), r.measures.end()), r.measures.end());
  }
  sortUnique(card.compliance.regulations);
  sortUnique(card.compliance.standards);
  sortUnique(card.compliance.codesOfConduct);
}

AICard canonicalized(AICard card) {
  canonicalize(card);
  return card;
}

std::vector<CardIssue> checkCard(const AICard& card, std::optional<Date> today) {
  std::vector<CardIssue> out;
  const auto& m = card.meta;
  auto nonempty = [&](const std::string& v, const char* path) {
    if (v.empty()) out.push_back({path, "must be nonempty"});
  };

  nonempty(m.cardVersion, "meta.cardVersion");
  if (!m.issuanceDate.ok()) {
    out.push_back({"meta.issuanceDate", "must be a valid calendar date"});
  } else if (today && std::chrono::sys_days{m.issuanceDate} > std::chrono::sys_days{*today}) {
    out.push_back({"meta.issuanceDate", "must not be in the future"});
  }
  if (!isLanguageTag(m.language)) out.push_back({"meta.language", "must be a BCP 47 language tag"});
  nonempty(m.publisher, "meta.publisher");
  if (m.contact.empty()) {
    out.push_back({"meta.contact", "must be nonempty"});
  } else if (m.contact.find('@') == std::string::npos && !isAbsoluteIri(m.contact)) {
    out.push_back({"meta.contact", "must be an e-mail address or URL"});
  }
  if (!isAbsoluteIri(m.machineReadableSpecUrl)) {
    out.push_back({"meta.machineReadableSpecUrl", "must be an absolute IRI"});
  }

  const auto& g = card.general;
  nonempty(g.systemName, "general.systemName");
  checkLabelled(g.modality, "general.modality", out);
  if (g.providers.empty()) out.push_back({"general.providers", "at least one provider required"});
  checkOrganisations(g.providers, "general.providers", out);
  checkOrganisations(g.developers, "general.developers", out);

  const auto& iu = card.intendedUse;
  nonempty(iu.domain, "intendedUse.domain");
  nonempty(iu.purpose, "intendedUse.purpose");
  nonempty(iu.capability, "intendedUse.capability");
  nonempty(iu.deployer, "intendedUse.deployer");

  std::set<std::string> componentNames;
  std::set<std::string> componentDocs;
  for (std::size_t i = 0; i < card.components.size(); ++i) {
    const auto& c = card.components[i];
    std::string p = "components[" + std::to_string(i) + "]";
    if (c.name.empty()) out.push_back({p + ".name", "must be nonempty"});
    if (c.docLinkOrId.empty()) out.push_back({p + ".docLinkOrId", "must be nonempty"});
    if (!componentNames.insert(c.name).second) out.push_back({p + ".name", "duplicate component name"});
    if (!componentDocs.insert(c.docLinkOrId).second) {
      out.push_back({p + ".docLinkOrId", "duplicate documentation link"});
    }
    checkLabelled(c.kind, p + ".kind", out);
    if (c.infoSheetKind) checkLabelled(*c.infoSheetKind, p + ".infoSheetKind", out);
  }

  if (const auto& dp = card.dataProcessing) {
    if (dp->processesPersonalData && dp->personalDataCategories.empty()) {
      out.push_back({"dataProcessing.personalDataCategories", "required when personal data is processed"});
    }
    if (!dp->processesPersonalData && !dp->personalDataCategories.empty()) {
      out.push_back({"dataProcessing.personalDataCategories", "only allowed when personal data is processed"});
    }
    if (!dp->processesPersonalData && dp->dpiaConducted) {
      out.push_back({"dataProcessing.dpiaConducted", "only allowed when personal data is processed"});
    }
  }

  if (const auto& hi = card.humanInvolvement) {
    for (ActorRole role : allValues<ActorRole>()) {
      if (!hi->perActor.count(role)) {
        out.push_back({"humanInvolvement." + std::string(role == ActorRole::EndUser ? "endUser" : "subject"),
                       "both actor roles must be present"});
      }
    }
  }

  std::set<std::string> riskIds;
  for (std::size_t i = 0; i < card.riskProfile.risks.size(); ++i) {
    const auto& r = card.riskProfile.risks[i];
    std::string p = "riskProfile.risks[" + std::to_string(i) + "]";
    if (!isAbsoluteIri(r.id)) out.push_back({p + ".id", "must be an absolute IRI"});
    if (!riskIds.insert(r.id).second) out.push_back({p + ".id", "duplicate risk id"});
    if (r.impacts.empty()) out.push_back({p + ".impacts", "at least one impact required"});
  }

  std::set<std::string> dims;
  for (std::size_t i = 0; i < card.quality.size(); ++i) {
    const auto& q = card.quality[i];
    std::string p = "quality[" + std::to_string(i) + "]";
    if (q.dimension.empty()) out.push_back({p + ".dimension", "must be nonempty"});
    if (!dims.insert(q.dimension).second) out.push_back({p + ".dimension", "duplicate dimension"});
    if (!std::isfinite(q.score) || q.score < 0.0 || q.score > 1.0) {
      out.push_back({p + ".score", "must lie in [0, 1]"});
    }
  }

  for (std::size_t i = 0; i < card.predeterminedChanges.size(); ++i) {
    if (card.predeterminedChanges[i].subjectOfChange.empty()) {
      out.push_back({"predeterminedChanges[" + std::to_string(i) + "].subjectOfChange", "must be nonempty"});
    }
  }

  if (!card.extensions.is_object()) out.push_back({"extensions", "must be a JSON object"});
  return out;
}

void requireValid(const AICard& card, std::optional<Date> today) {
  auto issues = checkCard(card, today);
  if (!issues.empty()) throw InvariantViolation(issues.front().path, issues.front().message);
}

}  // namespace aicard
