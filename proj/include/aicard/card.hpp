#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "aicard/graph.hpp"

namespace aicard {

// ----------------------------------------------------------------------------
// Enumerations. Each has a fixed string spelling used by both the JSON
// document and the graph vocabulary (as the local name of an IRI).

enum class Modality { StandaloneSoftware, SafetyComponentOfProduct, EmbeddedInProduct, Other };
enum class ComponentKind { Model, Dataset, GeneralPurposeAISystem, Software, Other };
enum class InfoSheetKind { Datasheet, ModelCard, AIFactsheet, Other };

/// Ordered from most to least automated. The two endpoints follow ISO/IEC
/// 22989; the three intermediate labels are this toolkit's own.
enum class AutomationLevel {
  FullyAutonomous,
  HighAutomation,
  ConditionalAutomation,
  PartialAutomation,
  FullyHumanControlled
};

enum class ActorRole { EndUser, AISubject };

enum class ControlLevel { CanOptIn, CanOptOut, CanChallenge, CanCorrect, CanReverseExPost, CannotOptOut };

enum class ImpactArea { HealthAndSafety, FundamentalRights, Society, Environment };

/// Five-point ordinal scale shared by likelihood, severity and residual risk.
enum class Level { VeryLow, Low, Moderate, High, VeryHigh };

enum class MeasureKind { Technical, HumanOversight, Cybersecurity, Transparency, Logging };

/// Closed list of spellings for an enum, in declaration order.
template <typename E>
const std::vector<std::string_view>& enumNames();
template <>
const std::vector<std::string_view>& enumNames<Modality>();
template <>
const std::vector<std::string_view>& enumNames<ComponentKind>();
template <>
const std::vector<std::string_view>& enumNames<InfoSheetKind>();
template <>
const std::vector<std::string_view>& enumNames<AutomationLevel>();
template <>
const std::vector<std::string_view>& enumNames<ActorRole>();
template <>
const std::vector<std::string_view>& enumNames<ControlLevel>();
template <>
const std::vector<std::string_view>& enumNames<ImpactArea>();
template <>
const std::vector<std::string_view>& enumNames<Level>();
template <>
const std::vector<std::string_view>& enumNames<MeasureKind>();

template <typename E>
  requires std::is_enum_v<E>
std::string_view toString(E value) {
  return enumNames<E>().at(static_cast<std::size_t>(value));
}

/// Parses a spelling; nullopt when unknown.
template <typename E>
std::optional<E> enumFromString(std::string_view s) {
  const auto& names = enumNames<E>();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == s) return static_cast<E>(i);
  }
  return std::nullopt;
}

template <typename E>
std::vector<E> allValues() {
  std::vector<E> out;
  for (std::size_t i = 0; i < enumNames<E>().size(); ++i) out.push_back(static_cast<E>(i));
  return out;
}

/// Enum value, or a free-text label when the value is `Other`.
template <typename E>
struct Labelled {
  E kind{};
  std::string otherLabel;  // only meaningful when kind == E::Other

  friend bool operator==(const Labelled&, const Labelled&) = default;
};

// ----------------------------------------------------------------------------
// Card sections.

using Date = std::chrono::year_month_day;

std::string formatDate(const Date& d);
std::optional<Date> parseDate(std::string_view iso);

struct CardMetadata {
  std::string cardVersion;
  Date issuanceDate{};
  std::string language;  // BCP 47
  std::string publisher;
  std::string contact;  // e-mail address or URL
  std::string machineReadableSpecUrl;

  friend bool operator==(const CardMetadata&, const CardMetadata&) = default;
};

struct OrganisationRef {
  std::string name;
  std::string url;  // optional, empty when unknown

  friend bool operator==(const OrganisationRef&, const OrganisationRef&) = default;
};

struct GeneralInfo {
  std::string systemName;
  std::string systemVersion;
  Labelled<Modality> modality;
  std::vector<std::string> aiTechniques;  // set
  std::vector<OrganisationRef> providers;
  std::vector<OrganisationRef> developers;

  friend bool operator==(const GeneralInfo&, const GeneralInfo&) = default;
};

struct IntendedUse {
  std::string domain;
  std::string purpose;
  std::string capability;
  std::string deployer;
  std::vector<std::string> subjects;  // set

  friend bool operator==(const IntendedUse&, const IntendedUse&) = default;
};

struct ComponentRef {
  std::string name;
  std::string version;
  Labelled<ComponentKind> kind;
  std::string docLinkOrId;
  std::optional<Labelled<InfoSheetKind>> infoSheetKind;

  friend bool operator==(const ComponentRef&, const ComponentRef&) = default;
};

struct DataProcessing {
  bool processesPersonalData = false;
  std::vector<std::string> personalDataCategories;  // set
  std::optional<bool> dpiaConducted;
  bool includesNonPersonalData = false;
  bool includesAnonymisedData = false;
  bool includesLicencedData = false;

  friend bool operator==(const DataProcessing&, const DataProcessing&) = default;
};

struct ActorInvolvement {
  bool intended = false;
  bool active = false;
  bool informed = false;
  ControlLevel controlLevel = ControlLevel::CanOptIn;

  friend bool operator==(const ActorInvolvement&, const ActorInvolvement&) = default;
};

struct HumanInvolvement {
  AutomationLevel automationLevel = AutomationLevel::FullyHumanControlled;
  std::map<ActorRole, ActorInvolvement> perActor;

  friend bool operator==(const HumanInvolvement&, const HumanInvolvement&) = default;
};

struct AreaSummary {
  Level likelihood = Level::VeryLow;
  Level severity = Level::VeryLow;
  Level residualRisk = Level::VeryLow;

  friend bool operator==(const AreaSummary&, const AreaSummary&) = default;
};

struct Impact {
  ImpactArea area = ImpactArea::HealthAndSafety;
  std::string description;

  friend bool operator==(const Impact&, const Impact&) = default;
};

struct Measure {
  std::string label;
  MeasureKind kind = MeasureKind::Technical;

  friend bool operator==(const Measure&, const Measure&) = default;
  friend auto operator<=>(const Measure&, const Measure&) = default;
};

struct RiskEntry {
  std::string id;  // IRI
  std::string label;
  std::vector<std::string> sources;       // set
  std::vector<std::string> consequences;  // set
  std::vector<Impact> impacts;
  Level likelihood = Level::VeryLow;
  Level severity = Level::VeryLow;
  Level residualRisk = Level::VeryLow;
  std::vector<Measure> measures;  // set

  friend bool operator==(const RiskEntry&, const RiskEntry&) = default;
};

struct RiskProfile {
  std::map<ImpactArea, AreaSummary> summary;
  std::set<MeasureKind> measureFlags;
  std::vector<RiskEntry> risks;

  friend bool operator==(const RiskProfile&, const RiskProfile&) = default;
};

struct QualityMetric {
  std::string dimension;
  double score = 0.0;  // in [0, 1]
  std::optional<std::string> note;

  friend bool operator==(const QualityMetric&, const QualityMetric&) = default;
};

struct PredeterminedChange {
  std::string subjectOfChange;
  std::string frequency;  // free text or ISO 8601 duration
  std::string impactOnPerformanceAndRisks;

  friend bool operator==(const PredeterminedChange&, const PredeterminedChange&) = default;
};

struct ComplianceInfo {
  std::vector<std::string> regulations;     // set
  std::vector<std::string> standards;       // set
  std::vector<std::string> codesOfConduct;  // set

  friend bool operator==(const ComplianceInfo&, const ComplianceInfo&) = default;
};

/// One intended use of one AI system: metadata plus nine sections.
///
/// Fields commented `set` are unordered collections and are kept sorted and
/// free of duplicates by canonicalize(). The data-processing and
/// human-involvement sections are optional: an absent section means "not yet
/// documented", which the completeness shapes report.
struct AICard {
  CardMetadata meta;
  GeneralInfo general;
  IntendedUse intendedUse;
  std::vector<ComponentRef> components;
  std::optional<DataProcessing> dataProcessing;
  std::optional<HumanInvolvement> humanInvolvement;
  RiskProfile riskProfile;
  std::vector<QualityMetric> quality;
  std::vector<PredeterminedChange> predeterminedChanges;
  ComplianceInfo compliance;
  /// Forward-compatible bag: unknown nested JSON keys keyed by dotted path,
  /// plus anything authored under the top-level `extensions` key.
  nlohmann::json extensions = nlohmann::json::object();

  friend bool operator==(const AICard&, const AICard&) = default;
};

/// Sorts and deduplicates every set-valued field.
void canonicalize(AICard& card);
AICard canonicalized(AICard card);

struct CardIssue {
  std::string path;
  std::string message;

  friend bool operator==(const CardIssue&, const CardIssue&) = default;
};

/// Checks every section invariant. When `today` is given, an issuance date
/// after it is reported.
std::vector<CardIssue> checkCard(const AICard& card, std::optional<Date> today = std::nullopt);

/// Thrown when an operation requires a valid card.
class InvariantViolation : public Error {
 public:
  InvariantViolation(std::string path, const std::string& message)
      : Error("invariant-violation at " + path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// Throws InvariantViolation for the first issue found.
void requireValid(const AICard& card, std::optional<Date> today = std::nullopt);

}  // namespace aicard
