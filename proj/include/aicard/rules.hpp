#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "aicard/card.hpp"

namespace aicard {

enum class UseField { Domain, Purpose, Capability, Deployer, Subject };
enum class MatchKind { Exact, Keywords, Regex };
/// Declared most severe first.
enum class RiskTier { Unacceptable, HighRisk, LimitedRisk, MinimalRisk };

std::string_view toString(UseField f);
std::string_view toString(MatchKind m);
std::string_view toString(RiskTier t);
std::optional<UseField> useFieldFromString(std::string_view s);
std::optional<RiskTier> riskTierFromString(std::string_view s);

/// 0 for MinimalRisk up to 3 for Unacceptable.
int severityRank(RiskTier t);

/// Test on one intended-use field. `exact` compares whole values
/// case-insensitively; `keywords` holds when any keyword or phrase occurs as
/// whole words, case-insensitively; `regex` is a case-insensitive ECMAScript
/// search. For the subject field the condition holds if any subject matches.
struct FieldCondition {
  UseField field = UseField::Domain;
  MatchKind matcher = MatchKind::Keywords;
  std::vector<std::string> values;  // one value for exact and regex

  friend bool operator==(const FieldCondition&, const FieldCondition&) = default;
};

std::string toString(const FieldCondition& c);

struct RiskClassRule {
  std::string id;
  RiskTier tier = RiskTier::MinimalRisk;
  std::vector<FieldCondition> conditions;  // all must hold
  std::string citation;

  friend bool operator==(const RiskClassRule&, const RiskClassRule&) = default;
};

struct ConditionMatch {
  std::string condition;  // toString(FieldCondition)
  std::string fieldValue;
  std::string matched;    // keyword, pattern or exact value that hit
};

struct RuleMatch {
  std::string ruleId;
  std::string citation;
  RiskTier tier = RiskTier::MinimalRisk;
  std::vector<ConditionMatch> explanation;
};

struct ClassificationResult {
  RiskTier tier = RiskTier::MinimalRisk;
  std::vector<RuleMatch> matchedRules;  // most severe first, then by id
};

class RuleError : public Error {
 public:
  enum class Kind { SyntaxError, DuplicateRuleId, InvalidRegex, MalformedPolicy };

  RuleError(Kind kind, std::string detail, std::size_t line = 0, std::string ruleId = {});

  Kind kind() const { return kind_; }
  std::size_t line() const { return line_; }
  const std::string& ruleId() const { return ruleId_; }
  const std::string& detail() const { return detail_; }

 private:
  Kind kind_;
  std::string detail_;
  std::size_t line_;
  std::string ruleId_;
};

std::string_view toString(RuleError::Kind k);

/// Evaluates one condition; fills `why` with the first hit when given.
bool conditionHolds(const FieldCondition& c, const IntendedUse& use, ConditionMatch* why = nullptr);

/// Whole-word, case-insensitive occurrence of `phrase` in `text`.
bool containsWords(std::string_view text, std::string_view phrase);

ClassificationResult classify(const IntendedUse& use, const std::vector<RiskClassRule>& rules);

/// Parses the rule file format:
///
///     [rule.<id>]
///     tier = HighRisk
///     citation = "..."
///     condition = purpose keywords "monitoring" "detecting"
std::vector<RiskClassRule> loadRuleBase(std::string_view text);
std::string serializeRuleBase(const std::vector<RiskClassRule>& rules);

/// Text of the shipped rule base.
std::string_view defaultRuleBaseText();
const std::vector<RiskClassRule>& defaultRuleBase();

nlohmann::ordered_json classificationToJson(const ClassificationResult& r);

struct UseStatement {
  std::string action;
  std::vector<FieldCondition> constraints;

  friend bool operator==(const UseStatement&, const UseStatement&) = default;
};

struct UsePolicy {
  std::vector<UseStatement> permissions;
  std::vector<UseStatement> prohibitions;
};

enum class Verdict { Permitted, Prohibited, Unspecified };
std::string_view toString(Verdict v);

struct StatementMatch {
  bool prohibition = false;
  std::size_t index = 0;  // position in its list
  std::string action;
};

struct PolicyDecision {
  Verdict verdict = Verdict::Unspecified;
  std::vector<StatementMatch> matchedStatements;  // prohibitions first
};

/// Deny-overrides: any matching prohibition wins over matching permissions.
PolicyDecision evaluatePolicy(const UsePolicy& policy, const IntendedUse& use, const std::string& action);

/// Reads {"permissions": [...], "prohibitions": [...]} where each statement is
/// {"action": "...", "constraints": [{"field": "domain", "keywords": [...]}]}
/// and a constraint carries exactly one of "exact", "keywords" or "regex".
UsePolicy policyFromJson(const nlohmann::json& j);
nlohmann::ordered_json policyToJson(const UsePolicy& p);
nlohmann::ordered_json decisionToJson(const PolicyDecision& d);

}  // namespace aicard
