#include "aicard/rules.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <regex>
#include <set>
#include <sstream>

namespace aicard {

namespace {

constexpr std::string_view kFieldNames[] = {"domain", "purpose", "capability", "deployer", "subject"};
constexpr std::string_view kMatchNames[] = {"exact", "keywords", "regex"};
constexpr std::string_view kTierNames[] = {"Unacceptable", "HighRisk", "LimitedRisk", "MinimalRisk"};

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

std::string toLower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), lower);
  return out;
}

bool isWordByte(char c) { return std::isalnum(static_cast<unsigned char>(c)) || static_cast<unsigned char>(c) >= 0x80; }

std::vector<std::string> words(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (isWordByte(c)) {
      cur += lower(c);
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::regex compileRegex(const std::string& pattern, const std::string& ruleId) {
  try {
    return std::regex(pattern, std::regex::ECMAScript | std::regex::icase);
  } catch (const std::regex_error& e) {
    throw RuleError(RuleError::Kind::InvalidRegex, "invalid regex /" + pattern + "/: " + e.what(), 0, ruleId);
  }
}

std::vector<std::string> fieldValues(UseField f, const IntendedUse& use) {
  switch (f) {
    case UseField::Domain: return {use.domain};
    case UseField::Purpose: return {use.purpose};
    case UseField::Capability: return {use.capability};
    case UseField::Deployer: return {use.deployer};
    case UseField::Subject: return use.subjects;
  }
  return {};
}

bool holds(const FieldCondition& c, const IntendedUse& use, const std::string& ruleId, ConditionMatch* why) {
  std::optional<std::regex> re;
  if (c.matcher == MatchKind::Regex) {
    if (c.values.size() != 1) throw RuleError(RuleError::Kind::InvalidRegex, "regex condition needs one pattern", 0, ruleId);
    re = compileRegex(c.values[0], ruleId);
  }
  for (const auto& value : fieldValues(c.field, use)) {
    for (const auto& v : c.values) {
      bool hit = false;
      switch (c.matcher) {
        case MatchKind::Exact: hit = toLower(value) == toLower(v); break;
        case MatchKind::Keywords: hit = containsWords(value, v); break;
        case MatchKind::Regex: hit = std::regex_search(value, *re); break;
      }
      if (hit) {
        if (why) *why = ConditionMatch{toString(c), value, v};
        return true;
      }
    }
  }
  return false;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

FieldCondition conditionFromJson(const nlohmann::json& j, const std::string& where) {
  auto bad = [&](const std::string& why) { throw RuleError(RuleError::Kind::MalformedPolicy, where + ": " + why); };
  if (!j.is_object()) bad("constraint must be an object");
  FieldCondition c;
  if (!j.contains("field") || !j["field"].is_string()) bad("missing \"field\"");
  auto f = useFieldFromString(j["field"].get<std::string>());
  if (!f) bad("unknown field \"" + j["field"].get<std::string>() + "\"");
  c.field = *f;
  int kinds = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    const std::string key(kMatchNames[k]);
    if (!j.contains(key)) continue;
    ++kinds;
    c.matcher = static_cast<MatchKind>(k);
    const auto& v = j[key];
    if (v.is_string()) {
      c.values = {v.get<std::string>()};
    } else if (v.is_array() && c.matcher == MatchKind::Keywords) {
      for (const auto& e : v) {
        if (!e.is_string()) bad("keywords must be strings");
        c.values.push_back(e.get<std::string>());
      }
    } else {
      bad("\"" + key + "\" has the wrong type");
    }
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() != "field" && std::find(std::begin(kMatchNames), std::end(kMatchNames), it.key()) == std::end(kMatchNames)) {
      bad("unknown key \"" + it.key() + "\"");
    }
  }
  if (kinds != 1) bad("exactly one of exact, keywords or regex is required");
  if (c.values.empty()) bad("empty matcher");
  if (c.matcher == MatchKind::Regex) compileRegex(c.values[0], where);
  return c;
}

nlohmann::ordered_json conditionToJson(const FieldCondition& c) {
  nlohmann::ordered_json j;
  j["field"] = toString(c.field);
  if (c.matcher == MatchKind::Keywords) {
    j["keywords"] = c.values;
  } else {
    j[std::string(toString(c.matcher))] = c.values.empty() ? std::string() : c.values[0];
  }
  return j;
}

std::vector<UseStatement> statementsFromJson(const nlohmann::json& j, const char* key) {
  std::vector<UseStatement> out;
  if (!j.contains(key)) return out;
  if (!j[key].is_array()) throw RuleError(RuleError::Kind::MalformedPolicy, std::string(key) + " must be an array");
  for (std::size_t i = 0; i < j[key].size(); ++i) {
    const auto& s = j[key][i];
    const std::string where = std::string(key) + "[" + std::to_string(i) + "]";
    if (!s.is_object() || !s.contains("action") || !s["action"].is_string() || s["action"].get<std::string>().empty()) {
      throw RuleError(RuleError::Kind::MalformedPolicy, where + ": missing \"action\"");
    }
    UseStatement st;
    st.action = s["action"].get<std::string>();
    if (s.contains("constraints")) {
      if (!s["constraints"].is_array()) throw RuleError(RuleError::Kind::MalformedPolicy, where + ": constraints must be an array");
      for (std::size_t k = 0; k < s["constraints"].size(); ++k) {
        st.constraints.push_back(
            conditionFromJson(s["constraints"][k], where + ".constraints[" + std::to_string(k) + "]"));
      }
    }
    out.push_back(std::move(st));
  }
  return out;
}

bool statementMatches(const UseStatement& s, const IntendedUse& use, const std::string& action) {
  if (s.action != action) return false;
  return std::all_of(s.constraints.begin(), s.constraints.end(),
                     [&](const FieldCondition& c) { return holds(c, use, "policy", nullptr); });
}

// --- rule file parsing ------------------------------------------------------

class RuleFileParser {
 public:
  explicit RuleFileParser(std::string_view text) : text_(text) {}

  std::vector<RiskClassRule> parse() {
    std::size_t lineNo = 0;
    std::size_t pos = 0;
    while (pos <= text_.size()) {
      auto nl = text_.find('\n', pos);
      std::string_view line = text_.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
      ++lineNo;
      handleLine(trim(line), lineNo);
      if (nl == std::string_view::npos) break;
      pos = nl + 1;
    }
    finish();
    return std::move(rules_);
  }

 private:
  static std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  }

  [[noreturn]] void fail(std::size_t line, const std::string& what) const {
    throw RuleError(RuleError::Kind::SyntaxError, what, line, current_ ? current_->id : std::string());
  }

  void handleLine(std::string_view line, std::size_t lineNo) {
    if (line.empty() || line.front() == '#') return;
    if (line.front() == '[') {
      if (line.back() != ']') fail(lineNo, "expected ']' closing the section header");
      std::string_view name = trim(line.substr(1, line.size() - 2));
      if (name.substr(0, 5) != "rule.") fail(lineNo, "expected [rule.<id>]");
      std::string id(name.substr(5));
      if (id.empty() || !std::all_of(id.begin(), id.end(), [](char c) {
            return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
          })) {
        fail(lineNo, "expected a rule id of letters, digits, '_', '-' or '.'");
      }
      finish();
      if (!ids_.insert(id).second) {
        throw RuleError(RuleError::Kind::DuplicateRuleId, "duplicate rule id '" + id + "'", lineNo, id);
      }
      current_ = RiskClassRule{id, RiskTier::MinimalRisk, {}, {}};
      headerLine_ = lineNo;
      sawTier_ = false;
      return;
    }
    if (!current_) fail(lineNo, "expected a [rule.<id>] header before entries");
    auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(lineNo, "expected 'key = value'");
    std::string key(trim(line.substr(0, eq)));
    std::string_view value = trim(line.substr(eq + 1));
    if (key == "tier") {
      if (sawTier_) fail(lineNo, "repeated tier");
      auto t = riskTierFromString(value);
      if (!t) fail(lineNo, "expected a tier (Unacceptable, HighRisk, LimitedRisk or MinimalRisk)");
      current_->tier = *t;
      sawTier_ = true;
    } else if (key == "citation") {
      std::size_t i = 0;
      current_->citation = readString(value, i, lineNo);
      if (i != value.size()) fail(lineNo, "unexpected text after citation");
    } else if (key == "condition") {
      current_->conditions.push_back(readCondition(value, lineNo));
    } else {
      fail(lineNo, "unknown key '" + key + "' (expected tier, citation or condition)");
    }
  }

  std::string readString(std::string_view s, std::size_t& i, std::size_t lineNo) const {
    if (i >= s.size() || s[i] != '"') fail(lineNo, "expected a double-quoted string");
    ++i;
    std::string out;
    while (true) {
      if (i >= s.size()) fail(lineNo, "unterminated string");
      char c = s[i++];
      if (c == '"') break;
      if (c == '\\') {
        if (i >= s.size() || (s[i] != '"' && s[i] != '\\')) fail(lineNo, "expected \\\" or \\\\ escape");
        c = s[i++];
      }
      out += c;
    }
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    return out;
  }

  FieldCondition readCondition(std::string_view s, std::size_t lineNo) const {
    auto word = [&](std::size_t& i) {
      std::string w;
      while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) w += s[i++];
      while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
      return w;
    };
    std::size_t i = 0;
    FieldCondition c;
    std::string field = word(i);
    auto f = useFieldFromString(field);
    if (!f) fail(lineNo, "expected a field (domain, purpose, capability, deployer or subject)");
    c.field = *f;
    std::string matcher = word(i);
    auto m = std::find(std::begin(kMatchNames), std::end(kMatchNames), matcher);
    if (m == std::end(kMatchNames)) fail(lineNo, "expected a matcher (exact, keywords or regex)");
    c.matcher = static_cast<MatchKind>(m - std::begin(kMatchNames));
    while (i < s.size()) c.values.push_back(readString(s, i, lineNo));
    if (c.values.empty()) fail(lineNo, "expected at least one quoted value");
    if (c.matcher != MatchKind::Keywords && c.values.size() != 1) fail(lineNo, "expected exactly one quoted value");
    if (c.matcher == MatchKind::Regex) {
      try {
        compileRegex(c.values[0], current_->id);
      } catch (RuleError& e) {
        throw RuleError(RuleError::Kind::InvalidRegex, e.detail(), lineNo, current_->id);
      }
    }
    return c;
  }

  void finish() {
    if (!current_) return;
    if (!sawTier_) fail(headerLine_, "rule '" + current_->id + "' has no tier");
    if (current_->conditions.empty()) fail(headerLine_, "rule '" + current_->id + "' has no condition");
    rules_.push_back(std::move(*current_));
    current_.reset();
  }

  std::string_view text_;
  std::vector<RiskClassRule> rules_;
  std::set<std::string> ids_;
  std::optional<RiskClassRule> current_;
  std::size_t headerLine_ = 0;
  bool sawTier_ = false;
};

constexpr std::string_view kDefaultRules = R"(# Illustrative risk-tier rules. Not legal advice: every match is meant for
# human review, and each rule cites the provision it paraphrases.

[rule.art5-social-scoring]
tier = Unacceptable
citation = "AI Act Art. 5(1)(c): social scoring leading to detrimental or unfavourable treatment"
condition = purpose keywords "social scoring" "social score" "social credit"

[rule.art5-emotion-recognition-workplace-education]
tier = Unacceptable
citation = "AI Act Art. 5(1)(f): emotion recognition in the workplace or in education institutions"
condition = capability keywords "emotion recognition" "emotion detection" "affect recognition"
condition = domain keywords "workplace" "employment" "education" "school" "university"

[rule.art5-untargeted-face-scraping]
tier = Unacceptable
citation = "AI Act Art. 5(1)(e): facial recognition databases built by untargeted scraping"
condition = purpose regex "\\b(untargeted|indiscriminate)\\b.*\\bscrap(e|ing)\\b"

[rule.annex3-1a-remote-biometric-identification]
tier = HighRisk
citation = "AI Act Annex III point 1(a): remote biometric identification systems"
condition = capability keywords "biometric identification" "face recognition" "facial recognition"

[rule.annex3-3a-education-admission]
tier = HighRisk
citation = "AI Act Annex III point 3(a): determining access or admission to education and vocational training"
condition = domain keywords "education" "educational" "school" "university" "vocational training"
condition = purpose keywords "admission" "admissions" "access" "assign" "assigning" "selection"

[rule.annex3-3b-education-assessment]
tier = HighRisk
citation = "AI Act Annex III point 3(b): evaluating learning outcomes"
condition = domain keywords "education" "educational" "school" "university" "vocational training"
condition = purpose keywords "grading" "grade" "evaluating learning outcomes" "assessing learning outcomes" "scoring exams"

[rule.annex3-3d-education-proctoring]
tier = HighRisk
citation = "AI Act Annex III point 3(d): monitoring and detecting prohibited behaviour of students during tests"
condition = domain keywords "education" "educational" "school" "university" "vocational training" "exam" "exams" "examination"
condition = purpose keywords "monitoring" "monitor" "detecting" "detect" "proctoring" "proctor" "cheating"
condition = subject keywords "student" "students" "pupil" "pupils" "learner" "learners" "candidate" "candidates" "test takers"

[rule.annex3-4a-recruitment]
tier = HighRisk
citation = "AI Act Annex III point 4(a): recruitment or selection of natural persons"
condition = domain keywords "employment" "recruitment" "hiring" "human resources"
condition = purpose keywords "recruitment" "recruiting" "screening" "filtering" "selection" "hiring"

[rule.annex3-5b-creditworthiness]
tier = HighRisk
citation = "AI Act Annex III point 5(b): evaluating creditworthiness or establishing a credit score"
condition = purpose keywords "creditworthiness" "credit score" "credit scoring"

[rule.art50-interaction-disclosure]
tier = LimitedRisk
citation = "AI Act Art. 50(1): systems intended to interact directly with natural persons"
condition = capability keywords "chatbot" "conversational agent" "virtual assistant" "dialogue system"

[rule.art50-synthetic-content]
tier = LimitedRisk
citation = "AI Act Art. 50(2) and 50(4): synthetic content and deep fakes"
condition = capability keywords "deep fake" "deepfake" "synthetic media" "image generation" "text generation"
)";

}  // namespace

std::string_view toString(UseField f) { return kFieldNames[static_cast<std::size_t>(f)]; }
std::string_view toString(MatchKind m) { return kMatchNames[static_cast<std::size_t>(m)]; }
std::string_view toString(RiskTier t) { return kTierNames[static_cast<std::size_t>(t)]; }

std::optional<UseField> useFieldFromString(std::string_view s) {
  for (std::size_t i = 0; i < std::size(kFieldNames); ++i) {
    if (kFieldNames[i] == s) return static_cast<UseField>(i);
  }
  return std::nullopt;
}

std::optional<RiskTier> riskTierFromString(std::string_view s) {
  for (std::size_t i = 0; i < std::size(kTierNames); ++i) {
    if (kTierNames[i] == s) return static_cast<RiskTier>(i);
  }
  return std::nullopt;
}

int severityRank(RiskTier t) { return 3 - static_cast<int>(t); }

std::string toString(const FieldCondition& c) {
  std::string out = std::string(toString(c.field)) + " " + std::string(toString(c.matcher));
  for (const auto& v : c.values) out += " " + quote(v);
  return out;
}

RuleError::RuleError(Kind kind, std::string detail, std::size_t line, std::string ruleId)
    : Error(std::string(toString(kind)) + (line ? " at line " + std::to_string(line) : std::string()) +
            (ruleId.empty() ? std::string() : " in rule '" + ruleId + "'") + ": " + detail),
      kind_(kind),
      detail_(std::move(detail)),
      line_(line),
      ruleId_(std::move(ruleId)) {}

std::string_view toString(RuleError::Kind k) {
  switch (k) {
    case RuleError::Kind::SyntaxError: return "syntax-error";
    case RuleError::Kind::DuplicateRuleId: return "duplicate-rule-id";
    case RuleError::Kind::InvalidRegex: return "invalid-regex";
    case RuleError::Kind::MalformedPolicy: return "malformed-policy";
  }
  return "rule-error";
}

bool containsWords(std::string_view text, std::string_view phrase) {
  const auto hay = words(text);
  const auto needle = words(phrase);
  if (needle.empty()) return false;
  return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

bool conditionHolds(const FieldCondition& c, const IntendedUse& use, ConditionMatch* why) {
  return holds(c, use, "", why);
}

ClassificationResult classify(const IntendedUse& use, const std::vector<RiskClassRule>& rules) {
  ClassificationResult r;
  for (const auto& rule : rules) {
    RuleMatch m{rule.id, rule.citation, rule.tier, {}};
    bool all = !rule.conditions.empty();
    for (const auto& c : rule.conditions) {
      ConditionMatch why;
      if (!holds(c, use, rule.id, &why)) {
        all = false;
        break;
      }
      m.explanation.push_back(std::move(why));
    }
    if (all) r.matchedRules.push_back(std::move(m));
  }
  std::sort(r.matchedRules.begin(), r.matchedRules.end(), [](const RuleMatch& a, const RuleMatch& b) {
    if (a.tier != b.tier) return a.tier < b.tier;
    return a.ruleId < b.ruleId;
  });
  if (!r.matchedRules.empty()) r.tier = r.matchedRules.front().tier;
  return r;
}

std::vector<RiskClassRule> loadRuleBase(std::string_view text) { return RuleFileParser(text).parse(); }

std::string serializeRuleBase(const std::vector<RiskClassRule>& rules) {
  std::string out;
  for (std::size_t i = 0; i < rules.size(); ++i) {
    const auto& r = rules[i];
    if (i) out += '\n';
    out += "[rule." + r.id + "]\n";
    out += "tier = " + std::string(toString(r.tier)) + "\n";
    if (!r.citation.empty()) out += "citation = " + quote(r.citation) + "\n";
    for (const auto& c : r.conditions) out += "condition = " + toString(c) + "\n";
  }
  return out;
}

std::string_view defaultRuleBaseText() { return kDefaultRules; }

const std::vector<RiskClassRule>& defaultRuleBase() {
  static const std::vector<RiskClassRule> rules = loadRuleBase(kDefaultRules);
  return rules;
}

nlohmann::ordered_json classificationToJson(const ClassificationResult& r) {
  nlohmann::ordered_json out;
  out["tier"] = toString(r.tier);
  out["matchedRules"] = nlohmann::ordered_json::array();
  for (const auto& m : r.matchedRules) {
    nlohmann::ordered_json e;
    e["ruleId"] = m.ruleId;
    e["tier"] = toString(m.tier);
    e["citation"] = m.citation;
    e["explanation"] = nlohmann::ordered_json::array();
    for (const auto& c : m.explanation) {
      e["explanation"].push_back({{"condition", c.condition}, {"value", c.fieldValue}, {"matched", c.matched}});
    }
    out["matchedRules"].push_back(std::move(e));
  }
  return out;
}

std::string_view toString(Verdict v) {
  switch (v) {
    case Verdict::Permitted: return "Permitted";
    case Verdict::Prohibited: return "Prohibited";
    case Verdict::Unspecified: return "Unspecified";
  }
  return "?";
}

PolicyDecision evaluatePolicy(const UsePolicy& policy, const IntendedUse& use, const std::string& action) {
  PolicyDecision d;
  for (std::size_t i = 0; i < policy.prohibitions.size(); ++i) {
    if (statementMatches(policy.prohibitions[i], use, action)) d.matchedStatements.push_back({true, i, action});
  }
  bool prohibited = !d.matchedStatements.empty();
  for (std::size_t i = 0; i < policy.permissions.size(); ++i) {
    if (statementMatches(policy.permissions[i], use, action)) d.matchedStatements.push_back({false, i, action});
  }
  if (prohibited) {
    d.verdict = Verdict::Prohibited;
  } else if (!d.matchedStatements.empty()) {
    d.verdict = Verdict::Permitted;
  }
  return d;
}

UsePolicy policyFromJson(const nlohmann::json& j) {
  if (!j.is_object()) throw RuleError(RuleError::Kind::MalformedPolicy, "policy must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() != "permissions" && it.key() != "prohibitions") {
      throw RuleError(RuleError::Kind::MalformedPolicy, "unknown key \"" + it.key() + "\"");
    }
  }
  UsePolicy p{statementsFromJson(j, "permissions"), statementsFromJson(j, "prohibitions")};
  if (p.permissions.empty() && p.prohibitions.empty()) {
    throw RuleError(RuleError::Kind::MalformedPolicy, "policy has no statements");
  }
  return p;
}

nlohmann::ordered_json policyToJson(const UsePolicy& p) {
  nlohmann::ordered_json out;
  for (const auto& [key, list] : {std::pair{"permissions", &p.permissions}, std::pair{"prohibitions", &p.prohibitions}}) {
    out[key] = nlohmann::ordered_json::array();
    for (const auto& s : *list) {
      nlohmann::ordered_json st;
      st["action"] = s.action;
      st["constraints"] = nlohmann::ordered_json::array();
      for (const auto& c : s.constraints) st["constraints"].push_back(conditionToJson(c));
      out[key].push_back(std::move(st));
    }
  }
  return out;
}

nlohmann::ordered_json decisionToJson(const PolicyDecision& d) {
  nlohmann::ordered_json out;
  out["verdict"] = toString(d.verdict);
  out["matchedStatements"] = nlohmann::ordered_json::array();
  for (const auto& m : d.matchedStatements) {
    out["matchedStatements"].push_back(
        {{"kind", m.prohibition ? "prohibition" : "permission"}, {"index", m.index}, {"action", m.action}});
  }
  return out;
}

}  // namespace aicard
