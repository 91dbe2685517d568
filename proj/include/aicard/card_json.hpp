#pragma once

#include <string>
#include <string_view>

#include "aicard/card.hpp"

namespace aicard {

/// Value of the `@contextIri` key: the vocabulary a JSON-LD bridge would map to.
inline constexpr std::string_view kCardContextIri = "urn:x-aicard:ns#";

class CardJsonError : public Error {
 public:
  enum class Kind { JsonMalformed, SchemaViolation, UnknownEnumValue };

  CardJsonError(Kind kind, std::string path, std::string detail);

  Kind kind() const { return kind_; }
  /// Dotted path of the offending value, e.g. `humanInvolvement.subject.controlLevel`.
  const std::string& path() const { return path_; }
  /// Reason, or the offending value for unknown enum values.
  const std::string& detail() const { return detail_; }

 private:
  Kind kind_;
  std::string path_;
  std::string detail_;
};

std::string_view toString(CardJsonError::Kind kind);

/// Card as a JSON tree, keys in declaration order.
nlohmann::ordered_json cardToJson(const AICard& card);
/// Inverse of cardToJson. Unknown top-level keys are rejected; unknown nested
/// keys are moved into `extensions` under their dotted path.
AICard cardFromJson(const nlohmann::ordered_json& doc);

AICard parseCardJson(std::string_view text);
/// Two-space indented, LF-terminated, byte-deterministic.
std::string serializeCardJson(const AICard& card);

/// A blank card document with every section present and placeholder values.
AICard blankCard();

}  // namespace aicard
