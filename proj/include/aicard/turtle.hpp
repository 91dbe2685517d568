#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "aicard/graph.hpp"

namespace aicard {

/// Positioned Turtle parse failure. Line and column are 1-based; the column
/// counts bytes.
class TurtleError : public Error {
 public:
  enum class Kind { SyntaxError, UndefinedPrefix, RelativeIri };

  TurtleError(Kind kind, std::size_t line, std::size_t column, std::string detail);

  Kind kind() const { return kind_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  /// Expected token for syntax errors, prefix name for undefined prefixes, the IRI otherwise.
  const std::string& detail() const { return detail_; }

 private:
  Kind kind_;
  std::size_t line_;
  std::size_t column_;
  std::string detail_;
};

std::string_view toString(TurtleError::Kind kind);

/// Parses the supported Turtle subset: `@prefix`, statements with `;`/`,`
/// lists, `a`, prefixed names, `<absolute IRIs>`, quoted literals with
/// `^^`/`@`, integer/decimal/boolean shorthand, `_:labels` and comments.
Graph parseTurtle(std::string_view text);

/// Canonical serialization: prefixes sorted by label, subjects, predicates
/// and objects in canonical term order, `;` and `,` grouping, LF endings.
std::string serializeTurtle(const Graph& g);

/// True when `local` can be written after `prefix:` without escaping.
bool isSafeLocalName(std::string_view local);

}  // namespace aicard
