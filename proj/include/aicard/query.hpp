#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "aicard/graph.hpp"

namespace aicard {

struct Filter {
  PatternTerm lhs;
  bool equal = true;  // false for !=
  PatternTerm rhs;
};

/// Conjunctive SELECT. Blank nodes in patterns are constants, not variables.
struct SelectQuery {
  std::vector<std::string> projectedVars;
  std::vector<TriplePattern> where;
  std::vector<Filter> filters;
  bool distinct = false;
};

/// Variable name (without `?`) to bound term.
using Solution = std::map<std::string, Term>;

struct UpdateRequest {
  std::vector<TriplePattern> deleteTemplates;
  std::vector<TriplePattern> insertTemplates;
  std::vector<TriplePattern> where;
};

struct UpdateStats {
  std::size_t deleted = 0;
  std::size_t inserted = 0;
};

struct UpdateResult {
  Graph graph;
  UpdateStats stats;
};

class QueryError : public Error {
 public:
  enum class Kind { SyntaxError, UndefinedPrefix, InvalidQuery, UnboundTemplateVariable, InvalidInstantiation };

  QueryError(Kind kind, std::string detail, std::size_t line = 0, std::size_t column = 0);

  Kind kind() const { return kind_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& detail() const { return detail_; }

 private:
  Kind kind_;
  std::string detail_;
  std::size_t line_;
  std::size_t column_;
};

std::string_view toString(QueryError::Kind kind);

/// Variables of the patterns in order of first occurrence.
std::vector<std::string> variablesOf(const std::vector<TriplePattern>& patterns);

/// Throws QueryError(InvalidQuery) when a projected or filter variable does
/// not occur in the where clause.
void checkQuery(const SelectQuery& q);
/// Throws QueryError(InvalidQuery) when a template variable does not occur in
/// the where clause.
void checkUpdate(const UpdateRequest& u);

/// All bindings satisfying the conjunction and filters, projected, optionally
/// deduplicated, sorted by the projected tuple in term order.
std::vector<Solution> evaluateSelect(const Graph& g, const SelectQuery& q);

/// Snapshot semantics: every where-solution is computed against `g`, the
/// instantiated delete templates are removed and the instantiated insert
/// templates added. Nothing changes when any instantiation fails.
/// `deleted` counts removed triples that were present; `inserted` counts
/// triples that are new relative to the graph after deletion.
UpdateResult applyUpdate(const Graph& g, const UpdateRequest& u);

using ParsedRequest = std::variant<SelectQuery, UpdateRequest>;

/// Parses the textual mini-language. `prefixes` are predeclared and may be
/// overridden by PREFIX lines.
ParsedRequest parseRequest(std::string_view text, const Graph::PrefixMap& prefixes = {});
SelectQuery parseSelect(std::string_view text, const Graph::PrefixMap& prefixes = {});
UpdateRequest parseUpdate(std::string_view text, const Graph::PrefixMap& prefixes = {});

nlohmann::ordered_json solutionsToJson(const std::vector<std::string>& vars, const std::vector<Solution>& rows);
/// Tab-separated: a header of `?var` names, then one row per solution.
std::string solutionsToText(const std::vector<std::string>& vars, const std::vector<Solution>& rows);

}  // namespace aicard
