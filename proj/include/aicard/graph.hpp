#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace aicard {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A term could not be constructed or placed (relative IRI, literal predicate, ...).
class MalformedTerm : public Error {
 public:
  using Error::Error;
};

namespace ns {
inline constexpr std::string_view kRdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view kRdfs = "http://www.w3.org/2000/01/rdf-schema#";
inline constexpr std::string_view kXsd = "http://www.w3.org/2001/XMLSchema#";

inline const std::string kRdfType = std::string(kRdf) + "type";
inline const std::string kLangString = std::string(kRdf) + "langString";
inline const std::string kRdfJson = std::string(kRdf) + "JSON";
inline const std::string kXsdString = std::string(kXsd) + "string";
inline const std::string kXsdInteger = std::string(kXsd) + "integer";
inline const std::string kXsdDecimal = std::string(kXsd) + "decimal";
inline const std::string kXsdBoolean = std::string(kXsd) + "boolean";
inline const std::string kXsdDate = std::string(kXsd) + "date";
}  // namespace ns

/// True when `iri` has a scheme followed by ':' and contains no characters
/// that cannot appear inside `<...>`.
bool isAbsoluteIri(std::string_view iri);

/// RDF term: IRI, literal or blank node. Immutable; the canonical
/// serialization is computed once at construction and drives ordering.
class Term {
 public:
  enum class Kind { Iri = 0, BlankNode = 1, Literal = 2 };

  static Term iri(std::string value);
  static Term blank(std::string label);
  static Term literal(std::string lexical, std::string datatype = ns::kXsdString);
  static Term langLiteral(std::string lexical, std::string languageTag);

  static Term integer(long long v);
  static Term boolean(bool v);

  Kind kind() const { return kind_; }
  bool isIri() const { return kind_ == Kind::Iri; }
  bool isBlank() const { return kind_ == Kind::BlankNode; }
  bool isLiteral() const { return kind_ == Kind::Literal; }

  /// IRI string, blank-node label or literal lexical form.
  const std::string& value() const { return value_; }
  const std::string& datatype() const { return datatype_; }
  const std::optional<std::string>& languageTag() const { return lang_; }

  /// N-Triples style form: `<iri>`, `_:label`, `"lex"`, `"lex"@en`, `"lex"^^<dt>`.
  const std::string& canonical() const { return canonical_; }

  friend bool operator==(const Term& a, const Term& b) {
    return a.kind_ == b.kind_ && a.canonical_ == b.canonical_;
  }
  friend bool operator<(const Term& a, const Term& b) {
    if (a.kind_ != b.kind_) return a.kind_ < b.kind_;
    return a.canonical_ < b.canonical_;
  }
  friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }
  friend bool operator>(const Term& a, const Term& b) { return b < a; }
  friend bool operator<=(const Term& a, const Term& b) { return !(b < a); }
  friend bool operator>=(const Term& a, const Term& b) { return !(a < b); }

 private:
  Term(Kind kind, std::string value, std::string datatype, std::optional<std::string> lang);

  Kind kind_;
  std::string value_;
  std::string datatype_;
  std::optional<std::string> lang_;
  std::string canonical_;
};

/// Escapes a string for use between double quotes in Turtle / N-Triples.
std::string escapeString(std::string_view s);

struct Triple {
  Term subject;
  Term predicate;
  Term object;

  /// Throws MalformedTerm unless subject is an IRI or blank node and predicate is an IRI.
  Triple(Term s, Term p, Term o);

  friend bool operator==(const Triple& a, const Triple& b) {
    return a.subject == b.subject && a.predicate == b.predicate && a.object == b.object;
  }
  friend bool operator<(const Triple& a, const Triple& b) {
    if (a.subject != b.subject) return a.subject < b.subject;
    if (a.predicate != b.predicate) return a.predicate < b.predicate;
    return a.object < b.object;
  }
  friend bool operator!=(const Triple& a, const Triple& b) { return !(a == b); }
};

std::string toString(const Triple& t);

struct TermHash {
  std::size_t operator()(const Term& t) const noexcept {
    return std::hash<std::string>{}(t.canonical()) ^ static_cast<std::size_t>(t.kind());
  }
};

/// Query variable, written `?name`.
class Variable {
 public:
  explicit Variable(std::string name);
  const std::string& name() const { return name_; }
  friend bool operator==(const Variable&, const Variable&) = default;
  friend auto operator<=>(const Variable&, const Variable&) = default;

 private:
  std::string name_;
};

bool isValidVariableName(std::string_view name);

using PatternTerm = std::variant<Term, Variable>;

struct TriplePattern {
  PatternTerm subject;
  PatternTerm predicate;
  PatternTerm object;
};

std::string toString(const PatternTerm& t);
std::string toString(const TriplePattern& p);

/// In-memory triple set with subject, predicate and object indexes.
///
/// A Graph is a value: copies are independent, and the free functions
/// insert()/remove()/merge() return new graphs. The member mutators exist for
/// building a graph before it is shared.
class Graph {
 public:
  using TripleSet = std::set<Triple>;
  using PrefixMap = std::map<std::string, std::string>;

  Graph() = default;

  std::size_t size() const { return triples_.size(); }
  bool empty() const { return triples_.empty(); }
  bool contains(const Triple& t) const { return triples_.count(t) != 0; }

  /// All triples in canonical order.
  const TripleSet& triples() const { return triples_; }
  const PrefixMap& prefixes() const { return prefixes_; }

  /// Returns true when the triple was not already present.
  bool add(const Triple& t);
  bool add(Term s, Term p, Term o) { return add(Triple(std::move(s), std::move(p), std::move(o))); }
  /// Returns true when the triple was present.
  bool erase(const Triple& t);

  /// Binds a prefix label. Throws MalformedTerm when the namespace is not absolute.
  void setPrefix(const std::string& label, const std::string& ns);

  /// Expands `label:local` using the prefix map.
  std::optional<std::string> expand(std::string_view prefixedName) const;
  /// Shortest `label:local` form of an IRI, if a prefix matches.
  std::optional<std::string> compact(std::string_view iri) const;

  /// Triples unifying with the pattern, canonical order. Repeated variables
  /// must bind equal terms.
  std::vector<Triple> match(const TriplePattern& p) const;
  std::vector<Triple> match(const std::optional<Term>& s, const std::optional<Term>& p,
                            const std::optional<Term>& o) const;

  /// Number of triples having `t` in the given position (0 subject, 1 predicate, 2 object).
  std::size_t postingSize(int position, const Term& t) const;

  /// Objects of (s, p, ?o) in canonical order.
  std::vector<Term> objects(const Term& s, const Term& p) const;
  /// Subjects of (?s, p, o) in canonical order.
  std::vector<Term> subjects(const Term& p, const Term& o) const;

  /// Blank nodes occurring anywhere, canonical order.
  std::set<Term> blankNodes() const;

  /// Checks that the three indexes describe exactly the triple set.
  bool indexesConsistent() const;

  friend bool operator==(const Graph& a, const Graph& b) { return a.triples_ == b.triples_; }

 private:
  using Index = std::unordered_map<Term, TripleSet, TermHash>;
  void indexAdd(const Triple& t);
  void indexErase(const Triple& t);

  TripleSet triples_;
  Index bySubject_;
  Index byPredicate_;
  Index byObject_;
  PrefixMap prefixes_;
};

Graph insert(const Graph& g, const Triple& t);
Graph remove(const Graph& g, const Triple& t);
std::vector<Triple> matchPattern(const Graph& g, const TriplePattern& p);

/// Union of two graphs. Blank nodes of `b` are relabelled `m<k>` (k counting
/// up, skipping labels used in `a`) in canonical order. Prefix conflicts keep
/// `a`'s binding and append a warning when `warnings` is non-null.
Graph merge(const Graph& a, const Graph& b, std::vector<std::string>* warnings = nullptr);

/// Graph isomorphism up to blank-node relabelling.
bool isomorphic(const Graph& a, const Graph& b);

}  // namespace aicard
