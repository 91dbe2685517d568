#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "aicard/graph.hpp"

namespace aicard {

/// Namespace of the shape vocabulary used in `.shapes.ttl` files.
inline constexpr std::string_view kShapesNs = "urn:x-aicard:shapes#";
inline constexpr std::string_view kShapesPrefix = "aish";

enum class NodeKind { IriNode, LiteralNode, BlankOrIri };
enum class Severity { Violation, Warning };

std::string_view toString(NodeKind k);
std::string_view toString(Severity s);

/// Constraint on the values of one predicate at a focus node. Unset facets
/// are not checked. `hasValue` requires the given term among the values.
struct PropertyConstraint {
  std::string path;
  std::optional<std::size_t> minCount;
  std::optional<std::size_t> maxCount;
  std::optional<std::string> datatype;
  std::optional<NodeKind> nodeKind;
  std::optional<std::vector<Term>> inList;
  std::optional<std::string> pattern;
  std::optional<Term> hasValue;

  bool hasFacet() const;
  friend bool operator==(const PropertyConstraint&, const PropertyConstraint&) = default;
};

struct NodeShape {
  std::string id;
  std::string targetClass;
  std::vector<PropertyConstraint> constraints;
  Severity severity = Severity::Violation;

  friend bool operator==(const NodeShape&, const NodeShape&) = default;
};

struct ValidationResult {
  Term focusNode;
  std::string shapeId;
  std::string path;
  std::string constraintKind;  // minCount, maxCount, datatype, nodeKind, in, pattern, hasValue
  std::string message;
  Severity severity = Severity::Violation;
};

struct ValidationReport {
  bool conforms = true;
  std::vector<ValidationResult> results;

  std::size_t count(Severity s) const;
};

class ShapeError : public Error {
 public:
  enum class Kind { InvalidRegex, MalformedShape };

  ShapeError(Kind kind, std::string shapeId, std::string path, const std::string& detail);

  Kind kind() const { return kind_; }
  const std::string& shapeId() const { return shapeId_; }
  const std::string& path() const { return path_; }

 private:
  Kind kind_;
  std::string shapeId_;
  std::string path_;
};

/// Throws ShapeError(MalformedShape) when the shape breaks its invariants:
/// empty target, a constraint without facets, minCount > maxCount or a
/// repeated path.
void checkShape(const NodeShape& shape);

/// Checks every node typed with a shape's target class against the shape.
/// Results are ordered by focus node, then path (ties by shape, constraint
/// kind and message).
ValidationReport validate(const Graph& g, const std::vector<NodeShape>& shapes);

/// Completeness rules for card graphs produced by cardToGraph. Sorted by id.
std::vector<NodeShape> builtinCardShapes();

/// Shape set as a graph in the shape vocabulary (repeated `aish:in` values
/// instead of RDF collections). Parsing the serialized form back yields the
/// same shapes up to inList order.
Graph shapesToGraph(const std::vector<NodeShape>& shapes);
std::vector<NodeShape> shapesFromGraph(const Graph& g);

/// Sorts shapes by id and each inList by term order.
void normalizeShapes(std::vector<NodeShape>& shapes);

nlohmann::ordered_json reportToJson(const ValidationReport& r);
std::string reportToText(const ValidationReport& r);

}  // namespace aicard
