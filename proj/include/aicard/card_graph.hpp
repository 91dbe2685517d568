#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "aicard/card.hpp"
#include "aicard/graph.hpp"

namespace aicard {

/// Namespace of the card vocabulary. Term names mirror the AI Risk Ontology
/// (AISystem, hasPurpose, hasRisk, ...) but live in a toolkit-owned namespace.
inline constexpr std::string_view kVocab = "urn:x-aicard:ns#";
inline constexpr std::string_view kVocabPrefix = "aicard";

/// IRI term in the card vocabulary.
Term vocab(std::string_view local);

/// One row of the field-to-vocabulary mapping.
struct VocabularyEntry {
  std::string fieldPath;  // e.g. "intendedUse.purpose", "components[].name"
  std::string term;       // local name in kVocab
  std::string meaning;
};

/// Every card field with the vocabulary term that carries it.
const std::vector<VocabularyEntry>& vocabularyTable();
/// Predicates that carry structure rather than a card field: card-to-system
/// link, list order, component back-link, dimension index for shapes.
std::vector<std::string> vocabularyStructuralTerms();
/// Classes and individuals (enum values) used by the mapping.
std::vector<std::string> vocabularyClasses();

class CardGraphError : public Error {
 public:
  enum class Kind { MissingMandatory, MultipleSystems, MalformedLevel, MalformedValue };

  CardGraphError(Kind kind, std::string section, std::string field, const std::string& detail = {});

  Kind kind() const { return kind_; }
  const std::string& section() const { return section_; }
  const std::string& field() const { return field_; }

 private:
  Kind kind_;
  std::string section_;
  std::string field_;
};

std::string_view toString(CardGraphError::Kind kind);

/// Minted IRI for a card node, e.g. cardNodeIri(card, "system").
std::string cardNodeIri(const AICard& card, std::string_view local);

/// Maps the card to its graph. Throws InvariantViolation when the card breaks
/// a section invariant and `checkInvariants` is set; without the check,
/// empty values are simply not asserted (useful for validating drafts).
Graph cardToGraph(const AICard& card, bool checkInvariants = true);

/// Rebuilds a card from its graph. Triples that are not part of the mapping
/// are ignored; one warning per such triple is appended to `warnings`.
AICard graphToCard(const Graph& g, std::vector<std::string>* warnings = nullptr);

}  // namespace aicard
