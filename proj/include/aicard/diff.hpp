#pragma once

#include <string>
#include <vector>

#include "aicard/card.hpp"

namespace aicard {

/// Paths are dotted field names with bracketed keys for keyed list entries
/// and for map keys that are not plain identifiers, e.g.
/// `quality[Accuracy].score`, `riskProfile.risks[https://ex.org/r1].label`,
/// `general.aiTechniques[deep learning]`. Inside brackets `]` and `\` are
/// escaped with a backslash.
struct FieldChange {
  std::string path;
  nlohmann::ordered_json value;
};

struct FieldModification {
  std::string path;
  nlohmann::ordered_json oldValue;
  nlohmann::ordered_json newValue;
};

struct ChangeSet {
  std::vector<FieldChange> added;
  std::vector<FieldChange> removed;
  std::vector<FieldModification> modified;

  bool empty() const { return added.empty() && removed.empty() && modified.empty(); }
  std::size_t size() const { return added.size() + removed.size() + modified.size(); }
  std::vector<std::string> paths() const;
};

/// Field-level change set turning `oldCard` into `newCard`.
///
/// Lists keyed by a natural identifier (components by name, risks by id,
/// quality by dimension, ...) are compared entry by entry; a reordering of
/// surviving entries is reported as one modification of the whole list.
/// Lists without an identifier (risk impacts) are compared as a whole.
ChangeSet diffCards(const AICard& oldCard, const AICard& newCard);

/// Replays a change set produced by diffCards(old, new) on `old`.
AICard applyChangeSet(const AICard& oldCard, const ChangeSet& changes);

struct SubstantialModification {
  bool substantial = false;
  std::vector<std::string> triggers;
};

/// Flags changes touching the intended use, the per-area risk summary, the
/// automation level or the modality. A screening heuristic for human review.
SubstantialModification isSubstantialModification(const ChangeSet& changes);

/// Path families that trigger the heuristic.
const std::vector<std::string>& substantialPathFamilies();

nlohmann::ordered_json changeSetToJson(const ChangeSet& cs);

}  // namespace aicard
