#include "aicard/diff.hpp"

#include <functional>
#include <optional>
#include <set>

#include "aicard/card_json.hpp"

namespace aicard {

using ojson = nlohmann::ordered_json;

namespace {

using KeyFn = std::function<std::string(const ojson&)>;

std::string fieldKey(const ojson& v, const char* field) {
  if (v.is_object() && v.contains(field) && v[field].is_string()) return v[field].get<std::string>();
  return v.dump();
}

/// Key function for keyed lists, looked up by the list's path pattern
/// (bracketed keys replaced by `[]`).
std::optional<KeyFn> listKeyFor(const std::string& pattern) {
  static const std::set<std::string> kStringSets{
      "general.aiTechniques",         "intendedUse.subjects",        "dataProcessing.personalDataCategories",
      "riskProfile.measureFlags",     "riskProfile.risks[].sources", "riskProfile.risks[].consequences",
      "compliance.regulations",       "compliance.standards",        "compliance.codesOfConduct"};
  if (kStringSets.count(pattern)) {
    return KeyFn([](const ojson& v) { return v.is_string() ? v.get<std::string>() : v.dump(); });
  }
  if (pattern == "components" || pattern == "general.providers" || pattern == "general.developers") {
    return KeyFn([](const ojson& v) { return fieldKey(v, "name"); });
  }
  if (pattern == "riskProfile.risks") return KeyFn([](const ojson& v) { return fieldKey(v, "id"); });
  if (pattern == "quality") return KeyFn([](const ojson& v) { return fieldKey(v, "dimension"); });
  if (pattern == "predeterminedChanges") {
    return KeyFn([](const ojson& v) { return fieldKey(v, "subjectOfChange"); });
  }
  if (pattern == "riskProfile.risks[].measures") {
    return KeyFn([](const ojson& v) { return fieldKey(v, "kind") + ":" + fieldKey(v, "label"); });
  }
  return std::nullopt;
}

bool isIdentifier(const std::string& s) {
  if (s.empty()) return false;
  auto alpha = [](char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; };
  if (!alpha(s[0])) return false;
  for (char c : s) {
    if (!(alpha(c) || (c >= '0' && c <= '9'))) return false;
  }
  return true;
}

std::string bracket(const std::string& key) {
  std::string out = "[";
  for (char c : key) {
    if (c == ']' || c == '\\') out += '\\';
    out += c;
  }
  return out + "]";
}

std::string childPath(const std::string& path, const std::string& key) {
  if (isIdentifier(key)) return path.empty() ? key : path + "." + key;
  return path + bracket(key);
}

struct Segment {
  std::string key;
  bool bracketed = false;
};

std::vector<Segment> parsePath(const std::string& path) {
  std::vector<Segment> out;
  std::size_t i = 0;
  while (i < path.size()) {
    if (path[i] == '.') {
      ++i;
      continue;
    }
    Segment seg;
    if (path[i] == '[') {
      seg.bracketed = true;
      ++i;
      while (i < path.size() && path[i] != ']') {
        if (path[i] == '\\' && i + 1 < path.size()) ++i;
        seg.key += path[i++];
      }
      if (i >= path.size()) throw Error("unterminated '[' in change path: " + path);
      ++i;
    } else {
      while (i < path.size() && path[i] != '.' && path[i] != '[') seg.key += path[i++];
    }
    out.push_back(std::move(seg));
  }
  return out;
}

class Differ {
 public:
  explicit Differ(ChangeSet& out) : out_(out) {}

  void diff(const std::string& path, const std::string& pattern, const ojson& a, const ojson& b) {
    if (a == b) return;
    if (a.is_object() && b.is_object()) {
      for (auto it = a.begin(); it != a.end(); ++it) {
        std::string p = childPath(path, it.key());
        std::string pat = isIdentifier(it.key()) ? childPath(pattern, it.key()) : pattern + "[*]";
        auto jt = b.find(it.key());
        if (jt == b.end()) {
          out_.removed.push_back({p, it.value()});
        } else {
          diff(p, pat, it.value(), *jt);
        }
      }
      for (auto it = b.begin(); it != b.end(); ++it) {
        if (!a.contains(it.key())) out_.added.push_back({childPath(path, it.key()), it.value()});
      }
      return;
    }
    if (a.is_array() && b.is_array()) {
      if (auto key = listKeyFor(pattern); key && diffKeyedList(path, pattern, *key, a, b)) return;
    }
    out_.modified.push_back({path, a, b});
  }

 private:
  /// Returns false when the list cannot be described entry-wise.
  bool diffKeyedList(const std::string& path, const std::string& pattern, const KeyFn& key, const ojson& a,
                     const ojson& b) {
    std::vector<std::string> ka, kb;
    std::set<std::string> sa, sb;
    for (const auto& v : a) {
      ka.push_back(key(v));
      if (!sa.insert(ka.back()).second) return false;
    }
    for (const auto& v : b) {
      kb.push_back(key(v));
      if (!sb.insert(kb.back()).second) return false;
    }
    // Replaying removals then appending additions must reproduce b's order.
    std::vector<std::string> expected;
    for (const auto& k : ka) {
      if (sb.count(k)) expected.push_back(k);
    }
    for (const auto& k : kb) {
      if (!sa.count(k)) expected.push_back(k);
    }
    if (expected != kb) return false;

    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!sb.count(ka[i])) out_.removed.push_back({path + bracket(ka[i]), a[i]});
    }
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (!sa.count(kb[j])) continue;
      std::size_t i = static_cast<std::size_t>(std::find(ka.begin(), ka.end(), kb[j]) - ka.begin());
      diff(path + bracket(kb[j]), pattern + "[]", a[i], b[j]);
    }
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (!sa.count(kb[j])) out_.added.push_back({path + bracket(kb[j]), b[j]});
    }
    return true;
  }

  ChangeSet& out_;
};

/// Resolves all but the last segment; returns the parent container and the
/// pattern of the last segment's parent.
ojson& resolveParent(ojson& root, const std::vector<Segment>& segs, std::string& pattern) {
  ojson* cur = &root;
  pattern.clear();
  for (std::size_t i = 0; i + 1 < segs.size(); ++i) {
    const auto& seg = segs[i];
    if (cur->is_array()) {
      auto key = listKeyFor(pattern);
      if (!key) throw Error("change path indexes an unkeyed list: " + seg.key);
      ojson* found = nullptr;
      for (auto& el : *cur) {
        if ((*key)(el) == seg.key) {
          found = &el;
          break;
        }
      }
      if (!found) throw Error("change path entry not found: " + seg.key);
      cur = found;
      pattern += "[]";
    } else if (cur->is_object()) {
      auto it = cur->find(seg.key);
      if (it == cur->end()) throw Error("change path field not found: " + seg.key);
      cur = &*it;
      pattern = seg.bracketed ? pattern + "[*]" : (pattern.empty() ? seg.key : pattern + "." + seg.key);
    } else {
      throw Error("change path descends into a scalar at: " + seg.key);
    }
  }
  return *cur;
}

std::optional<std::size_t> findInList(const ojson& list, const std::string& pattern, const std::string& k) {
  auto key = listKeyFor(pattern);
  if (!key) throw Error("change path indexes an unkeyed list: " + k);
  for (std::size_t i = 0; i < list.size(); ++i) {
    if ((*key)(list[i]) == k) return i;
  }
  return std::nullopt;
}

}  // namespace

std::vector<std::string> ChangeSet::paths() const {
  std::vector<std::string> out;
  for (const auto& c : added) out.push_back(c.path);
  for (const auto& c : removed) out.push_back(c.path);
  for (const auto& c : modified) out.push_back(c.path);
  return out;
}

ChangeSet diffCards(const AICard& oldCard, const AICard& newCard) {
  ChangeSet cs;
  Differ(cs).diff("", "", cardToJson(oldCard), cardToJson(newCard));
  return cs;
}

AICard applyChangeSet(const AICard& oldCard, const ChangeSet& changes) {
  ojson doc = cardToJson(oldCard);
  std::string pattern;
  for (const auto& c : changes.removed) {
    auto segs = parsePath(c.path);
    ojson& parent = resolveParent(doc, segs, pattern);
    if (parent.is_array()) {
      auto idx = findInList(parent, pattern, segs.back().key);
      if (!idx) throw Error("removed entry not found: " + c.path);
      parent.erase(*idx);
    } else {
      parent.erase(segs.back().key);
    }
  }
  for (const auto& c : changes.modified) {
    auto segs = parsePath(c.path);
    ojson& parent = resolveParent(doc, segs, pattern);
    if (parent.is_array()) {
      auto idx = findInList(parent, pattern, segs.back().key);
      if (!idx) throw Error("modified entry not found: " + c.path);
      parent[*idx] = c.newValue;
    } else {
      parent[segs.back().key] = c.newValue;
    }
  }
  for (const auto& c : changes.added) {
    auto segs = parsePath(c.path);
    ojson& parent = resolveParent(doc, segs, pattern);
    if (parent.is_array()) {
      parent.push_back(c.value);
    } else {
      parent[segs.back().key] = c.value;
    }
  }
  return cardFromJson(doc);
}

const std::vector<std::string>& substantialPathFamilies() {
  static const std::vector<std::string> families{"intendedUse", "riskProfile.summary",
                                                 "humanInvolvement.automationLevel", "general.modality"};
  return families;
}

SubstantialModification isSubstantialModification(const ChangeSet& changes) {
  auto under = [](const std::string& path, const std::string& prefix) {
    if (path.size() < prefix.size() || path.compare(0, prefix.size(), prefix) != 0) return false;
    return path.size() == prefix.size() || path[prefix.size()] == '.' || path[prefix.size()] == '[';
  };
  SubstantialModification out;
  for (const auto& path : changes.paths()) {
    for (const auto& family : substantialPathFamilies()) {
      // A change to an enclosing section (e.g. the whole humanInvolvement
      // block added) also replaces the family's value.
      if (under(path, family) || under(family, path)) {
        out.triggers.push_back(path);
        break;
      }
    }
  }
  out.substantial = !out.triggers.empty();
  return out;
}

ojson changeSetToJson(const ChangeSet& cs) {
  ojson out;
  out["added"] = ojson::array();
  for (const auto& c : cs.added) out["added"].push_back(ojson{{"path", c.path}, {"value", c.value}});
  out["removed"] = ojson::array();
  for (const auto& c : cs.removed) out["removed"].push_back(ojson{{"path", c.path}, {"value", c.value}});
  out["modified"] = ojson::array();
  for (const auto& c : cs.modified) {
    out["modified"].push_back(ojson{{"path", c.path}, {"old", c.oldValue}, {"new", c.newValue}});
  }
  return out;
}

}  // namespace aicard
