#include "aicard/graph.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>

namespace aicard {

namespace {

bool isAsciiAlpha(char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z'); }
bool isAsciiDigit(char c) { return c >= '0' && c <= '9'; }

bool isBlankLabel(std::string_view s) {
  if (s.empty()) return false;
  auto inner = [](char c) { return isAsciiAlpha(c) || isAsciiDigit(c) || c == '_' || c == '-' || c == '.'; };
  if (!(isAsciiAlpha(s.front()) || isAsciiDigit(s.front()) || s.front() == '_')) return false;
  if (s.back() == '.') return false;
  return std::all_of(s.begin(), s.end(), inner);
}

bool isLanguageTag(std::string_view s) {
  // [a-zA-Z]{1,8}(-[a-zA-Z0-9]{1,8})*
  std::size_t i = 0;
  std::size_t n = 0;
  while (i < s.size() && isAsciiAlpha(s[i])) ++i, ++n;
  if (n < 1 || n > 8) return false;
  while (i < s.size()) {
    if (s[i] != '-') return false;
    ++i;
    n = 0;
    while (i < s.size() && (isAsciiAlpha(s[i]) || isAsciiDigit(s[i]))) ++i, ++n;
    if (n < 1 || n > 8) return false;
  }
  return true;
}

}  // namespace

bool isAbsoluteIri(std::string_view iri) {
  auto colon = iri.find(':');
  if (colon == std::string_view::npos || colon == 0) return false;
  if (!isAsciiAlpha(iri[0])) return false;
  for (std::size_t i = 1; i < colon; ++i) {
    char c = iri[i];
    if (!(isAsciiAlpha(c) || isAsciiDigit(c) || c == '+' || c == '-' || c == '.')) return false;
  }
  for (char c : iri) {
    auto u = static_cast<unsigned char>(c);
    if (u <= 0x20) return false;
    switch (c) {
      case '<': case '>': case '"': case '{': case '}': case '|': case '^': case '`': case '\\':
        return false;
      default:
        break;
    }
  }
  return true;
}

std::string escapeString(std::string_view s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20 || c == 0x7f) {
          static const char* hex = "0123456789ABCDEF";
          out += "\\u00";
          out += hex[(static_cast<unsigned char>(c) >> 4) & 0xF];
          out += hex[static_cast<unsigned char>(c) & 0xF];
        } else {
          out += c;
        }
    }
  }
  return out;
}

Term::Term(Kind kind, std::string value, std::string datatype, std::optional<std::string> lang)
    : kind_(kind), value_(std::move(value)), datatype_(std::move(datatype)), lang_(std::move(lang)) {
  switch (kind_) {
    case Kind::Iri:
      canonical_ = "<" + value_ + ">";
      break;
    case Kind::BlankNode:
      canonical_ = "_:" + value_;
      break;
    case Kind::Literal:
      canonical_ = "\"" + escapeString(value_) + "\"";
      if (lang_) {
        canonical_ += "@" + *lang_;
      } else if (datatype_ != ns::kXsdString) {
        canonical_ += "^^<" + datatype_ + ">";
      }
      break;
  }
}

Term Term::iri(std::string value) {
  if (!isAbsoluteIri(value)) throw MalformedTerm("not an absolute IRI: '" + value + "'");
  return Term(Kind::Iri, std::move(value), {}, std::nullopt);
}

Term Term::blank(std::string label) {
  if (!isBlankLabel(label)) throw MalformedTerm("invalid blank node label: '" + label + "'");
  return Term(Kind::BlankNode, std::move(label), {}, std::nullopt);
}

Term Term::literal(std::string lexical, std::string datatype) {
  if (datatype == ns::kLangString) throw MalformedTerm("language-tagged literal requires a language tag");
  if (!isAbsoluteIri(datatype)) throw MalformedTerm("literal datatype is not an absolute IRI: '" + datatype + "'");
  return Term(Kind::Literal, std::move(lexical), std::move(datatype), std::nullopt);
}

Term Term::langLiteral(std::string lexical, std::string languageTag) {
  if (!isLanguageTag(languageTag)) throw MalformedTerm("invalid language tag: '" + languageTag + "'");
  return Term(Kind::Literal, std::move(lexical), ns::kLangString, std::move(languageTag));
}

Term Term::integer(long long v) { return literal(std::to_string(v), ns::kXsdInteger); }
Term Term::boolean(bool v) { return literal(v ? "true" : "false", ns::kXsdBoolean); }

Triple::Triple(Term s, Term p, Term o) : subject(std::move(s)), predicate(std::move(p)), object(std::move(o)) {
  if (subject.isLiteral()) throw MalformedTerm("literal in subject position: " + subject.canonical());
  if (!predicate.isIri()) throw MalformedTerm("predicate must be an IRI: " + predicate.canonical());
}

std::string toString(const Triple& t) {
  return t.subject.canonical() + " " + t.predicate.canonical() + " " + t.object.canonical() + " .";
}

bool isValidVariableName(std::string_view name) {
  if (name.empty()) return false;
  if (!(isAsciiAlpha(name[0]) || name[0] == '_')) return false;
  return std::all_of(name.begin() + 1, name.end(),
                     [](char c) { return isAsciiAlpha(c) || isAsciiDigit(c) || c == '_'; });
}

Variable::Variable(std::string name) : name_(std::move(name)) {
  if (!isValidVariableName(name_)) throw MalformedTerm("invalid variable name: '" + name_ + "'");
}

std::string toString(const PatternTerm& t) {
  if (const auto* v = std::get_if<Variable>(&t)) return "?" + v->name();
  return std::get<Term>(t).canonical();
}

std::string toString(const TriplePattern& p) {
  return toString(p.subject) + " " + toString(p.predicate) + " " + toString(p.object);
}

// ---------------------------------------------------------------------------

void Graph::indexAdd(const Triple& t) {
  bySubject_[t.subject].insert(t);
  byPredicate_[t.predicate].insert(t);
  byObject_[t.object].insert(t);
}

void Graph::indexErase(const Triple& t) {
  auto drop = [&](Index& idx, const Term& key) {
    auto it = idx.find(key);
    if (it == idx.end()) return;
    it->second.erase(t);
    if (it->second.empty()) idx.erase(it);
  };
  drop(bySubject_, t.subject);
  drop(byPredicate_, t.predicate);
  drop(byObject_, t.object);
}

bool Graph::add(const Triple& t) {
  if (!triples_.insert(t).second) return false;
  indexAdd(t);
  return true;
}

bool Graph::erase(const Triple& t) {
  if (triples_.erase(t) == 0) return false;
  indexErase(t);
  return true;
}

void Graph::setPrefix(const std::string& label, const std::string& nsIri) {
  bool labelOk = label.empty() || (isAsciiAlpha(label.front()) && label.back() != '.' &&
                                   std::all_of(label.begin(), label.end(), [](char c) {
                                     return isAsciiAlpha(c) || isAsciiDigit(c) || c == '_' || c == '-' || c == '.' ||
                                            static_cast<unsigned char>(c) >= 0x80;
                                   }) &&
                                   label.find("..") == std::string::npos);
  if (!labelOk) throw MalformedTerm("invalid prefix label: '" + label + "'");
  if (!isAbsoluteIri(nsIri)) throw MalformedTerm("prefix namespace is not an absolute IRI: '" + nsIri + "'");
  prefixes_[label] = nsIri;
}

std::optional<std::string> Graph::expand(std::string_view prefixedName) const {
  auto colon = prefixedName.find(':');
  if (colon == std::string_view::npos) return std::nullopt;
  auto it = prefixes_.find(std::string(prefixedName.substr(0, colon)));
  if (it == prefixes_.end()) return std::nullopt;
  return it->second + std::string(prefixedName.substr(colon + 1));
}

std::optional<std::string> Graph::compact(std::string_view iri) const {
  std::optional<std::string> best;
  for (const auto& [label, nsIri] : prefixes_) {
    if (iri.size() >= nsIri.size() && iri.substr(0, nsIri.size()) == nsIri) {
      std::string candidate = label + ":" + std::string(iri.substr(nsIri.size()));
      if (!best || candidate.size() < best->size()) best = std::move(candidate);
    }
  }
  return best;
}

std::size_t Graph::postingSize(int position, const Term& t) const {
  const Index& idx = position == 0 ? bySubject_ : position == 1 ? byPredicate_ : byObject_;
  auto it = idx.find(t);
  return it == idx.end() ? 0 : it->second.size();
}

std::vector<Triple> Graph::match(const std::optional<Term>& s, const std::optional<Term>& p,
                                 const std::optional<Term>& o) const {
  const TripleSet* candidates = &triples_;
  static const TripleSet kEmpty;
  auto narrow = [&](const Index& idx, const std::optional<Term>& key) {
    if (!key) return;
    auto it = idx.find(*key);
    const TripleSet* set = it == idx.end() ? &kEmpty : &it->second;
    if (set->size() < candidates->size()) candidates = set;
  };
  narrow(bySubject_, s);
  narrow(byPredicate_, p);
  narrow(byObject_, o);

  std::vector<Triple> out;
  for (const auto& t : *candidates) {
    if (s && t.subject != *s) continue;
    if (p && t.predicate != *p) continue;
    if (o && t.object != *o) continue;
    out.push_back(t);
  }
  return out;
}

std::vector<Triple> Graph::match(const TriplePattern& pat) const {
  auto bound = [](const PatternTerm& pt) -> std::optional<Term> {
    if (const auto* t = std::get_if<Term>(&pt)) return *t;
    return std::nullopt;
  };
  std::vector<Triple> raw = match(bound(pat.subject), bound(pat.predicate), bound(pat.object));

  // Repeated variables within one pattern must agree.
  const auto* vs = std::get_if<Variable>(&pat.subject);
  const auto* vp = std::get_if<Variable>(&pat.predicate);
  const auto* vo = std::get_if<Variable>(&pat.object);
  bool sp = vs && vp && *vs == *vp;
  bool so = vs && vo && *vs == *vo;
  bool po = vp && vo && *vp == *vo;
  if (!sp && !so && !po) return raw;
  std::vector<Triple> out;
  for (auto& t : raw) {
    if (sp && t.subject != t.predicate) continue;
    if (so && t.subject != t.object) continue;
    if (po && t.predicate != t.object) continue;
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<Term> Graph::objects(const Term& s, const Term& p) const {
  std::vector<Term> out;
  for (const auto& t : match(s, p, std::nullopt)) out.push_back(t.object);
  return out;
}

std::vector<Term> Graph::subjects(const Term& p, const Term& o) const {
  std::vector<Term> out;
  for (const auto& t : match(std::nullopt, p, o)) out.push_back(t.subject);
  return out;
}

std::set<Term> Graph::blankNodes() const {
  std::set<Term> out;
  for (const auto& t : triples_) {
    if (t.subject.isBlank()) out.insert(t.subject);
    if (t.object.isBlank()) out.insert(t.object);
  }
  return out;
}

bool Graph::indexesConsistent() const {
  auto check = [&](const Index& idx, auto key) {
    std::size_t total = 0;
    for (const auto& [term, set] : idx) {
      for (const auto& t : set) {
        if (!(key(t) == term) || !triples_.count(t)) return false;
      }
      total += set.size();
    }
    return total == triples_.size();
  };
  return check(bySubject_, [](const Triple& t) { return t.subject; }) &&
         check(byPredicate_, [](const Triple& t) { return t.predicate; }) &&
         check(byObject_, [](const Triple& t) { return t.object; });
}

Graph insert(const Graph& g, const Triple& t) {
  Graph out = g;
  out.add(t);
  return out;
}

Graph remove(const Graph& g, const Triple& t) {
  Graph out = g;
  out.erase(t);
  return out;
}

std::vector<Triple> matchPattern(const Graph& g, const TriplePattern& p) { return g.match(p); }

Graph merge(const Graph& a, const Graph& b, std::vector<std::string>* warnings) {
  Graph out = a;
  for (const auto& [label, nsIri] : b.prefixes()) {
    auto it = a.prefixes().find(label);
    if (it == a.prefixes().end()) {
      out.setPrefix(label, nsIri);
    } else if (it->second != nsIri && warnings) {
      warnings->push_back("prefix '" + label + ":' bound to <" + it->second + "> and <" + nsIri +
                          ">; keeping <" + it->second + ">");
    }
  }

  std::set<std::string> taken;
  for (const auto& bn : a.blankNodes()) taken.insert(bn.value());
  std::map<Term, Term> renaming;
  std::size_t counter = 0;
  for (const auto& bn : b.blankNodes()) {
    std::string label;
    do {
      label = "m" + std::to_string(counter++);
    } while (taken.count(label));
    renaming.emplace(bn, Term::blank(label));
  }
  auto rename = [&](const Term& t) {
    auto it = renaming.find(t);
    return it == renaming.end() ? t : it->second;
  };
  for (const auto& t : b.triples()) out.add(Triple(rename(t.subject), t.predicate, rename(t.object)));
  return out;
}

// ---------------------------------------------------------------------------
// Isomorphism: colour refinement over blank nodes, then backtracking within
// colour classes.

namespace {

using Colour = std::uint64_t;

Colour mix(Colour h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

std::uint64_t hashString(const std::string& s) { return std::hash<std::string>{}(s); }

std::map<Term, Colour> refineColours(const Graph& g) {
  std::map<Term, Colour> colour;
  for (const auto& bn : g.blankNodes()) colour[bn] = 1;
  std::size_t classes = 1;
  for (int round = 0; round < 64; ++round) {
    std::map<Term, std::vector<std::uint64_t>> sig;
    for (const auto& [bn, c] : colour) sig[bn];
    auto termKey = [&](const Term& t) -> std::uint64_t {
      if (t.isBlank()) return mix(7, colour.at(t));
      return hashString(t.canonical());
    };
    for (const auto& t : g.triples()) {
      if (t.subject.isBlank()) {
        sig[t.subject].push_back(mix(mix(1, hashString(t.predicate.canonical())), termKey(t.object)));
      }
      if (t.object.isBlank()) {
        sig[t.object].push_back(mix(mix(2, hashString(t.predicate.canonical())), termKey(t.subject)));
      }
    }
    std::map<Term, Colour> next;
    std::set<Colour> distinct;
    for (auto& [bn, v] : sig) {
      std::sort(v.begin(), v.end());
      Colour h = mix(0xabcdef, colour.at(bn));
      for (auto x : v) h = mix(h, x);
      next[bn] = h;
      distinct.insert(h);
    }
    colour = std::move(next);
    if (distinct.size() == classes) break;
    classes = distinct.size();
  }
  return colour;
}

struct IsoSearch {
  const Graph& a;
  const Graph& b;
  std::vector<Term> order;  // blank nodes of a, in assignment order
  std::map<Term, std::vector<Term>> candidates;
  std::map<Term, Term> mapping;
  std::set<Term> used;
  std::map<Term, std::vector<Triple>> incident;  // triples of a per blank node

  Term mapped(const Term& t) const {
    if (!t.isBlank()) return t;
    auto it = mapping.find(t);
    return it->second;
  }

  bool consistent(const Term& bn) const {
    for (const auto& t : incident.at(bn)) {
      bool sOk = !t.subject.isBlank() || mapping.count(t.subject);
      bool oOk = !t.object.isBlank() || mapping.count(t.object);
      if (!sOk || !oOk) continue;
      if (!b.contains(Triple(mapped(t.subject), t.predicate, mapped(t.object)))) return false;
    }
    return true;
  }

  bool solve(std::size_t i) {
    if (i == order.size()) return true;
    const Term& bn = order[i];
    for (const auto& cand : candidates.at(bn)) {
      if (used.count(cand)) continue;
      mapping.emplace(bn, cand);
      used.insert(cand);
      if (consistent(bn) && solve(i + 1)) return true;
      mapping.erase(bn);
      used.erase(cand);
    }
    return false;
  }
};

}  // namespace

bool isomorphic(const Graph& a, const Graph& b) {
  if (a.size() != b.size()) return false;
  // Ground triples must agree exactly.
  std::size_t groundA = 0;
  for (const auto& t : a.triples()) {
    if (t.subject.isBlank() || t.object.isBlank()) continue;
    ++groundA;
    if (!b.contains(t)) return false;
  }
  std::size_t groundB = 0;
  for (const auto& t : b.triples()) {
    if (!t.subject.isBlank() && !t.object.isBlank()) ++groundB;
  }
  if (groundA != groundB) return false;

  auto ca = refineColours(a);
  auto cb = refineColours(b);
  if (ca.size() != cb.size()) return false;

  std::map<Colour, std::vector<Term>> classB;
  for (const auto& [bn, c] : cb) classB[c].push_back(bn);
  std::map<Colour, std::size_t> countA;
  for (const auto& [bn, c] : ca) ++countA[c];
  for (const auto& [c, n] : countA) {
    auto it = classB.find(c);
    if (it == classB.end() || it->second.size() != n) return false;
  }

  IsoSearch search{a, b, {}, {}, {}, {}, {}};
  for (const auto& [bn, c] : ca) {
    search.order.push_back(bn);
    search.candidates[bn] = classB[c];
    search.incident[bn];
  }
  for (const auto& t : a.triples()) {
    if (t.subject.isBlank()) search.incident[t.subject].push_back(t);
    if (t.object.isBlank() && t.object != t.subject) search.incident[t.object].push_back(t);
  }
  // Smallest classes first keeps backtracking shallow.
  std::stable_sort(search.order.begin(), search.order.end(), [&](const Term& x, const Term& y) {
    return search.candidates[x].size() < search.candidates[y].size();
  });
  return search.solve(0);
}

}  // namespace aicard
