#include "aicard/query.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <optional>
#include <set>

namespace aicard {

QueryError::QueryError(Kind kind, std::string detail, std::size_t line, std::size_t column)
    : Error(std::string(toString(kind)) +
            (line ? " at " + std::to_string(line) + ":" + std::to_string(column) : std::string()) + ": " + detail),
      kind_(kind),
      detail_(std::move(detail)),
      line_(line),
      column_(column) {}

std::string_view toString(QueryError::Kind kind) {
  switch (kind) {
    case QueryError::Kind::SyntaxError: return "syntax-error";
    case QueryError::Kind::UndefinedPrefix: return "undefined-prefix";
    case QueryError::Kind::InvalidQuery: return "invalid-query";
    case QueryError::Kind::UnboundTemplateVariable: return "unbound-template-variable";
    case QueryError::Kind::InvalidInstantiation: return "invalid-instantiation";
  }
  return "query-error";
}

namespace {

const Variable* asVar(const PatternTerm& t) { return std::get_if<Variable>(&t); }

void collectVars(const TriplePattern& p, std::vector<std::string>& out, std::set<std::string>& seen) {
  for (const PatternTerm* t : {&p.subject, &p.predicate, &p.object}) {
    if (const auto* v = asVar(*t); v && seen.insert(v->name()).second) out.push_back(v->name());
  }
}

using Binding = std::map<std::string, Term>;

PatternTerm substitute(const PatternTerm& t, const Binding& b) {
  if (const auto* v = asVar(t)) {
    auto it = b.find(v->name());
    if (it != b.end()) return it->second;
  }
  return t;
}

std::size_t unboundCount(const TriplePattern& p, const std::set<std::string>& bound) {
  std::size_t n = 0;
  for (const PatternTerm* t : {&p.subject, &p.predicate, &p.object}) {
    if (const auto* v = asVar(*t); v && !bound.count(v->name())) ++n;
  }
  return n;
}

std::size_t smallestPosting(const Graph& g, const TriplePattern& p) {
  std::size_t best = std::numeric_limits<std::size_t>::max();
  int pos = 0;
  for (const PatternTerm* t : {&p.subject, &p.predicate, &p.object}) {
    if (const auto* term = std::get_if<Term>(t)) best = std::min(best, g.postingSize(pos, *term));
    ++pos;
  }
  return best;
}

/// Full bindings of the conjunction, before filters.
std::vector<Binding> joinAll(const Graph& g, const std::vector<TriplePattern>& where) {
  std::vector<Binding> rows{Binding{}};
  std::vector<bool> used(where.size(), false);
  std::set<std::string> bound;
  for (std::size_t step = 0; step < where.size() && !rows.empty(); ++step) {
    std::size_t pick = where.size();
    std::pair<std::size_t, std::size_t> bestKey{0, 0};
    for (std::size_t i = 0; i < where.size(); ++i) {
      if (used[i]) continue;
      std::pair<std::size_t, std::size_t> key{unboundCount(where[i], bound), smallestPosting(g, where[i])};
      if (pick == where.size() || key < bestKey) {
        pick = i;
        bestKey = key;
      }
    }
    used[pick] = true;
    const TriplePattern& pat = where[pick];
    std::vector<Binding> next;
    for (const auto& row : rows) {
      TriplePattern inst{substitute(pat.subject, row), substitute(pat.predicate, row), substitute(pat.object, row)};
      for (const auto& t : g.match(inst)) {
        Binding ext = row;
        if (const auto* v = asVar(inst.subject)) ext.emplace(v->name(), t.subject);
        if (const auto* v = asVar(inst.predicate)) ext.emplace(v->name(), t.predicate);
        if (const auto* v = asVar(inst.object)) ext.emplace(v->name(), t.object);
        next.push_back(std::move(ext));
      }
    }
    rows = std::move(next);
    std::vector<std::string> vars;
    std::set<std::string> seen;
    collectVars(pat, vars, seen);
    bound.insert(vars.begin(), vars.end());
  }
  return rows;
}

const Term& operandValue(const PatternTerm& t, const Binding& b) {
  if (const auto* v = asVar(t)) return b.at(v->name());
  return std::get<Term>(t);
}

bool passes(const Binding& b, const std::vector<Filter>& filters) {
  for (const auto& f : filters) {
    if ((operandValue(f.lhs, b) == operandValue(f.rhs, b)) != f.equal) return false;
  }
  return true;
}

std::optional<Term> instantiate(const PatternTerm& t, const Binding& b) {
  if (const auto* v = asVar(t)) {
    auto it = b.find(v->name());
    if (it == b.end()) return std::nullopt;
    return it->second;
  }
  return std::get<Term>(t);
}

Triple instantiateTemplate(const TriplePattern& p, const Binding& b) {
  auto s = instantiate(p.subject, b);
  auto pr = instantiate(p.predicate, b);
  auto o = instantiate(p.object, b);
  if (!s || !pr || !o) throw QueryError(QueryError::Kind::UnboundTemplateVariable, toString(p));
  try {
    return Triple(*s, *pr, *o);
  } catch (const Error& e) {
    throw QueryError(QueryError::Kind::InvalidInstantiation, toString(p) + ": " + e.what());
  }
}

}  // namespace

std::vector<std::string> variablesOf(const std::vector<TriplePattern>& patterns) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& p : patterns) collectVars(p, out, seen);
  return out;
}

void checkQuery(const SelectQuery& q) {
  auto vars = variablesOf(q.where);
  std::set<std::string> known(vars.begin(), vars.end());
  for (const auto& v : q.projectedVars) {
    if (!known.count(v)) throw QueryError(QueryError::Kind::InvalidQuery, "projected variable ?" + v + " not in WHERE");
  }
  for (const auto& f : q.filters) {
    for (const PatternTerm* t : {&f.lhs, &f.rhs}) {
      if (const auto* v = asVar(*t); v && !known.count(v->name())) {
        throw QueryError(QueryError::Kind::InvalidQuery, "filter variable ?" + v->name() + " not in WHERE");
      }
    }
  }
}

void checkUpdate(const UpdateRequest& u) {
  auto vars = variablesOf(u.where);
  std::set<std::string> known(vars.begin(), vars.end());
  for (const auto* list : {&u.deleteTemplates, &u.insertTemplates}) {
    for (const auto& v : variablesOf(*list)) {
      if (!known.count(v)) throw QueryError(QueryError::Kind::InvalidQuery, "template variable ?" + v + " not in WHERE");
    }
  }
}

std::vector<Solution> evaluateSelect(const Graph& g, const SelectQuery& q) {
  checkQuery(q);
  std::vector<Solution> out;
  for (const auto& row : joinAll(g, q.where)) {
    if (!passes(row, q.filters)) continue;
    Solution s;
    for (const auto& v : q.projectedVars) s.emplace(v, row.at(v));
    out.push_back(std::move(s));
  }
  auto tupleLess = [&](const Solution& a, const Solution& b) {
    for (const auto& v : q.projectedVars) {
      const Term& x = a.at(v);
      const Term& y = b.at(v);
      if (x != y) return x < y;
    }
    return false;
  };
  std::sort(out.begin(), out.end(), tupleLess);
  if (q.distinct) out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

UpdateResult applyUpdate(const Graph& g, const UpdateRequest& u) {
  checkUpdate(u);
  std::set<Triple> del, ins;
  for (const auto& row : joinAll(g, u.where)) {
    for (const auto& t : u.deleteTemplates) del.insert(instantiateTemplate(t, row));
    for (const auto& t : u.insertTemplates) ins.insert(instantiateTemplate(t, row));
  }
  UpdateResult r{g, {}};
  for (const auto& t : del) {
    if (r.graph.erase(t)) ++r.stats.deleted;
  }
  for (const auto& t : ins) {
    if (r.graph.add(t)) ++r.stats.inserted;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Text syntax

namespace {

enum class Tok { End, Iri, PName, Var, String, Number, Blank, Punct, Word };

struct Token {
  Tok type = Tok::End;
  std::string text;  // IRI without brackets, unescaped string body, punct or word
  std::size_t line = 1, column = 1;
};

void appendUtf8(std::string& out, unsigned long cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

bool isNameStart(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool isNameChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || static_cast<unsigned char>(c) >= 0x80;
}

class Lexer {
 public:
  explicit Lexer(std::string_view s) : s_(s) {}

  Token next() {
    skipSpace();
    Token t;
    t.line = line_;
    t.column = col_;
    if (i_ >= s_.size()) return t;
    char c = s_[i_];
    if (c == '<') {
      bump();
      while (i_ < s_.size() && s_[i_] != '>') {
        char d = s_[i_];
        if (d == '\\') {
          bump();
          t.text += unicodeEscape(t);
          continue;
        }
        if (static_cast<unsigned char>(d) <= 0x20) fail(t, "'>'");
        t.text += d;
        bump();
      }
      if (i_ >= s_.size()) fail(t, "'>'");
      bump();
      t.type = Tok::Iri;
      return t;
    }
    if (c == '?' || c == '$') {
      bump();
      while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) {
        t.text += s_[i_];
        bump();
      }
      if (!isValidVariableName(t.text)) fail(t, "variable name");
      t.type = Tok::Var;
      return t;
    }
    if (c == '"' || c == '\'') {
      bump();
      while (true) {
        if (i_ >= s_.size() || s_[i_] == '\n') fail(t, std::string("closing ") + c);
        char d = s_[i_];
        if (d == c) {
          bump();
          break;
        }
        if (d == '\\') {
          bump();
          if (i_ >= s_.size()) fail(t, "escape");
          char e = s_[i_];
          switch (e) {
            case 't': t.text += '\t'; bump(); break;
            case 'n': t.text += '\n'; bump(); break;
            case 'r': t.text += '\r'; bump(); break;
            case 'b': t.text += '\b'; bump(); break;
            case 'f': t.text += '\f'; bump(); break;
            case '"': case '\'': case '\\': t.text += e; bump(); break;
            default: t.text += unicodeEscape(t);
          }
          continue;
        }
        t.text += d;
        bump();
      }
      t.type = Tok::String;
      return t;
    }
    if (c == '_' && i_ + 1 < s_.size() && s_[i_ + 1] == ':') {
      bump();
      bump();
      while (i_ < s_.size() && (isNameChar(s_[i_]) || (s_[i_] == '.' && i_ + 1 < s_.size() && isNameChar(s_[i_ + 1])))) {
        t.text += s_[i_];
        bump();
      }
      if (t.text.empty()) fail(t, "blank node label");
      t.type = Tok::Blank;
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        ((c == '+' || c == '-') && i_ + 1 < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_ + 1])))) {
      t.text += c;
      bump();
      while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) {
        t.text += s_[i_];
        bump();
      }
      if (i_ + 1 < s_.size() && s_[i_] == '.' && std::isdigit(static_cast<unsigned char>(s_[i_ + 1]))) {
        t.text += '.';
        bump();
        while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) {
          t.text += s_[i_];
          bump();
        }
      }
      t.type = Tok::Number;
      return t;
    }
    if (c == '!' && i_ + 1 < s_.size() && s_[i_ + 1] == '=') {
      bump();
      bump();
      t.type = Tok::Punct;
      t.text = "!=";
      return t;
    }
    if (std::string_view("{}().;,=*@^").find(c) != std::string_view::npos) {
      bump();
      if (c == '^') {
        if (i_ >= s_.size() || s_[i_] != '^') fail(t, "'^^'");
        bump();
        t.text = "^^";
      } else {
        t.text = std::string(1, c);
      }
      t.type = Tok::Punct;
      return t;
    }
    if (isNameStart(c) || c == ':') {
      std::string word;
      while (i_ < s_.size() && isNameChar(s_[i_])) {
        word += s_[i_];
        bump();
      }
      if (i_ < s_.size() && s_[i_] == ':') {
        word += ':';
        bump();
        while (i_ < s_.size()) {
          char d = s_[i_];
          bool dotInside = d == '.' && i_ + 1 < s_.size() && (isNameChar(s_[i_ + 1]) || s_[i_ + 1] == ':');
          if (!(isNameChar(d) || d == ':' || d == '%' || dotInside)) break;
          word += d;
          bump();
        }
        t.type = Tok::PName;
      } else {
        t.type = Tok::Word;
      }
      t.text = std::move(word);
      return t;
    }
    fail(t, "a term or keyword");
  }

  [[noreturn]] static void fail(const Token& at, const std::string& expected) {
    throw QueryError(QueryError::Kind::SyntaxError, "expected " + expected, at.line, at.column);
  }

  /// Reads the language tag right after '@'.
  std::string langTag() {
    std::string tag;
    while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '-')) {
      tag += s_[i_];
      bump();
    }
    return tag;
  }

 private:
  void bump() {
    if (s_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }

  void skipSpace() {
    while (i_ < s_.size()) {
      char c = s_[i_];
      if (c == '#') {
        while (i_ < s_.size() && s_[i_] != '\n') bump();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        bump();
      } else {
        break;
      }
    }
  }

  std::string unicodeEscape(const Token& t) {
    if (i_ >= s_.size() || (s_[i_] != 'u' && s_[i_] != 'U')) fail(t, "valid escape");
    std::size_t n = s_[i_] == 'u' ? 4 : 8;
    bump();
    unsigned long cp = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if (i_ >= s_.size() || !std::isxdigit(static_cast<unsigned char>(s_[i_]))) fail(t, "hex digit");
      cp = cp * 16 + static_cast<unsigned long>(std::stoul(std::string(1, s_[i_]), nullptr, 16));
      bump();
    }
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) fail(t, "valid code point");
    std::string out;
    appendUtf8(out, cp);
    return out;
  }

  std::string_view s_;
  std::size_t i_ = 0;
  std::size_t line_ = 1, col_ = 1;
};

bool keywordIs(const Token& t, std::string_view kw) {
  if (t.type != Tok::Word || t.text.size() != kw.size()) return false;
  for (std::size_t i = 0; i < kw.size(); ++i) {
    if (std::toupper(static_cast<unsigned char>(t.text[i])) != kw[i]) return false;
  }
  return true;
}

class Parser {
 public:
  Parser(std::string_view text, Graph::PrefixMap prefixes) : lex_(text), prefixes_(std::move(prefixes)) {
    advance();
  }

  ParsedRequest parse() {
    while (keywordIs(cur_, "PREFIX")) prologueEntry();
    ParsedRequest out;
    if (keywordIs(cur_, "SELECT")) {
      out = select();
    } else if (keywordIs(cur_, "DELETE") || keywordIs(cur_, "INSERT")) {
      out = update();
    } else {
      Lexer::fail(cur_, "SELECT, DELETE or INSERT");
    }
    if (cur_.type != Tok::End) Lexer::fail(cur_, "end of input");
    return out;
  }

 private:
  void advance() { cur_ = lex_.next(); }

  bool isPunct(std::string_view p) const { return cur_.type == Tok::Punct && cur_.text == p; }

  void expectPunct(std::string_view p) {
    if (!isPunct(p)) Lexer::fail(cur_, "'" + std::string(p) + "'");
    advance();
  }

  void expectKeyword(std::string_view kw) {
    if (!keywordIs(cur_, kw)) Lexer::fail(cur_, std::string(kw));
    advance();
  }

  void prologueEntry() {
    advance();
    if (cur_.type != Tok::PName || cur_.text.back() != ':' ||
        cur_.text.find(':') != cur_.text.size() - 1) {
      Lexer::fail(cur_, "prefix label ending in ':'");
    }
    std::string label = cur_.text.substr(0, cur_.text.size() - 1);
    advance();
    if (cur_.type != Tok::Iri || !isAbsoluteIri(cur_.text)) Lexer::fail(cur_, "absolute <IRI>");
    prefixes_[label] = cur_.text;
    advance();
  }

  SelectQuery select() {
    advance();
    SelectQuery q;
    if (keywordIs(cur_, "DISTINCT")) {
      q.distinct = true;
      advance();
    }
    bool star = false;
    if (isPunct("*")) {
      star = true;
      advance();
    } else {
      while (cur_.type == Tok::Var) {
        q.projectedVars.push_back(cur_.text);
        advance();
      }
      if (q.projectedVars.empty()) Lexer::fail(cur_, "'*' or a variable");
    }
    if (keywordIs(cur_, "WHERE")) advance();
    Token at = cur_;
    body(q.where, &q.filters);
    if (star) q.projectedVars = variablesOf(q.where);
    withPosition(at, [&] { checkQuery(q); });
    return q;
  }

  UpdateRequest update() {
    UpdateRequest u;
    if (keywordIs(cur_, "DELETE")) {
      advance();
      body(u.deleteTemplates, nullptr);
    }
    if (keywordIs(cur_, "INSERT")) {
      advance();
      body(u.insertTemplates, nullptr);
    }
    expectKeyword("WHERE");
    Token at = cur_;
    body(u.where, nullptr);
    withPosition(at, [&] { checkUpdate(u); });
    return u;
  }

  template <typename F>
  void withPosition(const Token& at, F f) {
    try {
      f();
    } catch (const QueryError& e) {
      throw QueryError(e.kind(), e.detail(), at.line, at.column);
    }
  }

  /// `{ triples (. triples)* }` with FILTERs allowed when `filters` is given.
  void body(std::vector<TriplePattern>& out, std::vector<Filter>* filters) {
    expectPunct("{");
    while (!isPunct("}")) {
      if (keywordIs(cur_, "FILTER")) {
        if (!filters) Lexer::fail(cur_, "a triple pattern");
        filters->push_back(filter());
      } else {
        triples(out);
      }
      if (isPunct(".")) {
        advance();
      } else if (!isPunct("}") && !keywordIs(cur_, "FILTER")) {
        Lexer::fail(cur_, "'.' or '}'");
      }
    }
    advance();
  }

  Filter filter() {
    advance();
    expectPunct("(");
    PatternTerm lhs = term(false);
    bool equal = isPunct("=");
    if (!equal && !isPunct("!=")) Lexer::fail(cur_, "'=' or '!='");
    advance();
    PatternTerm rhs = term(false);
    expectPunct(")");
    return Filter{std::move(lhs), equal, std::move(rhs)};
  }

  void triples(std::vector<TriplePattern>& out) {
    PatternTerm s = term(false);
    while (true) {
      PatternTerm p = term(true);
      while (true) {
        out.push_back({s, p, term(false)});
        if (!isPunct(",")) break;
        advance();
      }
      if (!isPunct(";")) break;
      advance();
      while (isPunct(";")) advance();
      if (isPunct(".") || isPunct("}")) break;
    }
  }

  std::string resolvePName(const Token& t) {
    auto colon = t.text.find(':');
    std::string label = t.text.substr(0, colon);
    auto it = prefixes_.find(label);
    if (it == prefixes_.end()) throw QueryError(QueryError::Kind::UndefinedPrefix, label, t.line, t.column);
    return it->second + t.text.substr(colon + 1);
  }

  Term iriTerm(const Token& t, const std::string& value) {
    if (!isAbsoluteIri(value)) Lexer::fail(t, "absolute IRI");
    return Term::iri(value);
  }

  PatternTerm term(bool predicatePosition) {
    Token t = cur_;
    try {
      switch (t.type) {
        case Tok::Var: advance(); return Variable(t.text);
        case Tok::Iri: advance(); return iriTerm(t, t.text);
        case Tok::PName: advance(); return iriTerm(t, resolvePName(t));
        case Tok::Blank: advance(); return Term::blank(t.text);
        case Tok::Number:
          advance();
          return Term::literal(t.text, t.text.find('.') == std::string::npos ? ns::kXsdInteger : ns::kXsdDecimal);
        case Tok::String: {
          advance();
          if (isPunct("@")) {
            // The lexer sits right after '@'.
            std::string tag = lex_.langTag();
            advance();
            return Term::langLiteral(t.text, tag);
          }
          if (isPunct("^^")) {
            advance();
            Token dt = cur_;
            std::string iri;
            if (dt.type == Tok::Iri) {
              iri = dt.text;
            } else if (dt.type == Tok::PName) {
              iri = resolvePName(dt);
            } else {
              Lexer::fail(dt, "datatype IRI");
            }
            advance();
            return Term::literal(t.text, iriTerm(dt, iri).value());
          }
          return Term::literal(t.text);
        }
        case Tok::Word:
          if (predicatePosition && t.text == "a") {
            advance();
            return Term::iri(ns::kRdfType);
          }
          if (t.text == "true" || t.text == "false") {
            advance();
            return Term::literal(t.text, ns::kXsdBoolean);
          }
          break;
        default: break;
      }
    } catch (const MalformedTerm& e) {
      throw QueryError(QueryError::Kind::SyntaxError, e.what(), t.line, t.column);
    }
    Lexer::fail(t, "a term");
  }

  Lexer lex_;
  Token cur_;
  Graph::PrefixMap prefixes_;
};

}  // namespace

ParsedRequest parseRequest(std::string_view text, const Graph::PrefixMap& prefixes) {
  return Parser(text, prefixes).parse();
}

SelectQuery parseSelect(std::string_view text, const Graph::PrefixMap& prefixes) {
  auto r = parseRequest(text, prefixes);
  if (auto* q = std::get_if<SelectQuery>(&r)) return std::move(*q);
  throw QueryError(QueryError::Kind::InvalidQuery, "expected a SELECT query, found an update", 1, 1);
}

UpdateRequest parseUpdate(std::string_view text, const Graph::PrefixMap& prefixes) {
  auto r = parseRequest(text, prefixes);
  if (auto* u = std::get_if<UpdateRequest>(&r)) return std::move(*u);
  throw QueryError(QueryError::Kind::InvalidQuery, "expected an update, found a SELECT query", 1, 1);
}

nlohmann::ordered_json solutionsToJson(const std::vector<std::string>& vars, const std::vector<Solution>& rows) {
  nlohmann::ordered_json out;
  out["vars"] = vars;
  out["results"] = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    nlohmann::ordered_json r = nlohmann::ordered_json::object();
    for (const auto& v : vars) r[v] = row.at(v).canonical();
    out["results"].push_back(std::move(r));
  }
  return out;
}

std::string solutionsToText(const std::vector<std::string>& vars, const std::vector<Solution>& rows) {
  std::string out;
  for (std::size_t i = 0; i < vars.size(); ++i) out += (i ? "\t?" : "?") + vars[i];
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < vars.size(); ++i) out += (i ? "\t" : "") + row.at(vars[i]).canonical();
    out += '\n';
  }
  return out;
}

}  // namespace aicard
