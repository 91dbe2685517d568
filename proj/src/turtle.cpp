#include "aicard/turtle.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>

namespace aicard {

TurtleError::TurtleError(Kind kind, std::size_t line, std::size_t column, std::string detail)
    : Error(std::string(toString(kind)) + " at " + std::to_string(line) + ":" + std::to_string(column) +
            ": " + detail),
      kind_(kind),
      line_(line),
      column_(column),
      detail_(std::move(detail)) {}

std::string_view toString(TurtleError::Kind kind) {
  switch (kind) {
    case TurtleError::Kind::SyntaxError: return "syntax-error";
    case TurtleError::Kind::UndefinedPrefix: return "undefined-prefix";
    case TurtleError::Kind::RelativeIri: return "relative-IRI";
  }
  return "error";
}

namespace {

bool isAlpha(char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z'); }
bool isDigit(char c) { return c >= '0' && c <= '9'; }
bool isHigh(char c) { return static_cast<unsigned char>(c) >= 0x80; }
bool isNameChar(char c) { return isAlpha(c) || isDigit(c) || c == '_' || c == '-' || isHigh(c); }

void appendUtf8(std::string& out, std::uint32_t cp) {
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

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Graph run() {
    skipWs();
    while (!atEnd()) {
      if (peek() == '@') {
        parsePrefixDirective();
      } else {
        parseStatement();
      }
      skipWs();
    }
    return std::move(graph_);
  }

 private:
  bool atEnd() const { return pos_ >= text_.size(); }
  char peek(std::size_t ahead = 0) const { return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0'; }

  void advance() {
    if (atEnd()) return;
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  [[noreturn]] void fail(std::string expected) const {
    throw TurtleError(TurtleError::Kind::SyntaxError, line_, col_, "expected " + expected);
  }
  [[noreturn]] void failAt(TurtleError::Kind kind, std::size_t line, std::size_t col, std::string detail) const {
    throw TurtleError(kind, line, col, std::move(detail));
  }

  void skipWs() {
    while (!atEnd()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '#') {
        while (!atEnd() && peek() != '\n') advance();
      } else {
        break;
      }
    }
  }

  void expect(char c, const char* what) {
    if (peek() != c || atEnd()) fail(what);
    advance();
  }

  void parsePrefixDirective() {
    std::size_t line = line_, col = col_;
    advance();  // '@'
    std::string kw;
    while (isAlpha(peek())) {
      kw += peek();
      advance();
    }
    if (kw != "prefix") failAt(TurtleError::Kind::SyntaxError, line, col, "expected '@prefix'");
    skipWs();
    std::string label;
    if (isAlpha(peek())) {
      while (isNameChar(peek()) || (peek() == '.' && isNameChar(peek(1)))) {
        label += peek();
        advance();
      }
    }
    expect(':', "':' after prefix label");
    skipWs();
    std::string nsIri = parseIriRef();
    skipWs();
    expect('.', "'.' after @prefix directive");
    graph_.setPrefix(label, nsIri);
  }

  void parseStatement() {
    Term subject = parseSubject();
    skipWs();
    parsePredicateObjectList(subject);
    skipWs();
    expect('.', "'.' at end of statement");
  }

  void parsePredicateObjectList(const Term& subject) {
    for (;;) {
      Term predicate = parsePredicate();
      skipWs();
      for (;;) {
        Term object = parseObject();
        graph_.add(Triple(subject, predicate, object));
        skipWs();
        if (peek() != ',') break;
        advance();
        skipWs();
      }
      if (peek() != ';') break;
      while (peek() == ';') {
        advance();
        skipWs();
      }
      if (peek() == '.' || atEnd()) break;
    }
  }

  Term parseSubject() {
    char c = peek();
    if (c == '<') return Term::iri(parseIriRef());
    if (c == '_' && peek(1) == ':') return parseBlank();
    if (c == '[') fail("subject (anonymous blank nodes are not supported)");
    if (c == '(') fail("subject (collections are not supported)");
    if (isAlpha(c) || c == ':') {
      std::size_t line = line_, col = col_;
      std::string name = parsePrefixedName();
      if (name == "a") failAt(TurtleError::Kind::SyntaxError, line, col, "expected subject, found 'a'");
      return Term::iri(expandName(name, line, col));
    }
    fail("subject");
  }

  Term parsePredicate() {
    char c = peek();
    if (c == '<') return Term::iri(parseIriRef());
    if (isAlpha(c) || c == ':') {
      std::size_t line = line_, col = col_;
      std::string name = parsePrefixedName();
      if (name == "a") return Term::iri(ns::kRdfType);
      return Term::iri(expandName(name, line, col));
    }
    fail("predicate");
  }

  Term parseObject() {
    char c = peek();
    if (c == '<') return Term::iri(parseIriRef());
    if (c == '_' && peek(1) == ':') return parseBlank();
    if (c == '"' || c == '\'') return parseQuotedLiteral();
    if (isDigit(c) || c == '+' || c == '-' || (c == '.' && isDigit(peek(1)))) return parseNumber();
    if (c == '[') fail("object (anonymous blank nodes are not supported)");
    if (c == '(') fail("object (collections are not supported)");
    if (isAlpha(c) || c == ':') {
      std::size_t line = line_, col = col_;
      std::string name = parsePrefixedName();
      if (name == "true" || name == "false") return Term::literal(name, ns::kXsdBoolean);
      if (name == "a") failAt(TurtleError::Kind::SyntaxError, line, col, "expected object, found 'a'");
      return Term::iri(expandName(name, line, col));
    }
    fail("object");
  }

  std::string parseIriRef() {
    std::size_t line = line_, col = col_;
    expect('<', "'<'");
    std::string iri;
    for (;;) {
      if (atEnd()) fail("'>' closing IRI");
      char c = peek();
      if (c == '>') break;
      if (c == '\\') {
        advance();
        iri += parseUnicodeEscape();
        continue;
      }
      if (static_cast<unsigned char>(c) <= 0x20 || c == '<' || c == '"' || c == '{' || c == '}' || c == '|' ||
          c == '^' || c == '`') {
        fail("IRI character");
      }
      iri += c;
      advance();
    }
    advance();
    if (!isAbsoluteIri(iri)) failAt(TurtleError::Kind::RelativeIri, line, col, iri);
    return iri;
  }

  std::string parseUnicodeEscape() {
    char kind = peek();
    int digits = kind == 'u' ? 4 : kind == 'U' ? 8 : 0;
    if (digits == 0) fail("unicode escape");
    advance();
    std::uint32_t cp = 0;
    for (int i = 0; i < digits; ++i) {
      char h = peek();
      int v = isDigit(h) ? h - '0' : (h >= 'a' && h <= 'f') ? h - 'a' + 10 : (h >= 'A' && h <= 'F') ? h - 'A' + 10 : -1;
      if (v < 0 || atEnd()) fail("hex digit");
      cp = cp * 16 + static_cast<std::uint32_t>(v);
      advance();
    }
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) fail("valid code point");
    std::string out;
    appendUtf8(out, cp);
    return out;
  }

  std::string parsePrefixedName() {
    std::string prefix;
    if (isAlpha(peek())) {
      while (isNameChar(peek()) || (peek() == '.' && isNameChar(peek(1)))) {
        prefix += peek();
        advance();
      }
    }
    if (peek() != ':') {
      if (prefix == "a" || prefix == "true" || prefix == "false") return prefix;
      fail("':' in prefixed name");
    }
    advance();
    std::string local;
    for (;;) {
      char c = peek();
      if (atEnd()) break;
      if (isNameChar(c) || c == ':') {
        local += c;
        advance();
      } else if (c == '.' && (isNameChar(peek(1)) || peek(1) == ':' || peek(1) == '%')) {
        local += c;
        advance();
      } else if (c == '%') {
        local += c;
        advance();
        for (int i = 0; i < 2; ++i) {
          char h = peek();
          if (!(isDigit(h) || (h >= 'a' && h <= 'f') || (h >= 'A' && h <= 'F'))) fail("hex digit after '%'");
          local += h;
          advance();
        }
      } else {
        break;
      }
    }
    return prefix + ":" + local;
  }

  std::string expandName(const std::string& name, std::size_t line, std::size_t col) {
    auto expanded = graph_.expand(name);
    if (!expanded) {
      failAt(TurtleError::Kind::UndefinedPrefix, line, col, name.substr(0, name.find(':')));
    }
    if (!isAbsoluteIri(*expanded)) failAt(TurtleError::Kind::RelativeIri, line, col, *expanded);
    return *expanded;
  }

  Term parseBlank() {
    advance();
    advance();
    std::string label;
    while (isAlpha(peek()) || isDigit(peek()) || peek() == '_' || peek() == '-' ||
           (peek() == '.' && (isAlpha(peek(1)) || isDigit(peek(1)) || peek(1) == '_' || peek(1) == '-'))) {
      label += peek();
      advance();
    }
    if (label.empty()) fail("blank node label");
    try {
      return Term::blank(label);
    } catch (const MalformedTerm&) {
      fail("blank node label starting with a letter, digit or '_'");
    }
  }

  Term parseQuotedLiteral() {
    char quote = peek();
    if (peek(1) == quote && peek(2) == quote) fail("single-line string (long strings are not supported)");
    advance();
    std::string lexical;
    for (;;) {
      if (atEnd()) fail("closing quote");
      char c = peek();
      if (c == quote) break;
      if (c == '\n' || c == '\r') fail("closing quote before end of line");
      if (c == '\\') {
        advance();
        char e = peek();
        switch (e) {
          case 't': lexical += '\t'; advance(); break;
          case 'n': lexical += '\n'; advance(); break;
          case 'r': lexical += '\r'; advance(); break;
          case 'b': lexical += '\b'; advance(); break;
          case 'f': lexical += '\f'; advance(); break;
          case '"': lexical += '"'; advance(); break;
          case '\'': lexical += '\''; advance(); break;
          case '\\': lexical += '\\'; advance(); break;
          case 'u':
          case 'U': lexical += parseUnicodeEscape(); break;
          default: fail("string escape");
        }
        continue;
      }
      lexical += c;
      advance();
    }
    advance();
    if (peek() == '@') {
      advance();
      std::string tag;
      while (isAlpha(peek()) || isDigit(peek()) || peek() == '-') {
        tag += peek();
        advance();
      }
      try {
        return Term::langLiteral(lexical, tag);
      } catch (const MalformedTerm&) {
        fail("language tag");
      }
    }
    if (peek() == '^' && peek(1) == '^') {
      advance();
      advance();
      std::string datatype;
      if (peek() == '<') {
        datatype = parseIriRef();
      } else {
        std::size_t line = line_, col = col_;
        std::string name = parsePrefixedName();
        if (name.find(':') == std::string::npos) fail("datatype IRI");
        datatype = expandName(name, line, col);
      }
      if (datatype == ns::kLangString) fail("language tag for rdf:langString");
      return Term::literal(lexical, datatype);
    }
    return Term::literal(lexical);
  }

  Term parseNumber() {
    std::string lex;
    if (peek() == '+' || peek() == '-') {
      lex += peek();
      advance();
    }
    std::size_t intDigits = 0;
    while (isDigit(peek())) {
      lex += peek();
      advance();
      ++intDigits;
    }
    if (peek() == '.' && isDigit(peek(1))) {
      lex += '.';
      advance();
      while (isDigit(peek())) {
        lex += peek();
        advance();
      }
      if (peek() == 'e' || peek() == 'E') fail("decimal (exponent notation is not supported)");
      return Term::literal(lex, ns::kXsdDecimal);
    }
    if (intDigits == 0) fail("digits");
    if (peek() == 'e' || peek() == 'E') fail("integer (exponent notation is not supported)");
    return Term::literal(lex, ns::kXsdInteger);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
  Graph graph_;
};

bool isIntegerLexical(std::string_view s) {
  std::size_t i = (!s.empty() && (s[0] == '+' || s[0] == '-')) ? 1 : 0;
  if (i == s.size()) return false;
  return std::all_of(s.begin() + static_cast<std::ptrdiff_t>(i), s.end(), isDigit);
}

bool isDecimalLexical(std::string_view s) {
  std::size_t i = (!s.empty() && (s[0] == '+' || s[0] == '-')) ? 1 : 0;
  auto dot = s.find('.', i);
  if (dot == std::string_view::npos || dot + 1 == s.size()) return false;
  for (std::size_t k = i; k < s.size(); ++k) {
    if (k != dot && !isDigit(s[k])) return false;
  }
  return true;
}

class Writer {
 public:
  explicit Writer(const Graph& g) : g_(g) {}

  std::string iri(const std::string& value) const {
    if (auto pname = g_.compact(value)) {
      auto colon = pname->find(':');
      if (isSafeLocalName(std::string_view(*pname).substr(colon + 1))) return *pname;
    }
    return "<" + value + ">";
  }

  std::string term(const Term& t, bool predicatePosition = false) const {
    switch (t.kind()) {
      case Term::Kind::Iri:
        if (predicatePosition && t.value() == ns::kRdfType) return "a";
        return iri(t.value());
      case Term::Kind::BlankNode:
        return "_:" + t.value();
      case Term::Kind::Literal: {
        const auto& dt = t.datatype();
        const auto& lex = t.value();
        if (dt == ns::kXsdInteger && isIntegerLexical(lex)) return lex;
        if (dt == ns::kXsdDecimal && isDecimalLexical(lex)) return lex;
        if (dt == ns::kXsdBoolean && (lex == "true" || lex == "false")) return lex;
        std::string out = "\"" + escapeString(lex) + "\"";
        if (t.languageTag()) return out + "@" + *t.languageTag();
        if (dt != ns::kXsdString) out += "^^" + iri(dt);
        return out;
      }
    }
    return {};
  }

 private:
  const Graph& g_;
};

}  // namespace

bool isSafeLocalName(std::string_view local) {
  if (local.empty()) return true;
  if (local.back() == '.') return false;
  if (local.front() == '-' || local.front() == '.') return false;
  for (std::size_t i = 0; i < local.size(); ++i) {
    char c = local[i];
    if (c == '%') {
      auto hex = [](char h) { return isDigit(h) || (h >= 'a' && h <= 'f') || (h >= 'A' && h <= 'F'); };
      if (i + 2 >= local.size() || !hex(local[i + 1]) || !hex(local[i + 2])) return false;
      i += 2;
      continue;
    }
    if (c == '.') {
      char next = local[i + 1];
      if (!(isNameChar(next) || next == ':' || next == '%')) return false;
      continue;
    }
    if (!(isNameChar(c) || c == ':')) return false;
  }
  return true;
}

Graph parseTurtle(std::string_view text) { return Parser(text).run(); }

std::string serializeTurtle(const Graph& g) {
  Writer w(g);
  std::ostringstream out;
  for (const auto& [label, nsIri] : g.prefixes()) {
    out << "@prefix " << label << ": <" << nsIri << "> .\n";
  }
  if (!g.prefixes().empty() && !g.empty()) out << "\n";

  const auto& triples = g.triples();
  auto it = triples.begin();
  while (it != triples.end()) {
    const Term& subject = it->subject;
    out << w.term(subject);
    bool firstPredicate = true;
    while (it != triples.end() && it->subject == subject) {
      const Term& predicate = it->predicate;
      out << (firstPredicate ? " " : " ;\n    ") << w.term(predicate, true) << " ";
      firstPredicate = false;
      bool firstObject = true;
      while (it != triples.end() && it->subject == subject && it->predicate == predicate) {
        if (!firstObject) out << ",\n        ";
        out << w.term(it->object);
        firstObject = false;
        ++it;
      }
    }
    out << " .\n";
  }
  return out.str();
}

}  // namespace aicard
