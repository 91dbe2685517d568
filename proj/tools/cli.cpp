#include "cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "aicard/card_graph.hpp"
#include "aicard/card_json.hpp"
#include "aicard/diff.hpp"
#include "aicard/query.hpp"
#include "aicard/render.hpp"
#include "aicard/rules.hpp"
#include "aicard/shapes.hpp"
#include "aicard/turtle.hpp"

namespace aicard::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

/// Input or parse failure; maps to exit status 3.
struct IoFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad flag combination found after parsing; maps to exit status 2.
struct UsageFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Config {
  std::optional<std::string> rules;
  std::optional<std::string> shapes;
  std::optional<int> radarSize;
};

Config loadConfig() {
  Config c;
  const fs::path p = "aicard.config.json";
  if (!fs::exists(p)) return c;
  std::ifstream f(p);
  nlohmann::json j = nlohmann::json::parse(f, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw IoFailure("aicard.config.json: not a JSON object");
  auto str = [&](const char* k) -> std::optional<std::string> {
    if (!j.contains(k)) return std::nullopt;
    if (!j[k].is_string()) throw IoFailure(std::string("aicard.config.json: \"") + k + "\" must be a string");
    return j[k].get<std::string>();
  };
  c.rules = str("rules");
  c.shapes = str("shapes");
  if (j.contains("radarSize")) {
    if (!j["radarSize"].is_number_integer()) throw IoFailure("aicard.config.json: \"radarSize\" must be an integer");
    c.radarSize = j["radarSize"].get<int>();
  }
  return c;
}

class Context {
 public:
  Context(std::istream& in, std::ostream& out, std::ostream& err) : in_(in), out(out), err(err) {}

  std::string read(const std::string& path) {
    if (path == "-") {
      std::ostringstream ss;
      ss << in_.rdbuf();
      return ss.str();
    }
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoFailure(path + ": cannot open file");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
  }

  void write(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoFailure(path + ": cannot write file");
    f << content;
    if (!f) throw IoFailure(path + ": write failed");
  }

  /// Writes to `outPath` when given, else to stdout. In JSON mode stdout
  /// gets {"out": path} or {key: content}; card documents are nested as JSON.
  void emit(const std::optional<std::string>& outPath, const std::string& content, const char* key) {
    if (outPath) write(*outPath, content);
    if (!json) {
      if (!outPath) out << content;
      return;
    }
    nlohmann::ordered_json j;
    if (outPath) {
      j["out"] = *outPath;
    } else if (std::string_view(key) == "card") {
      j[key] = nlohmann::ordered_json::parse(content);
    } else {
      j[key] = content;
    }
    out << j.dump(2) << "\n";
  }

  Graph readGraph(const std::string& path) {
    if (isJsonPath(path)) return cardToGraph(readCard(path), false);
    const std::string text = read(path);
    try {
      return parseTurtle(text);
    } catch (const TurtleError& e) {
      throw IoFailure(path + ":" + std::to_string(e.line()) + ":" + std::to_string(e.column()) + ": " + e.what());
    }
  }

  AICard readCard(const std::string& path) {
    if (!isJsonPath(path) && path != "-") {
      Graph g = readGraph(path);
      std::vector<std::string> warnings;
      try {
        AICard c = graphToCard(g, &warnings);
        for (const auto& w : warnings) err << path << ": warning: " << w << "\n";
        return c;
      } catch (const CardGraphError& e) {
        throw IoFailure(path + ": " + e.what());
      }
    }
    const std::string text = read(path);
    try {
      return parseCardJson(text);
    } catch (const Error& e) {
      throw IoFailure(path + ": " + e.what());
    }
  }

  static bool isJsonPath(const std::string& path) { return path == "-" || fs::path(path).extension() == ".json"; }

  std::istream& in_;
  std::ostream& out;
  std::ostream& err;
  bool json = false;
  Config config;
};

std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

Date today() {
  return std::chrono::year_month_day{std::chrono::floor<std::chrono::days>(std::chrono::system_clock::now())};
}

std::string fieldHint(const std::string& predicateIri) {
  static const std::map<std::string, std::string> hints = [] {
    std::map<std::string, std::string> m;
    for (const auto& e : vocabularyTable()) {
      std::string iri = std::string(kVocab) + e.term;
      auto& h = m[iri];
      h += (h.empty() ? "" : ", ") + e.fieldPath;
    }
    return m;
  }();
  auto it = hints.find(predicateIri);
  return it == hints.end() ? std::string() : it->second;
}

// --- subcommands -----------------------------------------------------------

int cmdNew(Context& ctx, const std::optional<std::string>& outPath, const std::string& name) {
  AICard c = blankCard();
  if (!name.empty()) c.general.systemName = name;
  ctx.emit(outPath, serializeCardJson(c), "card");
  return kOk;
}

int cmdValidate(Context& ctx, const std::string& path, std::optional<std::string> shapesPath) {
  if (!shapesPath) shapesPath = ctx.config.shapes;
  std::vector<NodeShape> shapes;
  if (shapesPath) {
    try {
      shapes = shapesFromGraph(parseTurtle(ctx.read(*shapesPath)));
    } catch (const TurtleError& e) {
      throw IoFailure(*shapesPath + ":" + std::to_string(e.line()) + ":" + std::to_string(e.column()) + ": " + e.what());
    } catch (const ShapeError& e) {
      throw IoFailure(*shapesPath + ": " + e.what());
    }
  } else {
    shapes = builtinCardShapes();
  }

  std::vector<CardIssue> issues;
  Graph g;
  if (Context::isJsonPath(path)) {
    AICard card = ctx.readCard(path);
    issues = checkCard(card, today());
    g = cardToGraph(card, false);
  } else {
    g = ctx.readGraph(path);
  }
  ValidationReport rep;
  try {
    rep = validate(g, shapes);
  } catch (const ShapeError& e) {
    throw IoFailure(e.what());
  }
  const bool conforms = rep.conforms && issues.empty();

  if (ctx.json) {
    ojson j = reportToJson(rep);
    j["conforms"] = conforms;
    for (auto& r : j["results"]) {
      std::string hint = fieldHint(r["path"].get<std::string>());
      if (!hint.empty()) r["field"] = hint;
    }
    j["cardIssues"] = ojson::array();
    for (const auto& i : issues) j["cardIssues"].push_back({{"path", i.path}, {"message", i.message}});
    ctx.out << dump(j);
  } else {
    ctx.out << "conforms: " << (conforms ? "true" : "false") << "\n";
    for (const auto& r : rep.results) {
      std::string hint = fieldHint(r.path);
      ctx.out << toString(r.severity) << ": " << r.focusNode.canonical() << " <" << r.path << ">"
              << (hint.empty() ? "" : " (" + hint + ")") << " " << r.constraintKind << ": " << r.message << "\n";
    }
    for (const auto& i : issues) ctx.out << "Violation: " << i.path << ": " << i.message << "\n";
  }
  return conforms ? kOk : kFailed;
}

std::string readQueryText(Context& ctx, const std::string& fileOrText) {
  if (fs::is_regular_file(fileOrText)) return ctx.read(fileOrText);
  return fileOrText;
}

template <typename F>
auto withQueryErrors(const std::string& source, F f) {
  try {
    return f();
  } catch (const QueryError& e) {
    throw IoFailure(source + ": " + e.what());
  }
}

int cmdQuery(Context& ctx, const std::string& graphPath, const std::string& select) {
  Graph g = ctx.readGraph(graphPath);
  const std::string text = readQueryText(ctx, select);
  SelectQuery q = withQueryErrors("query", [&] { return parseSelect(text, g.prefixes()); });
  auto rows = evaluateSelect(g, q);
  if (ctx.json) {
    ctx.out << dump(solutionsToJson(q.projectedVars, rows));
  } else {
    ctx.out << solutionsToText(q.projectedVars, rows);
  }
  return kOk;
}

int cmdUpdate(Context& ctx, const std::string& graphPath, const std::string& requestPath,
              const std::optional<std::string>& outPath) {
  Graph g = ctx.readGraph(graphPath);
  const std::string text = readQueryText(ctx, requestPath);
  UpdateRequest u = withQueryErrors(requestPath, [&] { return parseUpdate(text, g.prefixes()); });
  UpdateResult r = withQueryErrors(requestPath, [&] { return applyUpdate(g, u); });
  const std::string ttl = serializeTurtle(r.graph);
  if (outPath) {
    ctx.write(*outPath, ttl);
    if (ctx.json) {
      ctx.out << dump({{"deleted", r.stats.deleted}, {"inserted", r.stats.inserted}, {"out", *outPath}});
    } else {
      ctx.out << "deleted: " << r.stats.deleted << "\ninserted: " << r.stats.inserted << "\n";
    }
  } else if (ctx.json) {
    ctx.out << dump({{"deleted", r.stats.deleted}, {"inserted", r.stats.inserted}, {"graph", ttl}});
  } else {
    ctx.out << ttl;
    ctx.err << "deleted: " << r.stats.deleted << ", inserted: " << r.stats.inserted << "\n";
  }
  return kOk;
}

std::vector<RiskClassRule> loadRules(Context& ctx, const std::optional<std::string>& flag) {
  std::optional<std::string> path = flag;
  if (!path) {
    if (const char* env = std::getenv("AICARD_RULES"); env && *env) path = env;
  }
  if (!path) path = ctx.config.rules;
  if (!path) return defaultRuleBase();
  try {
    return loadRuleBase(ctx.read(*path));
  } catch (const RuleError& e) {
    throw IoFailure(*path + (e.line() ? ":" + std::to_string(e.line()) : std::string()) + ": " + e.what());
  }
}

int cmdClassify(Context& ctx, const std::string& cardPath, const std::optional<std::string>& rulesPath) {
  AICard card = ctx.readCard(cardPath);
  auto rules = loadRules(ctx, rulesPath);
  ClassificationResult r;
  try {
    r = classify(card.intendedUse, rules);
  } catch (const RuleError& e) {
    throw IoFailure(e.what());
  }
  if (ctx.json) {
    ctx.out << dump(classificationToJson(r));
  } else {
    ctx.out << "tier: " << toString(r.tier) << "\n";
    for (const auto& m : r.matchedRules) {
      ctx.out << "matched: " << m.ruleId << " (" << toString(m.tier) << ") " << m.citation << "\n";
      for (const auto& c : m.explanation) ctx.out << "  " << c.condition << " <- \"" << c.fieldValue << "\"\n";
    }
  }
  return kOk;
}

int cmdPolicy(Context& ctx, const std::string& cardPath, const std::optional<std::string>& policyPath,
              const std::string& action) {
  AICard card = ctx.readCard(cardPath);
  nlohmann::json pj;
  std::string source;
  if (policyPath) {
    source = *policyPath;
    pj = nlohmann::json::parse(ctx.read(*policyPath), nullptr, false);
    if (pj.is_discarded()) throw IoFailure(source + ": malformed JSON");
  } else if (card.extensions.contains("policy")) {
    source = cardPath + " (extensions.policy)";
    pj = card.extensions["policy"];
  } else {
    throw UsageFailure("policy-check needs --policy FILE or a card with extensions.policy");
  }
  UsePolicy policy;
  try {
    policy = policyFromJson(pj);
  } catch (const RuleError& e) {
    throw IoFailure(source + ": " + e.what());
  }
  PolicyDecision d = evaluatePolicy(policy, card.intendedUse, action);
  if (ctx.json) {
    ctx.out << dump(decisionToJson(d));
  } else {
    ctx.out << "verdict: " << toString(d.verdict) << "\n";
    for (const auto& m : d.matchedStatements) {
      ctx.out << "matched: " << (m.prohibition ? "prohibition" : "permission") << "[" << m.index << "] " << m.action
              << "\n";
    }
  }
  return d.verdict == Verdict::Permitted ? kOk : kFailed;
}

std::string stemOf(const std::string& path) {
  std::string name = fs::path(path).filename().string();
  for (const char* suffix : {".aicard.json", ".json", ".ttl"}) {
    std::string s(suffix);
    if (name.size() > s.size() && name.compare(name.size() - s.size(), s.size(), s) == 0) {
      return name.substr(0, name.size() - s.size());
    }
  }
  return name.empty() ? "card" : name;
}

int cmdRender(Context& ctx, const std::string& cardPath, const std::string& outDir, std::optional<int> radarSize,
              bool noSpecLink) {
  AICard card = ctx.readCard(cardPath);
  RenderOptions opts;
  opts.includeMachineReadableLink = !noSpecLink;
  if (!radarSize) radarSize = ctx.config.radarSize;
  if (radarSize) opts.radarSize = *radarSize;
  try {
    checkOptions(opts);
  } catch (const RenderError& e) {
    throw UsageFailure(e.what());
  }
  std::error_code ec;
  fs::create_directories(outDir, ec);
  if (ec) throw IoFailure(outDir + ": " + ec.message());
  const std::string stem = (fs::path(outDir) / stemOf(cardPath)).string();
  std::vector<std::string> written;
  ctx.write(stem + ".aicard.html", renderHtml(card, opts));
  written.push_back(stem + ".aicard.html");
  if (card.quality.size() >= 3) {
    ctx.write(stem + ".radar.svg", renderRadarSvg(card.quality, opts.radarSize));
    written.push_back(stem + ".radar.svg");
  }
  ctx.write(stem + ".summary.txt", renderSummary(card));
  written.push_back(stem + ".summary.txt");
  if (ctx.json) {
    ctx.out << dump({{"written", written}});
  } else {
    for (const auto& w : written) ctx.out << "wrote " << w << "\n";
  }
  return kOk;
}

int cmdDiff(Context& ctx, const std::string& oldPath, const std::string& newPath, bool substantial) {
  ChangeSet cs = diffCards(ctx.readCard(oldPath), ctx.readCard(newPath));
  SubstantialModification sm = isSubstantialModification(cs);
  if (ctx.json) {
    ojson j = changeSetToJson(cs);
    if (substantial) {
      j["substantial"] = sm.substantial;
      j["triggers"] = sm.triggers;
    }
    ctx.out << dump(j);
  } else {
    for (const auto& c : cs.added) ctx.out << "+ " << c.path << " = " << c.value.dump() << "\n";
    for (const auto& c : cs.removed) ctx.out << "- " << c.path << " = " << c.value.dump() << "\n";
    for (const auto& c : cs.modified) {
      ctx.out << "~ " << c.path << ": " << c.oldValue.dump() << " -> " << c.newValue.dump() << "\n";
    }
    if (substantial) {
      ctx.out << "substantial: " << (sm.substantial ? "true" : "false") << "\n";
      for (const auto& t : sm.triggers) ctx.out << "trigger: " << t << "\n";
    }
  }
  return substantial && sm.substantial ? kFailed : kOk;
}

int cmdToGraph(Context& ctx, const std::string& cardPath, const std::optional<std::string>& outPath) {
  AICard card = ctx.readCard(cardPath);
  Graph g;
  try {
    g = cardToGraph(card, true);
  } catch (const InvariantViolation& e) {
    ctx.err << cardPath << ": " << e.what() << "\n";
    return kFailed;
  }
  ctx.emit(outPath, serializeTurtle(g), "graph");
  return kOk;
}

int cmdToCard(Context& ctx, const std::string& graphPath, const std::optional<std::string>& outPath) {
  ctx.emit(outPath, serializeCardJson(ctx.readCard(graphPath)), "card");
  return kOk;
}

int cmdIntegrate(Context& ctx, const std::vector<std::string>& paths, const std::optional<std::string>& outPath) {
  Graph g = ctx.readGraph(paths.at(0));
  std::vector<std::string> warnings;
  for (std::size_t i = 1; i < paths.size(); ++i) g = merge(g, ctx.readGraph(paths[i]), &warnings);
  for (const auto& w : warnings) ctx.err << "warning: " << w << "\n";
  ctx.emit(outPath, serializeTurtle(g), "graph");
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  Context ctx(in, out, err);
  CLI::App app{"Author, validate, query and render AI Cards", "aicard"};
  app.require_subcommand(1);
  std::string format = "text";
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));

  std::optional<std::string> outPath;
  std::string name;
  auto* sNew = app.add_subcommand("new", "Write a blank card JSON scaffold");
  sNew->add_option("--out", outPath, "Output file (default: stdout)");
  sNew->add_option("--system", name, "System name to fill in");

  std::string card, graph, oldCard, newCard, select, request, action;
  std::optional<std::string> shapes, rules, policy;
  std::string outDir;
  std::optional<int> radarSize;
  bool substantial = false, noSpecLink = false;
  std::vector<std::string> graphs;

  auto* sValidate = app.add_subcommand("validate", "Check a card (JSON) or card graph (Turtle) against shapes");
  sValidate->add_option("card", card, "Card JSON or graph Turtle ('-' for stdin)")->required();
  sValidate->add_option("--shapes", shapes, "Shape file (.shapes.ttl)");

  auto* sQuery = app.add_subcommand("query", "Run a SELECT query over a graph");
  sQuery->add_option("graph", graph, "Graph Turtle or card JSON")->required();
  sQuery->add_option("--select", select, "Query file or query text")->required();

  auto* sUpdate = app.add_subcommand("update", "Apply a DELETE/INSERT request and write the new graph");
  sUpdate->add_option("graph", graph, "Graph Turtle or card JSON")->required();
  sUpdate->add_option("--request", request, "Request file or text")->required();
  sUpdate->add_option("--out", outPath, "Output Turtle file (default: stdout)");

  auto* sClassify = app.add_subcommand("classify", "Suggest the risk tier of the card's intended use");
  sClassify->add_option("card", card, "Card JSON or graph Turtle")->required();
  sClassify->add_option("--rules", rules, "Rule base file (default: $AICARD_RULES, config, built-in)");

  auto* sPolicy = app.add_subcommand("policy-check", "Evaluate a use policy for an action");
  sPolicy->add_option("card", card, "Card JSON or graph Turtle")->required();
  sPolicy->add_option("--policy", policy, "Policy JSON (default: the card's extensions.policy)");
  sPolicy->add_option("--action", action, "Action to check, e.g. deploy")->required();

  auto* sRender = app.add_subcommand("render", "Write HTML, radar SVG and text summary");
  sRender->add_option("card", card, "Card JSON or graph Turtle")->required();
  sRender->add_option("--out", outDir, "Output directory")->required();
  sRender->add_option("--radar-size", radarSize, "Radar chart size in pixels (>= 100)");
  sRender->add_flag("--no-spec-link", noSpecLink, "Leave the machine-readable URL out of the header");

  auto* sDiff = app.add_subcommand("diff", "Field-level changes between two cards");
  sDiff->add_option("old", oldCard, "Old card")->required();
  sDiff->add_option("new", newCard, "New card")->required();
  sDiff->add_flag("--substantial", substantial, "Flag substantial modifications (exit 1 when found)");

  auto* sToGraph = app.add_subcommand("to-graph", "Convert card JSON to Turtle");
  sToGraph->add_option("card", card, "Card JSON")->required();
  sToGraph->add_option("--out", outPath, "Output file (default: stdout)");

  auto* sToCard = app.add_subcommand("to-card", "Convert a card graph to card JSON");
  sToCard->add_option("graph", graph, "Graph Turtle")->required();
  sToCard->add_option("--out", outPath, "Output file (default: stdout)");

  auto* sIntegrate = app.add_subcommand("integrate", "Merge component documentation graphs into a card graph");
  sIntegrate->add_option("graphs", graphs, "Card graph followed by component graphs")->required()->expected(2, -1);
  sIntegrate->add_option("--out", outPath, "Output file (default: stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }
  ctx.json = format == "json";

  try {
    ctx.config = loadConfig();
    if (sNew->parsed()) return cmdNew(ctx, outPath, name);
    if (sValidate->parsed()) return cmdValidate(ctx, card, shapes);
    if (sQuery->parsed()) return cmdQuery(ctx, graph, select);
    if (sUpdate->parsed()) return cmdUpdate(ctx, graph, request, outPath);
    if (sClassify->parsed()) return cmdClassify(ctx, card, rules);
    if (sPolicy->parsed()) return cmdPolicy(ctx, card, policy, action);
    if (sRender->parsed()) return cmdRender(ctx, card, outDir, radarSize, noSpecLink);
    if (sDiff->parsed()) return cmdDiff(ctx, oldCard, newCard, substantial);
    if (sToGraph->parsed()) return cmdToGraph(ctx, card, outPath);
    if (sToCard->parsed()) return cmdToCard(ctx, graph, outPath);
    if (sIntegrate->parsed()) return cmdIntegrate(ctx, graphs, outPath);
  } catch (const UsageFailure& e) {
    err << "aicard: " << e.what() << "\n";
    return kUsage;
  } catch (const IoFailure& e) {
    err << "aicard: " << e.what() << "\n";
    return kIoError;
  } catch (const std::exception& e) {
    err << "aicard: " << e.what() << "\n";
    return kIoError;
  }
  return kUsage;
}

}  // namespace aicard::cli
