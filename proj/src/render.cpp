#include "aicard/render.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace aicard {

RenderError::RenderError(Kind kind, const std::string& detail)
    : Error(std::string(kind == Kind::TooFewDimensions ? "too-few-dimensions" : "invalid-options") + ": " + detail),
      kind_(kind) {}

void checkOptions(const RenderOptions& opts) {
  if (opts.radarSize < 100) {
    throw RenderError(RenderError::Kind::InvalidOptions, "radarSize must be at least 100, got " +
                                                             std::to_string(opts.radarSize));
  }
  const auto& l = opts.locale;
  bool en = l.size() >= 2 && (l[0] == 'e' || l[0] == 'E') && (l[1] == 'n' || l[1] == 'N') &&
            (l.size() == 2 || l[2] == '-');
  if (!en) throw RenderError(RenderError::Kind::InvalidOptions, "unsupported locale '" + l + "'");
}

std::string humanize(std::string_view name) {
  std::vector<std::string> parts;
  std::string cur;
  auto up = [](char c) { return c >= 'A' && c <= 'Z'; };
  for (std::size_t i = 0; i < name.size(); ++i) {
    char c = name[i];
    bool boundary = !cur.empty() && up(c) &&
                    (!up(name[i - 1]) || (i + 1 < name.size() && !up(name[i + 1])));
    if (boundary) {
      parts.push_back(std::move(cur));
      cur.clear();
    }
    cur += c;
  }
  if (!cur.empty()) parts.push_back(std::move(cur));
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    std::string w = parts[i];
    bool acronym = w.size() > 1 && up(w[0]) && up(w[1]);
    if (!acronym && i > 0) w[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(w[0])));
    out += (i ? " " : "") + w;
  }
  return out;
}

std::string formatCoord(double v) {
  double r = std::round(v * 100.0) / 100.0;
  if (r == 0.0) r = 0.0;  // drops the sign of -0
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", r);
  return buf;
}

RadarPoint radarVertex(std::size_t k, std::size_t n, double score, int size) {
  const double c = size / 2.0;
  const double r = score * 0.35 * size;
  const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
  return {c + r * std::sin(theta), c - r * std::cos(theta)};
}

namespace {

std::string escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out += c;
    }
  }
  return out;
}

/// Emits well-formed markup: every open() needs a matching close().
class Html {
 public:
  Html& open(std::string_view tag, std::string_view attrs = {}) {
    indent();
    out_ += "<" + std::string(tag) + (attrs.empty() ? "" : " " + std::string(attrs)) + ">\n";
    stack_.emplace_back(tag);
    return *this;
  }
  Html& close() {
    std::string tag = std::move(stack_.back());
    stack_.pop_back();
    indent();
    out_ += "</" + tag + ">\n";
    return *this;
  }
  /// Element with escaped text content on one line.
  Html& leaf(std::string_view tag, std::string_view text, std::string_view attrs = {}) {
    indent();
    out_ += "<" + std::string(tag) + (attrs.empty() ? "" : " " + std::string(attrs)) + ">" + escape(text) + "</" +
            std::string(tag) + ">\n";
    return *this;
  }
  /// Pre-built, already balanced markup.
  Html& raw(std::string_view markup) {
    out_ += markup;
    return *this;
  }
  Html& line(std::string_view s) {
    indent();
    out_ += std::string(s) + "\n";
    return *this;
  }
  std::string finish() {
    if (!stack_.empty()) throw Error("unbalanced HTML emitter: <" + stack_.back() + "> left open");
    return std::move(out_);
  }

 private:
  void indent() { out_.append(stack_.size() * 2, ' '); }

  std::string out_;
  std::vector<std::string> stack_;
};

constexpr const char* kFilled = "●";
constexpr const char* kEmpty = "○";

std::string flag(bool on, std::string_view label) { return std::string(on ? kFilled : kEmpty) + " " + std::string(label); }

std::string levelBar(Level l) {
  int n = static_cast<int>(l) + 1;
  std::string out;
  for (int i = 0; i < 5; ++i) out += i < n ? kFilled : kEmpty;
  return out + " " + humanize(toString(l));
}

template <typename E>
std::string labelled(const Labelled<E>& v) {
  if (toString(v.kind) == "Other") return v.otherLabel.empty() ? "Other" : v.otherLabel;
  return humanize(toString(v.kind));
}

std::string actorLabel(ActorRole r) { return r == ActorRole::EndUser ? "AI end-user" : "AI subject"; }

std::string orgText(const OrganisationRef& o) { return o.url.empty() ? o.name : o.name + " (" + o.url + ")"; }

void placeholder(Html& h) { h.leaf("p", "Not documented", "class=\"empty\""); }

void definition(Html& h, std::string_view term, const std::string& value) {
  h.leaf("dt", term);
  if (value.empty()) {
    h.leaf("dd", "Not documented", "class=\"empty\"");
  } else {
    h.leaf("dd", value);
  }
}

void list(Html& h, const std::vector<std::string>& items) {
  if (items.empty()) {
    placeholder(h);
    return;
  }
  h.open("ul");
  for (const auto& i : items) h.leaf("li", i);
  h.close();
}

void listDefinition(Html& h, std::string_view term, const std::vector<std::string>& items) {
  h.leaf("dt", term);
  h.open("dd");
  list(h, items);
  h.close();
}

void tableRow(Html& h, const std::vector<std::string>& cells, bool header = false) {
  h.open("tr");
  for (const auto& c : cells) h.leaf(header ? "th" : "td", c);
  h.close();
}

const char* kStyle =
    "body{font-family:sans-serif;max-width:60rem;margin:1rem auto;padding:0 1rem;color:#1a1a1a}"
    "header.card-meta{border-bottom:2px solid #333;margin-bottom:1rem}"
    "section{border:1px solid #ccc;border-radius:6px;padding:0.5rem 1rem;margin:0.75rem 0}"
    "h2{font-size:1.15rem;margin:0.25rem 0 0.5rem}"
    "dt{font-weight:bold}dd{margin:0 0 0.4rem 1rem}"
    "table{border-collapse:collapse}th,td{border:1px solid #ddd;padding:2px 6px;text-align:left}"
    ".empty{color:#777;font-style:italic}"
    "svg .ring{fill:none;stroke:#ccc}svg .axis{stroke:#999}"
    "svg .score{fill:rgba(30,90,200,0.3);stroke:#1e5ac8;stroke-width:2}svg .label{font-size:11px}";

}  // namespace

const std::vector<std::string>& sectionHeadings() {
  static const std::vector<std::string> h{"General Information", "Intended Use",    "Key Components",
                                          "Data Processing",     "Human Involvement", "Risk Profile",
                                          "Quality",             "Pre-determined Changes",
                                          "Regulations & Certification"};
  return h;
}

std::string renderRadarSvg(const std::vector<QualityMetric>& metrics, int size) {
  if (metrics.size() < 3) {
    throw RenderError(RenderError::Kind::TooFewDimensions,
                      "a radar chart needs at least 3 dimensions, got " + std::to_string(metrics.size()));
  }
  if (size < 100) throw RenderError(RenderError::Kind::InvalidOptions, "radar size must be at least 100");
  const std::size_t n = metrics.size();
  const std::string s = std::to_string(size);
  const std::string c = formatCoord(size / 2.0);
  auto point = [](const RadarPoint& p) { return formatCoord(p.x) + "," + formatCoord(p.y); };
  auto polygon = [&](double score) {
    std::string pts;
    for (std::size_t k = 0; k < n; ++k) pts += (k ? " " : "") + point(radarVertex(k, n, score, size));
    return pts;
  };

  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + s + "\" height=\"" + s +
                    "\" viewBox=\"0 0 " + s + " " + s + "\" role=\"img\" aria-label=\"Quality radar chart\">\n";
  for (double ring : {0.25, 0.5, 0.75, 1.0}) {
    out += "<polygon class=\"ring\" points=\"" + polygon(ring) + "\"/>\n";
  }
  for (std::size_t k = 0; k < n; ++k) {
    RadarPoint end = radarVertex(k, n, 1.0, size);
    out += "<line class=\"axis\" x1=\"" + c + "\" y1=\"" + c + "\" x2=\"" + formatCoord(end.x) + "\" y2=\"" +
           formatCoord(end.y) + "\"/>\n";
  }
  for (std::size_t k = 0; k < n; ++k) {
    RadarPoint p = radarVertex(k, n, 1.12, size);
    double dx = p.x - size / 2.0;
    const char* anchor = std::abs(dx) < 1.0 ? "middle" : dx > 0 ? "start" : "end";
    out += "<text class=\"label\" x=\"" + formatCoord(p.x) + "\" y=\"" + formatCoord(p.y) + "\" text-anchor=\"" +
           anchor + "\">" + escape(metrics[k].dimension) + "</text>\n";
  }
  std::string pts;
  for (std::size_t k = 0; k < n; ++k) pts += (k ? " " : "") + point(radarVertex(k, n, metrics[k].score, size));
  out += "<polygon class=\"score\" points=\"" + pts + "\"/>\n";
  out += "</svg>\n";
  return out;
}

std::string renderHtml(const AICard& card, const RenderOptions& opts) {
  checkOptions(opts);
  const auto& heads = sectionHeadings();
  Html h;
  h.line("<!DOCTYPE html>");
  h.open("html", "lang=\"" + escape(card.meta.language.empty() ? opts.locale : card.meta.language) + "\"");
  h.open("head");
  h.line("<meta charset=\"utf-8\">");
  h.leaf("title", "AI Card: " + card.general.systemName);
  h.leaf("style", kStyle);
  h.close();
  h.open("body");

  h.open("header", "class=\"card-meta\"");
  h.leaf("h1", "AI Card: " + card.general.systemName +
                   (card.general.systemVersion.empty() ? "" : " " + card.general.systemVersion));
  h.open("dl");
  definition(h, "Card version", card.meta.cardVersion);
  definition(h, "Issued", card.meta.issuanceDate.ok() ? formatDate(card.meta.issuanceDate) : "");
  definition(h, "Language", card.meta.language);
  definition(h, "Publisher", card.meta.publisher);
  definition(h, "Contact", card.meta.contact);
  if (opts.includeMachineReadableLink) definition(h, "Machine-readable specification", card.meta.machineReadableSpecUrl);
  h.close();
  h.close();

  h.open("main");
  auto section = [&](std::size_t i, std::string_view id) {
    h.open("section", "id=\"" + std::string(id) + "\"");
    h.leaf("h2", heads[i]);
  };

  const auto& g = card.general;
  section(0, "general");
  h.open("dl");
  definition(h, "System name", g.systemName);
  definition(h, "System version", g.systemVersion);
  definition(h, "Modality", labelled(g.modality));
  listDefinition(h, "AI techniques", g.aiTechniques);
  std::vector<std::string> providers, developers;
  for (const auto& o : g.providers) providers.push_back(orgText(o));
  for (const auto& o : g.developers) developers.push_back(orgText(o));
  listDefinition(h, "AI providers", providers);
  listDefinition(h, "AI developers", developers);
  h.close();
  h.close();

  const auto& u = card.intendedUse;
  section(1, "intended-use");
  h.open("dl");
  definition(h, "Domain", u.domain);
  definition(h, "Purpose", u.purpose);
  definition(h, "AI capability", u.capability);
  definition(h, "AI deployer", u.deployer);
  listDefinition(h, "AI subjects", u.subjects);
  h.close();
  h.close();

  section(2, "components");
  if (card.components.empty()) {
    placeholder(h);
  } else {
    h.open("table");
    tableRow(h, {"Name", "Version", "Kind", "Documentation", "Information sheet"}, true);
    for (const auto& c : card.components) {
      tableRow(h, {c.name, c.version, labelled(c.kind), c.docLinkOrId,
                   c.infoSheetKind ? labelled(*c.infoSheetKind) : "Not stated"});
    }
    h.close();
  }
  h.close();

  section(3, "data-processing");
  if (!card.dataProcessing) {
    placeholder(h);
  } else {
    const auto& d = *card.dataProcessing;
    h.open("ul", "class=\"flags\"");
    h.leaf("li", flag(d.processesPersonalData, "Personal data"));
    h.leaf("li", flag(d.includesNonPersonalData, "Non-personal data"));
    h.leaf("li", flag(d.includesAnonymisedData, "Anonymised data"));
    h.leaf("li", flag(d.includesLicencedData, "Licenced data"));
    h.close();
    if (d.processesPersonalData) {
      h.open("dl");
      listDefinition(h, "Personal data categories", d.personalDataCategories);
      definition(h, "DPIA conducted", d.dpiaConducted ? (*d.dpiaConducted ? "Yes" : "No") : "Not stated");
      h.close();
    }
  }
  h.close();

  section(4, "human-involvement");
  if (!card.humanInvolvement) {
    placeholder(h);
  } else {
    const auto& hi = *card.humanInvolvement;
    h.open("dl");
    definition(h, "Automation level", humanize(toString(hi.automationLevel)));
    h.close();
    h.open("table");
    tableRow(h, {"Actor", "Intended", "Active", "Informed", "Control"}, true);
    for (const auto& [role, a] : hi.perActor) {
      tableRow(h, {actorLabel(role), a.intended ? kFilled : kEmpty, a.active ? kFilled : kEmpty,
                   a.informed ? kFilled : kEmpty, humanize(toString(a.controlLevel))});
    }
    h.close();
  }
  h.close();

  const auto& rp = card.riskProfile;
  section(5, "risk-profile");
  h.open("table", "class=\"risk-summary\"");
  tableRow(h, {"Impact area", "Likelihood", "Severity", "Residual risk"}, true);
  for (auto area : allValues<ImpactArea>()) {
    auto it = rp.summary.find(area);
    if (it == rp.summary.end()) {
      tableRow(h, {humanize(toString(area)), "Not assessed", "Not assessed", "Not assessed"});
    } else {
      tableRow(h, {humanize(toString(area)), levelBar(it->second.likelihood), levelBar(it->second.severity),
                   levelBar(it->second.residualRisk)});
    }
  }
  h.close();
  h.open("ul", "class=\"flags measure-flags\"");
  for (auto k : allValues<MeasureKind>()) h.leaf("li", flag(rp.measureFlags.count(k) != 0, humanize(toString(k))));
  h.close();
  if (rp.risks.empty()) {
    h.leaf("p", "No risks documented", "class=\"empty\"");
  }
  for (const auto& r : rp.risks) {
    h.open("article", "class=\"risk\"");
    h.leaf("h3", r.label.empty() ? r.id : r.label);
    h.open("dl");
    definition(h, "Identifier", r.id);
    listDefinition(h, "Sources", r.sources);
    listDefinition(h, "Consequences", r.consequences);
    std::vector<std::string> impacts;
    for (const auto& i : r.impacts) impacts.push_back(humanize(toString(i.area)) + ": " + i.description);
    listDefinition(h, "Impacts", impacts);
    definition(h, "Likelihood", levelBar(r.likelihood));
    definition(h, "Severity", levelBar(r.severity));
    definition(h, "Residual risk", levelBar(r.residualRisk));
    std::vector<std::string> measures;
    for (const auto& m : r.measures) measures.push_back(m.label + " (" + humanize(toString(m.kind)) + ")");
    listDefinition(h, "Measures", measures);
    h.close();
    h.close();
  }
  h.close();

  section(6, "quality");
  if (card.quality.empty()) {
    placeholder(h);
  } else {
    if (card.quality.size() >= 3) {
      h.open("figure");
      h.raw(renderRadarSvg(card.quality, opts.radarSize));
      h.close();
    }
    h.open("table");
    tableRow(h, {"Dimension", "Score", "Note"}, true);
    for (const auto& q : card.quality) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.2f", q.score);
      tableRow(h, {q.dimension, buf, q.note.value_or("")});
    }
    h.close();
  }
  h.close();

  section(7, "predetermined-changes");
  if (card.predeterminedChanges.empty()) {
    placeholder(h);
  } else {
    h.open("table");
    tableRow(h, {"Subject of change", "Frequency", "Impact on performance and risks"}, true);
    for (const auto& c : card.predeterminedChanges) tableRow(h, {c.subjectOfChange, c.frequency, c.impactOnPerformanceAndRisks});
    h.close();
  }
  h.close();

  const auto& cp = card.compliance;
  section(8, "compliance");
  h.open("dl");
  listDefinition(h, "Regulations", cp.regulations);
  listDefinition(h, "Standards", cp.standards);
  listDefinition(h, "Codes of conduct", cp.codesOfConduct);
  h.close();
  h.close();

  h.close();  // main

  if (card.extensions.is_object() && !card.extensions.empty()) {
    h.open("footer", "class=\"extensions\"");
    h.leaf("pre", card.extensions.dump(2));
    h.close();
  }
  h.close();  // body
  h.close();  // html
  return h.finish();
}

std::string renderSummary(const AICard& card) {
  std::vector<std::string> lines;
  auto oneLine = [](std::string s) {
    for (auto& c : s) {
      if (c == '\n' || c == '\r' || c == '\t') c = ' ';
    }
    return s;
  };
  auto add = [&](const std::string& key, const std::string& value) {
    lines.push_back(key + ": " + (value.empty() ? "-" : oneLine(value)));
  };
  auto join = [](const std::vector<std::string>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "; " : "") + v[i];
    return out;
  };

  const auto& g = card.general;
  add("System", g.systemName + (g.systemVersion.empty() ? "" : " " + g.systemVersion));
  add("Modality", labelled(g.modality));
  std::vector<std::string> providers;
  for (const auto& o : g.providers) providers.push_back(o.name);
  add("Providers", join(providers));
  const auto& u = card.intendedUse;
  add("Domain", u.domain);
  add("Purpose", u.purpose);
  add("AI capability", u.capability);
  add("AI deployer", u.deployer);
  add("AI subjects", join(u.subjects));
  std::vector<std::string> comps;
  for (const auto& c : card.components) comps.push_back(c.name);
  add("Components", join(comps));
  if (card.dataProcessing) {
    add("Personal data", card.dataProcessing->processesPersonalData
                             ? "yes (" + join(card.dataProcessing->personalDataCategories) + ")"
                             : "no");
  }
  if (card.humanInvolvement) add("Automation level", humanize(toString(card.humanInvolvement->automationLevel)));
  for (const auto& [area, s] : card.riskProfile.summary) {
    add("Risk area " + humanize(toString(area)), "likelihood " + humanize(toString(s.likelihood)) + ", severity " +
                                                     humanize(toString(s.severity)) + ", residual " +
                                                     humanize(toString(s.residualRisk)));
  }
  std::string flags;
  for (auto k : allValues<MeasureKind>()) {
    flags += (flags.empty() ? "" : " ") + std::string(card.riskProfile.measureFlags.count(k) ? "[x] " : "[ ] ") +
             humanize(toString(k));
  }
  add("Measure flags", flags);
  add("Risks documented", std::to_string(card.riskProfile.risks.size()));
  std::vector<std::string> q;
  for (const auto& m : card.quality) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", m.score);
    q.push_back(m.dimension + " " + buf);
  }
  add("Quality", join(q));
  add("Regulations", join(card.compliance.regulations));
  add("Card", "version " + card.meta.cardVersion + ", issued " +
                  (card.meta.issuanceDate.ok() ? formatDate(card.meta.issuanceDate) : "?") + ", publisher " +
                  card.meta.publisher);

  std::string out = "AI Card summary\n";
  for (std::size_t i = 0; i < lines.size() && i < 39; ++i) out += lines[i] + "\n";
  return out;
}

}  // namespace aicard
