#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "testkit.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

// Runs inside a fresh working directory so config discovery and relative
// outputs stay contained.
class Sandbox {
 public:
  Sandbox() : previous_(fs::current_path()) {
    dir_ = fs::temp_directory_path() / ("aicard-cli-" + std::to_string(counter_++) + "-" +
                                        std::to_string(std::hash<std::string>{}(previous_.string())));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    fs::current_path(dir_);
  }
  ~Sandbox() {
    fs::current_path(previous_);
    fs::remove_all(dir_);
  }
  const fs::path& dir() const { return dir_; }

  Outcome run(std::vector<std::string> args, const std::string& stdinText = {}) {
    std::istringstream in(stdinText);
    std::ostringstream out, err;
    int code = aicard::cli::run(args, in, out, err);
    return {code, out.str(), err.str()};
  }

  std::set<std::string> files() const {
    std::set<std::string> names;
    for (const auto& e : fs::recursive_directory_iterator(dir_)) names.insert(fs::relative(e.path(), dir_).string());
    return names;
  }

 private:
  static inline int counter_ = 0;
  fs::path previous_;
  fs::path dir_;
};

std::string fx(const std::string& name) { return testkit::sourcePath("fixtures/" + name); }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("documented examples") {
    Sandbox sb;
    auto v = sb.run({"validate", fx("proctify.aicard.json")});
    CHECK(v.code == 0);
    CHECK(v.out.find("conforms: true") != std::string::npos);

    auto c = sb.run({"classify", fx("proctify.aicard.json")});
    CHECK(c.code == 0);
    CHECK(c.out.find("HighRisk") != std::string::npos);

    auto b = sb.run({"validate", fx("broken.aicard.json")});
    CHECK(b.code == 1);
    CHECK(b.out.find("intendedUse.purpose") != std::string::npos);
  }

  TEST_CASE("exit code matrix") {
    Sandbox sb;
    struct Row {
      std::vector<std::string> args;
      int code;
    };
    const std::vector<Row> rows{
        {{}, 2},
        {{"frobnicate"}, 2},
        {{"validate"}, 2},
        {{"--format", "yaml", "validate", fx("proctify.aicard.json")}, 2},
        {{"validate", "missing.json"}, 3},
        {{"validate", fx("proctify.ttl")}, 0},
        {{"validate", fx("proctify.aicard.json"), "--shapes", testkit::sourcePath("data/card.shapes.ttl")}, 0},
        {{"query", fx("proctify.ttl"), "--select", fx("rights-measures.select")}, 0},
        {{"query", fx("proctify.ttl"), "--select", "SELECT ?x WHERE { ?x }"}, 3},
        {{"update", fx("proctify.ttl"), "--request", fx("replace-measure.update"), "--out", "new.ttl"}, 0},
        {{"classify", fx("proctify.aicard.json"), "--rules", "nope.rules"}, 3},
        {{"policy-check", fx("proctify.aicard.json"), "--policy", fx("proctify.policy.json"), "--action", "deploy"}, 0},
        {{"policy-check", fx("proctify.aicard.json"), "--policy", fx("proctify.policy.json"), "--action", "sell"}, 1},
        {{"policy-check", fx("proctify.aicard.json"), "--action", "deploy"}, 2},
        {{"render", fx("proctify.aicard.json"), "--out", "site"}, 0},
        {{"render", fx("proctify.aicard.json"), "--out", "site2", "--radar-size", "10"}, 2},
        {{"diff", fx("proctify.aicard.json"), fx("proctify.aicard.json"), "--substantial"}, 0},
        {{"diff", fx("proctify.aicard.json"), fx("broken.aicard.json"), "--substantial"}, 1},
        {{"to-graph", fx("broken.aicard.json")}, 1},
        {{"to-graph", fx("proctify.aicard.json"), "--out", "card.ttl"}, 0},
        {{"to-card", fx("proctify.ttl")}, 0},
        {{"to-card", fx("susbehavedmodel.ttl")}, 3},
        {{"integrate", fx("proctify.ttl"), fx("susbehavedmodel.ttl"), "--out", "merged.ttl"}, 0},
        {{"new", "--system", "Demo", "--out", "demo.json"}, 0},
    };
    for (const auto& r : rows) {
      std::string joined;
      for (const auto& a : r.args) joined += a + " ";
      INFO(joined);
      auto o = sb.run(r.args);
      CHECK(o.code == r.code);
      if (o.code >= 2) CHECK_FALSE(o.err.empty());
    }
  }

  TEST_CASE("outputs land only where asked") {
    Sandbox sb;
    sb.run({"query", fx("proctify.ttl"), "--select", fx("rights-measures.select")});
    sb.run({"classify", fx("proctify.aicard.json")});
    CHECK(sb.files().empty());
    sb.run({"render", fx("proctify.aicard.json"), "--out", "site"});
    sb.run({"to-graph", fx("proctify.aicard.json"), "--out", "card.ttl"});
    auto files = sb.files();
    CHECK(files.count("card.ttl") == 1);
    for (const auto& f : files) CHECK((f == "card.ttl" || f.rfind("site", 0) == 0));
  }

  TEST_CASE("pipeline round trip") {
    Sandbox sb;
    CHECK(sb.run({"to-graph", fx("proctify.aicard.json"), "--out", "card.ttl"}).code == 0);
    CHECK(sb.run({"to-card", "card.ttl", "--out", "back.json"}).code == 0);
    auto d = sb.run({"diff", fx("proctify.aicard.json"), "back.json"});
    CHECK(d.code == 0);
    CHECK(sb.run({"new", "--system", "Demo", "--out", "demo.json"}).code == 0);
    CHECK(sb.run({"validate", "demo.json"}).code == 1);
  }

  TEST_CASE("json output parses for every subcommand") {
    Sandbox sb;
    const std::vector<std::vector<std::string>> cmds{
        {"validate", fx("proctify.aicard.json")},
        {"validate", fx("broken.aicard.json")},
        {"query", fx("proctify.ttl"), "--select", fx("rights-measures.select")},
        {"update", fx("proctify.ttl"), "--request", fx("replace-measure.update"), "--out", "u.ttl"},
        {"classify", fx("proctify.aicard.json")},
        {"policy-check", fx("proctify.aicard.json"), "--policy", fx("proctify.policy.json"), "--action", "deploy"},
        {"render", fx("proctify.aicard.json"), "--out", "site"},
        {"diff", fx("proctify.aicard.json"), fx("broken.aicard.json"), "--substantial"},
        {"to-graph", fx("proctify.aicard.json"), "--out", "g.ttl"},
        {"to-card", fx("proctify.ttl"), "--out", "c.json"},
        {"integrate", fx("proctify.ttl"), fx("susbehavedmodel.ttl"), "--out", "m.ttl"},
        {"new", "--out", "n.json"},
    };
    for (auto args : cmds) {
      INFO(args[0]);
      args.insert(args.begin(), {"--format", "json"});
      auto o = sb.run(args);
      CHECK(o.code <= 1);
      CHECK(nlohmann::json::accept(o.out));
    }
  }

  TEST_CASE("json output matches the golden files") {
    Sandbox sb;
    const std::vector<std::pair<std::string, std::vector<std::string>>> cases{
        {"validate-broken", {"validate", fx("broken.aicard.json")}},
        {"classify", {"classify", fx("proctify.aicard.json")}},
        {"query", {"query", fx("proctify.ttl"), "--select", fx("rights-measures.select")}},
        {"policy-check", {"policy-check", fx("proctify.aicard.json"), "--policy", fx("proctify.policy.json"), "--action", "deploy"}},
        {"diff", {"diff", fx("proctify.aicard.json"), fx("broken.aicard.json"), "--substantial"}},
    };
    for (auto [name, args] : cases) {
      INFO(name);
      args.insert(args.begin(), {"--format", "json"});
      auto o = sb.run(args);
      auto golden = nlohmann::json::parse(testkit::readFile(testkit::sourcePath("tests/golden/" + name + ".json")));
      CHECK(nlohmann::json::parse(o.out) == golden);
    }
  }

  TEST_CASE("config file supplies the rule base") {
    Sandbox sb;
    {
      std::ofstream f("custom.rules");
      f << "[rule.everything]\ntier = LimitedRisk\ncitation = \"test\"\ncondition = domain regex \".\"\n";
    }
    {
      std::ofstream f("aicard.config.json");
      f << R"({"rules": "custom.rules"})";
    }
    auto o = sb.run({"classify", fx("proctify.aicard.json")});
    CHECK(o.code == 0);
    CHECK(o.out.find("LimitedRisk") != std::string::npos);
  }

  TEST_CASE("stdin input") {
    Sandbox sb;
    auto o = sb.run({"validate", "-"}, testkit::readFile(fx("proctify.aicard.json")));
    CHECK(o.code == 0);
  }
}
