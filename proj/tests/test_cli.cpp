#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "slalom/cli.hpp"
#include "slalom/verdict.hpp"

using namespace slalom;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args, std::map<std::string, std::string> env = {}) {
  std::ostringstream out, err;
  auto lookup = [&env](const char* k) -> const char* {
    auto it = env.find(k);
    return it == env.end() ? nullptr : it->second.c_str();
  };
  int code = run_cli(args, out, err, lookup);
  return {code, out.str(), err.str()};
}

std::vector<json> lines(const std::string& text) {
  std::vector<json> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(json::parse(line));
  return out;
}

std::string temp_file(const std::string& name, const std::string& text) {
  std::string path = "/tmp/slalomlab_test_" + name;
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(cli({"run", "--suite", "no-such-suite"}).code == kExitUsage);
  CHECK(cli({"run"}).code == kExitUsage);
  CHECK(cli({}).code == kExitUsage);
  CHECK(cli({"frobnicate"}).code == kExitUsage);
  CHECK(cli({"gen", "--kind", "unicorn"}).code == kExitUsage);
  CHECK(cli({"gen", "--kind", "eps", "--params", "{not json"}).code == kExitUsage);
  CHECK(cli({"run", "--suite", "sequences", "--seed", "abc"}).code == kExitUsage);
  CHECK(cli({"--help"}).code == kExitOk);
}

TEST_CASE("io errors exit with 4") {
  CHECK(cli({"run", "--suite", "sequences", "--config", "/nonexistent/cfg"}).code == kExitIo);
  CHECK(cli({"gen", "--kind", "eps", "--out", "/nonexistent/dir/x.json"}).code == kExitIo);
}

TEST_CASE("list names every suite, kind and constructor") {
  auto r = cli({"list"});
  REQUIRE(r.code == kExitOk);
  for (const char* s : {"suite lemma-a9", "suite merge-claim", "suite contributivity", "suite prop-2.10b",
                        "suite transfer-E", "suite transfer-S", "suite refuter", "suite coding",
                        "suite hardtukey", "suite u2small", "suite forcing-leq", "suite forcing-dense",
                        "suite forcing-dlimit", "suite forcing-amalgamate", "suite forcing-replay",
                        "kind eps", "kind partition", "kind slalom", "kind point"})
    CHECK_MESSAGE(r.out.find(s) != std::string::npos, s);
}

TEST_CASE("gen partition endpoints") {
  auto r = cli({"gen", "--kind", "partition", "--params", R"({"family":"arithmetic","a":2,"b":2})"});
  REQUIRE(r.code == kExitOk);
  json j = json::parse(r.out);
  std::vector<Index> head(j["endpoints_prefix"].begin(), j["endpoints_prefix"].begin() + 4);
  CHECK(head == std::vector<Index>{0, 2, 6, 12});
}

TEST_CASE("gen is deterministic in the seed") {
  for (const char* kind : {"eps", "partition", "slalom", "point"}) {
    auto a = cli({"gen", "--kind", kind, "--seed", "77"});
    auto b = cli({"gen", "--kind", kind, "--seed", "77"});
    REQUIRE(a.code == kExitOk);
    CHECK(a.out == b.out);
  }
  auto a = cli({"gen", "--kind", "point", "--seed", "1"});
  auto b = cli({"gen", "--kind", "point", "--seed", "2"});
  CHECK(a.out != b.out);
}

TEST_CASE("settings precedence: config < env < flag") {
  std::string cfg = temp_file("cfg", "# seeds\nkind = point\nseed = 5\n");
  auto base = [](const char* seed) { return cli({"gen", "--kind", "point", "--seed", seed}).out; };
  CHECK(cli({"gen", "--config", cfg}).out == base("5"));
  CHECK(cli({"gen", "--config", cfg}, {{"SLALOMLAB_SEED", "6"}}).out == base("6"));
  CHECK(cli({"gen", "--config", cfg, "--seed", "7"}, {{"SLALOMLAB_SEED", "6"}}).out == base("7"));
  // env alone supplies the kind
  CHECK(cli({"gen", "--seed", "9"}, {{"SLALOMLAB_KIND", "point"}}).out == base("9"));
  std::string bad = temp_file("badcfg", "colour = blue\n");
  CHECK(cli({"gen", "--config", bad}).code == kExitUsage);
  std::remove(cfg.c_str());
  std::remove(bad.c_str());
}

TEST_CASE("run emits json lines with a header and a summary") {
  auto r = cli({"run", "--suite", "sequences", "--seed", "3", "--instances", "4"});
  REQUIRE(r.code == kExitOk);
  auto ls = lines(r.out);
  REQUIRE(ls.size() >= 2);
  CHECK(ls.front().contains("timestamp"));
  CHECK(ls.back()["failed"] == 0);
  // apart from the header, output is identical across runs
  auto again = lines(cli({"run", "--suite", "sequences", "--seed", "3", "--instances", "4"}).out);
  REQUIRE(again.size() == ls.size());
  for (std::size_t i = 1; i < ls.size(); ++i) {
    json a = ls[i], b = again[i];
    a.erase("seconds");
    b.erase("seconds");
    CHECK(a == b);
  }
}

TEST_CASE("run writes to --out") {
  std::string path = "/tmp/slalomlab_test_out.jsonl";
  auto r = cli({"run", "--suite", "sequences", "--instances", "2", "--out", path});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.empty());
  std::ifstream in(path);
  std::stringstream text;
  text << in.rdbuf();
  CHECK(lines(text.str()).size() >= 2);
  std::remove(path.c_str());
}

TEST_CASE("construct bundles") {
  auto r = cli({"construct", "--name", "delta", "--horizon", "8"});
  REQUIRE(r.code == kExitOk);
  json j = json::parse(r.out);
  CHECK(j["pass"] == true);
  CHECK(cli({"construct", "--name", "no-such"}).code == kExitUsage);
  CHECK(cli({"construct"}).code == kExitUsage);
}

TEST_CASE("join keeps shared endpoints") {
  auto r = cli({"join", R"({"family":"arithmetic","params":{"a":0,"b":2},"offset":0})",
                R"({"family":"arithmetic","params":{"a":0,"b":3},"offset":0})", "--horizon", "4"});
  REQUIRE(r.code == kExitOk);
  json j = json::parse(r.out);
  CHECK(j["endpoints_prefix"] == json::array({0, 6, 12, 18, 24}));
}
