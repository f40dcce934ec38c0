#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "plancritic/cli.hpp"
#include "test_helpers.hpp"

using namespace plancritic;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = testing::read_file(e.path().string());
  return files;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& rel) const { return (path / rel).string(); }
};

}  // namespace

TEST_CASE("validate prints the verdict phrase and failing step") {
  auto r = invoke({"validate", "--domain", testing::data_path("blocksworld-4ops.pddl"), "--problem",
                testing::data_path("bw-rand-5.pddl"), "--plan", testing::data_path("bw-rand-5-plan1.plan")});
  CHECK(r.code == 0);
  CHECK(r.out.find("wrong at step 9") != std::string::npos);
  CHECK(r.out.find("(clear b2)") != std::string::npos);
  CHECK(r.out.find("\nthe plan is wrong\n") != std::string::npos);

  auto ok = invoke({"validate", "--quiet", "--domain", testing::data_path("blocksworld-4ops.pddl"), "--problem",
                 testing::data_path("bw-rand-5.pddl"), "--plan", testing::data_path("bw-rand-5-golden.plan")});
  CHECK(ok.code == 0);
  CHECK(ok.out.starts_with("the plan is correct\n"));

  auto json = invoke({"validate", "--json", "--domain", testing::data_path("blocksworld-4ops.pddl"), "--problem",
                   testing::data_path("bw-rand-5.pddl"), "--plan", testing::data_path("bw-rand-5-plan1.plan")});
  CHECK(nlohmann::json::parse(json.out)["phrase"] == "the plan is wrong");
}

TEST_CASE("usage errors exit 2, domain errors exit 1") {
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"frobnicate"}).code == 2);
  auto missing = invoke({"validate", "--domain", testing::data_path("blocksworld-4ops.pddl"), "--problem",
                      testing::data_path("no-such.pddl"), "--plan", testing::data_path("bw-rand-5-plan1.plan")});
  CHECK(missing.code == 2);
  CHECK_FALSE(missing.err.empty());
  CHECK(invoke({"generate", "--count", "1", "--seed", "1"}).code == 2);
  CHECK(invoke({"report"}).code == 2);
  CHECK(invoke({"--help"}).code == 0);

  TempDir dir("plancritic-cli-errors");
  std::ofstream(dir / "bad.pddl") << "(define (domain";
  auto bad = invoke({"solve", "--domain", dir / "bad.pddl", "--problem", testing::data_path("bw-rand-5.pddl")});
  CHECK(bad.code == 1);
  CHECK(invoke({"generate", "--blocks", "0", "--count", "1", "--seed", "1", "--out", dir / "g"}).code == 1);
  // Plan mentioning an unknown action is a domain error, not a crash.
  std::ofstream(dir / "x.plan") << "(fly b1)\n";
  CHECK(invoke({"validate", "--domain", testing::data_path("blocksworld-4ops.pddl"), "--problem",
             testing::data_path("bw-rand-5.pddl"), "--plan", dir / "x.plan"})
            .code == 1);
}

TEST_CASE("generate is byte-stable") {
  TempDir dir("plancritic-cli-generate");
  std::vector<std::string> base{"generate", "--benchmark", "blocksworld", "--blocks", "5", "--count", "3", "--seed", "7"};
  auto a = base, b = base;
  a.insert(a.end(), {"--out", dir / "a"});
  b.insert(b.end(), {"--out", dir / "b"});
  REQUIRE(invoke(a).code == 0);
  REQUIRE(invoke(b).code == 0);
  auto ta = tree(dir.path / "a"), tb = tree(dir.path / "b");
  CHECK(ta.size() == 6);
  CHECK(ta.count("spec.json") == 1);
  CHECK(ta == tb);
  CHECK(ta.count("problems/blocksworld-b5-s7-0002.pddl") == 1);

  REQUIRE(invoke({"generate", "--benchmark", "logistics", "--preset", "easy", "--count", "2", "--seed", "3", "--out",
               dir / "l", "--with-plans"})
              .code == 0);
  CHECK(tree(dir.path / "l").size() == 1 + 1 + 2 + 2 + 1);
}

TEST_CASE("solve writes a plan that validates") {
  TempDir dir("plancritic-cli-solve");
  auto r = invoke({"solve", "--domain", testing::data_path("blocksworld-4ops.pddl"), "--problem",
                testing::data_path("bw-rand-5.pddl"), "--out", dir / "p.plan"});
  REQUIRE(r.code == 0);
  auto v = invoke({"validate", "--quiet", "--domain", testing::data_path("blocksworld-4ops.pddl"), "--problem",
                testing::data_path("bw-rand-5.pddl"), "--plan", dir / "p.plan"});
  CHECK(v.out.starts_with("the plan is correct\n"));
  CHECK(invoke({"solve", "--max-states", "2", "--domain", testing::data_path("blocksworld-4ops.pddl"), "--problem",
             testing::data_path("bw-rand-5.pddl")})
            .code == 1);
}

TEST_CASE("obfuscate with a map file preserves verdicts") {
  TempDir dir("plancritic-cli-obfuscate");
  const auto domain = testing::data_path("blocksworld-4ops.pddl");
  const auto problem = testing::data_path("bw-rand-5.pddl");
  const auto plan = testing::data_path("bw-rand-5-plan1.plan");
  REQUIRE(invoke({"obfuscate", "--domain", domain, "--problem", problem, "--plan", plan, "--mode", "deceptive", "--out",
               dir / "m"})
              .code == 0);
  REQUIRE(invoke({"obfuscate", "--domain", domain, "--problem", problem, "--plan", plan, "--map", dir / "m/map.json",
               "--out", dir / "again"})
              .code == 0);
  CHECK(tree(dir.path / "m") == tree(dir.path / "again"));
  auto before = invoke({"validate", "--quiet", "--domain", domain, "--problem", problem, "--plan", plan});
  auto after = invoke({"validate", "--quiet", "--domain", dir / "m/domain.pddl", "--problem", dir / "m/bw-rand-5.pddl",
                    "--plan", dir / "m/bw-rand-5-plan1.plan"});
  CHECK(after.out.starts_with("the plan is wrong\nwrong at step 9"));
  CHECK(before.out.substr(0, 32) == after.out.substr(0, 32));
  CHECK(invoke({"obfuscate", "--domain", domain, "--out", dir / "n"}).code == 2);
}

TEST_CASE("run, score and report end to end") {
  TempDir dir("plancritic-cli-run");
  REQUIRE(invoke({"generate", "--blocks", "4", "--count", "12", "--seed", "11", "--out", dir / "g"}).code == 0);
  auto run = invoke({"run", "--manifest", dir / "g/manifest.jsonl", "--records", dir / "r.jsonl", "--critic", "oracle",
                  "--planner", "mock-golden", "--parallelism", "3", "--metrics", dir / "m.json"});
  REQUIRE(run.code == 0);
  CHECK(run.out.starts_with("accuracy 100.0±0.0  (12/12)\n"));
  auto metrics = nlohmann::json::parse(testing::read_file(dir / "m.json"));
  CHECK(metrics["accuracy"] == 1.0);
  CHECK(metrics["confusion"]["fp"] == 0);

  auto s1 = invoke({"score", "--manifest", dir / "g/manifest.jsonl", "--records", dir / "r.jsonl"});
  auto s2 = invoke({"score", "--manifest", dir / "g/manifest.jsonl", "--records", dir / "r.jsonl"});
  REQUIRE(s1.code == 0);
  CHECK(s1.out == s2.out);
  CHECK(s1.out == testing::read_file(dir / "m.json"));

  REQUIRE(invoke({"score", "--manifest", dir / "g/manifest.jsonl", "--records", dir / "r.jsonl", "--out", dir / "s.json"})
              .code == 0);
  auto csv = invoke({"report", "--metrics", dir / "s.json", "--format", "csv"});
  CHECK(csv.code == 0);
  CHECK(std::count(csv.out.begin(), csv.out.end(), '\n') == 1 + 11);
  CHECK(invoke({"report", "--manifest", dir / "g/manifest.jsonl", "--records", dir / "r.jsonl", "--out-dir", dir / "rep"})
            .out == "100.0±0.0\n");
  CHECK(tree(dir.path / "rep").size() == 3);

  // A stochastic run with a mock critic, resumed from its own records.
  std::vector<std::string> stochastic{"run", "--manifest", dir / "g/manifest.jsonl", "--records", dir / "s.jsonl",
                                      "--critic", "mock", "--planner", "mock-stochastic", "--k", "3", "--seed", "5"};
  auto first = invoke(stochastic);
  auto second = invoke(stochastic);
  REQUIRE(first.code == 0);
  CHECK(second.err.find("executed 0, resumed 12") != std::string::npos);
  CHECK(first.out == second.out);

  std::ofstream(dir / "empty.jsonl") << "";
  CHECK(invoke({"score", "--manifest", dir / "g/manifest.jsonl", "--records", dir / "empty.jsonl"}).code == 1);
}
