#include <cmath>
#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "plancritic/eval_report.hpp"
#include "plancritic/generators.hpp"
#include "plancritic/search.hpp"
#include "test_helpers.hpp"

using namespace plancritic;
namespace orc = plancritic::orchestrator;

namespace {

std::vector<orc::Instance> bw5_instances() {
  auto domain = std::make_shared<const pddl::DomainDef>(testing::blocksworld());
  return {{"bw-rand-5", domain, testing::bw_rand_5_problem(), testing::plan_file("bw-rand-5-golden.plan")}};
}

orc::IterationEntry entry(std::size_t i, const std::string& plan, critics::Label label) {
  orc::IterationEntry e;
  e.iteration = i;
  e.plan_text = plan;
  e.critic_label = label;
  e.tally[label] = 1;
  return e;
}

orc::RunRecord record(std::vector<orc::IterationEntry> its, std::size_t k) {
  orc::RunRecord r;
  r.problem_id = "bw-rand-5";
  r.k = k;
  r.rounds = its.size();
  r.llm_calls = orc::call_count(r.rounds, 1);
  r.final_plan_text = its.empty() ? "" : its.back().plan_text;
  r.iterations = std::move(its);
  return r;
}

std::vector<orc::Instance> generated(std::size_t count) {
  gen::GenSpec spec;
  spec.blocksworld.blocks = 4;
  spec.seed = 13;
  spec.count = count;
  auto domain = std::make_shared<const pddl::DomainDef>(gen::blocksworld_domain());
  std::vector<orc::Instance> out;
  auto problems = gen::generate(spec);
  for (std::size_t i = 0; i < problems.size(); ++i)
    out.push_back({gen::instance_id(spec, i), domain, problems[i], search::bfs_plan(*domain, problems[i]).plan});
  return out;
}

std::size_t line_count(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("wald_ci") {
  CHECK(eval::wald_ci(0.893, 600) == doctest::Approx(0.0247).epsilon(0.01));
  CHECK(eval::format_summary(0.893, eval::wald_ci(0.893, 600)) == "89.3±2.5");
  CHECK(eval::format_summary(0.855, eval::wald_ci(0.855, 600)) == "85.5±2.8");
  CHECK(eval::wald_ci(0.5, 100) == doctest::Approx(0.098));
  CHECK(eval::wald_ci(0, 10) == 0);
  CHECK(eval::wald_ci(1, 10) == 0);
  CHECK_THROWS(eval::wald_ci(0.5, 0));
  CHECK_THROWS(eval::wald_ci(1.5, 10));
  // Symmetric in p and shrinking in n.
  for (double p : {0.1, 0.25, 0.4}) {
    CHECK(eval::wald_ci(p, 50) == doctest::Approx(eval::wald_ci(1 - p, 50)));
    CHECK(eval::wald_ci(p, 200) < eval::wald_ci(p, 50));
  }
}

TEST_CASE("accepted invalid plan is a false positive at its step") {
  const auto plan1 = testing::read_data("bw-rand-5-plan1.plan");
  const auto golden = testing::read_data("bw-rand-5-golden.plan");
  auto r = record({entry(0, plan1, critics::Label::Wrong), entry(1, plan1, critics::Label::Correct)}, 3);
  auto m = eval::score({r}, bw5_instances());
  CHECK(m.k == 3);
  REQUIRE(m.steps.size() == 4);
  CHECK(m.steps[0].confusion.tn == 1);
  CHECK(m.steps[1].confusion.fp == 1);
  CHECK(m.steps[2].confusion.total() == 0);
  CHECK_FALSE(m.steps[2].confusion.precision().has_value());
  CHECK(m.steps[1].confusion.precision() == 0.0);
  CHECK(m.accuracy == 0);

  // Correct at step t uses the latest plan as of t.
  auto fixed = record({entry(0, plan1, critics::Label::Wrong), entry(1, golden, critics::Label::Correct)}, 3);
  auto f = eval::score({fixed}, bw5_instances());
  CHECK(f.steps[0].n_correct == 0);
  for (std::size_t t = 1; t <= 3; ++t) CHECK(f.steps[t].n_correct == 1);
  CHECK(f.steps[1].confusion.tp == 1);
  CHECK(f.accuracy == 1);

  auto missed = record({entry(0, golden, critics::Label::Wrong)}, 0);
  CHECK(eval::score({missed}, bw5_instances()).steps[0].confusion.fn == 1);
}

TEST_CASE("goal-not-reached and unparseable plans count as negatives") {
  auto r = record({entry(0, "(unstack b5 b2)\n", critics::Label::GoalNotReached),
                   entry(1, "I think the plan is", critics::Label::Wrong)},
                  1);
  auto m = eval::score({r}, bw5_instances());
  CHECK(m.steps[0].confusion.tn == 1);
  CHECK(m.steps[1].confusion.tn == 1);
  CHECK(m.unparseable_final == 1);
  CHECK(m.n_correct == 0);
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(eval::score({}, bw5_instances()), eval::EmptyRecords);
  auto r = record({}, 0);
  r.problem_id = "elsewhere";
  CHECK_THROWS_AS(eval::score({r}, bw5_instances()), eval::MissingProblem);
  CHECK_THROWS_AS(eval::render_report(eval::Metrics{}, eval::ReportFormat::Csv), eval::EmptyRecords);
  auto m = eval::score({record({}, 0)}, bw5_instances());
  CHECK_THROWS_AS(eval::emit_report(m, eval::ReportFormat::Csv, "/nonexistent-dir/x.csv"), eval::IoError);
  CHECK_THROWS(eval::parse_report_format("xml"));
}

TEST_CASE("oracle critic batch properties") {
  auto instances = generated(40);
  orc::LoopConfig config;
  config.k = 6;
  orc::Backends b;
  b.planner = std::make_shared<orc::StochasticPlanner>(0.25, 4);
  b.critic = std::make_shared<critics::OracleCritic>();
  auto records = orc::run_batch(instances, config, b, {}).records;
  auto m = eval::score(records, instances);

  REQUIRE(m.steps.size() == 7);
  std::size_t issued = 0;
  for (std::size_t t = 0; t < m.steps.size(); ++t) {
    const auto& c = m.steps[t].confusion;
    CHECK(c.fp == 0);
    CHECK(c.fn == 0);
    if (c.tp > 0) CHECK(c.recall() == 1.0);
    std::size_t at_step = 0;
    for (const auto& r : records) at_step += r.iterations.size() > t;
    CHECK(c.total() == at_step);
    issued += at_step;
    if (t > 0) CHECK(m.steps[t].n_correct >= m.steps[t - 1].n_correct);
  }
  CHECK(m.overall.total() == issued);
  CHECK(m.steps.back().n_correct == m.n_correct);
  CHECK(m.accuracy == doctest::Approx(static_cast<double>(m.n_correct) / 40));
  double calls = 0;
  for (const auto& r : records) calls += static_cast<double>(r.llm_calls);
  CHECK(m.mean_llm_calls == doctest::Approx(calls / 40));

  // Pure: persisted records score identically.
  std::vector<orc::RunRecord> reread;
  for (const auto& r : records) reread.push_back(orc::record_from_json(nlohmann::json::parse(orc::to_json(r).dump())));
  CHECK(eval::to_json(eval::score(reread, instances)) == eval::to_json(m));
}

TEST_CASE("golden batch scores perfectly") {
  auto instances = generated(10);
  orc::LoopConfig config;
  orc::Backends b;
  b.planner = std::make_shared<orc::GoldenPlanner>();
  b.critic = std::make_shared<critics::OracleCritic>();
  auto m = eval::score(orc::run_batch(instances, config, b, {}).records, instances);
  CHECK(m.accuracy == 1.0);
  CHECK(m.ci == 0.0);
  CHECK(m.k == 10);
  CHECK(m.steps.size() == 11);
  CHECK(m.mean_llm_calls == 2.0);
  CHECK(eval::format_summary(m.accuracy, m.ci) == "100.0±0.0");
}

TEST_CASE("report renderings") {
  const auto plan1 = testing::read_data("bw-rand-5-plan1.plan");
  const auto golden = testing::read_data("bw-rand-5-golden.plan");
  auto m = eval::score({record({entry(0, plan1, critics::Label::Wrong), entry(1, golden, critics::Label::Correct)}, 4)},
                       bw5_instances());

  auto csv = eval::render_report(m, eval::ReportFormat::Csv);
  CHECK(line_count(csv) == 1 + 5);
  CHECK(csv.starts_with("step,n_correct,accuracy,tp,fp,tn,fn,precision,recall\n"));
  CHECK(csv.find("0,0,0.000000,0,0,1,0,,\n") != std::string::npos);
  CHECK(csv.find("1,1,1.000000,1,0,0,0,1.000000,1.000000\n") != std::string::npos);
  CHECK(csv.ends_with("4,1,1.000000,0,0,0,0,,\n"));

  auto text = eval::render_report(m, eval::ReportFormat::TableText);
  CHECK(text.starts_with("accuracy 100.0±0.0  (1/1)\n"));

  auto structured = eval::render_report(m, eval::ReportFormat::Structured);
  auto json = nlohmann::json::parse(structured);
  CHECK(json["summary"] == "100.0±0.0");
  CHECK(json["steps"][0]["confusion"]["precision"].is_null());
  auto back = eval::metrics_from_json(json);
  for (auto f : {eval::ReportFormat::Csv, eval::ReportFormat::TableText, eval::ReportFormat::Structured})
    CHECK(eval::render_report(back, f) == eval::render_report(m, f));

  auto path = (std::filesystem::temp_directory_path() / "plancritic-report.csv").string();
  eval::emit_report(m, eval::ReportFormat::Csv, path);
  CHECK(testing::read_file(path) == csv);
  std::filesystem::remove(path);
}
