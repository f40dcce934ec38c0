#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <thread>

#include "doctest.h"
#include "fake_server.hpp"
#include "plancritic/critics.hpp"
#include "plancritic/generators.hpp"
#include "plancritic/rng.hpp"
#include "plancritic/search.hpp"
#include "plancritic/semantics.hpp"
#include "test_helpers.hpp"

using namespace plancritic;
using critics::Label;
using testing::completion;
using testing::FakeServer;
using testing::fast_config;

namespace {

critics::CritiqueRequest request_for(const pddl::DomainDef& domain, const pddl::ProblemDef& problem,
                                     const pddl::Plan& plan, std::string id = "p", std::size_t iteration = 0) {
  critics::CritiqueRequest r;
  r.domain = &domain;
  r.problem = &problem;
  r.problem_id = std::move(id);
  r.plan = plan;
  r.plan_text = pddl::print_plan(plan);
  r.iteration = iteration;
  return r;
}

}  // namespace

TEST_CASE("extract_verdict on sample critique texts") {
  CHECK(critics::extract_verdict("**the plan is wrong** because the preconditions for \npicking up b2 in step 9 are "
                                 "not met.") == Label::Wrong);
  CHECK(critics::extract_verdict("   - **all preconditions are met.**\n\n**the plan is correct**") == Label::Correct);
  CHECK(critics::extract_verdict("The Plan Is Correct.") == Label::Correct);
  CHECK(critics::extract_verdict("GOAL NOT REACHED") == Label::GoalNotReached);
  CHECK(critics::extract_verdict("") == Label::Wrong);
  CHECK(critics::extract_verdict("I am not sure.") == Label::Wrong);
  CHECK(critics::extract_verdict("the plan is correct? no: the plan is wrong") == Label::Wrong);
}

TEST_CASE("extract_verdict: last phrase wins on every concatenation") {
  const std::vector<std::pair<std::string, Label>> phrases{
      {"the plan is correct", Label::Correct}, {"The plan is WRONG", Label::Wrong}, {"goal not reached", Label::GoalNotReached}};
  Rng rng(1);
  for (int trial = 0; trial < 500; ++trial) {
    std::string text;
    Label last = Label::Wrong;
    std::size_t n = rng.below(6);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& [phrase, label] = phrases[rng.below(phrases.size())];
      text += "filler " + std::to_string(rng.below(100)) + " " + phrase + ". ";
      last = label;
    }
    CHECK(critics::extract_verdict(text) == last);
  }
}

TEST_CASE("self_consistency voting") {
  using L = Label;
  CHECK(critics::self_consistency({L::Correct, L::Correct, L::Wrong, L::Wrong, L::Correct}) == L::Correct);
  CHECK(critics::self_consistency({L::Correct, L::Wrong}) == L::Wrong);
  CHECK(critics::self_consistency({L::GoalNotReached}) == L::GoalNotReached);
  CHECK(critics::self_consistency({L::Correct, L::GoalNotReached}) == L::Wrong);
  CHECK(critics::self_consistency({L::GoalNotReached, L::GoalNotReached, L::Wrong}) == L::GoalNotReached);
  CHECK(critics::self_consistency({L::GoalNotReached, L::Wrong, L::Correct}) == L::Wrong);
  CHECK(critics::self_consistency({L::GoalNotReached, L::Wrong}) == L::Wrong);
  CHECK_THROWS_AS(critics::self_consistency({}), std::invalid_argument);

  // Permutation invariance.
  Rng rng(2);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<L> labels(1 + rng.below(7));
    for (auto& l : labels) l = static_cast<L>(rng.below(3));
    L expected = critics::self_consistency(labels);
    for (int k = 0; k < 5; ++k) {
      rng.shuffle(labels);
      CHECK(critics::self_consistency(labels) == expected);
    }
  }
}

TEST_CASE("aggregate keeps tallies consistent") {
  auto v = critics::aggregate({"the plan is wrong", "x the plan is correct", "the plan is correct", "goal not reached"});
  CHECK(v.label == Label::Wrong);
  CHECK(v.sample_count == 4);
  std::size_t sum = 0;
  for (const auto& [_, n] : v.tally) sum += n;
  CHECK(sum == 4);
  CHECK(v.raw_text == "the plan is wrong");
  CHECK(critics::to_json(v)["tally"]["correct"] == 2);
}

TEST_CASE("oracle critic on the BW-rand-5 plans") {
  critics::OracleCritic oracle;
  const auto& domain = testing::blocksworld();
  auto problem = testing::bw_rand_5_problem();
  auto wrong = oracle.critique(request_for(domain, problem, testing::plan_file("bw-rand-5-plan1.plan")));
  CHECK(wrong.label == Label::Wrong);
  CHECK(wrong.raw_text.find("step 9") != std::string::npos);
  auto right = oracle.critique(request_for(domain, problem, testing::plan_file("bw-rand-5-golden.plan")));
  CHECK(right.label == Label::Correct);
  auto short_plan = testing::plan_file("bw-rand-5-golden.plan");
  short_plan.steps.pop_back();
  CHECK(oracle.critique(request_for(domain, problem, short_plan)).label == Label::GoalNotReached);

  critics::CritiqueRequest unparsed = request_for(domain, problem, {});
  unparsed.plan.reset();
  unparsed.parse_error = "line 1: unknown action";
  CHECK(oracle.critique(unparsed).label == Label::Wrong);
  CHECK(oracle.llm_calls_per_critique() == 0);
}

TEST_CASE("oracle critic never disagrees with the validator") {
  critics::OracleCritic oracle;
  const auto& domain = gen::blocksworld_domain();
  gen::GenSpec spec;
  spec.blocksworld.blocks = 4;
  spec.seed = 8;
  spec.count = 40;
  Rng rng(4);
  for (const auto& problem : gen::generate(spec)) {
    auto plan = search::bfs_plan(domain, problem).plan;
    if (rng.bernoulli(0.6) && !plan.steps.empty())
      plan.steps.erase(plan.steps.begin() + static_cast<long>(rng.below(plan.steps.size())));
    auto verdict = semantics::validate_plan(problem, plan, domain).verdict;
    auto label = oracle.critique(request_for(domain, problem, plan)).label;
    CHECK((label == Label::Correct) == verdict.is_correct());
  }
}

TEST_CASE("mock critic with degenerate rates") {
  const auto& domain = testing::blocksworld();
  auto problem = testing::bw_rand_5_problem();
  critics::CriticConfig config;
  config.backend = critics::Backend::Mock;
  critics::MockCritic exact(config);
  critics::OracleCritic oracle;
  for (const char* name : {"bw-rand-5-plan1.plan", "bw-rand-5-plan3.plan", "bw-rand-5-golden.plan"}) {
    auto request = request_for(domain, problem, testing::plan_file(name));
    CHECK(exact.critique(request).label == oracle.critique(request).label);
  }

  config.false_positive_rate = 1;
  critics::MockCritic lenient(config);
  CHECK(lenient.critique(request_for(domain, problem, testing::plan_file("bw-rand-5-plan1.plan"))).label ==
        Label::Correct);
  config.false_positive_rate = 0;
  config.false_negative_rate = 1;
  critics::MockCritic harsh(config);
  CHECK(harsh.critique(request_for(domain, problem, testing::plan_file("bw-rand-5-golden.plan"))).label ==
        Label::Wrong);

  config.false_negative_rate = 2;
  CHECK_THROWS(critics::MockCritic{config});
  config.false_negative_rate = 0;
  config.samples = 0;
  CHECK_THROWS(critics::MockCritic{config});
}

TEST_CASE("mock critic empirical rates are within 3 standard errors") {
  const auto& domain = testing::blocksworld();
  auto problem = testing::bw_rand_5_problem();
  const auto good = testing::plan_file("bw-rand-5-golden.plan");
  const auto bad = testing::plan_file("bw-rand-5-plan1.plan");
  critics::CriticConfig config;
  config.backend = critics::Backend::Mock;
  config.false_positive_rate = 0.2;
  config.false_negative_rate = 0.35;
  config.seed = 77;
  critics::MockCritic mock(config);
  const std::size_t trials = 10000;
  std::size_t fp = 0, fn = 0;
  for (std::size_t i = 0; i < trials; ++i) {
    std::string id = "problem-" + std::to_string(i);
    fp += mock.critique(request_for(domain, problem, bad, id, i % 11)).label == Label::Correct;
    fn += mock.critique(request_for(domain, problem, good, id, i % 11)).label != Label::Correct;
  }
  auto within = [&](std::size_t hits, double p) {
    double se = std::sqrt(p * (1 - p) / static_cast<double>(trials));
    return std::abs(static_cast<double>(hits) / static_cast<double>(trials) - p) <= 3 * se;
  };
  CHECK(within(fp, 0.2));
  CHECK(within(fn, 0.35));

  // Deterministic per (seed, problem, iteration).
  auto r = request_for(domain, problem, bad, "problem-5", 3);
  CHECK(mock.critique(r).label == mock.critique(r).label);
}

TEST_CASE("mock critic votes over independent samples") {
  const auto& domain = testing::blocksworld();
  auto problem = testing::bw_rand_5_problem();
  critics::CriticConfig config;
  config.backend = critics::Backend::Mock;
  config.false_positive_rate = 0.3;
  config.samples = 5;
  critics::MockCritic mock(config);
  std::size_t accepted = 0;
  const std::size_t trials = 4000;
  for (std::size_t i = 0; i < trials; ++i) {
    auto v = mock.critique(request_for(domain, problem, testing::plan_file("bw-rand-5-plan1.plan"),
                                       "p" + std::to_string(i)));
    CHECK(v.sample_count == 5);
    accepted += v.label == Label::Correct;
  }
  // P(at least 3 of 5 flips) at p = 0.3 is 0.16308.
  const double p = 0.16308;
  double se = std::sqrt(p * (1 - p) / trials);
  CHECK(std::abs(static_cast<double>(accepted) / trials - p) <= 3 * se);
}

TEST_CASE("critic config json and temperature default") {
  auto c = critics::critic_config_from_json(
      {{"backend", "mock"}, {"samples", 5}, {"false_positive_rate", 0.1}, {"template", "critique_no_3step"}});
  CHECK(c.backend == critics::Backend::Mock);
  CHECK(c.samples == 5);
  CHECK(c.prompt == prompting::TemplateId::CritiqueNo3Step);
  CHECK(c.effective_temperature() == doctest::Approx(0.7));
  c.samples = 1;
  CHECK(c.effective_temperature() == 0.0);
  c.temperature = 0.3;
  CHECK(c.effective_temperature() == doctest::Approx(0.3));
  auto round = critics::critic_config_from_json(critics::to_json(c));
  CHECK(critics::to_json(round) == critics::to_json(c));
  CHECK_THROWS(critics::critic_config_from_json({{"backend", "human"}}));
  CHECK_THROWS(critics::critic_config_from_json({{"template", "plan_fewshot"}}));
  CHECK_THROWS(critics::critic_config_from_json({{"temperature", 1.5}}));
}

TEST_CASE("llm critic against a local endpoint") {
  std::atomic<int> calls{0};
  FakeServer server([&](const httplib::Request& req, httplib::Response& res) {
    auto body = nlohmann::json::parse(req.body);
    CHECK(body["model"] == "test-model");
    CHECK(body["messages"][0]["role"] == "user");
    const std::string prompt = body["messages"][0]["content"];
    CHECK(prompt.starts_with("Given the domain definition:"));
    int n = calls++;
    res.set_content(completion(n % 3 == 0 ? "step 1 ... **the plan is wrong**" : "**the plan is correct**"),
                    "application/json");
  });
  auto client = std::make_shared<llm::ChatClient>(fast_config(server.base_url()));
  critics::CriticConfig config;
  config.backend = critics::Backend::Llm;
  config.samples = 3;
  critics::LlmCritic critic(config, client);
  CHECK(critic.llm_calls_per_critique() == 3);
  auto v = critic.critique(request_for(testing::blocksworld(), testing::bw_rand_5_problem(),
                                       testing::plan_file("bw-rand-5-plan1.plan")));
  CHECK(v.sample_count == 3);
  CHECK(v.label == Label::Correct);
  CHECK(v.tally[Label::Correct] == 2);
  CHECK(server.hits == 3);
  CHECK(client->requests_sent() == 3);
}

TEST_CASE("llm client retries transient failures and gives up") {
  std::atomic<int> calls{0};
  FakeServer flaky([&](const httplib::Request&, httplib::Response& res) {
    if (calls++ < 2) {
      res.status = 503;
      return;
    }
    res.set_content(completion("goal not reached"), "application/json");
  });
  llm::ChatClient client(fast_config(flaky.base_url()));
  CHECK(client.complete("hi", 0.0) == "goal not reached");
  CHECK(flaky.hits == 3);

  FakeServer down([&](const httplib::Request&, httplib::Response& res) { res.status = 500; });
  llm::ChatClient doomed(fast_config(down.base_url()));
  CHECK_THROWS_AS(doomed.complete("hi", 0.0), llm::TransportError);
  CHECK(down.hits == 4);

  FakeServer bad_request([&](const httplib::Request&, httplib::Response& res) { res.status = 400; });
  llm::ChatClient rejected(fast_config(bad_request.base_url()));
  CHECK_THROWS_AS(rejected.complete("hi", 0.0), llm::TransportError);
  CHECK(bad_request.hits == 1);

  FakeServer garbage([&](const httplib::Request&, httplib::Response& res) {
    res.set_content("{\"choices\": []}", "application/json");
  });
  llm::ChatClient confused(fast_config(garbage.base_url()));
  CHECK_THROWS_AS(confused.complete("hi", 0.0), llm::MalformedResponse);

  auto config = fast_config("http://127.0.0.1:1/v1");
  config.max_retries = 1;
  llm::ChatClient unreachable(config);
  CHECK_THROWS_AS(unreachable.complete("hi", 0.0), llm::TransportError);
  CHECK(unreachable.requests_sent() == 2);
}

TEST_CASE("llm client sends the api key and logs exchanges") {
  ::setenv("PLANCRITIC_TEST_KEY", "sekrit", 1);
  std::string seen;
  FakeServer server([&](const httplib::Request& req, httplib::Response& res) {
    seen = req.get_header_value("Authorization");
    res.set_content(completion("ok"), "application/json");
  });
  auto config = fast_config(server.base_url());
  config.api_key_env = "PLANCRITIC_TEST_KEY";
  auto log = std::filesystem::temp_directory_path() / "plancritic-llm-debug.jsonl";
  std::filesystem::remove(log);
  config.debug_log = log.string();
  {
    llm::ChatClient client(config);
    CHECK(client.complete("hello", 0.5) == "ok");
  }
  CHECK(seen == "Bearer sekrit");
  std::ifstream in(log);
  std::string line;
  REQUIRE(std::getline(in, line));
  auto entry = nlohmann::json::parse(line);
  CHECK(entry["request"]["messages"][0]["content"] == "hello");
  CHECK(entry["request"]["temperature"] == 0.5);
  CHECK(entry["status"] == 200);
  std::filesystem::remove(log);
}

TEST_CASE("llm client caps concurrency") {
  std::atomic<int> active{0}, peak{0};
  FakeServer server([&](const httplib::Request&, httplib::Response& res) {
    int now = ++active;
    int seen = peak.load();
    while (now > seen && !peak.compare_exchange_weak(seen, now)) {
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(30));
    --active;
    res.set_content(completion("ok"), "application/json");
  });
  auto config = fast_config(server.base_url());
  config.max_concurrency = 2;
  llm::ChatClient client(config);
  std::vector<std::thread> threads;
  for (int i = 0; i < 6; ++i) threads.emplace_back([&] { client.complete("x", 0); });
  for (auto& t : threads) t.join();
  CHECK(peak.load() <= 2);
  CHECK(server.hits == 6);
}
