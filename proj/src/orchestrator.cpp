#include "plancritic/orchestrator.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "plancritic/rng.hpp"
#include "plancritic/search.hpp"
#include "plancritic/semantics.hpp"

namespace plancritic::orchestrator {

namespace fs = std::filesystem;

std::size_t call_count(std::size_t s, std::size_t c) {
  if (c < 1) throw std::invalid_argument("self-consistency count must be >= 1");
  return c == 1 ? 2 * s : s + c * s;
}

// ---------------------------------------------------------------------------
// Planners
// ---------------------------------------------------------------------------

LlmPlanner::LlmPlanner(std::shared_ptr<llm::ChatClient> client, double temperature)
    : client_(std::move(client)), temperature_(temperature) {
  if (!client_) throw std::invalid_argument("LLM planner needs a client");
}

std::string LlmPlanner::propose(const PlanRequest& request) { return client_->complete(request.prompt, temperature_); }

std::string GoldenPlanner::propose(const PlanRequest& request) {
  if (!request.golden) throw std::invalid_argument("golden planner needs a golden plan for " + request.problem_id);
  return pddl::print_plan(*request.golden);
}

StochasticPlanner::StochasticPlanner(double golden_probability, std::uint64_t seed)
    : p_(golden_probability), seed_(seed) {
  if (p_ < 0 || p_ > 1) throw std::invalid_argument("golden probability must be in [0, 1]");
}

std::string StochasticPlanner::propose(const PlanRequest& request) {
  if (!request.golden) throw std::invalid_argument("stochastic planner needs a golden plan for " + request.problem_id);
  Rng rng(derive_seed(seed_, std::string_view(request.problem_id), static_cast<std::uint64_t>(request.iteration)));
  pddl::Plan plan = *request.golden;
  if (!rng.bernoulli(p_) && !plan.steps.empty())
    plan.steps.erase(plan.steps.begin() + static_cast<long>(rng.below(plan.steps.size())));
  return pddl::print_plan(plan);
}

ScriptedPlanner::ScriptedPlanner(std::vector<std::string> texts) : texts_(std::move(texts)) {
  if (texts_.empty()) throw std::invalid_argument("scripted planner needs at least one plan");
}

std::string ScriptedPlanner::propose(const PlanRequest& request) {
  return texts_[std::min(request.iteration, texts_.size() - 1)];
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

std::string to_string(PlannerBackend backend) {
  switch (backend) {
    case PlannerBackend::Llm: return "llm";
    case PlannerBackend::MockGolden: return "mock-golden";
    case PlannerBackend::MockStochastic: return "mock-stochastic";
  }
  return "mock-golden";
}

PlannerBackend parse_planner_backend(const std::string& name) {
  for (auto b : {PlannerBackend::Llm, PlannerBackend::MockGolden, PlannerBackend::MockStochastic})
    if (to_string(b) == name) return b;
  throw std::invalid_argument("unknown planner backend '" + name + "'");
}

void LoopConfig::check() const {
  critic.check();
  if (!(chars_per_token > 0)) throw std::invalid_argument("chars_per_token must be positive");
  if (planner.golden_probability < 0 || planner.golden_probability > 1)
    throw std::invalid_argument("golden_probability must be in [0, 1]");
  if (planner.temperature < 0 || planner.temperature > 1)
    throw std::invalid_argument("planner temperature must be in [0, 1]");
}

LoopConfig loop_config_from_json(const nlohmann::json& json) {
  if (!json.is_object()) throw std::invalid_argument("run configuration must be a JSON object");
  static const std::set<std::string> known{"k",      "shots",  "fewshot_seed",  "max_prompt_tokens",
                                           "chars_per_token", "planner", "critic", "llm",
                                           "templates_dir",   "critique_exemplar_files"};
  for (const auto& [key, _] : json.items())
    if (!known.count(key)) throw std::invalid_argument("unknown configuration key '" + key + "'");
  LoopConfig c;
  auto non_negative = [&](const char* key, std::size_t fallback) -> std::size_t {
    if (!json.contains(key)) return fallback;
    auto v = json.at(key).get<long long>();
    if (v < 0) throw std::invalid_argument(std::string(key) + " must be >= 0");
    return static_cast<std::size_t>(v);
  };
  c.k = non_negative("k", c.k);
  c.shots = non_negative("shots", c.shots);
  c.max_prompt_tokens = non_negative("max_prompt_tokens", c.max_prompt_tokens);
  c.fewshot_seed = json.value("fewshot_seed", c.fewshot_seed);
  c.chars_per_token = json.value("chars_per_token", c.chars_per_token);
  if (json.contains("planner")) {
    const auto& p = json.at("planner");
    c.planner.backend = parse_planner_backend(p.value("backend", to_string(c.planner.backend)));
    c.planner.temperature = p.value("temperature", c.planner.temperature);
    c.planner.golden_probability = p.value("golden_probability", c.planner.golden_probability);
    c.planner.seed = p.value("seed", c.planner.seed);
  }
  if (json.contains("critic")) c.critic = critics::critic_config_from_json(json.at("critic"));
  if (json.contains("llm")) c.llm = llm::client_config_from_json(json.at("llm"));
  c.templates_dir = json.value("templates_dir", c.templates_dir);
  c.critique_exemplar_files = json.value("critique_exemplar_files", c.critique_exemplar_files);
  c.check();
  return c;
}

nlohmann::json to_json(const LoopConfig& c) {
  return {{"k", c.k},
          {"shots", c.shots},
          {"fewshot_seed", c.fewshot_seed},
          {"max_prompt_tokens", c.max_prompt_tokens},
          {"chars_per_token", c.chars_per_token},
          {"planner",
           {{"backend", to_string(c.planner.backend)},
            {"temperature", c.planner.temperature},
            {"golden_probability", c.planner.golden_probability},
            {"seed", c.planner.seed}}},
          {"critic", critics::to_json(c.critic)},
          {"llm", llm::to_json(c.llm)},
          {"templates_dir", c.templates_dir},
          {"critique_exemplar_files", c.critique_exemplar_files}};
}

// ---------------------------------------------------------------------------
// Records
// ---------------------------------------------------------------------------

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::CriticAccepted: return "critic-accepted";
    case StopReason::BudgetExceeded: return "budget-exceeded";
    case StopReason::IterationsExhausted: return "iterations-exhausted";
    case StopReason::TransportFailure: return "transport-failure";
  }
  return "iterations-exhausted";
}

StopReason parse_stop_reason(const std::string& name) {
  for (auto r : {StopReason::CriticAccepted, StopReason::BudgetExceeded, StopReason::IterationsExhausted,
                 StopReason::TransportFailure})
    if (to_string(r) == name) return r;
  throw std::invalid_argument("unknown stop reason '" + name + "'");
}

nlohmann::json to_json(const RunRecord& r) {
  nlohmann::json iterations = nlohmann::json::array();
  for (const auto& e : r.iterations) {
    nlohmann::json tally = nlohmann::json::object();
    for (const auto& [label, n] : e.tally) tally[critics::to_string(label)] = n;
    iterations.push_back({{"iteration", e.iteration},
                          {"plan", e.plan_text},
                          {"parsed", e.parsed},
                          {"critic_label", critics::to_string(e.critic_label)},
                          {"tally", tally},
                          {"critique", e.critique_text},
                          {"plan_prompt_bytes", e.plan_prompt_bytes}});
  }
  return {{"problem_id", r.problem_id},
          {"iterations", iterations},
          {"final_plan", r.final_plan_text},
          {"stop_reason", to_string(r.stop_reason)},
          {"k", r.k},
          {"rounds", r.rounds},
          {"samples", r.samples},
          {"llm_calls", r.llm_calls},
          {"failed_round_calls", r.failed_round_calls},
          {"truth", r.truth},
          {"error", r.error}};
}

RunRecord record_from_json(const nlohmann::json& json) {
  RunRecord r;
  r.problem_id = json.at("problem_id").get<std::string>();
  for (const auto& it : json.at("iterations")) {
    IterationEntry e;
    e.iteration = it.at("iteration").get<std::size_t>();
    e.plan_text = it.at("plan").get<std::string>();
    e.parsed = it.value("parsed", true);
    e.critic_label = critics::parse_label(it.at("critic_label").get<std::string>());
    const auto tally = it.value("tally", nlohmann::json::object());
    for (const auto& [label, n] : tally.items())
      e.tally[critics::parse_label(label)] = n.get<std::size_t>();
    e.critique_text = it.value("critique", std::string());
    e.plan_prompt_bytes = it.value("plan_prompt_bytes", std::size_t{0});
    r.iterations.push_back(std::move(e));
  }
  r.final_plan_text = json.at("final_plan").get<std::string>();
  r.stop_reason = parse_stop_reason(json.at("stop_reason").get<std::string>());
  r.k = json.value("k", std::size_t{0});
  r.rounds = json.at("rounds").get<std::size_t>();
  r.samples = json.value("samples", std::size_t{1});
  r.llm_calls = json.at("llm_calls").get<std::size_t>();
  r.failed_round_calls = json.value("failed_round_calls", std::size_t{0});
  r.truth = json.value("truth", std::string());
  r.error = json.value("error", std::string());
  return r;
}

std::string truth_of(const pddl::DomainDef& domain, const pddl::ProblemDef& problem, const std::string& plan_text) {
  try {
    auto plan = pddl::parse_plan(plan_text, domain);
    return semantics::verdict_kind_name(semantics::validate_plan(problem, plan, domain).verdict.kind);
  } catch (const pddl::ParseError&) {
    return "unparseable";
  }
}

RunRecord run_problem(const ProblemContext& context, const LoopConfig& config, const Backends& backends) {
  if (!context.domain || !context.problem) throw std::invalid_argument("run_problem needs a domain and problem");
  if (!backends.planner || !backends.critic) throw std::invalid_argument("run_problem needs a planner and a critic");
  const auto& domain = *context.domain;
  const auto& problem = *context.problem;

  RunRecord record;
  record.problem_id = context.id;
  record.samples = config.critic.samples;
  record.k = config.k;
  const std::size_t critic_calls = backends.critic->llm_calls_per_critique();

  prompting::Transcript transcript;
  transcript.char_budget = prompting::char_budget(config.max_prompt_tokens, config.chars_per_token);
  record.stop_reason = StopReason::IterationsExhausted;

  for (std::size_t step = 0; step <= config.k; ++step) {
    std::string prompt;
    try {
      prompt = prompting::build_plan_prompt(domain, problem, context.shots, transcript, backends.templates);
    } catch (const prompting::PromptError& e) {
      if (e.kind() != prompting::ErrorKind::BudgetExceeded) {
        record.stop_reason = StopReason::TransportFailure;
        record.error = e.what();
      } else {
        record.stop_reason = StopReason::BudgetExceeded;
      }
      break;
    }
    if (backends.on_prompt) backends.on_prompt(step, prompt);

    std::string plan_text;
    try {
      plan_text = backends.planner->propose(
          PlanRequest{&domain, &problem, context.id, prompt, step, context.golden});
    } catch (const std::exception& e) {
      record.stop_reason = StopReason::TransportFailure;
      record.error = std::string("planner: ") + e.what();
      record.failed_round_calls = 1;
      break;
    }
    record.final_plan_text = plan_text;

    critics::CritiqueRequest request;
    request.domain = &domain;
    request.problem = &problem;
    request.problem_id = context.id;
    request.plan_text = plan_text;
    request.iteration = step;
    try {
      request.plan = pddl::parse_plan(plan_text, domain);
    } catch (const pddl::ParseError& e) {
      request.parse_error = e.what();
    }

    critics::CritiqueVerdict verdict;
    try {
      verdict = backends.critic->critique(request);
    } catch (const std::exception& e) {
      record.stop_reason = StopReason::TransportFailure;
      record.error = std::string("critic: ") + e.what();
      record.failed_round_calls = 1 + critic_calls;
      break;
    }

    record.iterations.push_back(IterationEntry{step, plan_text, request.plan.has_value(), verdict.label, verdict.tally,
                                               verdict.raw_text, prompt.size()});
    ++record.rounds;
    if (verdict.label == critics::Label::Correct) {
      record.stop_reason = StopReason::CriticAccepted;
      break;
    }
    transcript.append(plan_text, verdict.raw_text);
  }

  record.llm_calls = call_count(record.rounds, record.samples);
  record.truth = truth_of(domain, problem, record.final_plan_text);
  return record;
}

// ---------------------------------------------------------------------------
// Manifest and instances
// ---------------------------------------------------------------------------

std::vector<ManifestEntry> read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ManifestError("cannot read manifest " + path);
  const fs::path base = fs::path(path).parent_path();
  auto resolve = [&](const std::string& p) {
    if (p.empty()) return p;
    fs::path candidate(p);
    return (candidate.is_absolute() ? candidate : base / candidate).lexically_normal().string();
  };
  std::vector<ManifestEntry> out;
  std::set<std::string> ids;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json json = nlohmann::json::parse(line, nullptr, false);
    if (json.is_discarded() || !json.is_object())
      throw ManifestError(path + ":" + std::to_string(number) + ": not a JSON object");
    ManifestEntry e;
    try {
      e.id = json.at("id").get<std::string>();
      e.domain_path = resolve(json.at("domain").get<std::string>());
      e.problem_path = resolve(json.at("problem").get<std::string>());
      e.golden_plan_path = resolve(json.value("golden_plan", std::string()));
    } catch (const nlohmann::json::exception& ex) {
      throw ManifestError(path + ":" + std::to_string(number) + ": " + ex.what());
    }
    if (!ids.insert(e.id).second) throw ManifestError(path + ": duplicate id " + e.id);
    for (const char* key : {"id", "domain", "problem", "golden_plan"}) json.erase(key);
    e.extra = std::move(json);
    out.push_back(std::move(e));
  }
  return out;
}

nlohmann::json to_json(const ManifestEntry& e, const std::string& relative_to) {
  auto rel = [&](const std::string& p) {
    if (p.empty() || relative_to.empty()) return p;
    return fs::path(p).lexically_relative(relative_to).string();
  };
  nlohmann::json out{{"id", e.id}, {"domain", rel(e.domain_path)}, {"problem", rel(e.problem_path)}};
  if (!e.golden_plan_path.empty()) out["golden_plan"] = rel(e.golden_plan_path);
  if (e.extra.is_object())
    for (const auto& [k, v] : e.extra.items()) out[k] = v;
  return out;
}

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ManifestError("cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

std::vector<Instance> load_instances(const std::vector<ManifestEntry>& entries, bool need_golden) {
  std::map<std::string, std::shared_ptr<const pddl::DomainDef>> domains;
  std::vector<Instance> out;
  for (const auto& e : entries) {
    try {
      auto& domain = domains[e.domain_path];
      if (!domain) domain = std::make_shared<const pddl::DomainDef>(pddl::parse_domain(slurp(e.domain_path)));
      Instance instance{e.id, domain, pddl::parse_problem(slurp(e.problem_path), *domain), std::nullopt};
      if (!e.golden_plan_path.empty()) instance.golden = pddl::parse_plan(slurp(e.golden_plan_path), *domain);
      if (!instance.golden && need_golden) {
        auto result = search::bfs_plan(*domain, instance.problem);
        if (!result.found()) throw ManifestError("no golden plan for " + e.id + " and BFS did not find one");
        instance.golden = std::move(result.plan);
      }
      if (instance.golden &&
          !semantics::validate_plan(instance.problem, *instance.golden, *domain).verdict.is_correct())
        throw ManifestError("golden plan of " + e.id + " does not validate");
      out.push_back(std::move(instance));
    } catch (const pddl::ParseError& ex) {
      throw ManifestError(e.id + ": " + ex.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Batch
// ---------------------------------------------------------------------------

std::vector<RunRecord> read_records(const std::string& path) {
  std::vector<RunRecord> out;
  std::ifstream in(path);
  if (!in) return out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json json = nlohmann::json::parse(line, nullptr, false);
    // A torn final line from an interrupted run is dropped and rerun.
    if (json.is_discarded()) continue;
    out.push_back(record_from_json(json));
  }
  return out;
}

void write_records(const std::string& path, const std::vector<RunRecord>& records) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    for (const auto& r : records) out << to_json(r).dump() << '\n';
    if (!out) throw std::runtime_error("write failed: " + tmp);
  }
  fs::rename(tmp, path);
}

BatchResult run_batch(const std::vector<Instance>& instances, const LoopConfig& config, const Backends& backends,
                      const BatchOptions& options) {
  config.check();
  std::vector<prompting::Exemplar> pool_exemplars;
  if (config.shots > 0) {
    if (options.fewshot_pool) {
      pool_exemplars = *options.fewshot_pool;
    } else {
      for (const auto& inst : instances) {
        if (!inst.golden) throw ManifestError("few-shot pool needs golden plans; " + inst.id + " has none");
        pool_exemplars.push_back({inst.id, inst.problem, *inst.golden});
      }
    }
  }
  const prompting::FewShotPool pool{std::move(pool_exemplars), config.fewshot_seed};

  std::map<std::string, RunRecord> done;
  if (!options.records_path.empty() && options.resume)
    for (auto& r : read_records(options.records_path)) done.emplace(r.problem_id, std::move(r));

  BatchResult result;
  result.records.resize(instances.size());
  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    auto it = done.find(instances[i].id);
    if (it != done.end()) {
      result.records[i] = it->second;
      ++result.resumed;
    } else {
      todo.push_back(i);
    }
  }

  std::ofstream sink;
  std::mutex sink_mutex;
  if (!options.records_path.empty()) {
    sink.open(options.records_path, std::ios::app);
    if (!sink) throw std::runtime_error("cannot append to " + options.records_path);
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t n = next++; n < todo.size(); n = next++) {
      const std::size_t i = todo[n];
      const Instance& inst = instances[i];
      RunRecord record;
      try {
        ProblemContext context{inst.domain.get(), &inst.problem, inst.id, inst.golden ? &*inst.golden : nullptr, {}};
        if (config.shots > 0) context.shots = prompting::select_fewshots(pool, inst.id, config.shots);
        record = run_problem(context, config, backends);
      } catch (const std::exception& e) {
        record.problem_id = inst.id;
        record.samples = config.critic.samples;
        record.k = config.k;
        record.stop_reason = StopReason::TransportFailure;
        record.error = e.what();
        record.truth = truth_of(*inst.domain, inst.problem, "");
      }
      if (sink.is_open()) {
        std::lock_guard lock(sink_mutex);
        sink << to_json(record).dump() << '\n';
        sink.flush();
      }
      result.records[i] = std::move(record);
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(options.parallelism, todo.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool_threads;
    for (std::size_t t = 0; t < threads; ++t) pool_threads.emplace_back(worker);
    for (auto& t : pool_threads) t.join();
  }
  result.executed = todo.size();

  if (sink.is_open()) {
    sink.close();
    write_records(options.records_path, result.records);
  }
  return result;
}

Backends make_backends(const LoopConfig& config) {
  config.check();
  Backends b;
  b.templates = prompting::TemplateSet::load(config.templates_dir);
  std::shared_ptr<llm::ChatClient> client;
  auto shared_client = [&] {
    if (!client) client = std::make_shared<llm::ChatClient>(config.llm);
    return client;
  };
  switch (config.planner.backend) {
    case PlannerBackend::Llm: b.planner = std::make_shared<LlmPlanner>(shared_client(), config.planner.temperature); break;
    case PlannerBackend::MockGolden: b.planner = std::make_shared<GoldenPlanner>(); break;
    case PlannerBackend::MockStochastic:
      b.planner = std::make_shared<StochasticPlanner>(config.planner.golden_probability, config.planner.seed);
      break;
  }
  switch (config.critic.backend) {
    case critics::Backend::Oracle: b.critic = std::make_shared<critics::OracleCritic>(); break;
    case critics::Backend::Mock: b.critic = std::make_shared<critics::MockCritic>(config.critic); break;
    case critics::Backend::Llm: {
      std::vector<std::string> exemplars;
      for (const auto& path : config.critique_exemplar_files) exemplars.push_back(slurp(path));
      b.critic = std::make_shared<critics::LlmCritic>(config.critic, shared_client(), b.templates, std::move(exemplars));
      break;
    }
  }
  return b;
}

}  // namespace plancritic::orchestrator
