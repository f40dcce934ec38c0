#pragma once

// The plan / critique / revise loop and the batch runner around it.
//
// Iteration 0 is the baseline plan; k further rounds follow, so a problem
// sees at most k+1 plans. A round is one planner call plus one critique.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "plancritic/critics.hpp"
#include "plancritic/llm_client.hpp"
#include "plancritic/pddl.hpp"
#include "plancritic/prompting.hpp"

namespace plancritic::orchestrator {

/// LLM requests for s rounds with c critique samples each: 2s when c = 1,
/// otherwise s + c*s.
std::size_t call_count(std::size_t s, std::size_t c);

// ---------------------------------------------------------------------------
// Planners
// ---------------------------------------------------------------------------

struct PlanRequest {
  const pddl::DomainDef* domain = nullptr;
  const pddl::ProblemDef* problem = nullptr;
  std::string problem_id;
  std::string prompt;
  std::size_t iteration = 0;
  /// Known-correct plan, used by the mock planners.
  const pddl::Plan* golden = nullptr;
};

class Planner {
 public:
  virtual ~Planner() = default;
  /// Plan text, one action per line. Must be safe to call concurrently.
  virtual std::string propose(const PlanRequest& request) = 0;
};

class LlmPlanner : public Planner {
 public:
  LlmPlanner(std::shared_ptr<llm::ChatClient> client, double temperature);
  std::string propose(const PlanRequest& request) override;

 private:
  std::shared_ptr<llm::ChatClient> client_;
  double temperature_;
};

/// Always the golden plan.
class GoldenPlanner : public Planner {
 public:
  std::string propose(const PlanRequest& request) override;
};

/// The golden plan with probability p, otherwise the golden plan with one
/// random action removed. Seeded by (seed, problem id, iteration).
class StochasticPlanner : public Planner {
 public:
  StochasticPlanner(double golden_probability, std::uint64_t seed);
  std::string propose(const PlanRequest& request) override;

 private:
  double p_;
  std::uint64_t seed_;
};

/// Replays fixed texts: iteration i gets texts[min(i, size-1)].
class ScriptedPlanner : public Planner {
 public:
  explicit ScriptedPlanner(std::vector<std::string> texts);
  std::string propose(const PlanRequest& request) override;

 private:
  std::vector<std::string> texts_;
};

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

enum class PlannerBackend { Llm, MockGolden, MockStochastic };
std::string to_string(PlannerBackend backend);
PlannerBackend parse_planner_backend(const std::string& name);

struct PlannerConfig {
  PlannerBackend backend = PlannerBackend::MockGolden;
  double temperature = 0.0;
  double golden_probability = 0.3;
  std::uint64_t seed = 0;
};

struct LoopConfig {
  /// Critique rounds after the baseline.
  std::size_t k = 10;
  /// Planning exemplars per prompt.
  std::size_t shots = 0;
  std::uint64_t fewshot_seed = 0;
  /// Prompt budget; 0 tokens means unlimited.
  std::size_t max_prompt_tokens = 0;
  double chars_per_token = 4.0;
  PlannerConfig planner;
  critics::CriticConfig critic;
  llm::ClientConfig llm;
  /// Template override directory; empty uses the built-in templates.
  std::string templates_dir;
  /// Files with worked critique examples for critique_fewshot.
  std::vector<std::string> critique_exemplar_files;

  void check() const;
};

LoopConfig loop_config_from_json(const nlohmann::json& json);
nlohmann::json to_json(const LoopConfig& config);

// ---------------------------------------------------------------------------
// Records
// ---------------------------------------------------------------------------

enum class StopReason { CriticAccepted, BudgetExceeded, IterationsExhausted, TransportFailure };
std::string to_string(StopReason reason);
StopReason parse_stop_reason(const std::string& name);

struct IterationEntry {
  std::size_t iteration = 0;
  std::string plan_text;
  bool parsed = true;
  critics::Label critic_label = critics::Label::Wrong;
  std::map<critics::Label, std::size_t> tally;
  std::string critique_text;
  std::size_t plan_prompt_bytes = 0;
};

struct RunRecord {
  std::string problem_id;
  std::vector<IterationEntry> iterations;
  /// Last proposed plan (empty when none was produced).
  std::string final_plan_text;
  StopReason stop_reason = StopReason::IterationsExhausted;
  /// Critique rounds configured after the baseline.
  std::size_t k = 0;
  /// Completed rounds.
  std::size_t rounds = 0;
  std::size_t samples = 1;
  /// call_count(rounds, samples).
  std::size_t llm_calls = 0;
  /// Requests spent on a round that did not complete.
  std::size_t failed_round_calls = 0;
  /// "correct", "wrong-at-step", "goal-not-reached" or "unparseable".
  std::string truth;
  std::string error;
};

nlohmann::json to_json(const RunRecord& record);
RunRecord record_from_json(const nlohmann::json& json);

/// Ground truth of a plan text: verdict kind name, or "unparseable".
std::string truth_of(const pddl::DomainDef& domain, const pddl::ProblemDef& problem, const std::string& plan_text);

struct ProblemContext {
  const pddl::DomainDef* domain = nullptr;
  const pddl::ProblemDef* problem = nullptr;
  std::string id;
  const pddl::Plan* golden = nullptr;
  std::vector<prompting::Exemplar> shots;
};

struct Backends {
  std::shared_ptr<Planner> planner;
  std::shared_ptr<critics::Critic> critic;
  prompting::TemplateSet templates = prompting::builtin_templates();
  /// Called with (iteration, plan prompt) before each planner call.
  std::function<void(std::size_t, const std::string&)> on_prompt;
};

/// Never throws for planner or critic failures; they end the run with
/// TransportFailure and the error text recorded.
RunRecord run_problem(const ProblemContext& context, const LoopConfig& config, const Backends& backends);

// ---------------------------------------------------------------------------
// Batch
// ---------------------------------------------------------------------------

class ManifestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One line of a manifest; paths are resolved against the manifest's directory.
struct ManifestEntry {
  std::string id;
  std::string domain_path;
  std::string problem_path;
  std::string golden_plan_path;
  nlohmann::json extra;
};

std::vector<ManifestEntry> read_manifest(const std::string& path);
nlohmann::json to_json(const ManifestEntry& entry, const std::string& relative_to = "");

struct Instance {
  std::string id;
  std::shared_ptr<const pddl::DomainDef> domain;
  pddl::ProblemDef problem;
  /// From the manifest, or BFS when absent and a mock planner or few-shot pool needs it.
  std::optional<pddl::Plan> golden;
};

/// Parses every file; domains shared by path. Throws ManifestError.
std::vector<Instance> load_instances(const std::vector<ManifestEntry>& entries, bool need_golden);

struct BatchOptions {
  std::size_t parallelism = 1;
  /// Line-delimited record file; empty keeps records in memory only.
  std::string records_path;
  /// Skip problems already present in records_path.
  bool resume = true;
  /// Exemplar pool for planning shots; defaults to the batch's own instances.
  std::optional<std::vector<prompting::Exemplar>> fewshot_pool;
};

struct BatchResult {
  std::vector<RunRecord> records;
  std::size_t executed = 0;
  std::size_t resumed = 0;
};

/// Records come back in instance order whatever the completion order.
BatchResult run_batch(const std::vector<Instance>& instances, const LoopConfig& config, const Backends& backends,
                      const BatchOptions& options);

std::vector<RunRecord> read_records(const std::string& path);
void write_records(const std::string& path, const std::vector<RunRecord>& records);

/// Planner and critic built from a config; the LLM client is shared by both.
Backends make_backends(const LoopConfig& config);

}  // namespace plancritic::orchestrator
