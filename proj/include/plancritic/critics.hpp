#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "plancritic/llm_client.hpp"
#include "plancritic/pddl.hpp"
#include "plancritic/prompting.hpp"

namespace plancritic::critics {

enum class Label { Correct, Wrong, GoalNotReached };

/// "correct", "wrong", "goal-not-reached".
std::string to_string(Label label);
Label parse_label(const std::string& name);

/// Last of "the plan is correct" / "the plan is wrong" / "goal not reached"
/// in the text, case-insensitively; Wrong when none occurs.
Label extract_verdict(const std::string& text);

/// Correct vs not-correct majority, ties go to Wrong. A not-correct majority
/// is GoalNotReached only when it outnumbers Wrong among the votes.
Label self_consistency(const std::vector<Label>& labels);

struct CritiqueVerdict {
  Label label = Label::Wrong;
  /// Text of the first sample agreeing with the label (first sample otherwise).
  std::string raw_text;
  std::size_t sample_count = 0;
  std::map<Label, std::size_t> tally;
  std::vector<std::string> samples;
};

CritiqueVerdict aggregate(std::vector<std::string> samples);
nlohmann::json to_json(const CritiqueVerdict& verdict);

enum class Backend { Llm, Oracle, Mock };
std::string to_string(Backend backend);
Backend parse_backend(const std::string& name);

struct CriticConfig {
  Backend backend = Backend::Oracle;
  prompting::TemplateId prompt = prompting::TemplateId::Critique0ShotDd;
  /// Self-consistency votes per critique.
  std::size_t samples = 1;
  /// Sampling temperature of critique requests; defaults to 0 for a single
  /// sample and 0.7 when voting.
  std::optional<double> temperature;
  double false_positive_rate = 0;
  double false_negative_rate = 0;
  std::uint64_t seed = 0;

  double effective_temperature() const;
  void check() const;
};

CriticConfig critic_config_from_json(const nlohmann::json& json);
nlohmann::json to_json(const CriticConfig& config);

struct CritiqueRequest {
  const pddl::DomainDef* domain = nullptr;
  const pddl::ProblemDef* problem = nullptr;
  std::string problem_id;
  /// Parsed plan; empty when the planner output did not parse.
  std::optional<pddl::Plan> plan;
  std::string plan_text;
  /// 0 for the baseline plan.
  std::size_t iteration = 0;
  /// Parse error, when `plan` is empty.
  std::string parse_error;
};

class Critic {
 public:
  virtual ~Critic() = default;
  virtual CritiqueVerdict critique(const CritiqueRequest& request) = 0;
  /// LLM requests issued per critique.
  virtual std::size_t llm_calls_per_critique() const { return 0; }
};

/// Labels from the validator with a rendered trace as text.
class OracleCritic : public Critic {
 public:
  CritiqueVerdict critique(const CritiqueRequest& request) override;
};

/// Oracle labels flipped at configured rates; every vote flips independently.
class MockCritic : public Critic {
 public:
  explicit MockCritic(CriticConfig config);
  CritiqueVerdict critique(const CritiqueRequest& request) override;

 private:
  CriticConfig config_;
};

class LlmCritic : public Critic {
 public:
  LlmCritic(CriticConfig config, std::shared_ptr<llm::ChatClient> client,
            prompting::TemplateSet templates = prompting::builtin_templates(),
            std::vector<std::string> exemplars = {});
  CritiqueVerdict critique(const CritiqueRequest& request) override;
  std::size_t llm_calls_per_critique() const override { return config_.samples; }

 private:
  CriticConfig config_;
  std::shared_ptr<llm::ChatClient> client_;
  prompting::TemplateSet templates_;
  std::vector<std::string> exemplars_;
};

/// Oracle label of a request (Wrong for unparsed plans).
Label oracle_label(const CritiqueRequest& request);

}  // namespace plancritic::critics
