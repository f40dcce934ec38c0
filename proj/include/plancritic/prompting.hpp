#pragma once

// Prompt assembly for planning and critique calls.
//
// Templates use `{name}` placeholders. Values are inserted literally (never
// re-scanned), with trailing newlines trimmed so a placeholder on its own
// line renders as exactly that block.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "plancritic/pddl.hpp"

namespace plancritic::prompting {

enum class TemplateId {
  PlanFewshot,
  CritiqueFewshot,
  Critique0ShotDd,
  Critique0ShotNoDd,
  CritiqueNo3Step,
  CritiqueVerifyPlan,
};

/// "plan_fewshot", "critique_0shot_dd", ...
std::string to_string(TemplateId id);
TemplateId parse_template_id(const std::string& name);
const std::vector<TemplateId>& all_template_ids();
bool is_critique_template(TemplateId id);

enum class ErrorKind {
  UnknownPlaceholder,
  MissingPlaceholderValue,
  UnexpectedExemplars,
  BudgetExceeded,
  PoolTooSmall,
  InvalidExemplar,
  TemplateIo,
};

class PromptError : public std::runtime_error {
 public:
  PromptError(ErrorKind kind, std::string message) : std::runtime_error(std::move(message)), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

const std::vector<std::string>& placeholder_names();

/// Placeholder names in order of appearance (with repeats).
std::vector<std::string> placeholders(const std::string& body);

struct PromptTemplate {
  TemplateId id;
  std::string body;

  /// Throws UnknownPlaceholder for names outside placeholder_names().
  void check() const;
  bool uses(const std::string& name) const;
  /// Throws MissingPlaceholderValue if a used placeholder has no value.
  std::string render(const std::map<std::string, std::string>& values) const;
};

/// The built-in templates, optionally overridden per id by `<id>.txt` files
/// in a directory.
class TemplateSet {
 public:
  TemplateSet();
  static TemplateSet load(const std::string& override_dir);

  const PromptTemplate& get(TemplateId id) const;
  void set(PromptTemplate t);

 private:
  std::map<TemplateId, PromptTemplate> templates_;
};

const TemplateSet& builtin_templates();

// ---------------------------------------------------------------------------
// Few-shot exemplars
// ---------------------------------------------------------------------------

struct Exemplar {
  std::string id;
  pddl::ProblemDef problem;
  pddl::Plan plan;
};

struct FewShotPool {
  std::vector<Exemplar> exemplars;
  std::uint64_t seed = 0;
};

/// Throws InvalidExemplar unless every plan validates Correct, and on duplicate ids.
void check_pool(const FewShotPool& pool, const pddl::DomainDef& domain);

/// Deterministic in (pool.seed, problem_id); a larger n extends a smaller one.
std::vector<Exemplar> select_fewshots(const FewShotPool& pool, const std::string& problem_id, std::size_t n);

// ---------------------------------------------------------------------------
// Transcript and prompts
// ---------------------------------------------------------------------------

inline constexpr const char* kRepairRequest = "Please can you explain the error and fix it.";

struct TranscriptEntry {
  std::string plan_text;
  std::string critique_text;
};

struct Transcript {
  std::vector<TranscriptEntry> entries;
  /// Maximum prompt length in characters; 0 means unlimited.
  std::size_t char_budget = 0;

  void append(std::string plan_text, std::string critique_text);
  /// The text appended after the first planning prompt.
  std::string serialize() const;
};

/// Character budget for `max_tokens` at `chars_per_token`; 0 tokens means unlimited.
std::size_t char_budget(std::size_t max_tokens, double chars_per_token);

std::string render_shot(const Exemplar& shot);

std::string build_plan_prompt(const pddl::DomainDef& domain, const pddl::ProblemDef& problem,
                              const std::vector<Exemplar>& shots, const Transcript& transcript,
                              const TemplateSet& templates = builtin_templates());

std::string build_critique_prompt(TemplateId id, const pddl::DomainDef& domain, const pddl::ProblemDef& problem,
                                  const std::string& plan_text,
                                  const std::optional<std::vector<std::string>>& exemplars = std::nullopt,
                                  const TemplateSet& templates = builtin_templates());

}  // namespace plancritic::prompting
