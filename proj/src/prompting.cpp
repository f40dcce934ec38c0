#include "plancritic/prompting.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "plancritic/rng.hpp"
#include "plancritic/semantics.hpp"

namespace plancritic::prompting {

namespace detail {
const std::vector<std::pair<std::string_view, std::string_view>>& embedded_templates();
}

namespace {

bool is_name_char(char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_'; }

std::string trim_trailing_newlines(std::string text) {
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
  return text;
}

// Calls on_text for literal runs and on_name for each `{name}` placeholder.
template <typename Text, typename Name>
void scan(const std::string& body, Text&& on_text, Name&& on_name) {
  std::size_t pos = 0;
  while (pos < body.size()) {
    std::size_t open = body.find('{', pos);
    if (open == std::string::npos) break;
    std::size_t close = open + 1;
    while (close < body.size() && is_name_char(body[close])) ++close;
    if (close < body.size() && body[close] == '}' && close > open + 1) {
      on_text(std::string_view(body).substr(pos, open - pos));
      on_name(body.substr(open + 1, close - open - 1));
      pos = close + 1;
    } else {
      on_text(std::string_view(body).substr(pos, open + 1 - pos));
      pos = open + 1;
    }
  }
  on_text(std::string_view(body).substr(pos));
}

}  // namespace

std::string to_string(TemplateId id) {
  switch (id) {
    case TemplateId::PlanFewshot: return "plan_fewshot";
    case TemplateId::CritiqueFewshot: return "critique_fewshot";
    case TemplateId::Critique0ShotDd: return "critique_0shot_dd";
    case TemplateId::Critique0ShotNoDd: return "critique_0shot_no_dd";
    case TemplateId::CritiqueNo3Step: return "critique_no_3step";
    case TemplateId::CritiqueVerifyPlan: return "critique_verify_plan";
  }
  return "plan_fewshot";
}

const std::vector<TemplateId>& all_template_ids() {
  static const std::vector<TemplateId> ids{TemplateId::PlanFewshot,       TemplateId::CritiqueFewshot,
                                           TemplateId::Critique0ShotDd,   TemplateId::Critique0ShotNoDd,
                                           TemplateId::CritiqueNo3Step,   TemplateId::CritiqueVerifyPlan};
  return ids;
}

TemplateId parse_template_id(const std::string& name) {
  for (TemplateId id : all_template_ids())
    if (to_string(id) == name) return id;
  throw std::invalid_argument("unknown template id '" + name + "'");
}

bool is_critique_template(TemplateId id) { return id != TemplateId::PlanFewshot; }

const std::vector<std::string>& placeholder_names() {
  static const std::vector<std::string> names{"domain_pddl", "self_evaluations_exemplars", "instance", "plan",
                                              "few_shots"};
  return names;
}

std::vector<std::string> placeholders(const std::string& body) {
  std::vector<std::string> out;
  scan(body, [](std::string_view) {}, [&](std::string name) { out.push_back(std::move(name)); });
  return out;
}

void PromptTemplate::check() const {
  const auto& known = placeholder_names();
  for (const auto& name : placeholders(body))
    if (std::find(known.begin(), known.end(), name) == known.end())
      throw PromptError(ErrorKind::UnknownPlaceholder,
                        "template " + to_string(id) + " uses unknown placeholder {" + name + "}");
}

bool PromptTemplate::uses(const std::string& name) const {
  auto names = placeholders(body);
  return std::find(names.begin(), names.end(), name) != names.end();
}

std::string PromptTemplate::render(const std::map<std::string, std::string>& values) const {
  check();
  std::string out;
  scan(
      body, [&](std::string_view text) { out.append(text); },
      [&](const std::string& name) {
        auto it = values.find(name);
        if (it == values.end())
          throw PromptError(ErrorKind::MissingPlaceholderValue,
                            "no value for {" + name + "} in template " + to_string(id));
        out += it->second;
      });
  return out;
}

TemplateSet::TemplateSet() = default;

void TemplateSet::set(PromptTemplate t) {
  t.check();
  templates_[t.id] = std::move(t);
}

const PromptTemplate& TemplateSet::get(TemplateId id) const {
  auto it = templates_.find(id);
  if (it != templates_.end()) return it->second;
  if (this != &builtin_templates()) return builtin_templates().get(id);
  throw PromptError(ErrorKind::TemplateIo, "template " + to_string(id) + " is not available");
}

const TemplateSet& builtin_templates() {
  static const TemplateSet set = [] {
    TemplateSet s;
    for (const auto& [name, body] : detail::embedded_templates())
      s.set(PromptTemplate{parse_template_id(std::string(name)), std::string(body)});
    return s;
  }();
  return set;
}

TemplateSet TemplateSet::load(const std::string& override_dir) {
  TemplateSet s = builtin_templates();
  if (override_dir.empty()) return s;
  namespace fs = std::filesystem;
  if (!fs::is_directory(override_dir))
    throw PromptError(ErrorKind::TemplateIo, "template directory '" + override_dir + "' does not exist");
  for (TemplateId id : all_template_ids()) {
    fs::path path = fs::path(override_dir) / (to_string(id) + ".txt");
    if (!fs::exists(path)) continue;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PromptError(ErrorKind::TemplateIo, "cannot read " + path.string());
    std::ostringstream body;
    body << in.rdbuf();
    s.set(PromptTemplate{id, body.str()});
  }
  return s;
}

// ---------------------------------------------------------------------------
// Few-shot exemplars
// ---------------------------------------------------------------------------

void check_pool(const FewShotPool& pool, const pddl::DomainDef& domain) {
  std::set<std::string> ids;
  for (const auto& e : pool.exemplars) {
    if (!ids.insert(e.id).second) throw PromptError(ErrorKind::InvalidExemplar, "duplicate exemplar id " + e.id);
    auto verdict = semantics::validate_plan(e.problem, e.plan, domain).verdict;
    if (!verdict.is_correct())
      throw PromptError(ErrorKind::InvalidExemplar,
                        "exemplar " + e.id + " has an incorrect plan: " + semantics::describe(verdict, e.plan));
  }
}

std::vector<Exemplar> select_fewshots(const FewShotPool& pool, const std::string& problem_id, std::size_t n) {
  std::vector<std::pair<std::uint64_t, const Exemplar*>> keyed;
  for (const auto& e : pool.exemplars)
    if (e.id != problem_id) keyed.emplace_back(derive_seed(pool.seed, std::string_view(problem_id), std::string_view(e.id)), &e);
  if (n > keyed.size())
    throw PromptError(ErrorKind::PoolTooSmall, "requested " + std::to_string(n) + " exemplars, pool has " +
                                                   std::to_string(keyed.size()) + " eligible");
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first < b.first : a.second->id < b.second->id;
  });
  std::vector<Exemplar> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(*keyed[i].second);
  return out;
}

// ---------------------------------------------------------------------------
// Transcript and prompts
// ---------------------------------------------------------------------------

void Transcript::append(std::string plan_text, std::string critique_text) {
  entries.push_back({std::move(plan_text), std::move(critique_text)});
}

std::string Transcript::serialize() const {
  std::string out;
  for (const auto& e : entries) {
    out += trim_trailing_newlines(e.plan_text);
    out += '\n';
    out += trim_trailing_newlines(e.critique_text);
    out += "\n\n";
    out += kRepairRequest;
    out += '\n';
  }
  return out;
}

std::size_t char_budget(std::size_t max_tokens, double chars_per_token) {
  if (max_tokens == 0) return 0;
  if (!(chars_per_token > 0)) throw std::invalid_argument("chars_per_token must be positive");
  return static_cast<std::size_t>(std::floor(static_cast<double>(max_tokens) * chars_per_token));
}

std::string render_shot(const Exemplar& shot) {
  return "Example of a problem and its solution (plan):\n" + pddl::print_problem(shot.problem) +
         "The plan without formatting:\n" + pddl::print_plan(shot.plan) + "\n";
}

std::string build_plan_prompt(const pddl::DomainDef& domain, const pddl::ProblemDef& problem,
                              const std::vector<Exemplar>& shots, const Transcript& transcript,
                              const TemplateSet& templates) {
  std::string few_shots;
  for (const auto& shot : shots) few_shots += render_shot(shot);
  std::string prompt = templates.get(TemplateId::PlanFewshot)
                           .render({{"domain_pddl", trim_trailing_newlines(pddl::print_domain(domain))},
                                    {"few_shots", few_shots},
                                    {"instance", trim_trailing_newlines(pddl::print_problem(problem))}});
  prompt += transcript.serialize();
  if (transcript.char_budget > 0 && prompt.size() > transcript.char_budget)
    throw PromptError(ErrorKind::BudgetExceeded, "prompt of " + std::to_string(prompt.size()) +
                                                     " characters exceeds the budget of " +
                                                     std::to_string(transcript.char_budget));
  return prompt;
}

std::string build_critique_prompt(TemplateId id, const pddl::DomainDef& domain, const pddl::ProblemDef& problem,
                                  const std::string& plan_text,
                                  const std::optional<std::vector<std::string>>& exemplars,
                                  const TemplateSet& templates) {
  if (!is_critique_template(id))
    throw std::invalid_argument(to_string(id) + " is not a critique template");
  const PromptTemplate& t = templates.get(id);
  std::map<std::string, std::string> values{
      {"domain_pddl", trim_trailing_newlines(pddl::print_domain(domain))},
      {"instance", trim_trailing_newlines(pddl::print_problem(problem))},
      {"plan", trim_trailing_newlines(plan_text)},
  };
  if (t.uses("self_evaluations_exemplars")) {
    if (exemplars && !exemplars->empty()) {
      std::string joined;
      for (std::size_t i = 0; i < exemplars->size(); ++i) {
        if (i) joined += "\n\n";
        joined += trim_trailing_newlines((*exemplars)[i]);
      }
      values["self_evaluations_exemplars"] = joined;
    }
  } else if (exemplars && !exemplars->empty()) {
    throw PromptError(ErrorKind::UnexpectedExemplars, to_string(id) + " takes no critique exemplars");
  }
  return t.render(values);
}

}  // namespace plancritic::prompting
