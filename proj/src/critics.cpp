#include "plancritic/critics.hpp"

#include <algorithm>
#include <cctype>
#include <future>

#include "plancritic/rng.hpp"
#include "plancritic/semantics.hpp"

namespace plancritic::critics {

namespace {

constexpr std::pair<const char*, Label> kPhrases[] = {
    {"the plan is correct", Label::Correct},
    {"the plan is wrong", Label::Wrong},
    {"goal not reached", Label::GoalNotReached},
};

std::string lowercase(std::string text) {
  for (auto& c : text) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return text;
}

std::string label_sentence(Label label) {
  switch (label) {
    case Label::Correct: return "the plan is correct";
    case Label::Wrong: return "the plan is wrong";
    case Label::GoalNotReached: return "goal not reached";
  }
  return "the plan is wrong";
}

Label from_verdict(const semantics::PlanVerdict& verdict) {
  switch (verdict.kind) {
    case semantics::PlanVerdict::Kind::Correct: return Label::Correct;
    case semantics::PlanVerdict::Kind::WrongAtStep: return Label::Wrong;
    case semantics::PlanVerdict::Kind::GoalNotReached: return Label::GoalNotReached;
  }
  return Label::Wrong;
}

void check_request(const CritiqueRequest& request) {
  if (!request.domain || !request.problem) throw std::invalid_argument("critique request needs a domain and problem");
}

}  // namespace

std::string to_string(Label label) {
  switch (label) {
    case Label::Correct: return "correct";
    case Label::Wrong: return "wrong";
    case Label::GoalNotReached: return "goal-not-reached";
  }
  return "wrong";
}

Label parse_label(const std::string& name) {
  for (Label l : {Label::Correct, Label::Wrong, Label::GoalNotReached})
    if (to_string(l) == name) return l;
  throw std::invalid_argument("unknown label '" + name + "'");
}

Label extract_verdict(const std::string& text) {
  const std::string lower = lowercase(text);
  Label best = Label::Wrong;
  std::size_t best_pos = 0;
  bool found = false;
  for (const auto& [phrase, label] : kPhrases) {
    auto pos = lower.rfind(phrase);
    if (pos == std::string::npos) continue;
    if (!found || pos > best_pos) {
      best = label;
      best_pos = pos;
      found = true;
    }
  }
  return best;
}

Label self_consistency(const std::vector<Label>& labels) {
  if (labels.empty()) throw std::invalid_argument("self_consistency needs at least one label");
  std::size_t correct = 0, wrong = 0, goal = 0;
  for (Label l : labels) {
    correct += l == Label::Correct;
    wrong += l == Label::Wrong;
    goal += l == Label::GoalNotReached;
  }
  if (correct > wrong + goal) return Label::Correct;
  if (correct == wrong + goal) return Label::Wrong;
  return goal > wrong ? Label::GoalNotReached : Label::Wrong;
}

CritiqueVerdict aggregate(std::vector<std::string> samples) {
  if (samples.empty()) throw std::invalid_argument("no critique samples");
  CritiqueVerdict v;
  std::vector<Label> labels;
  for (const auto& s : samples) labels.push_back(extract_verdict(s));
  v.label = self_consistency(labels);
  v.sample_count = samples.size();
  for (Label l : labels) ++v.tally[l];
  auto agreeing = std::find(labels.begin(), labels.end(), v.label);
  v.raw_text = samples[agreeing == labels.end() ? 0 : static_cast<std::size_t>(agreeing - labels.begin())];
  v.samples = std::move(samples);
  return v;
}

nlohmann::json to_json(const CritiqueVerdict& verdict) {
  nlohmann::json tally = nlohmann::json::object();
  for (const auto& [label, count] : verdict.tally) tally[to_string(label)] = count;
  return {{"label", to_string(verdict.label)},
          {"sample_count", verdict.sample_count},
          {"tally", tally},
          {"text", verdict.raw_text}};
}

std::string to_string(Backend backend) {
  switch (backend) {
    case Backend::Llm: return "llm";
    case Backend::Oracle: return "oracle";
    case Backend::Mock: return "mock";
  }
  return "oracle";
}

Backend parse_backend(const std::string& name) {
  for (Backend b : {Backend::Llm, Backend::Oracle, Backend::Mock})
    if (to_string(b) == name) return b;
  throw std::invalid_argument("unknown critic backend '" + name + "'");
}

double CriticConfig::effective_temperature() const {
  if (temperature) return *temperature;
  return samples > 1 ? 0.7 : 0.0;
}

void CriticConfig::check() const {
  auto rate = [](double r) { return r >= 0 && r <= 1; };
  if (!rate(false_positive_rate) || !rate(false_negative_rate))
    throw std::invalid_argument("critic error rates must be in [0, 1]");
  if (samples < 1) throw std::invalid_argument("self-consistency sample count must be >= 1");
  if (temperature && (*temperature < 0 || *temperature > 1))
    throw std::invalid_argument("critic temperature must be in [0, 1]");
  if (!prompting::is_critique_template(prompt))
    throw std::invalid_argument(prompting::to_string(prompt) + " is not a critique template");
}

CriticConfig critic_config_from_json(const nlohmann::json& json) {
  CriticConfig c;
  c.backend = parse_backend(json.value("backend", to_string(c.backend)));
  c.prompt = prompting::parse_template_id(json.value("template", prompting::to_string(c.prompt)));
  c.samples = json.value("samples", c.samples);
  if (json.contains("temperature") && !json.at("temperature").is_null())
    c.temperature = json.at("temperature").get<double>();
  c.false_positive_rate = json.value("false_positive_rate", c.false_positive_rate);
  c.false_negative_rate = json.value("false_negative_rate", c.false_negative_rate);
  c.seed = json.value("seed", c.seed);
  c.check();
  return c;
}

nlohmann::json to_json(const CriticConfig& c) {
  nlohmann::json out{{"backend", to_string(c.backend)},
                     {"template", prompting::to_string(c.prompt)},
                     {"samples", c.samples},
                     {"temperature", nullptr},
                     {"false_positive_rate", c.false_positive_rate},
                     {"false_negative_rate", c.false_negative_rate},
                     {"seed", c.seed}};
  if (c.temperature) out["temperature"] = *c.temperature;
  return out;
}

Label oracle_label(const CritiqueRequest& request) {
  check_request(request);
  if (!request.plan) return Label::Wrong;
  return from_verdict(semantics::validate_plan(*request.problem, *request.plan, *request.domain).verdict);
}

CritiqueVerdict OracleCritic::critique(const CritiqueRequest& request) {
  check_request(request);
  if (!request.plan)
    return aggregate({"The plan could not be parsed: " + request.parse_error + "\n\n**the plan is wrong**"});
  auto validation = semantics::validate_plan(*request.problem, *request.plan, *request.domain);
  return aggregate({semantics::render_trace(validation, *request.plan, *request.domain)});
}

MockCritic::MockCritic(CriticConfig config) : config_(std::move(config)) { config_.check(); }

CritiqueVerdict MockCritic::critique(const CritiqueRequest& request) {
  const Label truth = oracle_label(request);
  std::vector<std::string> samples;
  for (std::size_t s = 0; s < config_.samples; ++s) {
    Rng rng(derive_seed(config_.seed, std::string_view(request.problem_id), static_cast<std::uint64_t>(request.iteration),
                        static_cast<std::uint64_t>(s)));
    Label label = truth;
    if (truth == Label::Correct) {
      if (rng.bernoulli(config_.false_negative_rate)) label = Label::Wrong;
    } else if (rng.bernoulli(config_.false_positive_rate)) {
      label = Label::Correct;
    }
    samples.push_back("mock critique: " + label_sentence(label));
  }
  return aggregate(std::move(samples));
}

LlmCritic::LlmCritic(CriticConfig config, std::shared_ptr<llm::ChatClient> client, prompting::TemplateSet templates,
                     std::vector<std::string> exemplars)
    : config_(std::move(config)),
      client_(std::move(client)),
      templates_(std::move(templates)),
      exemplars_(std::move(exemplars)) {
  config_.check();
  if (!client_) throw std::invalid_argument("LLM critic needs a client");
}

CritiqueVerdict LlmCritic::critique(const CritiqueRequest& request) {
  check_request(request);
  std::optional<std::vector<std::string>> exemplars;
  if (!exemplars_.empty()) exemplars = exemplars_;
  const std::string prompt = prompting::build_critique_prompt(config_.prompt, *request.domain, *request.problem,
                                                              request.plan_text, exemplars, templates_);
  const double temperature = config_.effective_temperature();
  std::vector<std::future<std::string>> pending;
  for (std::size_t s = 0; s < config_.samples; ++s)
    pending.push_back(std::async(std::launch::async, [&] { return client_->complete(prompt, temperature); }));
  std::vector<std::string> samples;
  std::exception_ptr failure;
  for (auto& f : pending) {
    try {
      samples.push_back(f.get());
    } catch (...) {
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return aggregate(std::move(samples));
}

}  // namespace plancritic::critics
