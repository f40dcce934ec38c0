#include "plancritic/semantics.hpp"

#include <sstream>

namespace plancritic::semantics {

ActionError::ActionError(ActionErrorKind kind, std::string message, std::vector<Atom> unmet)
    : std::runtime_error(std::move(message)), kind_(kind), unmet_(std::move(unmet)) {}

State initial_state(const ProblemDef& problem) { return State(problem.init.begin(), problem.init.end()); }

namespace {

const pddl::ActionSchema& schema_for(const GroundAction& action, const DomainDef& domain) {
  const pddl::ActionSchema* schema = domain.find_action(action.name);
  if (!schema) throw ActionError(ActionErrorKind::UnknownAction, "unknown action '" + action.name + "'");
  if (schema->parameters.size() != action.args.size())
    throw ActionError(ActionErrorKind::ArityMismatch,
                      "action '" + action.name + "' expects " + std::to_string(schema->parameters.size()) +
                          " argument(s), got " + std::to_string(action.args.size()));
  return *schema;
}

std::string join_atoms(const std::vector<Atom>& atoms) {
  std::string out;
  for (const auto& atom : atoms) {
    if (!out.empty()) out += ' ';
    out += pddl::to_string(atom);
  }
  return out;
}

}  // namespace

std::vector<Atom> ground_preconditions(const GroundAction& action, const DomainDef& domain) {
  const auto& schema = schema_for(action, domain);
  std::vector<Atom> out;
  out.reserve(schema.precondition.size());
  for (const auto& atom : schema.precondition) out.push_back(pddl::substitute(atom, schema.parameters, action.args));
  return out;
}

std::vector<Literal> ground_effects(const GroundAction& action, const DomainDef& domain) {
  const auto& schema = schema_for(action, domain);
  std::vector<Literal> out;
  out.reserve(schema.effect.size());
  for (const auto& literal : schema.effect)
    out.push_back(Literal{pddl::substitute(literal.atom, schema.parameters, action.args), literal.negated});
  return out;
}

Applicability is_applicable(const State& state, const GroundAction& action, const DomainDef& domain) {
  Applicability result;
  for (auto& atom : ground_preconditions(action, domain))
    if (!state.count(atom)) result.unmet.push_back(std::move(atom));
  result.applicable = result.unmet.empty();
  return result;
}

State apply(const State& state, const GroundAction& action, const DomainDef& domain) {
  Applicability check = is_applicable(state, action, domain);
  if (!check.applicable)
    throw ActionError(ActionErrorKind::InapplicableAction,
                      pddl::to_string(action) + " is not applicable: unmet " + join_atoms(check.unmet),
                      std::move(check.unmet));
  State next = state;
  const auto effects = ground_effects(action, domain);
  for (const auto& literal : effects)
    if (literal.negated) next.erase(literal.atom);
  for (const auto& literal : effects)
    if (!literal.negated) next.insert(literal.atom);
  return next;
}

GoalCheck goal_satisfied(const State& state, const ProblemDef& problem) {
  GoalCheck result;
  for (const auto& atom : problem.goal)
    if (!state.count(atom)) result.unsatisfied.push_back(atom);
  result.satisfied = result.unsatisfied.empty();
  return result;
}

PlanVerdict PlanVerdict::wrong_at_step(std::size_t step, std::vector<Atom> unmet) {
  PlanVerdict verdict;
  verdict.kind = Kind::WrongAtStep;
  verdict.step = step;
  verdict.unmet = std::move(unmet);
  return verdict;
}

PlanVerdict PlanVerdict::goal_not_reached(std::vector<Atom> unsatisfied) {
  PlanVerdict verdict;
  verdict.kind = Kind::GoalNotReached;
  verdict.unsatisfied = std::move(unsatisfied);
  return verdict;
}

Validation validate_plan(const ProblemDef& problem, const Plan& plan, const DomainDef& domain) {
  Validation result;
  State state = initial_state(problem);
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const GroundAction& action = plan.steps[i];
    TraceStep step;
    step.index = i + 1;
    step.action = action;
    step.before = state;
    std::vector<Atom> unmet;
    for (auto& atom : ground_preconditions(action, domain)) {
      bool holds = state.count(atom) > 0;
      if (!holds) unmet.push_back(atom);
      step.checks.push_back({std::move(atom), holds});
    }
    step.effects = ground_effects(action, domain);
    if (!unmet.empty()) {
      result.trace.push_back(std::move(step));
      result.verdict = PlanVerdict::wrong_at_step(i + 1, std::move(unmet));
      result.final_state = state;
      return result;
    }
    state = apply(state, action, domain);
    step.applied = true;
    step.after = state;
    result.trace.push_back(std::move(step));
  }
  result.final_state = state;
  GoalCheck goal = goal_satisfied(state, problem);
  result.verdict = goal.satisfied ? PlanVerdict::correct() : PlanVerdict::goal_not_reached(std::move(goal.unsatisfied));
  return result;
}

std::string verdict_phrase(const PlanVerdict& verdict) {
  switch (verdict.kind) {
    case PlanVerdict::Kind::Correct: return "the plan is correct";
    case PlanVerdict::Kind::WrongAtStep: return "the plan is wrong";
    case PlanVerdict::Kind::GoalNotReached: return "goal not reached";
  }
  return "the plan is wrong";
}

std::string verdict_kind_name(PlanVerdict::Kind kind) {
  switch (kind) {
    case PlanVerdict::Kind::Correct: return "correct";
    case PlanVerdict::Kind::WrongAtStep: return "wrong-at-step";
    case PlanVerdict::Kind::GoalNotReached: return "goal-not-reached";
  }
  return "wrong-at-step";
}

std::string describe(const PlanVerdict& verdict, const Plan& plan) {
  switch (verdict.kind) {
    case PlanVerdict::Kind::Correct:
      return "correct: all " + std::to_string(plan.size()) + " step(s) applied and the goal holds";
    case PlanVerdict::Kind::WrongAtStep: {
      std::string action =
          verdict.step >= 1 && verdict.step <= plan.size() ? pddl::to_string(plan.steps[verdict.step - 1]) : "?";
      return "wrong at step " + std::to_string(verdict.step) + ": " + action + " unmet " + join_atoms(verdict.unmet);
    }
    case PlanVerdict::Kind::GoalNotReached:
      return "goal not reached: unsatisfied " + join_atoms(verdict.unsatisfied);
  }
  return {};
}

std::string render_trace(const Validation& validation, const Plan& plan, const DomainDef& domain) {
  std::ostringstream out;
  for (const auto& step : validation.trace) {
    const pddl::ActionSchema* schema = domain.find_action(step.action.name);
    out << "step " << step.index << ": " << pddl::to_string(step.action) << "\n";
    out << "1. action and preconditions:\n";
    out << "   - action: " << step.action.name;
    if (schema)
      for (const auto& param : schema->parameters) out << ' ' << param;
    out << "\n   - preconditions: ";
    if (schema) {
      if (schema->precondition.size() == 1) {
        out << pddl::to_string(schema->precondition.front());
      } else {
        out << "(and";
        for (const auto& atom : schema->precondition) out << ' ' << pddl::to_string(atom);
        out << ')';
      }
    }
    out << "\n2. verification:\n";
    for (const auto& check : step.checks)
      out << "   - " << pddl::to_string(check.atom) << ": " << (check.holds ? "true" : "false") << "\n";
    if (!step.applied) {
      out << "   - preconditions are not met.\n\n";
      break;
    }
    out << "   - all preconditions are met.\n";
    out << "3. resulting state:\n";
    for (const auto& literal : step.effects) out << "   - " << pddl::to_string(literal) << "\n";
    out << "\n";
  }

  const PlanVerdict& verdict = validation.verdict;
  switch (verdict.kind) {
    case PlanVerdict::Kind::Correct:
      out << "final state:\n";
      for (const auto& atom : validation.final_state) out << "   - " << pddl::to_string(atom) << "\n";
      out << "the goal is reached; the plan is correct\n";
      break;
    case PlanVerdict::Kind::WrongAtStep:
      out << "the plan is wrong because the preconditions of step " << verdict.step << " "
          << pddl::to_string(plan.steps[verdict.step - 1]) << " are not met: " << join_atoms(verdict.unmet)
          << "\n";
      break;
    case PlanVerdict::Kind::GoalNotReached:
      out << "final state:\n";
      for (const auto& atom : validation.final_state) out << "   - " << pddl::to_string(atom) << "\n";
      out << "unsatisfied goal atoms: " << join_atoms(verdict.unsatisfied) << "\n";
      out << "goal not reached\n";
      break;
  }
  return out.str();
}

namespace {

nlohmann::json atoms_json(const std::vector<Atom>& atoms) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& atom : atoms) out.push_back(pddl::to_string(atom));
  return out;
}

nlohmann::json state_json(const State& state) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& atom : state) out.push_back(pddl::to_string(atom));
  return out;
}

}  // namespace

nlohmann::json to_json(const PlanVerdict& verdict) {
  nlohmann::json out;
  out["kind"] = verdict_kind_name(verdict.kind);
  out["phrase"] = verdict_phrase(verdict);
  if (verdict.kind == PlanVerdict::Kind::WrongAtStep) {
    out["step"] = verdict.step;
    out["unmet"] = atoms_json(verdict.unmet);
  }
  if (verdict.kind == PlanVerdict::Kind::GoalNotReached) out["unsatisfied"] = atoms_json(verdict.unsatisfied);
  return out;
}

nlohmann::json to_json(const Validation& validation) {
  nlohmann::json out;
  out["verdict"] = to_json(validation.verdict);
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& step : validation.trace) {
    nlohmann::json entry;
    entry["index"] = step.index;
    entry["action"] = pddl::to_string(step.action);
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& check : step.checks) checks.push_back({{"atom", pddl::to_string(check.atom)}, {"holds", check.holds}});
    entry["checks"] = std::move(checks);
    entry["applied"] = step.applied;
    nlohmann::json effects = nlohmann::json::array();
    for (const auto& literal : step.effects) effects.push_back(pddl::to_string(literal));
    entry["effects"] = std::move(effects);
    entry["before"] = state_json(step.before);
    if (step.applied) entry["after"] = state_json(step.after);
    steps.push_back(std::move(entry));
  }
  out["trace"] = std::move(steps);
  out["final_state"] = state_json(validation.final_state);
  return out;
}

}  // namespace plancritic::semantics
