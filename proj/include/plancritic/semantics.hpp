#pragma once

// Ground-truth STRIPS transition semantics and plan validation.

#include <cstddef>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "plancritic/pddl.hpp"

namespace plancritic::semantics {

using pddl::Atom;
using pddl::DomainDef;
using pddl::GroundAction;
using pddl::Literal;
using pddl::Plan;
using pddl::ProblemDef;

using State = std::set<Atom>;

State initial_state(const ProblemDef& problem);

enum class ActionErrorKind { UnknownAction, ArityMismatch, InapplicableAction };

class ActionError : public std::runtime_error {
 public:
  ActionError(ActionErrorKind kind, std::string message, std::vector<Atom> unmet = {});

  ActionErrorKind kind() const noexcept { return kind_; }
  const std::vector<Atom>& unmet() const noexcept { return unmet_; }

 private:
  ActionErrorKind kind_;
  std::vector<Atom> unmet_;
};

struct Applicability {
  bool applicable = false;
  /// Unmet precondition atoms in schema order; empty iff applicable.
  std::vector<Atom> unmet;
};

/// Throws ActionError (UnknownAction / ArityMismatch) for malformed actions.
Applicability is_applicable(const State& state, const GroundAction& action, const DomainDef& domain);

/// Deletes, then adds. Throws ActionError(InapplicableAction) carrying the
/// unmet literals when preconditions do not hold.
State apply(const State& state, const GroundAction& action, const DomainDef& domain);

/// Instantiated effect literals in schema order.
std::vector<Literal> ground_effects(const GroundAction& action, const DomainDef& domain);
std::vector<Atom> ground_preconditions(const GroundAction& action, const DomainDef& domain);

struct GoalCheck {
  bool satisfied = false;
  std::vector<Atom> unsatisfied;
};

GoalCheck goal_satisfied(const State& state, const ProblemDef& problem);

struct PlanVerdict {
  enum class Kind { Correct, WrongAtStep, GoalNotReached };

  Kind kind = Kind::Correct;
  /// 1-based index of the first inapplicable step (WrongAtStep only).
  std::size_t step = 0;
  /// Unmet preconditions of the failing step (WrongAtStep only).
  std::vector<Atom> unmet;
  /// Goal atoms missing from the final state (GoalNotReached only).
  std::vector<Atom> unsatisfied;

  static PlanVerdict correct() { return {}; }
  static PlanVerdict wrong_at_step(std::size_t step, std::vector<Atom> unmet);
  static PlanVerdict goal_not_reached(std::vector<Atom> unsatisfied);

  bool is_correct() const { return kind == Kind::Correct; }
  friend bool operator==(const PlanVerdict&, const PlanVerdict&) = default;
};

struct PreconditionCheck {
  Atom atom;
  bool holds = false;
};

struct TraceStep {
  std::size_t index = 0;  // 1-based
  GroundAction action;
  std::vector<PreconditionCheck> checks;
  bool applied = false;
  std::vector<Literal> effects;
  State before;
  State after;  // empty when not applied
};

struct Validation {
  PlanVerdict verdict;
  /// Executed prefix; when the verdict is WrongAtStep the last entry is the
  /// failing step with `applied == false`.
  std::vector<TraceStep> trace;
  State final_state;
};

Validation validate_plan(const ProblemDef& problem, const Plan& plan, const DomainDef& domain);

/// "the plan is correct" / "the plan is wrong" / "goal not reached".
std::string verdict_phrase(const PlanVerdict& verdict);
std::string verdict_kind_name(PlanVerdict::Kind kind);

/// Single-line machine-readable detail, e.g. "wrong at step 9: (pick-up b2) unmet (clear b2)".
std::string describe(const PlanVerdict& verdict, const Plan& plan);

/// Step-by-step verification text in the precondition / resulting-state
/// layout, ending with the verdict phrase.
std::string render_trace(const Validation& validation, const Plan& plan, const DomainDef& domain);

nlohmann::json to_json(const PlanVerdict& verdict);
nlohmann::json to_json(const Validation& validation);

}  // namespace plancritic::semantics
