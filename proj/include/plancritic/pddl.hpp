#pragma once

// Abstract syntax, parser and canonical printer for the `:strips` subset of
// PDDL: untyped parameters, conjunctive positive preconditions, conjunctive
// add/delete effects, object lists, ground init and positive ground goals.

#include <compare>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace plancritic::pddl {

enum class ErrorKind {
  Syntax,
  UnsupportedFeature,
  ArityMismatch,
  UnknownPredicate,
  UnknownObject,
  UnknownAction,
  UndeclaredVariable,
  DuplicateName,
  ContradictoryEffect,
  NegatedGoal,
};

std::string_view to_string(ErrorKind kind);

/// Raised by every parser entry point. Line and column are 1-based and point
/// at the offending token (0 when no position applies).
class ParseError : public std::runtime_error {
 public:
  ParseError(ErrorKind kind, std::string message, std::size_t line, std::size_t column);

  ErrorKind kind() const noexcept { return kind_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  ErrorKind kind_;
  std::size_t line_;
  std::size_t column_;
};

/// A predicate applied to arguments. In schemas the arguments are `?variables`,
/// in problems, states and plans they are object names.
struct Atom {
  std::string predicate;
  std::vector<std::string> args;

  friend auto operator<=>(const Atom&, const Atom&) = default;
  friend bool operator==(const Atom&, const Atom&) = default;
};

struct Literal {
  Atom atom;
  bool negated = false;

  friend bool operator==(const Literal&, const Literal&) = default;
};

struct PredicateDecl {
  std::string name;
  std::vector<std::string> params;

  std::size_t arity() const { return params.size(); }
  friend bool operator==(const PredicateDecl&, const PredicateDecl&) = default;
};

struct ActionSchema {
  std::string name;
  std::vector<std::string> parameters;
  std::vector<Atom> precondition;
  std::vector<Literal> effect;

  friend bool operator==(const ActionSchema&, const ActionSchema&) = default;
};

struct DomainDef {
  std::string name;
  std::vector<std::string> requirements;
  std::vector<PredicateDecl> predicates;
  std::vector<ActionSchema> actions;

  const ActionSchema* find_action(std::string_view action_name) const;
  const PredicateDecl* find_predicate(std::string_view predicate_name) const;

  friend bool operator==(const DomainDef&, const DomainDef&) = default;
};

/// `init` is a set kept in first-declaration order so printing is stable.
struct ProblemDef {
  std::string name;
  std::string domain_name;
  std::vector<std::string> objects;
  std::vector<Atom> init;
  std::vector<Atom> goal;

  friend bool operator==(const ProblemDef&, const ProblemDef&) = default;
};

struct GroundAction {
  std::string name;
  std::vector<std::string> args;

  friend auto operator<=>(const GroundAction&, const GroundAction&) = default;
  friend bool operator==(const GroundAction&, const GroundAction&) = default;
};

struct Plan {
  std::vector<GroundAction> steps;

  std::size_t size() const { return steps.size(); }
  bool empty() const { return steps.empty(); }
  friend bool operator==(const Plan&, const Plan&) = default;
};

DomainDef parse_domain(std::string_view text);
ProblemDef parse_problem(std::string_view text, const DomainDef& domain);

/// One parenthesized ground action per non-empty line; `;` starts a comment.
Plan parse_plan(std::string_view text, const DomainDef& domain);

std::string print_domain(const DomainDef& domain);
std::string print_problem(const ProblemDef& problem);
std::string print_plan(const Plan& plan);

std::string to_string(const Atom& atom);
std::string to_string(const Literal& literal);
std::string to_string(const GroundAction& action);

/// Replaces schema variables by the positionally matching arguments.
Atom substitute(const Atom& atom, const std::vector<std::string>& params,
                const std::vector<std::string>& args);

/// Checks a value built in code (not parsed) against the type invariants and
/// throws ParseError with position 0:0 on violation.
void check_domain(const DomainDef& domain);
void check_problem(const ProblemDef& problem, const DomainDef& domain);

}  // namespace plancritic::pddl
