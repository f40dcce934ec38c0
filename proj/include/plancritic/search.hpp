#pragma once

// Brute-force breadth-first planner over the grounded state space. It carries
// its own integer-encoded transition function so it can serve as an oracle
// for the validator in `semantics`.

#include <cstddef>
#include <optional>
#include <vector>

#include "plancritic/pddl.hpp"

namespace plancritic::search {

using pddl::DomainDef;
using pddl::GroundAction;
using pddl::Plan;
using pddl::ProblemDef;

struct GroundingOptions {
  /// Skip substitutions that bind one object to two parameters.
  bool distinct_arguments = true;
};

/// All substitutions of schema parameters by declared objects, schemas in
/// declaration order and arguments in odometer order over `problem.objects`.
std::vector<GroundAction> ground_actions(const DomainDef& domain, const ProblemDef& problem,
                                         GroundingOptions options = {});

struct SearchLimits {
  std::size_t max_states = 1'000'000;
  std::size_t max_plan_length = 64;
};

/// Throws std::invalid_argument unless both limits are strictly positive.
void check_limits(const SearchLimits& limits);

struct SearchResult {
  enum class Status { Found, NoPlanFound, LimitExceeded };

  Status status = Status::NoPlanFound;
  Plan plan;
  std::size_t expanded = 0;

  bool found() const { return status == Status::Found; }
};

/// Shortest plan; among equally short plans, the one whose action sequence is
/// smallest in canonical ground-action order.
SearchResult bfs_plan(const DomainDef& domain, const ProblemDef& problem, const SearchLimits& limits = {},
                      GroundingOptions options = {});

struct Execution {
  bool correct = false;
  /// 1-based index of the first inapplicable step, if any.
  std::optional<std::size_t> failing_step;
  bool goal_reached = false;
};

/// Replays a plan on the integer encoding. Steps over objects outside the
/// problem are inapplicable.
Execution execute(const DomainDef& domain, const ProblemDef& problem, const Plan& plan);

}  // namespace plancritic::search
