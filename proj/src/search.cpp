#include "plancritic/search.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>

namespace plancritic::search {

namespace {

using AtomId = std::uint32_t;
using StateKey = std::vector<AtomId>;  // sorted, unique

struct StateKeyHash {
  std::size_t operator()(const StateKey& key) const noexcept {
    std::uint64_t h = 1469598103934665603ULL;
    for (AtomId id : key) {
      h ^= id + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

struct Operator {
  std::vector<AtomId> pre;
  std::vector<AtomId> add;
  std::vector<AtomId> del;
};

class Encoder {
 public:
  AtomId intern(const std::string& predicate, const std::vector<std::string>& args) {
    std::string key = predicate;
    for (const auto& arg : args) {
      key += ' ';
      key += arg;
    }
    auto [it, inserted] = ids_.try_emplace(std::move(key), static_cast<AtomId>(ids_.size()));
    return it->second;
  }

  StateKey encode(const std::vector<pddl::Atom>& atoms) {
    StateKey out;
    for (const auto& atom : atoms) out.push_back(intern(atom.predicate, atom.args));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  // Binds schema variables by position without going through pddl::substitute.
  Operator ground(const pddl::ActionSchema& schema, const std::vector<std::string>& args) {
    auto bind = [&](const pddl::Atom& atom) {
      std::vector<std::string> bound;
      bound.reserve(atom.args.size());
      for (const auto& var : atom.args) {
        std::size_t slot = 0;
        while (slot < schema.parameters.size() && schema.parameters[slot] != var) ++slot;
        bound.push_back(args.at(slot));
      }
      return intern(atom.predicate, bound);
    };
    Operator op;
    for (const auto& atom : schema.precondition) op.pre.push_back(bind(atom));
    for (const auto& literal : schema.effect) (literal.negated ? op.del : op.add).push_back(bind(literal.atom));
    return op;
  }

 private:
  std::unordered_map<std::string, AtomId> ids_;
};

bool holds_all(const StateKey& state, const std::vector<AtomId>& atoms) {
  return std::all_of(atoms.begin(), atoms.end(),
                     [&](AtomId id) { return std::binary_search(state.begin(), state.end(), id); });
}

StateKey successor(const StateKey& state, const Operator& op) {
  StateKey next;
  next.reserve(state.size() + op.add.size());
  for (AtomId id : state)
    if (std::find(op.del.begin(), op.del.end(), id) == op.del.end()) next.push_back(id);
  next.insert(next.end(), op.add.begin(), op.add.end());
  std::sort(next.begin(), next.end());
  next.erase(std::unique(next.begin(), next.end()), next.end());
  return next;
}

template <typename Fn>
void for_each_binding(std::size_t arity, const std::vector<std::string>& objects, bool distinct, Fn&& fn) {
  if (arity > 0 && objects.empty()) return;
  std::vector<std::size_t> index(arity, 0);
  std::vector<std::string> args(arity);
  while (true) {
    bool ok = true;
    if (distinct) {
      for (std::size_t i = 0; i < arity && ok; ++i)
        for (std::size_t j = i + 1; j < arity && ok; ++j)
          if (index[i] == index[j]) ok = false;
    }
    if (ok) {
      for (std::size_t i = 0; i < arity; ++i) args[i] = objects[index[i]];
      fn(args);
    }
    std::size_t pos = arity;
    while (pos > 0) {
      --pos;
      if (++index[pos] < objects.size()) break;
      index[pos] = 0;
      if (pos == 0) return;
    }
    if (arity == 0) return;
  }
}

}  // namespace

std::vector<GroundAction> ground_actions(const DomainDef& domain, const ProblemDef& problem,
                                         GroundingOptions options) {
  std::vector<GroundAction> out;
  for (const auto& schema : domain.actions) {
    for_each_binding(schema.parameters.size(), problem.objects, options.distinct_arguments,
                     [&](const std::vector<std::string>& args) { out.push_back(GroundAction{schema.name, args}); });
  }
  return out;
}

void check_limits(const SearchLimits& limits) {
  if (limits.max_states == 0 || limits.max_plan_length == 0)
    throw std::invalid_argument("search limits must be strictly positive");
}

SearchResult bfs_plan(const DomainDef& domain, const ProblemDef& problem, const SearchLimits& limits,
                      GroundingOptions options) {
  check_limits(limits);
  Encoder encoder;
  const StateKey init = encoder.encode(problem.init);
  const StateKey goal = encoder.encode(problem.goal);

  // Predicates no action ever changes are static; actions needing a static
  // atom absent from init can never fire.
  std::unordered_set<std::string> fluent;
  for (const auto& schema : domain.actions)
    for (const auto& literal : schema.effect) fluent.insert(literal.atom.predicate);
  std::unordered_set<std::string> init_atoms;
  for (const auto& atom : problem.init) init_atoms.insert(pddl::to_string(atom));

  std::vector<GroundAction> actions;
  std::vector<Operator> operators;
  for (const auto& schema : domain.actions) {
    for_each_binding(schema.parameters.size(), problem.objects, options.distinct_arguments,
                     [&](const std::vector<std::string>& args) {
                       for (const auto& atom : schema.precondition) {
                         if (fluent.count(atom.predicate)) continue;
                         if (!init_atoms.count(pddl::to_string(pddl::substitute(atom, schema.parameters, args))))
                           return;
                       }
                       actions.push_back(GroundAction{schema.name, args});
                       operators.push_back(encoder.ground(schema, args));
                     });
  }

  SearchResult result;
  if (holds_all(init, goal)) {
    result.status = SearchResult::Status::Found;
    return result;
  }

  struct Node {
    StateKey state;
    std::size_t parent;
    std::size_t action;
    std::size_t depth;
  };
  std::vector<Node> nodes;
  std::unordered_set<StateKey, StateKeyHash> visited;
  std::deque<std::size_t> frontier;
  nodes.push_back({init, 0, 0, 0});
  visited.insert(init);
  frontier.push_back(0);
  bool truncated = false;

  while (!frontier.empty()) {
    if (result.expanded >= limits.max_states) {
      result.status = SearchResult::Status::LimitExceeded;
      return result;
    }
    std::size_t current = frontier.front();
    frontier.pop_front();
    ++result.expanded;
    if (nodes[current].depth >= limits.max_plan_length) {
      truncated = true;
      continue;
    }
    for (std::size_t a = 0; a < operators.size(); ++a) {
      if (!holds_all(nodes[current].state, operators[a].pre)) continue;
      StateKey next = successor(nodes[current].state, operators[a]);
      if (!visited.insert(next).second) continue;
      nodes.push_back({std::move(next), current, a, nodes[current].depth + 1});
      std::size_t id = nodes.size() - 1;
      if (holds_all(nodes[id].state, goal)) {
        std::vector<GroundAction> steps;
        for (std::size_t n = id; n != 0; n = nodes[n].parent) steps.push_back(actions[nodes[n].action]);
        std::reverse(steps.begin(), steps.end());
        result.plan.steps = std::move(steps);
        result.status = SearchResult::Status::Found;
        return result;
      }
      frontier.push_back(id);
    }
  }
  result.status = truncated ? SearchResult::Status::LimitExceeded : SearchResult::Status::NoPlanFound;
  return result;
}

Execution execute(const DomainDef& domain, const ProblemDef& problem, const Plan& plan) {
  Encoder encoder;
  StateKey state = encoder.encode(problem.init);
  const StateKey goal = encoder.encode(problem.goal);
  Execution out;
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const GroundAction& step = plan.steps[i];
    const pddl::ActionSchema* schema = domain.find_action(step.name);
    bool known_objects = std::all_of(step.args.begin(), step.args.end(), [&](const std::string& arg) {
      return std::find(problem.objects.begin(), problem.objects.end(), arg) != problem.objects.end();
    });
    if (!schema || schema->parameters.size() != step.args.size() || !known_objects) {
      out.failing_step = i + 1;
      return out;
    }
    Operator op = encoder.ground(*schema, step.args);
    if (!holds_all(state, op.pre)) {
      out.failing_step = i + 1;
      return out;
    }
    state = successor(state, op);
  }
  out.goal_reached = holds_all(state, goal);
  out.correct = out.goal_reached;
  return out;
}

}  // namespace plancritic::search
