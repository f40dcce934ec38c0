#include <algorithm>

#include "doctest.h"
#include "plancritic/pddl.hpp"
#include "test_helpers.hpp"

using namespace plancritic;
using plancritic::testing::read_data;

namespace {

std::vector<std::string> action_names(const pddl::DomainDef& domain) {
  std::vector<std::string> names;
  for (const auto& action : domain.actions) names.push_back(action.name);
  return names;
}

pddl::ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const pddl::ParseError& error) {
    return error.kind();
  }
  FAIL("expected a ParseError");
  return pddl::ErrorKind::Syntax;
}

}  // namespace

TEST_CASE("reference blocksworld domain parses") {
  const auto& domain = testing::blocksworld();
  CHECK(domain.name == "blocksworld-4ops");
  CHECK(domain.requirements == std::vector<std::string>{":strips"});
  CHECK(domain.predicates.size() == 5);
  CHECK(action_names(domain) == std::vector<std::string>{"pick-up", "put-down", "stack", "unstack"});

  const auto* unstack = domain.find_action("unstack");
  REQUIRE(unstack);
  CHECK(unstack->parameters == std::vector<std::string>{"?ob", "?underob"});
  CHECK(unstack->precondition.size() == 3);
  CHECK(unstack->effect.size() == 5);
  CHECK(unstack->effect[2] == pddl::Literal{testing::atom("on", {"?ob", "?underob"}), true});

  const auto* put_down = domain.find_action("put-down");
  REQUIRE(put_down);
  CHECK(put_down->precondition == std::vector<pddl::Atom>{testing::atom("holding", {"?ob"})});
}

TEST_CASE("reference mystery domain parses") {
  const auto& domain = testing::mystery();
  CHECK(domain.name == "mystery-4ops");
  CHECK(action_names(domain) == std::vector<std::string>{"attack", "succumb", "overcome", "feast"});
  REQUIRE(domain.find_predicate("craves"));
  CHECK(domain.find_predicate("craves")->arity() == 2);
}

TEST_CASE("out-of-subset domains are rejected") {
  CHECK(kind_of([] { pddl::parse_domain("(define (domain d) (:requirements :adl))"); }) ==
        pddl::ErrorKind::UnsupportedFeature);
  CHECK(kind_of([] { pddl::parse_domain("(define (domain d) (:requirements :strips :typing))"); }) ==
        pddl::ErrorKind::UnsupportedFeature);
  CHECK(kind_of([] { pddl::parse_domain("(define (domain d) (:types block))"); }) ==
        pddl::ErrorKind::UnsupportedFeature);
  CHECK(kind_of([] {
          pddl::parse_domain(
              "(define (domain d) (:predicates (p ?x)) (:action a :parameters (?x - block) :effect (p ?x)))");
        }) == pddl::ErrorKind::UnsupportedFeature);
  CHECK(kind_of([] {
          pddl::parse_domain(
              "(define (domain d) (:predicates (p ?x)) (:action a :parameters (?x) :precondition (not (p ?x)) "
              ":effect (p ?x)))");
        }) == pddl::ErrorKind::UnsupportedFeature);
  CHECK(kind_of([] {
          pddl::parse_domain(
              "(define (domain d) (:predicates (p ?x)) (:action a :parameters (?x) :precondition (or (p ?x)) "
              ":effect (p ?x)))");
        }) == pddl::ErrorKind::UnsupportedFeature);
}

TEST_CASE("domain invariants are enforced") {
  SUBCASE("arity mismatch") {
    CHECK(kind_of([] {
            pddl::parse_domain("(define (domain d) (:predicates (p ?x)) (:action a :parameters (?x) :effect (p ?x ?x)))");
          }) == pddl::ErrorKind::ArityMismatch);
  }
  SUBCASE("unknown predicate") {
    CHECK(kind_of([] {
            pddl::parse_domain("(define (domain d) (:predicates (p ?x)) (:action a :parameters (?x) :effect (q ?x)))");
          }) == pddl::ErrorKind::UnknownPredicate);
  }
  SUBCASE("undeclared variable") {
    CHECK(kind_of([] {
            pddl::parse_domain("(define (domain d) (:predicates (p ?x)) (:action a :parameters (?x) :effect (p ?y)))");
          }) == pddl::ErrorKind::UndeclaredVariable);
  }
  SUBCASE("duplicate action") {
    CHECK(kind_of([] {
            pddl::parse_domain(
                "(define (domain d) (:predicates (p ?x)) (:action a :parameters (?x) :effect (p ?x)) "
                "(:action a :parameters (?x) :effect (p ?x)))");
          }) == pddl::ErrorKind::DuplicateName);
  }
  SUBCASE("contradictory effect") {
    CHECK(kind_of([] {
            pddl::parse_domain(
                "(define (domain d) (:predicates (p ?x)) (:action a :parameters (?x) :effect (and (p ?x) (not (p ?x)))))");
          }) == pddl::ErrorKind::ContradictoryEffect);
  }
}

TEST_CASE("syntax errors report line and column") {
  try {
    pddl::parse_domain("(define (domain d)\n  (:predicates (p ?x)\n");
    FAIL("expected failure");
  } catch (const pddl::ParseError& error) {
    CHECK(error.kind() == pddl::ErrorKind::Syntax);
    CHECK(error.line() == 2);
    CHECK(error.column() == 3);
  }
  try {
    pddl::parse_domain("(define (domain d))\n)");
    FAIL("expected failure");
  } catch (const pddl::ParseError& error) {
    CHECK(error.line() == 2);
    CHECK(error.column() == 1);
  }
}

TEST_CASE("keywords are case-insensitive, identifiers case-preserving") {
  auto domain = pddl::parse_domain(
      "(DEFINE (DOMAIN Dom) (:REQUIREMENTS :STRIPS) (:Predicates (On ?x)) ; comment\n"
      "(:ACTION Go :PARAMETERS (?x) :PRECONDITION (AND) :EFFECT (AND (On ?x))))");
  CHECK(domain.name == "Dom");
  CHECK(domain.requirements == std::vector<std::string>{":strips"});
  CHECK(domain.actions.at(0).name == "Go");
  CHECK(domain.actions.at(0).precondition.empty());
  CHECK(domain.predicates.at(0).name == "On");
}

TEST_CASE("BW-rand-5 problem parses") {
  auto problem = testing::bw_rand_5_problem();
  CHECK(problem.name == "BW-rand-5");
  CHECK(problem.domain_name == "blocksworld-4ops");
  CHECK(problem.objects.size() == 5);
  CHECK(problem.init.size() == 8);
  CHECK(problem.goal.size() == 3);
  CHECK(std::find(problem.init.begin(), problem.init.end(), testing::atom("on", {"b5", "b2"})) != problem.init.end());
}

TEST_CASE("problem validation errors") {
  const auto& domain = testing::blocksworld();
  CHECK(kind_of([&] {
          pddl::parse_problem(
              "(define (problem p) (:domain blocksworld-4ops) (:objects a) (:init (clear z)) (:goal (and)))", domain);
        }) == pddl::ErrorKind::UnknownObject);
  CHECK(kind_of([&] {
          pddl::parse_problem(
              "(define (problem p) (:domain blocksworld-4ops) (:objects a) (:init (glued a)) (:goal (and)))", domain);
        }) == pddl::ErrorKind::UnknownPredicate);
  CHECK(kind_of([&] {
          pddl::parse_problem(
              "(define (problem p) (:domain blocksworld-4ops) (:objects a) (:init (on a)) (:goal (and)))", domain);
        }) == pddl::ErrorKind::ArityMismatch);
  CHECK(kind_of([&] {
          pddl::parse_problem(
              "(define (problem p) (:domain blocksworld-4ops) (:objects a) (:init) (:goal (not (clear a))))", domain);
        }) == pddl::ErrorKind::NegatedGoal);
}

TEST_CASE("empty goal conjunction is allowed") {
  auto problem = pddl::parse_problem(
      "(define (problem p) (:domain blocksworld-4ops) (:objects a) (:init (clear a)) (:goal (and)))",
      testing::blocksworld());
  CHECK(problem.goal.empty());
}

TEST_CASE("goal layout with (and on its own line) parses") {
  auto problem = pddl::parse_problem(read_data("my-rand-4.pddl"), testing::mystery());
  CHECK(problem.objects == std::vector<std::string>{"b1", "b2", "b3", "b4"});
  CHECK(problem.goal.size() == 3);
}

TEST_CASE("plan parsing") {
  const auto& domain = testing::blocksworld();
  auto plan = pddl::parse_plan("(unstack b3 b4)\n(stack b3 b2)", domain);
  REQUIRE(plan.size() == 2);
  CHECK(plan.steps[0] == pddl::GroundAction{"unstack", {"b3", "b4"}});

  CHECK(pddl::parse_plan("", domain).empty());
  CHECK(pddl::parse_plan("\n  \n", domain).empty());
  CHECK(pddl::parse_plan("  (pick-up b1)  ; cost 1\n\n(put-down b1)\n", domain).size() == 2);

  CHECK(kind_of([&] { pddl::parse_plan("(fly b1)", domain); }) == pddl::ErrorKind::UnknownAction);
  CHECK(kind_of([&] { pddl::parse_plan("(stack b1)", domain); }) == pddl::ErrorKind::ArityMismatch);
  CHECK(kind_of([&] { pddl::parse_plan("pick-up b1", domain); }) == pddl::ErrorKind::Syntax);
  CHECK(kind_of([&] { pddl::parse_plan("(pick-up b1) (pick-up b2)", domain); }) == pddl::ErrorKind::Syntax);

  try {
    pddl::parse_plan("(pick-up b1)\n\n   (fly b1)", domain);
    FAIL("expected failure");
  } catch (const pddl::ParseError& error) {
    CHECK(error.line() == 3);
    CHECK(error.column() == 4);
  }
}

TEST_CASE("printing round-trips") {
  const auto& domain = testing::blocksworld();
  CHECK(pddl::parse_domain(pddl::print_domain(domain)) == domain);
  CHECK(pddl::parse_domain(pddl::print_domain(testing::mystery())) == testing::mystery());

  auto reparsed = pddl::parse_domain(pddl::print_domain(testing::mystery()));
  CHECK(reparsed.predicates.size() == 5);
  CHECK(reparsed.find_predicate("craves"));

  auto problem = testing::bw_rand_5_problem();
  CHECK(pddl::parse_problem(pddl::print_problem(problem), domain) == problem);
  // The BW-rand-5 problem is already in canonical layout.
  CHECK(pddl::print_problem(problem) == read_data("bw-rand-5.pddl"));

  auto plan = testing::plan_file("bw-rand-5-plan1.plan");
  CHECK(pddl::print_plan(plan) == read_data("bw-rand-5-plan1.plan"));
  CHECK(pddl::parse_plan(pddl::print_plan(plan), domain) == plan);
  CHECK(pddl::print_plan(pddl::Plan{}).empty());
}

TEST_CASE("canonical domain text") {
  const std::string expected =
      "(define (domain blocksworld-4ops)\n"
      "  (:requirements :strips)\n"
      "  (:predicates (clear ?x) (ontable ?x) (handempty) (holding ?x) (on ?x ?y))\n"
      "\n"
      "  (:action pick-up\n"
      "    :parameters (?ob)\n"
      "    :precondition (and (clear ?ob) (ontable ?ob) (handempty))\n"
      "    :effect (and (holding ?ob) (not (clear ?ob)) (not (ontable ?ob)) (not (handempty))))\n"
      "\n"
      "  (:action put-down\n"
      "    :parameters (?ob)\n"
      "    :precondition (holding ?ob)\n"
      "    :effect (and (clear ?ob) (handempty) (ontable ?ob) (not (holding ?ob))))\n"
      "\n"
      "  (:action stack\n"
      "    :parameters (?ob ?underob)\n"
      "    :precondition (and (clear ?underob) (holding ?ob))\n"
      "    :effect (and (handempty) (clear ?ob) (on ?ob ?underob) (not (clear ?underob)) (not (holding ?ob))))\n"
      "\n"
      "  (:action unstack\n"
      "    :parameters (?ob ?underob)\n"
      "    :precondition (and (on ?ob ?underob) (clear ?ob) (handempty))\n"
      "    :effect (and (holding ?ob) (clear ?underob) (not (on ?ob ?underob)) (not (clear ?ob)) (not (handempty))))\n"
      ")\n";
  CHECK(pddl::print_domain(testing::blocksworld()) == expected);
}

TEST_CASE("check_domain rejects hand-built invalid values") {
  pddl::DomainDef domain = testing::blocksworld();
  domain.actions[0].precondition.push_back(testing::atom("glued", {"?ob"}));
  CHECK_THROWS_AS(pddl::check_domain(domain), pddl::ParseError);
  CHECK_NOTHROW(pddl::check_domain(testing::blocksworld()));
}
