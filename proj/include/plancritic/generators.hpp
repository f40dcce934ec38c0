#pragma once

// Seeded benchmark instance generation and consistent renaming (Mystery
// obfuscation).
//
// Mini-Grid encoding. The world is a grid of rooms, each `room_size` x
// `room_size` cells. Cells `cell-R-C` inside one room are joined by static
// `(adjacent ?a ?b)` facts in both directions. Neighbouring rooms on a random
// spanning tree share one door `door-N`, described by static
// `(door-link ?d ?from ?to)` (both directions) and `(door-side ?d ?cell)`
// facts. A door is either `(unlocked ?d)` or `(locked ?d)`; every locked door
// has exactly one key `key-N` with `(key-for ?k ?d)` lying on a cell
// `(key-at ?k ?c)`. The robot is at one cell `(at-robot ?c)` and carries at
// most one key (`(arm-empty)` / `(holding ?k)`). Actions:
//   move   (?from ?to)      along `adjacent`
//   pass   (?from ?to ?d)   through an unlocked door
//   pickup (?c ?k)          take the key lying on the robot's cell
//   drop   (?c ?k)          put the carried key down
//   unlock (?c ?d ?k)       from a cell beside the door, with its key
// The goal is `(at-robot <target>)`. Each locked door's key is placed in a
// room reachable from the start through unlocked doors and doors whose keys
// were placed earlier, so every instance is solvable.

#include <cstddef>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "plancritic/pddl.hpp"

namespace plancritic::gen {

enum class Benchmark { Blocksworld, Logistics, Minigrid };

std::string to_string(Benchmark benchmark);
Benchmark parse_benchmark(const std::string& name);

struct BlocksworldSize {
  int blocks = 4;
};

struct LogisticsSize {
  int cities = 2;
  int places_per_city = 2;
  int packages = 2;
  int trucks = 2;
  int airplanes = 1;

  /// Up to four places and two packages.
  static LogisticsSize easy() { return {2, 2, 2, 2, 1}; }
  /// Four cities, two places per city, eight packages.
  static LogisticsSize hard() { return {4, 2, 8, 4, 1}; }
};

struct MinigridSize {
  int room_rows = 2;
  int room_cols = 2;
  int room_size = 2;
  int keys = 1;

  static MinigridSize easy() { return {2, 2, 2, 1}; }
  static MinigridSize hard() { return {3, 3, 2, 3}; }
};

struct GenSpec {
  Benchmark benchmark = Benchmark::Blocksworld;
  BlocksworldSize blocksworld;
  LogisticsSize logistics;
  MinigridSize minigrid;
  std::uint64_t seed = 0;
  std::size_t count = 1;
};

class InvalidSpec : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

void validate_spec(const GenSpec& spec);

const pddl::DomainDef& blocksworld_domain();
const pddl::DomainDef& logistics_domain();
const pddl::DomainDef& minigrid_domain();
const pddl::DomainDef& domain_for(Benchmark benchmark);

/// Instance `index` of a spec; a pure function of (size, seed, index).
pddl::ProblemDef blocksworld_instance(const BlocksworldSize& size, std::uint64_t seed, std::size_t index);
pddl::ProblemDef logistics_instance(const LogisticsSize& size, std::uint64_t seed, std::size_t index);
pddl::ProblemDef minigrid_instance(const MinigridSize& size, std::uint64_t seed, std::size_t index);

std::vector<pddl::ProblemDef> gen_blocksworld(const GenSpec& spec);
std::vector<pddl::ProblemDef> gen_logistics(const GenSpec& spec);
std::vector<pddl::ProblemDef> gen_minigrid(const GenSpec& spec);
std::vector<pddl::ProblemDef> generate(const GenSpec& spec);

/// Stable identifier of instance `index`, e.g. "blocksworld-b5-s7-0002".
std::string instance_id(const GenSpec& spec, std::size_t index);

nlohmann::json spec_to_json(const GenSpec& spec);

// ---------------------------------------------------------------------------
// Obfuscation
// ---------------------------------------------------------------------------

enum class ObfuscationMode { Identity, Deceptive, Nonspecific };

std::string to_string(ObfuscationMode mode);
ObfuscationMode parse_obfuscation_mode(const std::string& name);

/// Renames per namespace. Predicates and actions must be covered in full;
/// objects missing from `objects` keep their names.
struct ObfuscationMap {
  ObfuscationMode mode = ObfuscationMode::Identity;
  /// Name of the renamed domain; empty keeps the original.
  std::string domain_name;
  /// Original domain name, needed to invert `domain_name`.
  std::string source_domain_name;
  std::map<std::string, std::string> predicates;
  std::map<std::string, std::string> actions;
  std::map<std::string, std::string> objects;

  ObfuscationMap inverse() const;

  nlohmann::json to_json() const;
  static ObfuscationMap from_json(const nlohmann::json& json);
};

enum class ObfuscationErrorKind { IncompleteMap, CollidingMap };

class ObfuscationError : public std::runtime_error {
 public:
  ObfuscationError(ObfuscationErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}
  ObfuscationErrorKind kind() const noexcept { return kind_; }

 private:
  ObfuscationErrorKind kind_;
};

/// Identity: every name maps to itself. Deceptive: the Mystery Blocksworld
/// vocabulary (blocksworld-4ops only). Nonspecific: predicate-N / action-N,
/// and object-N when `rename_objects` is set.
ObfuscationMap make_map(const pddl::DomainDef& domain, ObfuscationMode mode,
                        const std::vector<pddl::ProblemDef>& problems = {}, bool rename_objects = false);

struct Obfuscated {
  pddl::DomainDef domain;
  std::vector<pddl::ProblemDef> problems;
  std::vector<pddl::Plan> plans;
};

Obfuscated obfuscate(const pddl::DomainDef& domain, const std::vector<pddl::ProblemDef>& problems,
                     const std::vector<pddl::Plan>& plans, const ObfuscationMap& map);

}  // namespace plancritic::gen
