#include "plancritic/generators.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "plancritic/rng.hpp"

namespace plancritic::gen {

namespace {

constexpr std::string_view kBlocksworldDomain = R"(
(define (domain blocksworld-4ops)
  (:requirements :strips)
  (:predicates (clear ?x) (ontable ?x) (handempty) (holding ?x) (on ?x ?y))
  (:action pick-up
    :parameters (?ob)
    :precondition (and (clear ?ob) (ontable ?ob) (handempty))
    :effect (and (holding ?ob) (not (clear ?ob)) (not (ontable ?ob)) (not (handempty))))
  (:action put-down
    :parameters (?ob)
    :precondition (holding ?ob)
    :effect (and (clear ?ob) (handempty) (ontable ?ob) (not (holding ?ob))))
  (:action stack
    :parameters (?ob ?underob)
    :precondition (and (clear ?underob) (holding ?ob))
    :effect (and (handempty) (clear ?ob) (on ?ob ?underob) (not (clear ?underob)) (not (holding ?ob))))
  (:action unstack
    :parameters (?ob ?underob)
    :precondition (and (on ?ob ?underob) (clear ?ob) (handempty))
    :effect (and (holding ?ob) (clear ?underob) (not (on ?ob ?underob)) (not (clear ?ob)) (not (handempty)))))
)";

constexpr std::string_view kLogisticsDomain = R"(
(define (domain logistics-strips)
  (:requirements :strips)
  (:predicates (package ?p) (truck ?t) (airplane ?a) (location ?l) (airport ?l) (city ?c)
               (in-city ?l ?c) (at ?x ?l) (in ?p ?v))
  (:action load-truck
    :parameters (?p ?t ?l)
    :precondition (and (package ?p) (truck ?t) (location ?l) (at ?t ?l) (at ?p ?l))
    :effect (and (not (at ?p ?l)) (in ?p ?t)))
  (:action load-airplane
    :parameters (?p ?a ?l)
    :precondition (and (package ?p) (airplane ?a) (location ?l) (at ?p ?l) (at ?a ?l))
    :effect (and (not (at ?p ?l)) (in ?p ?a)))
  (:action unload-truck
    :parameters (?p ?t ?l)
    :precondition (and (package ?p) (truck ?t) (location ?l) (at ?t ?l) (in ?p ?t))
    :effect (and (not (in ?p ?t)) (at ?p ?l)))
  (:action unload-airplane
    :parameters (?p ?a ?l)
    :precondition (and (package ?p) (airplane ?a) (location ?l) (in ?p ?a) (at ?a ?l))
    :effect (and (not (in ?p ?a)) (at ?p ?l)))
  (:action drive-truck
    :parameters (?t ?from ?to ?c)
    :precondition (and (truck ?t) (location ?from) (location ?to) (city ?c) (at ?t ?from)
                       (in-city ?from ?c) (in-city ?to ?c))
    :effect (and (not (at ?t ?from)) (at ?t ?to)))
  (:action fly-airplane
    :parameters (?a ?from ?to)
    :precondition (and (airplane ?a) (airport ?from) (airport ?to) (at ?a ?from))
    :effect (and (not (at ?a ?from)) (at ?a ?to))))
)";

constexpr std::string_view kMinigridDomain = R"(
(define (domain minigrid)
  (:requirements :strips)
  (:predicates (at-robot ?c) (adjacent ?from ?to) (door-link ?d ?from ?to) (door-side ?d ?c)
               (locked ?d) (unlocked ?d) (key-for ?k ?d) (key-at ?k ?c) (holding ?k) (arm-empty))
  (:action move
    :parameters (?from ?to)
    :precondition (and (at-robot ?from) (adjacent ?from ?to))
    :effect (and (not (at-robot ?from)) (at-robot ?to)))
  (:action pass
    :parameters (?from ?to ?d)
    :precondition (and (at-robot ?from) (door-link ?d ?from ?to) (unlocked ?d))
    :effect (and (not (at-robot ?from)) (at-robot ?to)))
  (:action pickup
    :parameters (?c ?k)
    :precondition (and (at-robot ?c) (key-at ?k ?c) (arm-empty))
    :effect (and (holding ?k) (not (key-at ?k ?c)) (not (arm-empty))))
  (:action drop
    :parameters (?c ?k)
    :precondition (and (at-robot ?c) (holding ?k))
    :effect (and (key-at ?k ?c) (arm-empty) (not (holding ?k))))
  (:action unlock
    :parameters (?c ?d ?k)
    :precondition (and (at-robot ?c) (door-side ?d ?c) (locked ?d) (holding ?k) (key-for ?k ?d))
    :effect (and (not (locked ?d)) (unlocked ?d))))
)";

pddl::Atom atom(std::string predicate, std::vector<std::string> args = {}) {
  return pddl::Atom{std::move(predicate), std::move(args)};
}

std::string numbered(std::string_view prefix, std::size_t n) { return std::string(prefix) + std::to_string(n); }

Rng instance_rng(std::string_view benchmark, std::uint64_t seed, std::size_t index) {
  return Rng(derive_seed(seed, benchmark, static_cast<std::uint64_t>(index)));
}

// ---------------------------------------------------------------------------
// Blocksworld
// ---------------------------------------------------------------------------

// support[b] is the block under b, or -1 for the table.
std::vector<int> random_towers(int blocks, Rng& rng) {
  std::vector<int> order(static_cast<std::size_t>(blocks));
  for (int b = 0; b < blocks; ++b) order[static_cast<std::size_t>(b)] = b;
  rng.shuffle(order);
  std::vector<int> support(static_cast<std::size_t>(blocks), -1);
  std::vector<bool> clear(static_cast<std::size_t>(blocks), false);
  std::vector<int> placed;
  for (int b : order) {
    std::vector<int> options{-1};
    for (int p : placed)
      if (clear[static_cast<std::size_t>(p)]) options.push_back(p);
    int under = rng.pick(options);
    support[static_cast<std::size_t>(b)] = under;
    if (under >= 0) clear[static_cast<std::size_t>(under)] = false;
    clear[static_cast<std::size_t>(b)] = true;
    placed.push_back(b);
  }
  return support;
}

}  // namespace

std::string to_string(Benchmark benchmark) {
  switch (benchmark) {
    case Benchmark::Blocksworld: return "blocksworld";
    case Benchmark::Logistics: return "logistics";
    case Benchmark::Minigrid: return "minigrid";
  }
  return "blocksworld";
}

Benchmark parse_benchmark(const std::string& name) {
  if (name == "blocksworld") return Benchmark::Blocksworld;
  if (name == "logistics") return Benchmark::Logistics;
  if (name == "minigrid") return Benchmark::Minigrid;
  throw InvalidSpec("unknown benchmark '" + name + "'");
}

void validate_spec(const GenSpec& spec) {
  switch (spec.benchmark) {
    case Benchmark::Blocksworld:
      if (spec.blocksworld.blocks < 2 || spec.blocksworld.blocks > 20)
        throw InvalidSpec("blocksworld block count must be in [2, 20]");
      break;
    case Benchmark::Logistics: {
      const auto& s = spec.logistics;
      if (s.cities < 1 || s.cities > 20) throw InvalidSpec("logistics city count must be in [1, 20]");
      if (s.places_per_city < 1 || s.places_per_city > 10)
        throw InvalidSpec("logistics places per city must be in [1, 10]");
      if (s.packages < 0 || s.packages > 50) throw InvalidSpec("logistics package count must be in [0, 50]");
      if (s.trucks < 0 || s.airplanes < 0) throw InvalidSpec("vehicle counts must be non-negative");
      if (s.places_per_city > 1 && s.trucks < s.cities)
        throw InvalidSpec("every city with more than one place needs a truck (trucks >= cities)");
      if (s.cities > 1 && s.airplanes < 1) throw InvalidSpec("more than one city needs at least one airplane");
      break;
    }
    case Benchmark::Minigrid: {
      const auto& s = spec.minigrid;
      if (s.room_rows < 1 || s.room_cols < 1 || s.room_rows > 6 || s.room_cols > 6)
        throw InvalidSpec("minigrid room grid dimensions must be in [1, 6]");
      if (s.room_size < 1 || s.room_size > 4) throw InvalidSpec("minigrid room size must be in [1, 4]");
      if (s.keys < 0 || s.keys > s.room_rows * s.room_cols - 1)
        throw InvalidSpec("minigrid key count must be in [0, rooms - 1]");
      break;
    }
  }
  if (spec.count == 0) throw InvalidSpec("instance count must be positive");
}

const pddl::DomainDef& blocksworld_domain() {
  static const pddl::DomainDef domain = pddl::parse_domain(kBlocksworldDomain);
  return domain;
}

const pddl::DomainDef& logistics_domain() {
  static const pddl::DomainDef domain = pddl::parse_domain(kLogisticsDomain);
  return domain;
}

const pddl::DomainDef& minigrid_domain() {
  static const pddl::DomainDef domain = pddl::parse_domain(kMinigridDomain);
  return domain;
}

const pddl::DomainDef& domain_for(Benchmark benchmark) {
  switch (benchmark) {
    case Benchmark::Blocksworld: return blocksworld_domain();
    case Benchmark::Logistics: return logistics_domain();
    case Benchmark::Minigrid: return minigrid_domain();
  }
  return blocksworld_domain();
}

pddl::ProblemDef blocksworld_instance(const BlocksworldSize& size, std::uint64_t seed, std::size_t index) {
  const int n = size.blocks;
  Rng rng = instance_rng("blocksworld", seed, index);
  pddl::ProblemDef problem;
  problem.name = "BW-rand-" + std::to_string(n);
  problem.domain_name = blocksworld_domain().name;
  for (int b = 1; b <= n; ++b) problem.objects.push_back(numbered("b", static_cast<std::size_t>(b)));
  auto name = [&](int b) { return problem.objects[static_cast<std::size_t>(b)]; };

  const std::vector<int> init = random_towers(n, rng);
  std::vector<bool> covered(static_cast<std::size_t>(n), false);
  for (int b = 0; b < n; ++b) {
    int under = init[static_cast<std::size_t>(b)];
    if (under < 0) {
      problem.init.push_back(atom("ontable", {name(b)}));
    } else {
      problem.init.push_back(atom("on", {name(b), name(under)}));
      covered[static_cast<std::size_t>(under)] = true;
    }
  }
  for (int b = 0; b < n; ++b)
    if (!covered[static_cast<std::size_t>(b)]) problem.init.push_back(atom("clear", {name(b)}));
  problem.init.push_back(atom("handempty"));

  while (true) {
    const std::vector<int> target = random_towers(n, rng);
    std::vector<pddl::Atom> goal;
    bool differs = false;
    for (int b = 0; b < n; ++b) {
      int under = target[static_cast<std::size_t>(b)];
      if (under < 0 || !rng.bernoulli(0.5)) continue;
      goal.push_back(atom("on", {name(b), name(under)}));
      if (init[static_cast<std::size_t>(b)] != under) differs = true;
    }
    if (!goal.empty() && differs) {
      problem.goal = std::move(goal);
      return problem;
    }
  }
}

pddl::ProblemDef logistics_instance(const LogisticsSize& size, std::uint64_t seed, std::size_t index) {
  Rng rng = instance_rng("logistics", seed, index);
  pddl::ProblemDef problem;
  problem.name = "logistics-" + std::to_string(index);
  problem.domain_name = logistics_domain().name;

  std::vector<std::string> cities, airports, trucks, airplanes, packages;
  std::vector<std::vector<std::string>> places(static_cast<std::size_t>(size.cities));
  std::vector<std::string> all_places;
  for (int c = 1; c <= size.cities; ++c) {
    cities.push_back(numbered("c", static_cast<std::size_t>(c)));
    for (int p = 1; p <= size.places_per_city; ++p) {
      std::string place = "l" + std::to_string(c) + "-" + std::to_string(p);
      places[static_cast<std::size_t>(c - 1)].push_back(place);
      all_places.push_back(place);
      if (p == 1) airports.push_back(place);
    }
  }
  for (int t = 1; t <= size.trucks; ++t) trucks.push_back(numbered("t", static_cast<std::size_t>(t)));
  for (int a = 1; a <= size.airplanes; ++a) airplanes.push_back(numbered("a", static_cast<std::size_t>(a)));
  for (int p = 1; p <= size.packages; ++p) packages.push_back(numbered("p", static_cast<std::size_t>(p)));

  for (const auto* group : {&cities, &all_places, &trucks, &airplanes, &packages})
    problem.objects.insert(problem.objects.end(), group->begin(), group->end());

  for (const auto& c : cities) problem.init.push_back(atom("city", {c}));
  for (std::size_t c = 0; c < places.size(); ++c)
    for (const auto& place : places[c]) {
      problem.init.push_back(atom("location", {place}));
      problem.init.push_back(atom("in-city", {place, cities[c]}));
    }
  for (const auto& airport : airports) problem.init.push_back(atom("airport", {airport}));
  for (std::size_t t = 0; t < trucks.size(); ++t) {
    const auto& home = places[t % places.size()];
    problem.init.push_back(atom("truck", {trucks[t]}));
    problem.init.push_back(atom("at", {trucks[t], rng.pick(home)}));
  }
  for (const auto& plane : airplanes) {
    problem.init.push_back(atom("airplane", {plane}));
    problem.init.push_back(atom("at", {plane, rng.pick(airports)}));
  }
  for (const auto& package : packages) {
    const std::string& from = rng.pick(all_places);
    std::string to = from;
    if (all_places.size() > 1)
      while (to == from) to = rng.pick(all_places);
    problem.init.push_back(atom("package", {package}));
    problem.init.push_back(atom("at", {package, from}));
    problem.goal.push_back(atom("at", {package, to}));
  }
  return problem;
}

pddl::ProblemDef minigrid_instance(const MinigridSize& size, std::uint64_t seed, std::size_t index) {
  Rng rng = instance_rng("minigrid", seed, index);
  const int rows = size.room_rows * size.room_size;
  const int cols = size.room_cols * size.room_size;
  const int rooms = size.room_rows * size.room_cols;
  auto cell = [](int r, int c) { return "cell-" + std::to_string(r) + "-" + std::to_string(c); };
  auto room_of = [&](int r, int c) { return (r / size.room_size) * size.room_cols + (c / size.room_size); };

  pddl::ProblemDef problem;
  problem.name = "minigrid-" + std::to_string(index);
  problem.domain_name = minigrid_domain().name;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) problem.objects.push_back(cell(r, c));

  // Random spanning tree over rooms (randomized Prim).
  struct Door {
    int room_a, room_b;
    std::string cell_a, cell_b;
  };
  std::vector<Door> doors;
  std::vector<bool> in_tree(static_cast<std::size_t>(rooms), false);
  in_tree[0] = true;
  for (int added = 1; added < rooms; ++added) {
    std::vector<std::pair<int, int>> candidates;
    for (int room = 0; room < rooms; ++room) {
      if (!in_tree[static_cast<std::size_t>(room)]) continue;
      int rr = room / size.room_cols, rc = room % size.room_cols;
      const int neighbours[4][2] = {{rr - 1, rc}, {rr + 1, rc}, {rr, rc - 1}, {rr, rc + 1}};
      for (const auto& nb : neighbours) {
        if (nb[0] < 0 || nb[1] < 0 || nb[0] >= size.room_rows || nb[1] >= size.room_cols) continue;
        int other = nb[0] * size.room_cols + nb[1];
        if (!in_tree[static_cast<std::size_t>(other)]) candidates.emplace_back(room, other);
      }
    }
    auto [from, to] = rng.pick(candidates);
    in_tree[static_cast<std::size_t>(to)] = true;
    int fr = from / size.room_cols, fc = from % size.room_cols;
    int tr = to / size.room_cols, tc = to % size.room_cols;
    int offset = static_cast<int>(rng.below(static_cast<std::uint64_t>(size.room_size)));
    Door door{from, to, {}, {}};
    if (fr == tr) {  // horizontal neighbours
      int row = fr * size.room_size + offset;
      int left = std::min(fc, tc) * size.room_size + size.room_size - 1;
      std::string a = cell(row, left), b = cell(row, left + 1);
      door.cell_a = fc < tc ? a : b;
      door.cell_b = fc < tc ? b : a;
    } else {
      int col = fc * size.room_size + offset;
      int top = std::min(fr, tr) * size.room_size + size.room_size - 1;
      std::string a = cell(top, col), b = cell(top + 1, col);
      door.cell_a = fr < tr ? a : b;
      door.cell_b = fr < tr ? b : a;
    }
    doors.push_back(std::move(door));
  }

  std::vector<std::size_t> door_order(doors.size());
  for (std::size_t d = 0; d < doors.size(); ++d) door_order[d] = d;
  rng.shuffle(door_order);
  std::vector<bool> locked(doors.size(), false);
  for (int k = 0; k < size.keys; ++k) locked[door_order[static_cast<std::size_t>(k)]] = true;

  for (std::size_t d = 0; d < doors.size(); ++d) problem.objects.push_back(numbered("door-", d + 1));
  for (int k = 1; k <= size.keys; ++k) problem.objects.push_back(numbered("key-", static_cast<std::size_t>(k)));

  // Static layout.
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const int steps[4][2] = {{r - 1, c}, {r + 1, c}, {r, c - 1}, {r, c + 1}};
      for (const auto& s : steps) {
        if (s[0] < 0 || s[1] < 0 || s[0] >= rows || s[1] >= cols) continue;
        if (room_of(s[0], s[1]) != room_of(r, c)) continue;
        problem.init.push_back(atom("adjacent", {cell(r, c), cell(s[0], s[1])}));
      }
    }
  for (std::size_t d = 0; d < doors.size(); ++d) {
    const std::string name = numbered("door-", d + 1);
    problem.init.push_back(atom("door-link", {name, doors[d].cell_a, doors[d].cell_b}));
    problem.init.push_back(atom("door-link", {name, doors[d].cell_b, doors[d].cell_a}));
    problem.init.push_back(atom("door-side", {name, doors[d].cell_a}));
    problem.init.push_back(atom("door-side", {name, doors[d].cell_b}));
    problem.init.push_back(atom(locked[d] ? "locked" : "unlocked", {name}));
  }

  const int start_r = static_cast<int>(rng.below(static_cast<std::uint64_t>(rows)));
  const int start_c = static_cast<int>(rng.below(static_cast<std::uint64_t>(cols)));
  const std::string start = cell(start_r, start_c);
  const int start_room = room_of(start_r, start_c);

  // Grow the set of rooms the robot can reach, placing each frontier lock's
  // key somewhere already reachable.
  std::vector<bool> reachable(static_cast<std::size_t>(rooms), false);
  std::vector<bool> opened(doors.size(), false);
  for (std::size_t d = 0; d < doors.size(); ++d) opened[d] = !locked[d];
  auto expand = [&] {
    reachable[static_cast<std::size_t>(start_room)] = true;
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t d = 0; d < doors.size(); ++d) {
        if (!opened[d]) continue;
        auto a = static_cast<std::size_t>(doors[d].room_a), b = static_cast<std::size_t>(doors[d].room_b);
        if (reachable[a] != reachable[b]) {
          reachable[a] = reachable[b] = true;
          changed = true;
        }
      }
    }
  };
  expand();
  int key_number = 0;
  while (true) {
    std::size_t frontier = doors.size();
    for (std::size_t d = 0; d < doors.size() && frontier == doors.size(); ++d) {
      if (opened[d]) continue;
      if (reachable[static_cast<std::size_t>(doors[d].room_a)] != reachable[static_cast<std::size_t>(doors[d].room_b)])
        frontier = d;
    }
    if (frontier == doors.size()) break;
    std::vector<std::string> cells;
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c)
        if (reachable[static_cast<std::size_t>(room_of(r, c))]) cells.push_back(cell(r, c));
    const std::string key = numbered("key-", static_cast<std::size_t>(++key_number));
    problem.init.push_back(atom("key-for", {key, numbered("door-", frontier + 1)}));
    problem.init.push_back(atom("key-at", {key, rng.pick(cells)}));
    opened[frontier] = true;
    expand();
  }

  problem.init.push_back(atom("at-robot", {start}));
  problem.init.push_back(atom("arm-empty"));

  std::string target = start;
  if (rows * cols > 1)
    while (target == start) target = cell(static_cast<int>(rng.below(static_cast<std::uint64_t>(rows))),
                                           static_cast<int>(rng.below(static_cast<std::uint64_t>(cols))));
  problem.goal.push_back(atom("at-robot", {target}));
  return problem;
}

namespace {

template <typename Fn>
std::vector<pddl::ProblemDef> generate_with(const GenSpec& spec, Benchmark expected, Fn&& make) {
  if (spec.benchmark != expected) throw InvalidSpec("spec is for " + to_string(spec.benchmark));
  validate_spec(spec);
  std::vector<pddl::ProblemDef> out;
  out.reserve(spec.count);
  for (std::size_t i = 0; i < spec.count; ++i) out.push_back(make(i));
  return out;
}

}  // namespace

std::vector<pddl::ProblemDef> gen_blocksworld(const GenSpec& spec) {
  return generate_with(spec, Benchmark::Blocksworld,
                       [&](std::size_t i) { return blocksworld_instance(spec.blocksworld, spec.seed, i); });
}

std::vector<pddl::ProblemDef> gen_logistics(const GenSpec& spec) {
  return generate_with(spec, Benchmark::Logistics,
                       [&](std::size_t i) { return logistics_instance(spec.logistics, spec.seed, i); });
}

std::vector<pddl::ProblemDef> gen_minigrid(const GenSpec& spec) {
  return generate_with(spec, Benchmark::Minigrid,
                       [&](std::size_t i) { return minigrid_instance(spec.minigrid, spec.seed, i); });
}

std::vector<pddl::ProblemDef> generate(const GenSpec& spec) {
  switch (spec.benchmark) {
    case Benchmark::Blocksworld: return gen_blocksworld(spec);
    case Benchmark::Logistics: return gen_logistics(spec);
    case Benchmark::Minigrid: return gen_minigrid(spec);
  }
  return {};
}

std::string instance_id(const GenSpec& spec, std::size_t index) {
  std::string size;
  switch (spec.benchmark) {
    case Benchmark::Blocksworld: size = "b" + std::to_string(spec.blocksworld.blocks); break;
    case Benchmark::Logistics: {
      const auto& s = spec.logistics;
      size = "c" + std::to_string(s.cities) + "p" + std::to_string(s.places_per_city) + "k" +
             std::to_string(s.packages) + "t" + std::to_string(s.trucks) + "a" + std::to_string(s.airplanes);
      break;
    }
    case Benchmark::Minigrid: {
      const auto& s = spec.minigrid;
      size = std::to_string(s.room_rows) + "x" + std::to_string(s.room_cols) + "z" + std::to_string(s.room_size) +
             "k" + std::to_string(s.keys);
      break;
    }
  }
  char suffix[16];
  std::snprintf(suffix, sizeof suffix, "%04zu", index);
  return to_string(spec.benchmark) + "-" + size + "-s" + std::to_string(spec.seed) + "-" + suffix;
}

nlohmann::json spec_to_json(const GenSpec& spec) {
  nlohmann::json out;
  out["benchmark"] = to_string(spec.benchmark);
  switch (spec.benchmark) {
    case Benchmark::Blocksworld: out["blocks"] = spec.blocksworld.blocks; break;
    case Benchmark::Logistics:
      out["cities"] = spec.logistics.cities;
      out["places_per_city"] = spec.logistics.places_per_city;
      out["packages"] = spec.logistics.packages;
      out["trucks"] = spec.logistics.trucks;
      out["airplanes"] = spec.logistics.airplanes;
      break;
    case Benchmark::Minigrid:
      out["room_rows"] = spec.minigrid.room_rows;
      out["room_cols"] = spec.minigrid.room_cols;
      out["room_size"] = spec.minigrid.room_size;
      out["keys"] = spec.minigrid.keys;
      break;
  }
  out["seed"] = spec.seed;
  out["count"] = spec.count;
  return out;
}

// ---------------------------------------------------------------------------
// Obfuscation
// ---------------------------------------------------------------------------

std::string to_string(ObfuscationMode mode) {
  switch (mode) {
    case ObfuscationMode::Identity: return "identity";
    case ObfuscationMode::Deceptive: return "deceptive";
    case ObfuscationMode::Nonspecific: return "nonspecific";
  }
  return "identity";
}

ObfuscationMode parse_obfuscation_mode(const std::string& name) {
  if (name == "identity") return ObfuscationMode::Identity;
  if (name == "deceptive") return ObfuscationMode::Deceptive;
  if (name == "nonspecific") return ObfuscationMode::Nonspecific;
  throw std::invalid_argument("unknown obfuscation mode '" + name + "'");
}

namespace {

std::map<std::string, std::string> invert(const std::map<std::string, std::string>& forward, const char* what) {
  std::map<std::string, std::string> out;
  for (const auto& [from, to] : forward)
    if (!out.emplace(to, from).second)
      throw ObfuscationError(ObfuscationErrorKind::CollidingMap, std::string(what) + " rename is not injective at '" + to + "'");
  return out;
}

std::map<std::string, std::string> json_to_names(const nlohmann::json& json, const char* key) {
  std::map<std::string, std::string> out;
  if (json.contains(key))
    for (const auto& [from, to] : json.at(key).items()) out.emplace(from, to.get<std::string>());
  return out;
}

}  // namespace

ObfuscationMap ObfuscationMap::inverse() const {
  ObfuscationMap out;
  out.mode = mode;
  out.domain_name = source_domain_name;
  out.source_domain_name = domain_name;
  out.predicates = invert(predicates, "predicate");
  out.actions = invert(actions, "action");
  out.objects = invert(objects, "object");
  return out;
}

nlohmann::json ObfuscationMap::to_json() const {
  nlohmann::json out;
  out["mode"] = to_string(mode);
  out["domain_name"] = domain_name;
  out["source_domain_name"] = source_domain_name;
  out["predicates"] = predicates;
  out["actions"] = actions;
  out["objects"] = objects;
  return out;
}

ObfuscationMap ObfuscationMap::from_json(const nlohmann::json& json) {
  ObfuscationMap map;
  map.mode = parse_obfuscation_mode(json.value("mode", std::string("identity")));
  map.domain_name = json.value("domain_name", std::string());
  map.source_domain_name = json.value("source_domain_name", std::string());
  map.predicates = json_to_names(json, "predicates");
  map.actions = json_to_names(json, "actions");
  map.objects = json_to_names(json, "objects");
  return map;
}

ObfuscationMap make_map(const pddl::DomainDef& domain, ObfuscationMode mode,
                        const std::vector<pddl::ProblemDef>& problems, bool rename_objects) {
  ObfuscationMap map;
  map.mode = mode;
  map.source_domain_name = domain.name;
  switch (mode) {
    case ObfuscationMode::Identity:
      map.domain_name = domain.name;
      for (const auto& p : domain.predicates) map.predicates[p.name] = p.name;
      for (const auto& a : domain.actions) map.actions[a.name] = a.name;
      break;
    case ObfuscationMode::Deceptive: {
      if (domain.name != "blocksworld-4ops")
        throw std::invalid_argument("the deceptive vocabulary is defined for blocksworld-4ops only");
      map.domain_name = "mystery-4ops";
      map.predicates = {{"clear", "province"}, {"ontable", "planet"}, {"handempty", "harmony"},
                        {"holding", "pain"},   {"on", "craves"}};
      map.actions = {{"pick-up", "attack"}, {"put-down", "succumb"}, {"stack", "overcome"}, {"unstack", "feast"}};
      break;
    }
    case ObfuscationMode::Nonspecific:
      map.domain_name = "domain-1";
      for (std::size_t i = 0; i < domain.predicates.size(); ++i)
        map.predicates[domain.predicates[i].name] = numbered("predicate-", i + 1);
      for (std::size_t i = 0; i < domain.actions.size(); ++i)
        map.actions[domain.actions[i].name] = numbered("action-", i + 1);
      break;
  }
  if (rename_objects) {
    std::set<std::string> seen;
    for (const auto& problem : problems)
      for (const auto& object : problem.objects)
        if (seen.insert(object).second) map.objects[object] = numbered("object-", seen.size());
  }
  return map;
}

Obfuscated obfuscate(const pddl::DomainDef& domain, const std::vector<pddl::ProblemDef>& problems,
                     const std::vector<pddl::Plan>& plans, const ObfuscationMap& map) {
  for (const auto& p : domain.predicates)
    if (!map.predicates.count(p.name))
      throw ObfuscationError(ObfuscationErrorKind::IncompleteMap, "no rename for predicate '" + p.name + "'");
  for (const auto& a : domain.actions)
    if (!map.actions.count(a.name))
      throw ObfuscationError(ObfuscationErrorKind::IncompleteMap, "no rename for action '" + a.name + "'");

  auto check_injective = [](const std::vector<std::string>& sources, const auto& rename, const char* what) {
    std::set<std::string> images;
    for (const auto& name : sources)
      if (!images.insert(rename(name)).second)
        throw ObfuscationError(ObfuscationErrorKind::CollidingMap,
                               std::string("two ") + what + "s map to '" + rename(name) + "'");
  };
  auto lookup = [](const std::map<std::string, std::string>& names, const std::string& name) {
    auto it = names.find(name);
    return it == names.end() ? name : it->second;
  };
  auto rename_predicate = [&](const std::string& n) { return lookup(map.predicates, n); };
  auto rename_action = [&](const std::string& n) { return lookup(map.actions, n); };
  auto rename_object = [&](const std::string& n) { return lookup(map.objects, n); };

  std::vector<std::string> names;
  for (const auto& p : domain.predicates) names.push_back(p.name);
  check_injective(names, rename_predicate, "predicate");
  names.clear();
  for (const auto& a : domain.actions) names.push_back(a.name);
  check_injective(names, rename_action, "action");
  for (const auto& problem : problems) check_injective(problem.objects, rename_object, "object");

  auto rename_atom = [&](const pddl::Atom& a, bool objects) {
    pddl::Atom out{rename_predicate(a.predicate), a.args};
    if (objects)
      for (auto& arg : out.args) arg = rename_object(arg);
    return out;
  };

  Obfuscated result;
  result.domain = domain;
  if (!map.domain_name.empty()) result.domain.name = map.domain_name;
  for (auto& p : result.domain.predicates) p.name = rename_predicate(p.name);
  for (auto& a : result.domain.actions) {
    a.name = rename_action(a.name);
    for (auto& atom : a.precondition) atom = rename_atom(atom, false);
    for (auto& literal : a.effect) literal.atom = rename_atom(literal.atom, false);
  }

  for (const auto& problem : problems) {
    pddl::ProblemDef renamed = problem;
    renamed.domain_name = result.domain.name;
    for (auto& object : renamed.objects) object = rename_object(object);
    for (auto& a : renamed.init) a = rename_atom(a, true);
    for (auto& a : renamed.goal) a = rename_atom(a, true);
    result.problems.push_back(std::move(renamed));
  }
  for (const auto& plan : plans) {
    pddl::Plan renamed = plan;
    for (auto& step : renamed.steps) {
      step.name = rename_action(step.name);
      for (auto& arg : step.args) arg = rename_object(arg);
    }
    result.plans.push_back(std::move(renamed));
  }
  return result;
}

}  // namespace plancritic::gen
