#include "plancritic/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "plancritic/eval_report.hpp"
#include "plancritic/generators.hpp"
#include "plancritic/orchestrator.hpp"
#include "plancritic/pddl.hpp"
#include "plancritic/search.hpp"
#include "plancritic/semantics.hpp"

namespace plancritic::cli {

namespace fs = std::filesystem;
namespace orc = orchestrator;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

nlohmann::json read_json(const std::string& path) {
  auto json = nlohmann::json::parse(read_file(path), nullptr, false);
  if (json.is_discarded()) throw std::runtime_error(path + ": invalid JSON");
  return json;
}

// --- generate -------------------------------------------------------------

struct GenerateArgs {
  std::string benchmark = "blocksworld";
  std::string preset;
  gen::GenSpec spec;
  std::string out_dir;
  bool with_plans = false;
  std::size_t max_states = search::SearchLimits{}.max_states;
};

void add_generate(CLI::App& app, GenerateArgs& a) {
  app.add_option("--benchmark", a.benchmark, "blocksworld, logistics or minigrid")
      ->check(CLI::IsMember({"blocksworld", "logistics", "minigrid"}));
  app.add_option("--preset", a.preset, "easy or hard (logistics, minigrid)")->check(CLI::IsMember({"easy", "hard"}));
  app.add_option("--blocks", a.spec.blocksworld.blocks);
  app.add_option("--cities", a.spec.logistics.cities);
  app.add_option("--places", a.spec.logistics.places_per_city);
  app.add_option("--packages", a.spec.logistics.packages);
  app.add_option("--trucks", a.spec.logistics.trucks);
  app.add_option("--airplanes", a.spec.logistics.airplanes);
  app.add_option("--rows", a.spec.minigrid.room_rows);
  app.add_option("--cols", a.spec.minigrid.room_cols);
  app.add_option("--room-size", a.spec.minigrid.room_size);
  app.add_option("--keys", a.spec.minigrid.keys);
  app.add_option("--count", a.spec.count)->required();
  app.add_option("--seed", a.spec.seed)->required();
  app.add_option("--out", a.out_dir, "output directory")->required();
  app.add_flag("--with-plans", a.with_plans, "solve each instance with BFS and write its plan");
  app.add_option("--max-states", a.max_states);
}

int do_generate(GenerateArgs a, std::ostream& out) {
  a.spec.benchmark = gen::parse_benchmark(a.benchmark);
  if (a.preset == "easy") {
    a.spec.logistics = gen::LogisticsSize::easy();
    a.spec.minigrid = gen::MinigridSize::easy();
  } else if (a.preset == "hard") {
    a.spec.logistics = gen::LogisticsSize::hard();
    a.spec.minigrid = gen::MinigridSize::hard();
  }
  gen::validate_spec(a.spec);
  const auto& domain = gen::domain_for(a.spec.benchmark);
  const auto problems = gen::generate(a.spec);
  const fs::path dir(a.out_dir);
  write_file(dir / "domain.pddl", pddl::print_domain(domain));

  std::ostringstream manifest;
  for (std::size_t i = 0; i < problems.size(); ++i) {
    const std::string id = gen::instance_id(a.spec, i);
    nlohmann::json line{{"id", id}, {"domain", "domain.pddl"}, {"problem", "problems/" + id + ".pddl"}};
    write_file(dir / "problems" / (id + ".pddl"), pddl::print_problem(problems[i]));
    if (a.with_plans) {
      search::SearchLimits limits;
      limits.max_states = a.max_states;
      auto result = search::bfs_plan(domain, problems[i], limits);
      if (!result.found()) throw std::runtime_error("no plan found for " + id);
      write_file(dir / "plans" / (id + ".plan"), pddl::print_plan(result.plan));
      line["golden_plan"] = "plans/" + id + ".plan";
    }
    line["benchmark"] = a.benchmark;
    line["seed"] = a.spec.seed;
    line["index"] = i;
    manifest << line.dump() << '\n';
  }
  write_file(dir / "manifest.jsonl", manifest.str());
  write_file(dir / "spec.json", gen::spec_to_json(a.spec).dump(2) + "\n");
  out << "wrote " << problems.size() << " instance(s) to " << dir.string() << "\n";
  return kExitOk;
}

// --- validate / solve -----------------------------------------------------

struct ValidateArgs {
  std::string domain, problem, plan;
  bool json = false;
  bool quiet = false;
};

int do_validate(const ValidateArgs& a, std::ostream& out) {
  const auto domain = pddl::parse_domain(read_file(a.domain));
  const auto problem = pddl::parse_problem(read_file(a.problem), domain);
  const auto plan = pddl::parse_plan(read_file(a.plan), domain);
  const auto validation = semantics::validate_plan(problem, plan, domain);
  if (a.json) {
    auto json = semantics::to_json(validation);
    json["phrase"] = semantics::verdict_phrase(validation.verdict);
    json["detail"] = semantics::describe(validation.verdict, plan);
    out << json.dump(2) << "\n";
    return kExitOk;
  }
  if (!a.quiet) out << semantics::render_trace(validation, plan, domain) << "\n";
  out << semantics::verdict_phrase(validation.verdict) << "\n";
  out << semantics::describe(validation.verdict, plan) << "\n";
  return kExitOk;
}

struct SolveArgs {
  std::string domain, problem, out_path;
  search::SearchLimits limits;
};

int do_solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
  const auto domain = pddl::parse_domain(read_file(a.domain));
  const auto problem = pddl::parse_problem(read_file(a.problem), domain);
  search::check_limits(a.limits);
  const auto result = search::bfs_plan(domain, problem, a.limits);
  if (!result.found()) {
    err << (result.status == search::SearchResult::Status::LimitExceeded ? "search limit exceeded" : "no plan exists")
        << " after expanding " << result.expanded << " state(s)\n";
    return kExitDomainError;
  }
  const std::string text = pddl::print_plan(result.plan);
  if (a.out_path.empty()) {
    out << text;
  } else {
    write_file(a.out_path, text);
  }
  err << "plan of length " << result.plan.size() << ", " << result.expanded << " state(s) expanded\n";
  return kExitOk;
}

// --- obfuscate ------------------------------------------------------------

struct ObfuscateArgs {
  std::string domain;
  std::vector<std::string> problems, plans;
  std::string map_path;
  std::string mode;
  bool rename_objects = false;
  std::string out_dir;
};

int do_obfuscate(const ObfuscateArgs& a, std::ostream& out) {
  if (a.map_path.empty() == a.mode.empty()) throw UsageError("give exactly one of --map and --mode");
  const auto domain = pddl::parse_domain(read_file(a.domain));
  std::vector<pddl::ProblemDef> problems;
  for (const auto& p : a.problems) problems.push_back(pddl::parse_problem(read_file(p), domain));
  std::vector<pddl::Plan> plans;
  for (const auto& p : a.plans) plans.push_back(pddl::parse_plan(read_file(p), domain));

  const gen::ObfuscationMap map =
      a.map_path.empty() ? gen::make_map(domain, gen::parse_obfuscation_mode(a.mode), problems, a.rename_objects)
                         : gen::ObfuscationMap::from_json(read_json(a.map_path));
  const auto result = gen::obfuscate(domain, problems, plans, map);

  const fs::path dir(a.out_dir);
  write_file(dir / "domain.pddl", pddl::print_domain(result.domain));
  for (std::size_t i = 0; i < result.problems.size(); ++i)
    write_file(dir / fs::path(a.problems[i]).filename(), pddl::print_problem(result.problems[i]));
  for (std::size_t i = 0; i < result.plans.size(); ++i)
    write_file(dir / fs::path(a.plans[i]).filename(), pddl::print_plan(result.plans[i]));
  write_file(dir / "map.json", map.to_json().dump(2) + "\n");
  out << "wrote " << result.problems.size() << " problem(s) and " << result.plans.size() << " plan(s) to "
      << dir.string() << "\n";
  return kExitOk;
}

// --- run / score / report -------------------------------------------------

struct RunArgs {
  std::string config_path, manifest, records;
  std::optional<std::string> planner, critic;
  std::optional<std::size_t> k, samples, shots;
  std::optional<std::uint64_t> seed;
  std::size_t parallelism = 1;
  bool fresh = false;
  std::string metrics_path;
};

int do_run(const RunArgs& a, std::ostream& out, std::ostream& err) {
  nlohmann::json config_json = a.config_path.empty() ? nlohmann::json::object() : read_json(a.config_path);
  orc::LoopConfig config = orc::loop_config_from_json(config_json);
  if (a.planner) config.planner.backend = orc::parse_planner_backend(*a.planner);
  if (a.critic) config.critic.backend = critics::parse_backend(*a.critic);
  if (a.k) config.k = *a.k;
  if (a.samples) config.critic.samples = *a.samples;
  if (a.shots) config.shots = *a.shots;
  if (a.seed) {
    config.planner.seed = *a.seed;
    config.critic.seed = *a.seed;
    config.fewshot_seed = *a.seed;
  }
  config.check();

  const auto entries = orc::read_manifest(a.manifest);
  const bool need_golden = config.planner.backend != orc::PlannerBackend::Llm || config.shots > 0;
  const auto instances = orc::load_instances(entries, need_golden);
  const auto backends = orc::make_backends(config);

  if (a.fresh) fs::remove(a.records);
  orc::BatchOptions options;
  options.parallelism = a.parallelism;
  options.records_path = a.records;
  err << "running " << instances.size() << " problem(s), k=" << config.k << ", planner "
      << orc::to_string(config.planner.backend) << ", critic " << critics::to_string(config.critic.backend) << "\n";
  const auto result = orc::run_batch(instances, config, backends, options);
  err << "executed " << result.executed << ", resumed " << result.resumed << "\n";

  const auto metrics = eval::score(result.records, instances);
  if (!a.metrics_path.empty()) write_file(a.metrics_path, eval::render_report(metrics, eval::ReportFormat::Structured));
  out << eval::render_report(metrics, eval::ReportFormat::TableText);
  return kExitOk;
}

struct ScoreArgs {
  std::string manifest, records, out_path;
};

eval::Metrics score_files(const std::string& manifest, const std::string& records_path) {
  const auto instances = orc::load_instances(orc::read_manifest(manifest), false);
  if (!fs::exists(records_path)) throw UsageError("cannot read " + records_path);
  return eval::score(orc::read_records(records_path), instances);
}

int do_score(const ScoreArgs& a, std::ostream& out) {
  const std::string text = eval::render_report(score_files(a.manifest, a.records), eval::ReportFormat::Structured);
  if (a.out_path.empty()) {
    out << text;
  } else {
    write_file(a.out_path, text);
  }
  return kExitOk;
}

struct ReportArgs {
  std::string metrics, manifest, records;
  std::string format = "table-text";
  std::string out_path, out_dir;
};

int do_report(const ReportArgs& a, std::ostream& out) {
  if (a.metrics.empty() == (a.manifest.empty() || a.records.empty()))
    throw UsageError("give either --metrics or both --manifest and --records");
  const eval::Metrics metrics =
      a.metrics.empty() ? score_files(a.manifest, a.records) : eval::metrics_from_json(read_json(a.metrics));
  if (!a.out_dir.empty()) {
    const fs::path dir(a.out_dir);
    fs::create_directories(dir);
    eval::emit_report(metrics, eval::ReportFormat::TableText, (dir / "summary.txt").string());
    eval::emit_report(metrics, eval::ReportFormat::Csv, (dir / "steps.csv").string());
    eval::emit_report(metrics, eval::ReportFormat::Structured, (dir / "metrics.json").string());
    out << eval::format_summary(metrics.accuracy, metrics.ci) << "\n";
    return kExitOk;
  }
  const auto format = eval::parse_report_format(a.format);
  if (a.out_path.empty()) {
    out << eval::render_report(metrics, format);
  } else {
    eval::emit_report(metrics, format, a.out_path);
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Plan generation, validation and critique-loop harness", "plancritic"};
  app.require_subcommand(1, 1);

  GenerateArgs generate;
  add_generate(*app.add_subcommand("generate", "write benchmark instances and a manifest"), generate);

  ValidateArgs validate;
  auto* v = app.add_subcommand("validate", "check a plan and print the verification trace");
  v->add_option("--domain", validate.domain)->required()->check(CLI::ExistingFile);
  v->add_option("--problem", validate.problem)->required()->check(CLI::ExistingFile);
  v->add_option("--plan", validate.plan)->required()->check(CLI::ExistingFile);
  v->add_flag("--json", validate.json);
  v->add_flag("--quiet", validate.quiet, "verdict lines only");

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "find a shortest plan by breadth-first search");
  s->add_option("--domain", solve.domain)->required()->check(CLI::ExistingFile);
  s->add_option("--problem", solve.problem)->required()->check(CLI::ExistingFile);
  s->add_option("--out", solve.out_path);
  s->add_option("--max-states", solve.limits.max_states);
  s->add_option("--max-length", solve.limits.max_plan_length);

  ObfuscateArgs obf;
  auto* o = app.add_subcommand("obfuscate", "rename a domain, its problems and plans");
  o->add_option("--domain", obf.domain)->required()->check(CLI::ExistingFile);
  o->add_option("--problem", obf.problems)->check(CLI::ExistingFile);
  o->add_option("--plan", obf.plans)->check(CLI::ExistingFile);
  o->add_option("--map", obf.map_path)->check(CLI::ExistingFile);
  o->add_option("--mode", obf.mode)->check(CLI::IsMember({"identity", "deceptive", "nonspecific"}));
  o->add_flag("--rename-objects", obf.rename_objects);
  o->add_option("--out", obf.out_dir)->required();

  RunArgs run;
  auto* r = app.add_subcommand("run", "run the critique loop over a manifest");
  r->add_option("--config", run.config_path)->check(CLI::ExistingFile);
  r->add_option("--manifest", run.manifest)->required()->check(CLI::ExistingFile);
  r->add_option("--records", run.records)->required();
  r->add_option("--planner", run.planner)->check(CLI::IsMember({"llm", "mock-golden", "mock-stochastic"}));
  r->add_option("--critic", run.critic)->check(CLI::IsMember({"llm", "oracle", "mock"}));
  r->add_option("--k", run.k);
  r->add_option("--samples", run.samples);
  r->add_option("--shots", run.shots);
  r->add_option("--seed", run.seed);
  r->add_option("--parallelism", run.parallelism)->check(CLI::PositiveNumber);
  r->add_flag("--fresh", run.fresh, "discard existing records instead of resuming");
  r->add_option("--metrics", run.metrics_path, "also write scored metrics as JSON");

  ScoreArgs score;
  auto* sc = app.add_subcommand("score", "score persisted records against ground truth");
  sc->add_option("--manifest", score.manifest)->required()->check(CLI::ExistingFile);
  sc->add_option("--records", score.records)->required()->check(CLI::ExistingFile);
  sc->add_option("--out", score.out_path);

  ReportArgs report;
  auto* rp = app.add_subcommand("report", "render metrics as text, CSV or JSON");
  rp->add_option("--metrics", report.metrics)->check(CLI::ExistingFile);
  rp->add_option("--manifest", report.manifest)->check(CLI::ExistingFile);
  rp->add_option("--records", report.records)->check(CLI::ExistingFile);
  rp->add_option("--format", report.format)->check(CLI::IsMember({"table-text", "csv", "structured"}));
  rp->add_option("--out", report.out_path);
  rp->add_option("--out-dir", report.out_dir, "write summary.txt, steps.csv and metrics.json");

  try {
    // CLI11 consumes the vector from the back.
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (app.got_subcommand("generate")) return do_generate(generate, out);
    if (app.got_subcommand("validate")) return do_validate(validate, out);
    if (app.got_subcommand("solve")) return do_solve(solve, out, err);
    if (app.got_subcommand("obfuscate")) return do_obfuscate(obf, out);
    if (app.got_subcommand("run")) return do_run(run, out, err);
    if (app.got_subcommand("score")) return do_score(score, out);
    if (app.got_subcommand("report")) return do_report(report, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomainError;
  }
  return kExitUsage;
}

}  // namespace plancritic::cli
