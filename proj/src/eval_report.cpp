#include "plancritic/eval_report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace plancritic::eval {

namespace {

std::optional<double> ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string fixed(const std::optional<double>& v, int digits, const std::string& absent) {
  return v ? fixed(*v, digits) : absent;
}

nlohmann::json optional_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); }

void add(Confusion& c, bool said_correct, bool is_correct) {
  if (said_correct) {
    ++(is_correct ? c.tp : c.fp);
  } else {
    ++(is_correct ? c.fn : c.tn);
  }
}

nlohmann::json to_json(const Confusion& c) {
  return {{"tp", c.tp},
          {"fp", c.fp},
          {"tn", c.tn},
          {"fn", c.fn},
          {"precision", optional_json(c.precision())},
          {"recall", optional_json(c.recall())},
          {"critic_accuracy", optional_json(c.accuracy())}};
}

Confusion confusion_from_json(const nlohmann::json& j) {
  Confusion c;
  c.tp = j.at("tp").get<std::size_t>();
  c.fp = j.at("fp").get<std::size_t>();
  c.tn = j.at("tn").get<std::size_t>();
  c.fn = j.at("fn").get<std::size_t>();
  return c;
}

}  // namespace

std::optional<double> Confusion::precision() const { return ratio(tp, tp + fp); }
std::optional<double> Confusion::recall() const { return ratio(tp, tp + fn); }
std::optional<double> Confusion::accuracy() const { return ratio(tp + tn, total()); }
std::optional<double> Confusion::false_positive_rate() const { return ratio(fp, fp + tn); }
std::optional<double> Confusion::false_negative_rate() const { return ratio(fn, fn + tp); }

double wald_ci(double p, std::size_t n) {
  if (n < 1) throw std::invalid_argument("wald_ci needs n >= 1");
  if (!(p >= 0 && p <= 1)) throw std::invalid_argument("wald_ci needs p in [0, 1]");
  return 1.96 * std::sqrt(p * (1 - p) / static_cast<double>(n));
}

std::string format_summary(double accuracy, double ci) {
  return fixed(accuracy * 100, 1) + "±" + fixed(ci * 100, 1);
}

Metrics score(const std::vector<orchestrator::RunRecord>& records,
              const std::vector<orchestrator::Instance>& instances) {
  if (records.empty()) throw EmptyRecords("no run records to score");
  std::unordered_map<std::string, const orchestrator::Instance*> by_id;
  for (const auto& inst : instances) by_id.emplace(inst.id, &inst);

  Metrics m;
  m.n = records.size();
  for (const auto& r : records) m.k = std::max({m.k, r.k, r.iterations.empty() ? 0 : r.iterations.size() - 1});
  m.steps.resize(m.k + 1);
  for (std::size_t t = 0; t <= m.k; ++t) m.steps[t].step = t;

  double calls = 0, rounds = 0;
  for (const auto& r : records) {
    auto it = by_id.find(r.problem_id);
    if (it == by_id.end()) throw MissingProblem("no problem for record '" + r.problem_id + "'");
    const auto& inst = *it->second;
    auto truth = [&](const std::string& text) { return orchestrator::truth_of(*inst.domain, inst.problem, text); };

    const std::string final_truth = truth(r.final_plan_text);
    if (final_truth == "unparseable") ++m.unparseable_final;
    if (final_truth == "correct") ++m.n_correct;
    ++m.stop_reasons[orchestrator::to_string(r.stop_reason)];
    calls += static_cast<double>(r.llm_calls);
    rounds += static_cast<double>(r.rounds);

    std::vector<bool> correct_at;
    for (const auto& e : r.iterations) {
      const bool ok = truth(e.plan_text) == "correct";
      correct_at.push_back(ok);
      if (e.iteration > m.k) continue;
      const bool said = e.critic_label == critics::Label::Correct;
      add(m.steps[e.iteration].confusion, said, ok);
      add(m.overall, said, ok);
    }
    // A problem counts at step t by its latest plan as of t.
    const bool fallback = final_truth == "correct";
    for (std::size_t t = 0; t <= m.k; ++t) {
      bool ok = correct_at.empty() ? fallback : correct_at[std::min(t, correct_at.size() - 1)];
      m.steps[t].n_correct += ok;
    }
  }
  m.accuracy = static_cast<double>(m.n_correct) / static_cast<double>(m.n);
  m.ci = wald_ci(m.accuracy, m.n);
  for (auto& s : m.steps) s.accuracy = static_cast<double>(s.n_correct) / static_cast<double>(m.n);
  m.mean_llm_calls = calls / static_cast<double>(m.n);
  m.mean_rounds = rounds / static_cast<double>(m.n);
  return m;
}

std::string to_string(ReportFormat format) {
  switch (format) {
    case ReportFormat::TableText: return "table-text";
    case ReportFormat::Csv: return "csv";
    case ReportFormat::Structured: return "structured";
  }
  return "structured";
}

ReportFormat parse_report_format(const std::string& name) {
  for (auto f : {ReportFormat::TableText, ReportFormat::Csv, ReportFormat::Structured})
    if (to_string(f) == name) return f;
  throw std::invalid_argument("unknown report format '" + name + "'");
}

nlohmann::json to_json(const Metrics& m) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : m.steps)
    steps.push_back({{"step", s.step},
                     {"n_correct", s.n_correct},
                     {"accuracy", s.accuracy},
                     {"confusion", to_json(s.confusion)}});
  return {{"n", m.n},
          {"n_correct", m.n_correct},
          {"accuracy", m.accuracy},
          {"ci", m.ci},
          {"summary", format_summary(m.accuracy, m.ci)},
          {"k", m.k},
          {"steps", steps},
          {"confusion", to_json(m.overall)},
          {"mean_llm_calls", m.mean_llm_calls},
          {"mean_rounds", m.mean_rounds},
          {"unparseable_final", m.unparseable_final},
          {"stop_reasons", m.stop_reasons}};
}

Metrics metrics_from_json(const nlohmann::json& j) {
  Metrics m;
  m.n = j.at("n").get<std::size_t>();
  if (m.n == 0) throw EmptyRecords("metrics describe an empty batch");
  m.n_correct = j.at("n_correct").get<std::size_t>();
  m.accuracy = j.at("accuracy").get<double>();
  m.ci = j.at("ci").get<double>();
  m.k = j.at("k").get<std::size_t>();
  for (const auto& s : j.at("steps")) {
    StepMetrics step;
    step.step = s.at("step").get<std::size_t>();
    step.n_correct = s.at("n_correct").get<std::size_t>();
    step.accuracy = s.at("accuracy").get<double>();
    step.confusion = confusion_from_json(s.at("confusion"));
    m.steps.push_back(step);
  }
  m.overall = confusion_from_json(j.at("confusion"));
  m.mean_llm_calls = j.at("mean_llm_calls").get<double>();
  m.mean_rounds = j.value("mean_rounds", 0.0);
  m.unparseable_final = j.value("unparseable_final", std::size_t{0});
  m.stop_reasons = j.value("stop_reasons", std::map<std::string, std::size_t>{});
  return m;
}

std::string render_report(const Metrics& m, ReportFormat format) {
  if (m.n == 0) throw EmptyRecords("nothing to report");
  std::ostringstream out;
  switch (format) {
    case ReportFormat::Structured:
      out << to_json(m).dump(2) << '\n';
      break;
    case ReportFormat::Csv:
      out << "step,n_correct,accuracy,tp,fp,tn,fn,precision,recall\n";
      for (const auto& s : m.steps) {
        const auto& c = s.confusion;
        out << s.step << ',' << s.n_correct << ',' << fixed(s.accuracy, 6) << ',' << c.tp << ',' << c.fp << ','
            << c.tn << ',' << c.fn << ',' << fixed(c.precision(), 6, "") << ',' << fixed(c.recall(), 6, "") << '\n';
      }
      break;
    case ReportFormat::TableText: {
      out << "accuracy " << format_summary(m.accuracy, m.ci) << "  (" << m.n_correct << "/" << m.n << ")\n";
      out << "mean llm calls " << fixed(m.mean_llm_calls, 2) << "  mean rounds " << fixed(m.mean_rounds, 2) << '\n';
      for (const auto& [reason, count] : m.stop_reasons) out << "  " << reason << ": " << count << '\n';
      if (m.unparseable_final) out << "unparseable final plans: " << m.unparseable_final << '\n';
      out << '\n';
      char line[160];
      std::snprintf(line, sizeof line, "%4s %9s %8s %5s %5s %5s %5s %9s %7s\n", "step", "n_correct", "accuracy", "tp",
                    "fp", "tn", "fn", "precision", "recall");
      out << line;
      for (const auto& s : m.steps) {
        const auto& c = s.confusion;
        std::snprintf(line, sizeof line, "%4zu %9zu %8s %5zu %5zu %5zu %5zu %9s %7s\n", s.step, s.n_correct,
                      fixed(s.accuracy, 3).c_str(), c.tp, c.fp, c.tn, c.fn, fixed(c.precision(), 3, "-").c_str(),
                      fixed(c.recall(), 3, "-").c_str());
        out << line;
      }
      break;
    }
  }
  return out.str();
}

void emit_report(const Metrics& m, ReportFormat format, const std::string& path) {
  const std::string text = render_report(m, format);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace plancritic::eval
