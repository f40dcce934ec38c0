#include "plancritic/pddl.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace plancritic::pddl {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Syntax: return "SyntaxError";
    case ErrorKind::UnsupportedFeature: return "UnsupportedFeature";
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::UnknownPredicate: return "UnknownPredicate";
    case ErrorKind::UnknownObject: return "UnknownObject";
    case ErrorKind::UnknownAction: return "UnknownAction";
    case ErrorKind::UndeclaredVariable: return "UndeclaredVariable";
    case ErrorKind::DuplicateName: return "DuplicateName";
    case ErrorKind::ContradictoryEffect: return "ContradictoryEffect";
    case ErrorKind::NegatedGoal: return "NegatedGoal";
  }
  return "Unknown";
}

namespace {

std::string format_message(ErrorKind kind, const std::string& message, std::size_t line,
                           std::size_t column) {
  std::ostringstream out;
  out << to_string(kind);
  if (line > 0) out << " at " << line << ':' << column;
  out << ": " << message;
  return out.str();
}

}  // namespace

ParseError::ParseError(ErrorKind kind, std::string message, std::size_t line, std::size_t column)
    : std::runtime_error(format_message(kind, message, line, column)),
      kind_(kind),
      line_(line),
      column_(column) {}

const ActionSchema* DomainDef::find_action(std::string_view action_name) const {
  for (const auto& action : actions)
    if (action.name == action_name) return &action;
  return nullptr;
}

const PredicateDecl* DomainDef::find_predicate(std::string_view predicate_name) const {
  for (const auto& predicate : predicates)
    if (predicate.name == predicate_name) return &predicate;
  return nullptr;
}

namespace {

// ---------------------------------------------------------------------------
// S-expression reader
// ---------------------------------------------------------------------------

struct SExpr {
  bool is_list = false;
  std::string token;
  std::vector<SExpr> items;
  std::size_t line = 0;
  std::size_t column = 0;
};

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  std::vector<SExpr> read_all() {
    std::vector<SExpr> out;
    skip_space();
    while (pos_ < text_.size()) {
      out.push_back(read_one());
      skip_space();
    }
    return out;
  }

 private:
  SExpr read_one() {
    SExpr node;
    node.line = line_;
    node.column = column_;
    char c = text_[pos_];
    if (c == ')') throw ParseError(ErrorKind::Syntax, "unexpected ')'", line_, column_);
    if (c == '(') {
      node.is_list = true;
      advance();
      skip_space();
      while (true) {
        if (pos_ >= text_.size())
          throw ParseError(ErrorKind::Syntax, "unterminated list", node.line, node.column);
        if (text_[pos_] == ')') {
          advance();
          break;
        }
        node.items.push_back(read_one());
        skip_space();
      }
      return node;
    }
    std::size_t start = pos_;
    while (pos_ < text_.size()) {
      char d = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(d)) || d == '(' || d == ')' || d == ';') break;
      advance();
    }
    node.token = std::string(text_.substr(start, pos_ - start));
    return node;
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

[[noreturn]] void fail(ErrorKind kind, const std::string& message, const SExpr& at) {
  throw ParseError(kind, message, at.line, at.column);
}

bool is_keyword(const SExpr& node, std::string_view keyword) {
  return !node.is_list && lower(node.token) == keyword;
}

const std::string& expect_token(const SExpr& node, std::string_view what) {
  if (node.is_list) fail(ErrorKind::Syntax, "expected " + std::string(what), node);
  return node.token;
}

const SExpr& expect_list(const SExpr& node, std::string_view what) {
  if (!node.is_list) fail(ErrorKind::Syntax, "expected " + std::string(what), node);
  return node;
}

bool is_variable(std::string_view token) { return !token.empty() && token.front() == '?'; }

bool is_identifier(std::string_view token) {
  if (token.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(token.front()))) return false;
  return std::all_of(token.begin(), token.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '-' || c == '_';
  });
}

void expect_identifier(const SExpr& node, std::string_view what) {
  const auto& token = expect_token(node, what);
  if (!is_identifier(token)) fail(ErrorKind::Syntax, "invalid " + std::string(what) + " '" + token + "'", node);
}

const std::unordered_set<std::string>& unsupported_connectives() {
  static const std::unordered_set<std::string> words = {
      "or", "forall", "exists", "imply", "when", "=", "increase", "decrease", "assign",
      "preference"};
  return words;
}

// Top-level `(define (<kind> <name>) sections...)`.
struct DefineForm {
  std::string name;
  const SExpr* header = nullptr;
  std::vector<const SExpr*> sections;
};

DefineForm read_define(std::string_view text, std::string_view kind, std::vector<SExpr>& storage) {
  storage = Reader(text).read_all();
  if (storage.empty()) throw ParseError(ErrorKind::Syntax, "empty input", 1, 1);
  if (storage.size() > 1) fail(ErrorKind::Syntax, "trailing content after define", storage[1]);
  const SExpr& root = storage.front();
  expect_list(root, "(define ...)");
  if (root.items.empty() || !is_keyword(root.items[0], "define"))
    fail(ErrorKind::Syntax, "expected 'define'", root);
  if (root.items.size() < 2) fail(ErrorKind::Syntax, "missing define header", root);
  const SExpr& header = expect_list(root.items[1], "define header");
  if (header.items.size() != 2 || !is_keyword(header.items[0], kind))
    fail(ErrorKind::Syntax, "expected (" + std::string(kind) + " <name>)", header);
  expect_identifier(header.items[1], std::string(kind) + " name");
  DefineForm form;
  form.name = header.items[1].token;
  form.header = &header;
  for (std::size_t i = 2; i < root.items.size(); ++i) {
    const SExpr& section = expect_list(root.items[i], "section");
    if (section.items.empty() || section.items[0].is_list)
      fail(ErrorKind::Syntax, "expected section keyword", section);
    form.sections.push_back(&section);
  }
  return form;
}

// Flattens `(and a b ...)`, a single atom, `()` or `(and)` into a list of
// literal nodes.
std::vector<const SExpr*> conjuncts(const SExpr& node) {
  expect_list(node, "formula");
  if (node.items.empty()) return {};
  if (is_keyword(node.items[0], "and")) {
    std::vector<const SExpr*> out;
    for (std::size_t i = 1; i < node.items.size(); ++i) {
      const SExpr& item = expect_list(node.items[i], "literal");
      if (!item.items.empty() && is_keyword(item.items[0], "and")) {
        auto nested = conjuncts(item);
        out.insert(out.end(), nested.begin(), nested.end());
      } else {
        out.push_back(&item);
      }
    }
    return out;
  }
  return {&node};
}

Atom read_atom(const SExpr& node) {
  expect_list(node, "atom");
  if (node.items.empty()) fail(ErrorKind::Syntax, "empty atom", node);
  const auto& head = expect_token(node.items[0], "predicate name");
  if (unsupported_connectives().count(lower(head)))
    fail(ErrorKind::UnsupportedFeature, "connective '" + head + "' is outside the STRIPS subset", node);
  if (!is_identifier(head)) fail(ErrorKind::Syntax, "invalid predicate name '" + head + "'", node.items[0]);
  Atom atom;
  atom.predicate = head;
  for (std::size_t i = 1; i < node.items.size(); ++i)
    atom.args.push_back(expect_token(node.items[i], "argument"));
  return atom;
}

// Returns the literal and whether it was wrapped in `not`.
Literal read_literal(const SExpr& node) {
  expect_list(node, "literal");
  if (!node.items.empty() && is_keyword(node.items[0], "not")) {
    if (node.items.size() != 2) fail(ErrorKind::Syntax, "'not' takes one atom", node);
    return Literal{read_atom(node.items[1]), true};
  }
  return Literal{read_atom(node), false};
}

void check_atom_against(const Atom& atom, const DomainDef& domain, const SExpr& at) {
  const PredicateDecl* decl = domain.find_predicate(atom.predicate);
  if (!decl) fail(ErrorKind::UnknownPredicate, "undeclared predicate '" + atom.predicate + "'", at);
  if (decl->arity() != atom.args.size())
    fail(ErrorKind::ArityMismatch,
         "predicate '" + atom.predicate + "' expects " + std::to_string(decl->arity()) +
             " argument(s), got " + std::to_string(atom.args.size()),
         at);
}

void check_schema_vars(const Atom& atom, const std::vector<std::string>& params, const SExpr& at) {
  for (const auto& arg : atom.args) {
    if (!is_variable(arg))
      fail(ErrorKind::UnsupportedFeature, "constant '" + arg + "' in action schema", at);
    if (std::find(params.begin(), params.end(), arg) == params.end())
      fail(ErrorKind::UndeclaredVariable, "variable '" + arg + "' is not a parameter", at);
  }
}

std::vector<std::string> read_variable_list(const SExpr& list, std::string_view what) {
  expect_list(list, what);
  std::vector<std::string> vars;
  for (const auto& item : list.items) {
    const auto& token = expect_token(item, "variable");
    if (token == "-") fail(ErrorKind::UnsupportedFeature, "typed parameters are not supported", item);
    if (!is_variable(token) || token.size() < 2)
      fail(ErrorKind::Syntax, "expected ?variable, got '" + token + "'", item);
    if (std::find(vars.begin(), vars.end(), token) != vars.end())
      fail(ErrorKind::DuplicateName, "duplicate variable '" + token + "'", item);
    vars.push_back(token);
  }
  return vars;
}

PredicateDecl read_predicate_decl(const SExpr& node) {
  expect_list(node, "predicate declaration");
  if (node.items.empty()) fail(ErrorKind::Syntax, "empty predicate declaration", node);
  expect_identifier(node.items[0], "predicate name");
  PredicateDecl decl;
  decl.name = node.items[0].token;
  SExpr params = node;
  params.items.erase(params.items.begin());
  decl.params = read_variable_list(params, "predicate parameters");
  return decl;
}

ActionSchema read_action(const SExpr& section, const DomainDef& domain) {
  if (section.items.size() < 2) fail(ErrorKind::Syntax, "action without a name", section);
  expect_identifier(section.items[1], "action name");
  ActionSchema action;
  action.name = section.items[1].token;

  const SExpr* precondition = nullptr;
  const SExpr* effect = nullptr;
  bool have_params = false;
  for (std::size_t i = 2; i < section.items.size(); i += 2) {
    const SExpr& key = section.items[i];
    const auto& keyword = lower(expect_token(key, "action field keyword"));
    if (i + 1 >= section.items.size()) fail(ErrorKind::Syntax, "missing value for " + keyword, key);
    const SExpr& value = section.items[i + 1];
    if (keyword == ":parameters") {
      if (have_params) fail(ErrorKind::Syntax, "duplicate :parameters", key);
      action.parameters = read_variable_list(value, ":parameters list");
      have_params = true;
    } else if (keyword == ":precondition") {
      if (precondition) fail(ErrorKind::Syntax, "duplicate :precondition", key);
      precondition = &value;
    } else if (keyword == ":effect") {
      if (effect) fail(ErrorKind::Syntax, "duplicate :effect", key);
      effect = &value;
    } else if (keyword == ":vars" || keyword == ":duration" || keyword == ":condition") {
      fail(ErrorKind::UnsupportedFeature, "action field " + keyword + " is not supported", key);
    } else {
      fail(ErrorKind::Syntax, "unknown action field " + keyword, key);
    }
  }

  if (precondition) {
    for (const SExpr* node : conjuncts(*precondition)) {
      Literal literal = read_literal(*node);
      if (literal.negated)
        fail(ErrorKind::UnsupportedFeature, "negative preconditions are not supported", *node);
      check_atom_against(literal.atom, domain, *node);
      check_schema_vars(literal.atom, action.parameters, *node);
      action.precondition.push_back(std::move(literal.atom));
    }
  }
  if (effect) {
    for (const SExpr* node : conjuncts(*effect)) {
      Literal literal = read_literal(*node);
      check_atom_against(literal.atom, domain, *node);
      check_schema_vars(literal.atom, action.parameters, *node);
      for (const auto& other : action.effect) {
        if (other.atom == literal.atom && other.negated != literal.negated)
          fail(ErrorKind::ContradictoryEffect,
               "literal " + to_string(literal.atom) + " is both added and deleted", *node);
      }
      action.effect.push_back(std::move(literal));
    }
  }
  return action;
}

void require_unique_section(std::set<std::string>& seen, const std::string& keyword, const SExpr& at) {
  if (!seen.insert(keyword).second) fail(ErrorKind::Syntax, "duplicate section " + keyword, at);
}

}  // namespace

DomainDef parse_domain(std::string_view text) {
  std::vector<SExpr> storage;
  DefineForm form = read_define(text, "domain", storage);
  DomainDef domain;
  domain.name = form.name;
  std::set<std::string> seen;
  std::vector<const SExpr*> action_sections;

  for (const SExpr* section : form.sections) {
    const std::string keyword = lower(section->items[0].token);
    if (keyword == ":requirements") {
      require_unique_section(seen, keyword, *section);
      for (std::size_t i = 1; i < section->items.size(); ++i) {
        const std::string flag = lower(expect_token(section->items[i], "requirement flag"));
        if (flag != ":strips")
          fail(ErrorKind::UnsupportedFeature, "requirement " + flag + " is outside the STRIPS subset",
               section->items[i]);
        if (std::find(domain.requirements.begin(), domain.requirements.end(), flag) ==
            domain.requirements.end())
          domain.requirements.push_back(flag);
      }
    } else if (keyword == ":predicates") {
      require_unique_section(seen, keyword, *section);
      for (std::size_t i = 1; i < section->items.size(); ++i) {
        PredicateDecl decl = read_predicate_decl(section->items[i]);
        if (domain.find_predicate(decl.name))
          fail(ErrorKind::DuplicateName, "duplicate predicate '" + decl.name + "'", section->items[i]);
        domain.predicates.push_back(std::move(decl));
      }
    } else if (keyword == ":action") {
      action_sections.push_back(section);
    } else if (keyword == ":types" || keyword == ":constants" || keyword == ":functions" ||
               keyword == ":derived" || keyword == ":durative-action" || keyword == ":constraints") {
      fail(ErrorKind::UnsupportedFeature, "section " + keyword + " is outside the STRIPS subset", *section);
    } else {
      fail(ErrorKind::Syntax, "unknown domain section " + keyword, *section);
    }
  }

  // Actions may precede :predicates in the text; resolve them afterwards.
  for (const SExpr* section : action_sections) {
    ActionSchema action = read_action(*section, domain);
    if (domain.find_action(action.name))
      fail(ErrorKind::DuplicateName, "duplicate action '" + action.name + "'", *section);
    domain.actions.push_back(std::move(action));
  }
  return domain;
}

ProblemDef parse_problem(std::string_view text, const DomainDef& domain) {
  std::vector<SExpr> storage;
  DefineForm form = read_define(text, "problem", storage);
  ProblemDef problem;
  problem.name = form.name;
  std::set<std::string> seen;
  const SExpr* init_section = nullptr;
  const SExpr* goal_section = nullptr;

  for (const SExpr* section : form.sections) {
    const std::string keyword = lower(section->items[0].token);
    if (keyword == ":domain") {
      require_unique_section(seen, keyword, *section);
      if (section->items.size() != 2) fail(ErrorKind::Syntax, "expected (:domain <name>)", *section);
      expect_identifier(section->items[1], "domain name");
      problem.domain_name = section->items[1].token;
    } else if (keyword == ":objects") {
      require_unique_section(seen, keyword, *section);
      for (std::size_t i = 1; i < section->items.size(); ++i) {
        const SExpr& item = section->items[i];
        if (!item.is_list && item.token == "-")
          fail(ErrorKind::UnsupportedFeature, "typed objects are not supported", item);
        expect_identifier(item, "object name");
        if (std::find(problem.objects.begin(), problem.objects.end(), item.token) != problem.objects.end())
          fail(ErrorKind::DuplicateName, "duplicate object '" + item.token + "'", item);
        problem.objects.push_back(item.token);
      }
    } else if (keyword == ":init") {
      require_unique_section(seen, keyword, *section);
      init_section = section;
    } else if (keyword == ":goal") {
      require_unique_section(seen, keyword, *section);
      goal_section = section;
    } else if (keyword == ":requirements") {
      require_unique_section(seen, keyword, *section);
    } else if (keyword == ":metric" || keyword == ":constraints") {
      fail(ErrorKind::UnsupportedFeature, "section " + keyword + " is outside the STRIPS subset", *section);
    } else {
      fail(ErrorKind::Syntax, "unknown problem section " + keyword, *section);
    }
  }
  if (problem.domain_name.empty())
    fail(ErrorKind::Syntax, "missing (:domain ...) section", *form.header);
  if (problem.domain_name != domain.name)
    fail(ErrorKind::Syntax,
         "problem is for domain '" + problem.domain_name + "', not '" + domain.name + "'", *form.header);

  auto check_ground = [&](const Atom& atom, const SExpr& at) {
    check_atom_against(atom, domain, at);
    for (const auto& arg : atom.args) {
      if (std::find(problem.objects.begin(), problem.objects.end(), arg) == problem.objects.end())
        fail(ErrorKind::UnknownObject, "undeclared object '" + arg + "'", at);
    }
  };

  if (init_section) {
    for (std::size_t i = 1; i < init_section->items.size(); ++i) {
      const SExpr& node = expect_list(init_section->items[i], "init atom");
      Literal literal = read_literal(node);
      if (literal.negated)
        fail(ErrorKind::UnsupportedFeature, "negated init atoms are not supported", node);
      check_ground(literal.atom, node);
      if (std::find(problem.init.begin(), problem.init.end(), literal.atom) == problem.init.end())
        problem.init.push_back(std::move(literal.atom));
    }
  }
  if (goal_section) {
    if (goal_section->items.size() != 2) fail(ErrorKind::Syntax, "expected (:goal <formula>)", *goal_section);
    for (const SExpr* node : conjuncts(goal_section->items[1])) {
      Literal literal = read_literal(*node);
      if (literal.negated) fail(ErrorKind::NegatedGoal, "negated goal atoms are not supported", *node);
      check_ground(literal.atom, *node);
      problem.goal.push_back(std::move(literal.atom));
    }
  }
  return problem;
}

Plan parse_plan(std::string_view text, const DomainDef& domain) {
  Plan plan;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    start = end + 1;

    std::vector<SExpr> nodes;
    try {
      nodes = Reader(line).read_all();
    } catch (const ParseError& error) {
      throw ParseError(ErrorKind::Syntax, "malformed plan step", line_no, error.column());
    }
    if (nodes.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (nodes.size() > 1)
      throw ParseError(ErrorKind::Syntax, "one action per line expected", line_no, nodes[1].column);
    const SExpr& node = nodes.front();
    if (!node.is_list || node.items.empty())
      throw ParseError(ErrorKind::Syntax, "expected (action arg ...)", line_no, node.column);
    GroundAction step;
    for (std::size_t i = 0; i < node.items.size(); ++i) {
      const SExpr& item = node.items[i];
      if (item.is_list || !is_identifier(item.token))
        throw ParseError(ErrorKind::Syntax, "expected identifier in plan step", line_no, item.column);
      if (i == 0)
        step.name = item.token;
      else
        step.args.push_back(item.token);
    }
    const ActionSchema* schema = domain.find_action(step.name);
    if (!schema)
      throw ParseError(ErrorKind::UnknownAction, "undeclared action '" + step.name + "'", line_no, node.column);
    if (schema->parameters.size() != step.args.size())
      throw ParseError(ErrorKind::ArityMismatch,
                       "action '" + step.name + "' expects " + std::to_string(schema->parameters.size()) +
                           " argument(s), got " + std::to_string(step.args.size()),
                       line_no, node.column);
    plan.steps.push_back(std::move(step));
    if (end == text.size()) break;
  }
  return plan;
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

std::string to_string(const Atom& atom) {
  std::string out = "(" + atom.predicate;
  for (const auto& arg : atom.args) out += " " + arg;
  out += ")";
  return out;
}

std::string to_string(const Literal& literal) {
  return literal.negated ? "(not " + to_string(literal.atom) + ")" : to_string(literal.atom);
}

std::string to_string(const GroundAction& action) {
  std::string out = "(" + action.name;
  for (const auto& arg : action.args) out += " " + arg;
  out += ")";
  return out;
}

namespace {

template <typename Range, typename Fn>
std::string conjunction(const Range& items, Fn&& render) {
  if (items.size() == 1) return render(items.front());
  std::string out = "(and";
  for (const auto& item : items) out += " " + render(item);
  out += ")";
  return out;
}

}  // namespace

std::string print_domain(const DomainDef& domain) {
  std::ostringstream out;
  out << "(define (domain " << domain.name << ")\n";
  if (!domain.requirements.empty()) {
    out << "  (:requirements";
    for (const auto& flag : domain.requirements) out << ' ' << flag;
    out << ")\n";
  }
  out << "  (:predicates";
  for (const auto& predicate : domain.predicates) {
    out << " (" << predicate.name;
    for (const auto& param : predicate.params) out << ' ' << param;
    out << ')';
  }
  out << ")\n";
  for (const auto& action : domain.actions) {
    out << "\n  (:action " << action.name << "\n";
    out << "    :parameters (";
    for (std::size_t i = 0; i < action.parameters.size(); ++i) out << (i ? " " : "") << action.parameters[i];
    out << ")\n";
    out << "    :precondition "
        << conjunction(action.precondition, [](const Atom& a) { return to_string(a); }) << "\n";
    out << "    :effect " << conjunction(action.effect, [](const Literal& l) { return to_string(l); })
        << ")\n";
  }
  out << ")\n";
  return out.str();
}

std::string print_problem(const ProblemDef& problem) {
  std::ostringstream out;
  out << "(define (problem " << problem.name << ")\n";
  out << "(:domain " << problem.domain_name << ")\n";
  out << "(:objects";
  for (const auto& object : problem.objects) out << ' ' << object;
  out << ")\n";
  out << "(:init\n";
  for (const auto& atom : problem.init) out << to_string(atom) << "\n";
  out << ")\n";
  out << "(:goal (and\n";
  for (const auto& atom : problem.goal) out << to_string(atom) << "\n";
  out << "))\n";
  out << ")\n";
  return out.str();
}

std::string print_plan(const Plan& plan) {
  std::string out;
  for (const auto& step : plan.steps) out += to_string(step) + "\n";
  return out;
}

Atom substitute(const Atom& atom, const std::vector<std::string>& params,
                const std::vector<std::string>& args) {
  Atom out;
  out.predicate = atom.predicate;
  out.args.reserve(atom.args.size());
  for (const auto& arg : atom.args) {
    auto it = std::find(params.begin(), params.end(), arg);
    out.args.push_back(it == params.end() ? arg : args[static_cast<std::size_t>(it - params.begin())]);
  }
  return out;
}

void check_domain(const DomainDef& domain) {
  // Reparsing the canonical text runs every structural check in one place.
  DomainDef reparsed = parse_domain(print_domain(domain));
  if (!(reparsed == domain))
    throw ParseError(ErrorKind::Syntax, "domain '" + domain.name + "' is not in canonical form", 0, 0);
}

void check_problem(const ProblemDef& problem, const DomainDef& domain) {
  ProblemDef reparsed = parse_problem(print_problem(problem), domain);
  if (!(reparsed == problem))
    throw ParseError(ErrorKind::Syntax, "problem '" + problem.name + "' is not in canonical form", 0, 0);
}

}  // namespace plancritic::pddl
