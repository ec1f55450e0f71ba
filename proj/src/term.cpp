#include "comsyn/term.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace comsyn {

std::string Sort::str() const {
  switch (kind) {
    case Kind::Bool:
      return "Bool";
    case Kind::Int:
      return "Int";
    case Kind::Named:
      return name;
    case Kind::Set:
      return "(Set " + params[0].str() + ")";
    case Kind::Array:
      return "(Array " + params[0].str() + " " + params[1].str() + ")";
  }
  return "?";
}

int Sort::cmp(const Sort& o) const {
  if (kind != o.kind) return kind < o.kind ? -1 : 1;
  if (int c = name.compare(o.name)) return c;
  if (params.size() != o.params.size()) return params.size() < o.params.size() ? -1 : 1;
  for (size_t i = 0; i < params.size(); ++i)
    if (int c = params[i].cmp(o.params[i])) return c;
  return 0;
}

std::string SExpr::str() const {
  if (is_atom) return atom;
  std::string out = "(";
  for (size_t i = 0; i < items.size(); ++i) {
    if (i) out += ' ';
    out += items[i].str();
  }
  out += ')';
  return out;
}

namespace {

struct Lexer {
  const std::string& s;
  size_t i = 0;

  explicit Lexer(const std::string& text) : s(text) {}

  void skip_space() {
    while (i < s.size()) {
      if (std::isspace(static_cast<unsigned char>(s[i]))) {
        ++i;
      } else if (s[i] == ';') {
        while (i < s.size() && s[i] != '\n') ++i;
      } else {
        break;
      }
    }
  }

  bool done() {
    skip_space();
    return i >= s.size();
  }

  SExpr next() {
    skip_space();
    if (i >= s.size()) throw SpecError(SpecError::Category::Syntax, "unexpected end of input");
    char c = s[i];
    if (c == '(') {
      ++i;
      std::vector<SExpr> items;
      for (;;) {
        skip_space();
        if (i >= s.size())
          throw SpecError(SpecError::Category::Syntax, "missing ')' in s-expression");
        if (s[i] == ')') {
          ++i;
          return SExpr::make_list(std::move(items));
        }
        items.push_back(next());
      }
    }
    if (c == ')') throw SpecError(SpecError::Category::Syntax, "unbalanced ')'");
    if (c == '"') {
      // Quoted atoms appear in solver responses, e.g. (error "...").
      std::string text(1, '"');
      ++i;
      while (i < s.size() && s[i] != '"') {
        if (s[i] == '\\' && i + 1 < s.size()) text += s[i++];
        text += s[i++];
      }
      if (i >= s.size()) throw SpecError(SpecError::Category::Syntax, "unterminated string");
      ++i;
      text += '"';
      return SExpr::make_atom(std::move(text));
    }
    size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i])) && s[i] != '(' &&
           s[i] != ')' && s[i] != ';')
      ++i;
    return SExpr::make_atom(s.substr(start, i - start));
  }
};

}  // namespace

std::vector<SExpr> parse_sexprs(const std::string& text) {
  Lexer lex(text);
  std::vector<SExpr> out;
  while (!lex.done()) out.push_back(lex.next());
  return out;
}

SExpr parse_sexpr(const std::string& text) {
  auto all = parse_sexprs(text);
  if (all.size() != 1)
    throw SpecError(SpecError::Category::Syntax,
                    "expected exactly one s-expression in: " + text);
  return all[0];
}

TermPtr Term::numeral(long long v) {
  auto t = std::make_shared<Term>();
  t->kind = Kind::Numeral;
  t->sort = Sort::integer();
  t->num = v;
  return t;
}

TermPtr Term::var(std::string name, Sort s) {
  auto t = std::make_shared<Term>();
  t->kind = Kind::Var;
  t->sort = std::move(s);
  t->sym = std::move(name);
  return t;
}

TermPtr Term::app(std::string op, std::vector<TermPtr> args, Sort s) {
  auto t = std::make_shared<Term>();
  t->kind = Kind::App;
  t->sort = std::move(s);
  t->sym = std::move(op);
  t->args = std::move(args);
  return t;
}

TermPtr Term::truth(bool b) { return app(b ? "true" : "false", {}, Sort::boolean()); }

bool term_equal(const TermPtr& a, const TermPtr& b) { return term_compare(a, b) == 0; }

int term_compare(const TermPtr& a, const TermPtr& b) {
  if (a == b) return 0;
  int na = node_count(a), nb = node_count(b);
  if (na != nb) return na < nb ? -1 : 1;
  if (a->kind != b->kind) return a->kind < b->kind ? -1 : 1;
  if (a->kind == Term::Kind::Numeral) return a->num < b->num ? -1 : (a->num > b->num ? 1 : 0);
  if (int c = a->sym.compare(b->sym)) return c < 0 ? -1 : 1;
  if (a->args.size() != b->args.size()) return a->args.size() < b->args.size() ? -1 : 1;
  for (size_t i = 0; i < a->args.size(); ++i)
    if (int c = term_compare(a->args[i], b->args[i])) return c;
  return 0;
}

int node_count(const TermPtr& t) {
  int n = 1;
  for (const auto& a : t->args) n += node_count(a);
  return n;
}

std::string print_term(const TermPtr& t) {
  switch (t->kind) {
    case Term::Kind::Numeral:
      return t->num < 0 ? "(- " + std::to_string(-t->num) + ")" : std::to_string(t->num);
    case Term::Kind::Var:
      return t->sym;
    case Term::Kind::App: {
      if (t->args.empty()) return t->sym;
      std::string out = "(" + t->sym;
      for (const auto& a : t->args) {
        out += ' ';
        out += print_term(a);
      }
      out += ')';
      return out;
    }
  }
  return "?";
}

TermPtr substitute(const TermPtr& t, const std::map<std::string, TermPtr>& by_var) {
  if (t->kind == Term::Kind::Var) {
    auto it = by_var.find(t->sym);
    return it == by_var.end() ? t : it->second;
  }
  if (t->kind != Term::Kind::App || t->args.empty()) return t;
  std::vector<TermPtr> args;
  args.reserve(t->args.size());
  bool changed = false;
  for (const auto& a : t->args) {
    args.push_back(substitute(a, by_var));
    changed = changed || args.back() != a;
  }
  return changed ? Term::app(t->sym, std::move(args), t->sort) : t;
}

TermPtr rename_vars(const TermPtr& t, const std::map<std::string, std::string>& renames) {
  if (t->kind == Term::Kind::Var) {
    auto it = renames.find(t->sym);
    return it == renames.end() ? t : Term::var(it->second, t->sort);
  }
  if (t->kind != Term::Kind::App || t->args.empty()) return t;
  std::vector<TermPtr> args;
  args.reserve(t->args.size());
  bool changed = false;
  for (const auto& a : t->args) {
    args.push_back(rename_vars(a, renames));
    changed = changed || args.back() != a;
  }
  return changed ? Term::app(t->sym, std::move(args), t->sort) : t;
}

void collect_free_vars(const TermPtr& t, std::map<std::string, Sort>& out) {
  if (t->kind == Term::Kind::Var) {
    out.emplace(t->sym, t->sort);
    return;
  }
  for (const auto& a : t->args) collect_free_vars(a, out);
}

TermPtr mk_not(TermPtr a) { return Term::app("not", {std::move(a)}, Sort::boolean()); }

TermPtr mk_and(std::vector<TermPtr> xs) {
  if (xs.empty()) return Term::truth(true);
  if (xs.size() == 1) return xs[0];
  return Term::app("and", std::move(xs), Sort::boolean());
}

TermPtr mk_or(std::vector<TermPtr> xs) {
  if (xs.empty()) return Term::truth(false);
  if (xs.size() == 1) return xs[0];
  return Term::app("or", std::move(xs), Sort::boolean());
}

TermPtr mk_eq(TermPtr a, TermPtr b) {
  return Term::app("=", {std::move(a), std::move(b)}, Sort::boolean());
}

TermPtr mk_implies(TermPtr a, TermPtr b) {
  return Term::app("=>", {std::move(a), std::move(b)}, Sort::boolean());
}

namespace {

std::optional<bool> truth_value(const TermPtr& t) {
  if (t->is_truth(true)) return true;
  if (t->is_truth(false)) return false;
  return std::nullopt;
}

}  // namespace

TermPtr fold_constants(const TermPtr& t) {
  if (t->kind != Term::Kind::App || t->args.empty()) return t;
  std::vector<TermPtr> args;
  args.reserve(t->args.size());
  for (const auto& a : t->args) args.push_back(fold_constants(a));

  const std::string& op = t->sym;
  if (op == "not") {
    if (auto v = truth_value(args[0])) return Term::truth(!*v);
  } else if (op == "and") {
    std::vector<TermPtr> keep;
    for (auto& a : args) {
      auto v = truth_value(a);
      if (v.has_value() && !*v) return Term::truth(false);
      if (!v.has_value()) keep.push_back(a);
    }
    if (keep.size() != args.size()) return mk_and(std::move(keep));
  } else if (op == "or") {
    std::vector<TermPtr> keep;
    for (auto& a : args) {
      auto v = truth_value(a);
      if (v.has_value() && *v) return Term::truth(true);
      if (!v.has_value()) keep.push_back(a);
    }
    if (keep.size() != args.size()) return mk_or(std::move(keep));
  } else if (op == "=>" && args.size() == 2) {
    auto l = truth_value(args[0]), r = truth_value(args[1]);
    if (l.has_value() && !*l) return Term::truth(true);
    if (r.has_value() && *r) return Term::truth(true);
    if (l.has_value() && *l) return args[1];
    if (r.has_value() && !*r) return fold_constants(mk_not(args[0]));
  } else if (op == "ite") {
    if (auto c = truth_value(args[0])) return *c ? args[1] : args[2];
  } else if (args.size() == 2 && args[0]->kind == Term::Kind::Numeral &&
             args[1]->kind == Term::Kind::Numeral) {
    long long a = args[0]->num, b = args[1]->num;
    if (op == "=") return Term::truth(a == b);
    if (op == "<") return Term::truth(a < b);
    if (op == "<=") return Term::truth(a <= b);
    if (op == ">") return Term::truth(a > b);
    if (op == ">=") return Term::truth(a >= b);
  }
  if (op == "=" && args.size() == 2 && term_equal(args[0], args[1])) return Term::truth(true);
  return Term::app(op, std::move(args), t->sort);
}

Sort parse_sort(const SExpr& e, const std::map<std::string, int>& declared_sorts) {
  if (e.is_atom) {
    if (e.atom == "Bool") return Sort::boolean();
    if (e.atom == "Int") return Sort::integer();
    auto it = declared_sorts.find(e.atom);
    if (it == declared_sorts.end())
      throw SpecError(SpecError::Category::Reference, "unknown sort: " + e.atom);
    if (it->second != 0)
      throw SpecError(SpecError::Category::Sort, "sort " + e.atom + " expects parameters");
    return Sort::named(e.atom);
  }
  if (e.items.empty() || !e.items[0].is_atom)
    throw SpecError(SpecError::Category::Syntax, "malformed sort: " + e.str());
  const std::string& head = e.items[0].atom;
  if (head == "Set" && e.items.size() == 2)
    return Sort::set(parse_sort(e.items[1], declared_sorts));
  if (head == "Array" && e.items.size() == 3)
    return Sort::array(parse_sort(e.items[1], declared_sorts),
                       parse_sort(e.items[2], declared_sorts));
  throw SpecError(SpecError::Category::Reference, "unknown sort constructor: " + e.str());
}

Sort parse_sort(const std::string& text, const std::map<std::string, int>& declared_sorts) {
  return parse_sort(parse_sexpr(text), declared_sorts);
}

namespace {

bool is_numeral(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

[[noreturn]] void sort_error(const std::string& op, const std::vector<TermPtr>& args,
                             const std::string& why) {
  std::ostringstream msg;
  msg << "cannot apply " << op << " to (";
  for (size_t i = 0; i < args.size(); ++i) {
    if (i) msg << ", ";
    msg << args[i]->sort.str();
  }
  msg << "): " << why;
  throw SpecError(SpecError::Category::Sort, msg.str());
}

void require_arity(const std::string& op, const std::vector<TermPtr>& args, size_t lo,
                   size_t hi) {
  if (args.size() < lo || args.size() > hi)
    sort_error(op, args, "wrong number of arguments");
}

void require_same_sort(const std::string& op, const std::vector<TermPtr>& args) {
  for (size_t i = 1; i < args.size(); ++i)
    if (args[i]->sort != args[0]->sort) sort_error(op, args, "mismatched argument sorts");
}

void require_ints(const std::string& op, const std::vector<TermPtr>& args) {
  for (const auto& a : args)
    if (!a->sort.is_int()) sort_error(op, args, "expected Int arguments");
}

void require_bools(const std::string& op, const std::vector<TermPtr>& args) {
  for (const auto& a : args)
    if (!a->sort.is_bool()) sort_error(op, args, "expected Bool arguments");
}

// Resolves a builtin application; returns nullopt when the operator is not a
// builtin (caller then tries preamble-declared functions).
std::optional<Sort> builtin_result_sort(const std::string& op, const std::vector<TermPtr>& args) {
  if (op == "=" || op == "distinct") {
    require_arity(op, args, 2, 16);
    require_same_sort(op, args);
    return Sort::boolean();
  }
  if (op == "not") {
    require_arity(op, args, 1, 1);
    require_bools(op, args);
    return Sort::boolean();
  }
  if (op == "and" || op == "or" || op == "xor") {
    require_arity(op, args, 1, SIZE_MAX);
    require_bools(op, args);
    return Sort::boolean();
  }
  if (op == "=>") {
    require_arity(op, args, 2, SIZE_MAX);
    require_bools(op, args);
    return Sort::boolean();
  }
  if (op == "ite") {
    require_arity(op, args, 3, 3);
    if (!args[0]->sort.is_bool()) sort_error(op, args, "condition must be Bool");
    if (args[1]->sort != args[2]->sort) sort_error(op, args, "branches must agree");
    return args[1]->sort;
  }
  if (op == "+" || op == "*") {
    require_arity(op, args, 1, SIZE_MAX);
    require_ints(op, args);
    return Sort::integer();
  }
  if (op == "-") {
    require_arity(op, args, 1, SIZE_MAX);
    require_ints(op, args);
    return Sort::integer();
  }
  if (op == "div" || op == "mod") {
    require_arity(op, args, 2, 2);
    require_ints(op, args);
    return Sort::integer();
  }
  if (op == "<" || op == "<=" || op == ">" || op == ">=") {
    require_arity(op, args, 2, 2);
    require_ints(op, args);
    return Sort::boolean();
  }
  if (op == "member") {
    require_arity(op, args, 2, 2);
    if (args[1]->sort.kind != Sort::Kind::Set || args[1]->sort.params[0] != args[0]->sort)
      sort_error(op, args, "expected (T, (Set T))");
    return Sort::boolean();
  }
  if (op == "singleton") {
    require_arity(op, args, 1, 1);
    return Sort::set(args[0]->sort);
  }
  if (op == "union" || op == "intersection" || op == "setminus") {
    require_arity(op, args, 2, 2);
    if (args[0]->sort.kind != Sort::Kind::Set || args[0]->sort != args[1]->sort)
      sort_error(op, args, "expected two equal set sorts");
    return args[0]->sort;
  }
  if (op == "subset") {
    require_arity(op, args, 2, 2);
    if (args[0]->sort.kind != Sort::Kind::Set || args[0]->sort != args[1]->sort)
      sort_error(op, args, "expected two equal set sorts");
    return Sort::boolean();
  }
  if (op == "insert") {
    // SMT-LIB style: (insert e1 .. en S)
    require_arity(op, args, 2, 16);
    const Sort& s = args.back()->sort;
    if (s.kind != Sort::Kind::Set) sort_error(op, args, "last argument must be a set");
    for (size_t i = 0; i + 1 < args.size(); ++i)
      if (args[i]->sort != s.params[0]) sort_error(op, args, "element sort mismatch");
    return s;
  }
  if (op == "select") {
    require_arity(op, args, 2, 2);
    if (args[0]->sort.kind != Sort::Kind::Array || args[0]->sort.params[0] != args[1]->sort)
      sort_error(op, args, "expected ((Array I V), I)");
    return args[0]->sort.params[1];
  }
  if (op == "store") {
    require_arity(op, args, 3, 3);
    if (args[0]->sort.kind != Sort::Kind::Array || args[0]->sort.params[0] != args[1]->sort ||
        args[0]->sort.params[1] != args[2]->sort)
      sort_error(op, args, "expected ((Array I V), I, V)");
    return args[0]->sort;
  }
  return std::nullopt;
}

}  // namespace

TermPtr elaborate(const SExpr& e, const Scope& scope) {
  if (e.is_atom) {
    const std::string& a = e.atom;
    if (is_numeral(a)) return Term::numeral(std::stoll(a));
    if (a == "true") return Term::truth(true);
    if (a == "false") return Term::truth(false);
    if (a.size() >= 2 && a[0] == '$' && is_numeral(a.substr(1))) {
      if (!scope.placeholders)
        throw SpecError(SpecError::Category::Reference,
                        "placeholder " + a + " not allowed here");
      size_t k = std::stoul(a.substr(1));
      if (k == 0 || k > scope.placeholders->size())
        throw SpecError(SpecError::Category::Reference,
                        "placeholder " + a + " out of range (method has " +
                            std::to_string(scope.placeholders->size()) + " argument(s))");
      return Term::var(a, (*scope.placeholders)[k - 1]);
    }
    if (auto it = scope.vars.find(a); it != scope.vars.end()) return Term::var(a, it->second);
    if (scope.funs) {
      if (auto it = scope.funs->find(a); it != scope.funs->end() && it->second.params.empty())
        return Term::app(a, {}, it->second.ret);
    }
    throw SpecError(SpecError::Category::Reference, "unknown identifier: " + a);
  }

  if (e.items.empty() || !e.items[0].is_atom)
    throw SpecError(SpecError::Category::Syntax, "malformed application: " + e.str());
  const std::string& op = e.items[0].atom;
  std::vector<TermPtr> args;
  args.reserve(e.items.size() - 1);
  for (size_t i = 1; i < e.items.size(); ++i) args.push_back(elaborate(e.items[i], scope));

  // Unary minus over a numeral literal folds into a negative numeral.
  if (op == "-" && args.size() == 1 && args[0]->kind == Term::Kind::Numeral)
    return Term::numeral(-args[0]->num);

  if (auto ret = builtin_result_sort(op, args)) return Term::app(op, std::move(args), *ret);

  if (scope.funs) {
    if (auto it = scope.funs->find(op); it != scope.funs->end()) {
      const FunSig& sig = it->second;
      if (sig.params.size() != args.size())
        sort_error(op, args, "expected " + std::to_string(sig.params.size()) + " argument(s)");
      for (size_t i = 0; i < args.size(); ++i)
        if (args[i]->sort != sig.params[i])
          sort_error(op, args, "argument " + std::to_string(i + 1) + " expects " +
                                   sig.params[i].str());
      return Term::app(op, std::move(args), sig.ret);
    }
  }
  throw SpecError(SpecError::Category::Reference, "unknown operator: " + op);
}

TermPtr elaborate(const std::string& sexp_text, const Scope& scope) {
  return elaborate(parse_sexpr(sexp_text), scope);
}

}  // namespace comsyn
