#pragma once

#include "comsyn/sorts.hpp"

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace comsyn {

// Errors raised while reading a specification. The category tells apart
// malformed text, ill-sorted terms, and references to unknown names.
class SpecError : public std::runtime_error {
 public:
  enum class Category { Syntax, Sort, Reference };
  SpecError(Category c, const std::string& msg) : std::runtime_error(msg), category(c) {}
  Category category;
};

// Raw s-expressions: the wire format of spec clauses and solver responses.
struct SExpr {
  bool is_atom = true;
  std::string atom;
  std::vector<SExpr> items;

  static SExpr make_atom(std::string a) {
    SExpr e;
    e.atom = std::move(a);
    return e;
  }
  static SExpr make_list(std::vector<SExpr> xs) {
    SExpr e;
    e.is_atom = false;
    e.items = std::move(xs);
    return e;
  }
  std::string str() const;
};

std::vector<SExpr> parse_sexprs(const std::string& text);
SExpr parse_sexpr(const std::string& text);  // exactly one form

// Typed terms. Immutable; share freely.
struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
  enum class Kind { Numeral, Var, App };

  Kind kind = Kind::App;
  Sort sort;
  long long num = 0;          // Numeral
  std::string sym;            // Var name or App operator
  std::vector<TermPtr> args;  // App only

  static TermPtr numeral(long long v);
  static TermPtr var(std::string name, Sort s);
  static TermPtr app(std::string op, std::vector<TermPtr> args, Sort s);
  static TermPtr truth(bool b);

  bool is_truth(bool b) const {
    return kind == Kind::App && args.empty() && sym == (b ? "true" : "false");
  }
};

bool term_equal(const TermPtr& a, const TermPtr& b);
int term_compare(const TermPtr& a, const TermPtr& b);  // fixed total order
int node_count(const TermPtr& t);
std::string print_term(const TermPtr& t);

TermPtr substitute(const TermPtr& t, const std::map<std::string, TermPtr>& by_var);
TermPtr rename_vars(const TermPtr& t, const std::map<std::string, std::string>& renames);
void collect_free_vars(const TermPtr& t, std::map<std::string, Sort>& out);

// Constant folding over and/or/not/ite/=> with literal operands, plus ground
// numeral comparisons. Used to normalise macro expansions at parse time.
TermPtr fold_constants(const TermPtr& t);

// Convenience builders (n-ary forms collapse empty/singleton argument lists).
TermPtr mk_not(TermPtr a);
TermPtr mk_and(std::vector<TermPtr> xs);
TermPtr mk_or(std::vector<TermPtr> xs);
TermPtr mk_eq(TermPtr a, TermPtr b);
TermPtr mk_implies(TermPtr a, TermPtr b);

// Uninterpreted function signature, as declared in a spec preamble.
struct FunSig {
  std::vector<Sort> params;
  Sort ret;
};

// Name resolution context for elaborating an s-expression into a typed term.
struct Scope {
  std::map<std::string, Sort> vars;
  const std::map<std::string, FunSig>* funs = nullptr;
  const std::vector<Sort>* placeholders = nullptr;  // sorts of $1.. (method args)
};

TermPtr elaborate(const SExpr& e, const Scope& scope);
TermPtr elaborate(const std::string& sexp_text, const Scope& scope);

Sort parse_sort(const SExpr& e, const std::map<std::string, int>& declared_sorts);
Sort parse_sort(const std::string& text, const std::map<std::string, int>& declared_sorts);

}  // namespace comsyn
