#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "comsyn/term.hpp"

namespace comsyn {

struct Binding {
  std::string name;
  Sort sort;
};

// One ADT method: pre/post relation over state, arguments and return values.
// `pre` ranges over state vars and args; `post` additionally over `<v>_new`
// post-state copies and return names. Term hints use $1..$k placeholders for
// the method arguments, grouped by the sort they denote.
struct MethodSpec {
  std::string name;
  std::vector<Binding> args;
  std::vector<Binding> returns;
  TermPtr pre;
  TermPtr post;
  std::vector<std::pair<Sort, std::vector<TermPtr>>> term_hints;
};

struct PredSig {
  std::string op;
  std::vector<Sort> arg_sorts;
};

struct AdtSpec {
  std::string name;
  std::string preamble_text;
  std::map<std::string, int> decl_sorts;                       // uninterpreted sorts -> arity
  std::map<std::string, std::vector<std::string>> enum_sorts;  // datatype name -> constructors
  std::map<std::string, FunSig> decl_funs;                     // preamble functions/constants
  std::vector<Binding> state;
  // Base-state observational equality, over `<v>_1` / `<v>_2` copies of the
  // state vars. Defaults to pointwise equality when the spec omits it.
  TermPtr states_equal;
  bool states_equal_defaulted = true;
  std::vector<MethodSpec> methods;
  std::vector<PredSig> predicates;
  std::vector<SExpr> predicates_extra;  // user hint atoms, elaborated per pair
  std::map<std::string, std::string> options;
  std::vector<std::string> warnings;

  const MethodSpec* find_method(const std::string& name) const;
  Scope state_scope() const;
  // states_equal with `_1`/`_2` replaced by arbitrary snapshot suffixes.
  TermPtr states_equal_for(const std::string& suf1, const std::string& suf2) const;
};

AdtSpec parse_spec_text(const std::string& yaml_text, const std::string& origin = "<string>");
AdtSpec parse_spec(const std::string& path);
std::string print_spec(const AdtSpec& spec);

// Rewrites $k placeholders in a term hint to the method's argument names.
TermPtr instantiate_placeholders(const TermPtr& hint, const MethodSpec& method);

// A method with its argument/return variables renamed apart so two instances
// (including two copies of the same method) can share one formula. The first
// instance of a pair uses args x1..xk and returns r1..; the second y1../s1..
struct MethodInstance {
  const MethodSpec* src = nullptr;
  std::string name;
  std::vector<Binding> args;
  std::vector<Binding> returns;
  TermPtr pre;
  TermPtr post;
  std::vector<std::pair<Sort, std::vector<TermPtr>>> hints;
};

struct PairContext {
  const AdtSpec* adt = nullptr;
  MethodInstance m;  // runs first in the m;n order
  MethodInstance n;
};

MethodInstance rename_apart(const MethodSpec& method, const std::string& arg_stem,
                            const std::string& ret_stem);
PairContext make_pair_context(const AdtSpec& adt, const MethodSpec& m, const MethodSpec& n);

}  // namespace comsyn
