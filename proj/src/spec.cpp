#include "comsyn/spec.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace comsyn {

const MethodSpec* AdtSpec::find_method(const std::string& name) const {
  for (const auto& m : methods)
    if (m.name == name) return &m;
  return nullptr;
}

Scope AdtSpec::state_scope() const {
  Scope sc;
  for (const auto& b : state) sc.vars.emplace(b.name, b.sort);
  sc.funs = &decl_funs;
  return sc;
}

TermPtr AdtSpec::states_equal_for(const std::string& suf1, const std::string& suf2) const {
  std::map<std::string, std::string> renames;
  for (const auto& b : state) {
    renames[b.name + "_1"] = b.name + suf1;
    renames[b.name + "_2"] = b.name + suf2;
  }
  return rename_vars(states_equal, renames);
}

namespace {

SExpr substitute_atoms(const SExpr& e, const std::map<std::string, SExpr>& sub) {
  if (e.is_atom) {
    auto it = sub.find(e.atom);
    return it == sub.end() ? e : it->second;
  }
  std::vector<SExpr> items;
  items.reserve(e.items.size());
  for (const auto& x : e.items) items.push_back(substitute_atoms(x, sub));
  return SExpr::make_list(std::move(items));
}

// Pre-elaboration rewriting of requires/ensures clauses:
//  - `(states_equal a1..ak b1..bk)` expands to the spec's equality definition
//    with the two state copies bound positionally; the 2(k+1)-argument form
//    additionally threads error flags through the lifted equality pattern.
//  - In base specs (no `err` state variable) the `err`/`err_new` atoms denote
//    the never-taken error branch and resolve to `false`.
struct ClauseRewriter {
  const std::vector<Binding>& state;
  const SExpr& equality_def;  // over <v>_1 / <v>_2 atoms
  bool err_is_state;

  SExpr rewrite(const SExpr& e) const {
    if (e.is_atom) {
      if (!err_is_state && (e.atom == "err" || e.atom == "err_new"))
        return SExpr::make_atom("false");
      return e;
    }
    std::vector<SExpr> items;
    items.reserve(e.items.size());
    for (const auto& x : e.items) items.push_back(rewrite(x));
    if (!items.empty() && items[0].is_atom && items[0].atom == "states_equal")
      return expand_states_equal(items);
    return SExpr::make_list(std::move(items));
  }

  SExpr expand_states_equal(const std::vector<SExpr>& items) const {
    size_t k = state.size();
    size_t nargs = items.size() - 1;
    bool with_err = nargs == 2 * (k + 1);
    if (!with_err && nargs != 2 * k)
      throw SpecError(SpecError::Category::Sort,
                      "states_equal expects " + std::to_string(2 * k) + " or " +
                          std::to_string(2 * (k + 1)) + " arguments, got " +
                          std::to_string(nargs));
    size_t half = with_err ? k + 1 : k;
    std::map<std::string, SExpr> sub;
    for (size_t i = 0; i < k; ++i) {
      sub[state[i].name + "_1"] = items[1 + i];
      sub[state[i].name + "_2"] = items[1 + half + i];
    }
    SExpr base = substitute_atoms(equality_def, sub);
    if (!with_err) return base;
    const SExpr& e1 = items[1 + k];
    const SExpr& e2 = items[1 + half + k];
    auto both_err = SExpr::make_list({SExpr::make_atom("and"), e1, e2});
    auto neither =
        SExpr::make_list({SExpr::make_atom("and"),
                          SExpr::make_list({SExpr::make_atom("not"), e1}),
                          SExpr::make_list({SExpr::make_atom("not"), e2}), base});
    return SExpr::make_list({SExpr::make_atom("or"), both_err, neither});
  }
};

void parse_preamble(const std::string& text, AdtSpec& spec) {
  for (const SExpr& cmd : parse_sexprs(text)) {
    if (cmd.is_atom || cmd.items.empty() || !cmd.items[0].is_atom)
      throw SpecError(SpecError::Category::Syntax,
                      "malformed preamble command: " + cmd.str());
    const std::string& head = cmd.items[0].atom;
    if (head == "declare-sort") {
      if (cmd.items.size() < 2 || cmd.items.size() > 3 || !cmd.items[1].is_atom)
        throw SpecError(SpecError::Category::Syntax, "malformed declare-sort: " + cmd.str());
      if (cmd.items.size() == 3 && cmd.items[2].atom != "0")
        throw SpecError(SpecError::Category::Sort,
                        "parameterized declared sorts are not supported: " + cmd.str());
      spec.decl_sorts[cmd.items[1].atom] = 0;
    } else if (head == "declare-const") {
      if (cmd.items.size() != 3 || !cmd.items[1].is_atom)
        throw SpecError(SpecError::Category::Syntax, "malformed declare-const: " + cmd.str());
      spec.decl_funs[cmd.items[1].atom] =
          FunSig{{}, parse_sort(cmd.items[2], spec.decl_sorts)};
    } else if (head == "declare-fun") {
      if (cmd.items.size() != 4 || !cmd.items[1].is_atom || cmd.items[2].is_atom)
        throw SpecError(SpecError::Category::Syntax, "malformed declare-fun: " + cmd.str());
      FunSig sig;
      for (const auto& p : cmd.items[2].items)
        sig.params.push_back(parse_sort(p, spec.decl_sorts));
      sig.ret = parse_sort(cmd.items[3], spec.decl_sorts);
      spec.decl_funs[cmd.items[1].atom] = std::move(sig);
    } else if (head == "declare-datatypes") {
      // Enumerations only: (declare-datatypes ((E 0)) (((e0) (e1) ...)))
      if (cmd.items.size() != 3 || cmd.items[1].is_atom || cmd.items[2].is_atom ||
          cmd.items[1].items.size() != cmd.items[2].items.size())
        throw SpecError(SpecError::Category::Syntax,
                        "malformed declare-datatypes: " + cmd.str());
      for (size_t i = 0; i < cmd.items[1].items.size(); ++i) {
        const SExpr& decl = cmd.items[1].items[i];
        if (decl.is_atom || decl.items.size() != 2 || !decl.items[0].is_atom ||
            decl.items[1].atom != "0")
          throw SpecError(SpecError::Category::Syntax,
                          "malformed datatype declaration: " + decl.str());
        const std::string& name = decl.items[0].atom;
        std::vector<std::string> ctors;
        for (const auto& c : cmd.items[2].items[i].items) {
          std::string ctor;
          if (c.is_atom) {
            ctor = c.atom;
          } else if (c.items.size() == 1 && c.items[0].is_atom) {
            ctor = c.items[0].atom;
          } else {
            throw SpecError(SpecError::Category::Sort,
                            "only enumeration datatypes are supported: " + c.str());
          }
          ctors.push_back(ctor);
        }
        if (ctors.empty())
          throw SpecError(SpecError::Category::Sort, "empty datatype: " + name);
        spec.decl_sorts[name] = 0;
        spec.enum_sorts[name] = ctors;
        for (const auto& c : ctors) spec.decl_funs[c] = FunSig{{}, Sort::named(name)};
      }
    } else {
      throw SpecError(SpecError::Category::Reference,
                      "unsupported preamble command: " + head);
    }
  }
}

std::vector<Binding> parse_bindings(const YAML::Node& node, const AdtSpec& spec,
                                    const std::string& what) {
  std::vector<Binding> out;
  if (!node || node.IsNull()) return out;
  if (!node.IsSequence())
    throw SpecError(SpecError::Category::Syntax, what + " must be a sequence");
  for (const auto& item : node) {
    if (!item["name"] || !item["type"])
      throw SpecError(SpecError::Category::Syntax,
                      what + " entries need `name` and `type` keys");
    out.push_back(Binding{item["name"].as<std::string>(),
                          parse_sort(item["type"].as<std::string>(), spec.decl_sorts)});
  }
  return out;
}

void warn_unknown_keys(const YAML::Node& map, const std::set<std::string>& known,
                       const std::string& where, AdtSpec& spec) {
  for (const auto& kv : map) {
    std::string key = kv.first.as<std::string>();
    if (!known.count(key))
      spec.warnings.push_back("ignored unknown key `" + key + "` in " + where);
  }
}

TermPtr parse_clause(const YAML::Node& node, const ClauseRewriter& rw, const Scope& scope,
                     const std::string& where) {
  if (!node || node.IsNull()) return Term::truth(true);
  std::string text = node.as<std::string>();
  try {
    TermPtr t = fold_constants(elaborate(rw.rewrite(parse_sexpr(text)), scope));
    if (!t->sort.is_bool())
      throw SpecError(SpecError::Category::Sort, "clause is not boolean");
    return t;
  } catch (const SpecError& e) {
    throw SpecError(e.category, where + ": " + e.what());
  }
}

MethodSpec parse_method(const YAML::Node& node, AdtSpec& spec, const ClauseRewriter& rw) {
  if (!node["name"])
    throw SpecError(SpecError::Category::Syntax, "method without a name");
  MethodSpec m;
  m.name = node["name"].as<std::string>();
  warn_unknown_keys(node, {"name", "args", "return", "requires", "ensures", "terms"},
                    "method " + m.name, spec);
  m.args = parse_bindings(node["args"], spec, "method " + m.name + " args");
  m.returns = parse_bindings(node["return"], spec, "method " + m.name + " return");

  std::set<std::string> seen;
  for (const auto& b : spec.state) seen.insert(b.name);
  for (const auto& b : m.args)
    if (!seen.insert(b.name).second)
      throw SpecError(SpecError::Category::Reference,
                      "method " + m.name + ": name `" + b.name + "` is already taken");
  for (const auto& b : m.returns)
    if (!seen.insert(b.name).second)
      throw SpecError(SpecError::Category::Reference,
                      "method " + m.name + ": name `" + b.name + "` is already taken");

  Scope pre_scope = spec.state_scope();
  for (const auto& b : m.args) pre_scope.vars.emplace(b.name, b.sort);
  m.pre = parse_clause(node["requires"], rw, pre_scope, "method " + m.name + " requires");

  Scope post_scope = pre_scope;
  for (const auto& b : spec.state) post_scope.vars.emplace(b.name + "_new", b.sort);
  for (const auto& b : m.returns) post_scope.vars.emplace(b.name, b.sort);
  if (!node["ensures"])
    throw SpecError(SpecError::Category::Syntax, "method " + m.name + " missing ensures");
  m.post = parse_clause(node["ensures"], rw, post_scope, "method " + m.name + " ensures");

  if (node["terms"]) {
    std::vector<Sort> arg_sorts;
    for (const auto& b : m.args) arg_sorts.push_back(b.sort);
    Scope hint_scope = spec.state_scope();
    hint_scope.placeholders = &arg_sorts;
    for (const auto& kv : node["terms"]) {
      Sort group = parse_sort(kv.first.as<std::string>(), spec.decl_sorts);
      std::vector<TermPtr> hints;
      for (const auto& tnode : kv.second) {
        std::string text = tnode.as<std::string>();
        try {
          TermPtr t = elaborate(text, hint_scope);
          if (t->sort != group)
            throw SpecError(SpecError::Category::Sort,
                            "hint `" + text + "` has sort " + t->sort.str() +
                                ", listed under " + group.str());
          hints.push_back(t);
        } catch (const SpecError& e) {
          throw SpecError(e.category, "method " + m.name + " terms: " + e.what());
        }
      }
      m.term_hints.emplace_back(group, std::move(hints));
    }
  }
  return m;
}

}  // namespace

AdtSpec parse_spec_text(const std::string& yaml_text, const std::string& origin) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw SpecError(SpecError::Category::Syntax, origin + ": " + e.what());
  }
  if (!root.IsMap())
    throw SpecError(SpecError::Category::Syntax, origin + ": spec must be a YAML map");

  AdtSpec spec;
  try {
    warn_unknown_keys(root,
                      {"name", "preamble", "state", "states_equal", "methods",
                       "predicates", "predicates_extra", "options"},
                      "spec", spec);
    if (!root["name"])
      throw SpecError(SpecError::Category::Syntax, "spec missing `name`");
    spec.name = root["name"].as<std::string>();

    if (root["preamble"]) {
      spec.preamble_text = root["preamble"].as<std::string>();
      parse_preamble(spec.preamble_text, spec);
    }

    spec.state = parse_bindings(root["state"], spec, "state");
    if (spec.state.empty())
      throw SpecError(SpecError::Category::Syntax, "spec declares no state variables");
    std::set<std::string> names;
    for (const auto& b : spec.state)
      if (!names.insert(b.name).second)
        throw SpecError(SpecError::Category::Reference,
                        "duplicate state variable: " + b.name);

    // Equality definition, defaulting to pointwise equality of the copies.
    SExpr eq_def;
    if (root["states_equal"] && root["states_equal"]["definition"]) {
      eq_def = parse_sexpr(root["states_equal"]["definition"].as<std::string>());
      spec.states_equal_defaulted = false;
    } else {
      std::vector<SExpr> conj{SExpr::make_atom("and")};
      for (const auto& b : spec.state)
        conj.push_back(SExpr::make_list({SExpr::make_atom("="),
                                         SExpr::make_atom(b.name + "_1"),
                                         SExpr::make_atom(b.name + "_2")}));
      eq_def = conj.size() == 2 ? conj[1] : SExpr::make_list(std::move(conj));
      spec.states_equal_defaulted = true;
    }
    Scope eq_scope;
    eq_scope.funs = &spec.decl_funs;
    for (const auto& b : spec.state) {
      eq_scope.vars.emplace(b.name + "_1", b.sort);
      eq_scope.vars.emplace(b.name + "_2", b.sort);
    }
    spec.states_equal = elaborate(eq_def, eq_scope);
    if (!spec.states_equal->sort.is_bool())
      throw SpecError(SpecError::Category::Sort, "states_equal is not boolean");

    bool err_is_state = false;
    for (const auto& b : spec.state) err_is_state = err_is_state || b.name == "err";
    ClauseRewriter rw{spec.state, eq_def, err_is_state};

    if (!root["methods"] || !root["methods"].IsSequence() || root["methods"].size() == 0)
      throw SpecError(SpecError::Category::Syntax, "spec declares no methods");
    for (const auto& mnode : root["methods"]) {
      MethodSpec m = parse_method(mnode, spec, rw);
      if (spec.find_method(m.name))
        throw SpecError(SpecError::Category::Reference, "duplicate method: " + m.name);
      spec.methods.push_back(std::move(m));
    }

    if (root["predicates"]) {
      for (const auto& pnode : root["predicates"]) {
        PredSig sig;
        sig.op = pnode["name"].as<std::string>();
        for (const auto& tnode : pnode["type"])
          sig.arg_sorts.push_back(parse_sort(tnode.as<std::string>(), spec.decl_sorts));
        spec.predicates.push_back(std::move(sig));
      }
    }

    if (root["predicates_extra"]) {
      for (const auto& pnode : root["predicates_extra"])
        spec.predicates_extra.push_back(parse_sexpr(pnode.as<std::string>()));
    }

    if (root["options"] && root["options"].IsMap()) {
      for (const auto& kv : root["options"])
        spec.options[kv.first.as<std::string>()] = kv.second.as<std::string>();
    }
  } catch (const YAML::Exception& e) {
    throw SpecError(SpecError::Category::Syntax, origin + ": " + e.what());
  }
  return spec;
}

AdtSpec parse_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw SpecError(SpecError::Category::Syntax, "cannot open spec file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_spec_text(buf.str(), path);
}

std::string print_spec(const AdtSpec& spec) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << spec.name;
  if (!spec.preamble_text.empty())
    out << YAML::Key << "preamble" << YAML::Value << YAML::Literal << spec.preamble_text;
  out << YAML::Key << "state" << YAML::Value << YAML::BeginSeq;
  for (const auto& b : spec.state) {
    out << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << b.name;
    out << YAML::Key << "type" << YAML::Value << b.sort.str();
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;
  if (!spec.states_equal_defaulted) {
    out << YAML::Key << "states_equal" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "definition" << YAML::Value << print_term(spec.states_equal);
    out << YAML::EndMap;
  }
  out << YAML::Key << "methods" << YAML::Value << YAML::BeginSeq;
  for (const auto& m : spec.methods) {
    out << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << m.name;
    out << YAML::Key << "args" << YAML::Value << YAML::BeginSeq;
    for (const auto& b : m.args) {
      out << YAML::BeginMap;
      out << YAML::Key << "name" << YAML::Value << b.name;
      out << YAML::Key << "type" << YAML::Value << b.sort.str();
      out << YAML::EndMap;
    }
    out << YAML::EndSeq;
    out << YAML::Key << "return" << YAML::Value << YAML::BeginSeq;
    for (const auto& b : m.returns) {
      out << YAML::BeginMap;
      out << YAML::Key << "name" << YAML::Value << b.name;
      out << YAML::Key << "type" << YAML::Value << b.sort.str();
      out << YAML::EndMap;
    }
    out << YAML::EndSeq;
    out << YAML::Key << "requires" << YAML::Value << YAML::Literal << print_term(m.pre);
    out << YAML::Key << "ensures" << YAML::Value << YAML::Literal << print_term(m.post);
    if (!m.term_hints.empty()) {
      out << YAML::Key << "terms" << YAML::Value << YAML::BeginMap;
      for (const auto& [sort, hints] : m.term_hints) {
        out << YAML::Key << sort.str() << YAML::Value << YAML::BeginSeq;
        for (const auto& h : hints) out << print_term(h);
        out << YAML::EndSeq;
      }
      out << YAML::EndMap;
    }
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;
  if (!spec.predicates.empty()) {
    out << YAML::Key << "predicates" << YAML::Value << YAML::BeginSeq;
    for (const auto& p : spec.predicates) {
      out << YAML::BeginMap;
      out << YAML::Key << "name" << YAML::Value << p.op;
      out << YAML::Key << "type" << YAML::Value << YAML::BeginSeq;
      for (const auto& s : p.arg_sorts) out << s.str();
      out << YAML::EndSeq;
      out << YAML::EndMap;
    }
    out << YAML::EndSeq;
  }
  if (!spec.predicates_extra.empty()) {
    out << YAML::Key << "predicates_extra" << YAML::Value << YAML::BeginSeq;
    for (const auto& e : spec.predicates_extra) out << e.str();
    out << YAML::EndSeq;
  }
  if (!spec.options.empty()) {
    out << YAML::Key << "options" << YAML::Value << YAML::BeginMap;
    for (const auto& [k, v] : spec.options) out << YAML::Key << k << YAML::Value << v;
    out << YAML::EndMap;
  }
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

TermPtr instantiate_placeholders(const TermPtr& hint, const MethodSpec& method) {
  std::map<std::string, std::string> renames;
  for (size_t i = 0; i < method.args.size(); ++i)
    renames["$" + std::to_string(i + 1)] = method.args[i].name;
  return rename_vars(hint, renames);
}

MethodInstance rename_apart(const MethodSpec& method, const std::string& arg_stem,
                            const std::string& ret_stem) {
  MethodInstance inst;
  inst.src = &method;
  inst.name = method.name;
  std::map<std::string, std::string> renames;
  for (size_t i = 0; i < method.args.size(); ++i) {
    std::string fresh = arg_stem + std::to_string(i + 1);
    inst.args.push_back(Binding{fresh, method.args[i].sort});
    renames[method.args[i].name] = fresh;
  }
  for (size_t i = 0; i < method.returns.size(); ++i) {
    std::string fresh = ret_stem + std::to_string(i + 1);
    inst.returns.push_back(Binding{fresh, method.returns[i].sort});
    renames[method.returns[i].name] = fresh;
  }
  inst.pre = rename_vars(method.pre, renames);
  inst.post = rename_vars(method.post, renames);
  for (const auto& [sort, hints] : method.term_hints) {
    std::vector<TermPtr> renamed;
    for (const auto& h : hints)
      renamed.push_back(rename_vars(instantiate_placeholders(h, method), renames));
    inst.hints.emplace_back(sort, std::move(renamed));
  }
  return inst;
}

PairContext make_pair_context(const AdtSpec& adt, const MethodSpec& m, const MethodSpec& n) {
  for (const auto& b : adt.state) {
    std::string v = b.name;
    bool stem = v.size() >= 2 &&
                (v[0] == 'x' || v[0] == 'y' || v[0] == 'r' || v[0] == 's') &&
                std::all_of(v.begin() + 1, v.end(), [](char c) { return std::isdigit(c); });
    if (stem)
      throw SpecError(SpecError::Category::Reference,
                      "state variable `" + v + "` collides with pair renaming scheme");
  }
  PairContext pc;
  pc.adt = &adt;
  pc.m = rename_apart(m, "x", "r");
  pc.n = rename_apart(n, "y", "s");
  return pc;
}

}  // namespace comsyn
