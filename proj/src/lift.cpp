#include "comsyn/lift.hpp"

#include <yaml-cpp/yaml.h>

#include <set>

namespace comsyn {

namespace {

TermPtr bvar(const std::string& name) { return Term::var(name, Sort::boolean()); }

// (or (and err err') (and (not err) (not err') pre post) (and (not err) err' (not pre)))
// with pre/post spliced as separate conjuncts, matching the printed artifact.
TermPtr lift_shape(const TermPtr& err, const TermPtr& err_new, const TermPtr& pre,
                   const TermPtr& post) {
  TermPtr d1 = mk_and({err, err_new});
  TermPtr d2 = mk_and({mk_not(err), mk_not(err_new), pre, post});
  TermPtr d3 = mk_and({mk_not(err), err_new, mk_not(pre)});
  return mk_or({d1, d2, d3});
}

std::set<std::string> all_binding_names(const AdtSpec& spec) {
  std::set<std::string> names;
  for (const auto& v : spec.state) names.insert(v.name);
  for (const auto& m : spec.methods) {
    for (const auto& a : m.args) names.insert(a.name);
    for (const auto& r : m.returns) names.insert(r.name);
  }
  return names;
}

// Conjunction of (= r_1 r_2) over a method's return bindings (suffixed).
TermPtr returns_agree(const std::vector<Binding>& rets, const std::string& s1,
                      const std::string& s2) {
  std::vector<TermPtr> eqs;
  eqs.reserve(rets.size());
  for (const auto& r : rets)
    eqs.push_back(mk_eq(Term::var(r.name + s1, r.sort), Term::var(r.name + s2, r.sort)));
  return mk_and(std::move(eqs));
}

// Successor copy of a post relation: v_new -> v<suffix>, returns r -> r<suffix>.
TermPtr successor_copy(const AdtSpec& spec, const MethodSpec& m, const std::string& suffix) {
  std::map<std::string, std::string> ren;
  for (const auto& v : spec.state) ren[v.name + "_new"] = v.name + suffix;
  for (const auto& r : m.returns) ren[r.name] = r.name + suffix;
  return rename_vars(m.post, ren);
}

std::string quantified_no_successor(SolverSession& s, const AdtSpec& spec, const MethodSpec& m,
                                    const std::string& suffix) {
  std::string binders;
  for (const auto& v : spec.state)
    binders += "(" + v.name + suffix + " " + s.lower_sort(v.sort) + ") ";
  for (const auto& r : m.returns)
    binders += "(" + r.name + suffix + " " + s.lower_sort(r.sort) + ") ";
  if (!binders.empty()) binders.pop_back();
  return "(forall (" + binders + ") (not " + s.lower_term(successor_copy(spec, m, suffix)) +
         "))";
}

}  // namespace

std::string err_name_for(const AdtSpec& spec) {
  std::set<std::string> taken = all_binding_names(spec);
  std::string name = "err";
  while (taken.count(name)) name.insert(name.begin(), '_');
  return name;
}

std::string err_flag(const AdtSpec& spec, const std::string& suffix) {
  return err_name_for(spec) + suffix;
}

LiftedSpec lift(const AdtSpec& spec) {
  LiftedSpec out;
  out.base = &spec;
  out.err_name = err_name_for(spec);
  out.state = spec.state;
  out.state.push_back({out.err_name, Sort::boolean()});
  out.states_equal = mk_or({mk_and({bvar(out.err_name + "_1"), bvar(out.err_name + "_2")}),
                            mk_and({mk_not(bvar(out.err_name + "_1")),
                                    mk_not(bvar(out.err_name + "_2")), spec.states_equal})});
  out.methods.reserve(spec.methods.size());
  for (const auto& m : spec.methods) {
    LiftedMethodSpec lm;
    lm.base = &m;
    lm.lifted_requires = Term::truth(true);
    lm.lifted_ensures =
        lift_shape(bvar(out.err_name), bvar(out.err_name + "_new"), m.pre, m.post);
    out.methods.push_back(std::move(lm));
  }
  return out;
}

TermPtr lifted_post(const AdtSpec& spec, const MethodInstance& inst, const std::string& from,
                    const std::string& to, const std::string& ret_suffix) {
  std::map<std::string, std::string> pre_ren, post_ren;
  for (const auto& v : spec.state) {
    pre_ren[v.name] = v.name + from;
    post_ren[v.name] = v.name + from;
    post_ren[v.name + "_new"] = v.name + to;
  }
  for (const auto& r : inst.returns) post_ren[r.name] = r.name + ret_suffix;
  return lift_shape(bvar(err_flag(spec, from)), bvar(err_flag(spec, to)),
                    rename_vars(inst.pre, pre_ren), rename_vars(inst.post, post_ren));
}

TermPtr base_states_equal(const AdtSpec& spec, const std::string& suf1,
                          const std::string& suf2) {
  return spec.states_equal_for(suf1, suf2);
}

TermPtr lifted_states_equal(const AdtSpec& spec, const std::string& suf1,
                            const std::string& suf2) {
  TermPtr e1 = bvar(err_flag(spec, suf1));
  TermPtr e2 = bvar(err_flag(spec, suf2));
  return mk_or({mk_and({e1, e2}),
                mk_and({mk_not(e1), mk_not(e2), base_states_equal(spec, suf1, suf2)})});
}

std::string emit_lifted_yaml(const AdtSpec& spec) {
  LiftedSpec ls = lift(spec);
  YAML::Emitter out;
  out << YAML::BeginMap;

  out << YAML::Key << "methods" << YAML::Value << YAML::BeginSeq;
  for (const auto& lm : ls.methods) {
    const MethodSpec& m = *lm.base;
    out << YAML::BeginMap;
    out << YAML::Key << "args" << YAML::Value;
    if (m.args.empty()) {
      out << YAML::Flow << YAML::BeginSeq << YAML::EndSeq;
    } else {
      out << YAML::BeginSeq;
      for (const auto& a : m.args) {
        out << YAML::BeginMap;
        out << YAML::Key << "name" << YAML::Value << a.name;
        out << YAML::Key << "type" << YAML::Value << a.sort.str();
        out << YAML::EndMap;
      }
      out << YAML::EndSeq;
    }
    out << YAML::Key << "ensures" << YAML::Value << YAML::DoubleQuoted
        << print_term(lm.lifted_ensures);
    out << YAML::Key << "name" << YAML::Value << m.name;
    out << YAML::Key << "requires" << YAML::Value << YAML::SingleQuoted << "true";
    out << YAML::Key << "return" << YAML::Value << YAML::BeginSeq;
    for (const auto& r : m.returns) {
      out << YAML::BeginMap;
      out << YAML::Key << "name" << YAML::Value << r.name;
      out << YAML::Key << "type" << YAML::Value << r.sort.str();
      out << YAML::EndMap;
    }
    out << YAML::EndSeq;
    out << YAML::Key << "terms" << YAML::Value << YAML::BeginMap;
    for (const auto& [sort, hints] : m.term_hints) {
      out << YAML::Key << sort.str() << YAML::Value << YAML::BeginSeq;
      for (const auto& h : hints) out << print_term(h);
      out << YAML::EndSeq;
    }
    out << YAML::EndMap;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "name" << YAML::Value << spec.name;
  if (!spec.preamble_text.empty())
    out << YAML::Key << "preamble" << YAML::Value << YAML::Literal << spec.preamble_text;

  out << YAML::Key << "predicates" << YAML::Value << YAML::BeginSeq;
  for (const auto& p : spec.predicates) {
    out << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << YAML::SingleQuoted << p.op;
    out << YAML::Key << "type" << YAML::Value << YAML::BeginSeq;
    for (const auto& s : p.arg_sorts) out << s.str();
    out << YAML::EndSeq;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  if (!spec.predicates_extra.empty()) {
    out << YAML::Key << "predicates_extra" << YAML::Value << YAML::BeginSeq;
    for (const auto& e : spec.predicates_extra) out << e.str();
    out << YAML::EndSeq;
  }

  out << YAML::Key << "state" << YAML::Value << YAML::BeginSeq;
  for (const auto& v : ls.state) {
    out << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << v.name;
    out << YAML::Key << "type" << YAML::Value << v.sort.str();
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "states_equal" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "definition" << YAML::Value << YAML::SingleQuoted
      << print_term(ls.states_equal);
  out << YAML::EndMap;

  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

CheckReport check_states_equal_reflexive(SolverSession& s, const AdtSpec& spec) {
  CheckReport rep;
  rep.subject = spec.name + ": states_equal reflexivity";
  s.push();
  for (const auto& v : spec.state) s.declare_const(v.name + "_1", v.sort);
  std::vector<std::string> vars;
  for (const auto& v : spec.state) vars.push_back(v.name + "_1");
  ValidityResult r = s.check_valid({}, base_states_equal(spec, "_1", "_1"), vars);
  if (r.raw != SolverStatus::Timeout) s.pop();
  switch (r.verdict) {
    case Validity::Valid:
      rep.verdict = CheckVerdict::Pass;
      break;
    case Validity::Invalid:
      rep.verdict = CheckVerdict::Fail;
      rep.detail = "not reflexive at " + r.cex.describe();
      break;
    case Validity::Inconclusive:
      rep.verdict = CheckVerdict::Unknown;
      rep.detail = "solver answered " + to_string(r.raw);
      break;
  }
  return rep;
}

CheckReport check_deterministic(SolverSession& s, const AdtSpec& spec, const MethodSpec& m) {
  CheckReport rep;
  rep.subject = spec.name + "." + m.name + ": determinism";
  s.push();
  std::vector<std::string> vars;
  for (const auto& v : spec.state) {
    s.declare_const(v.name, v.sort);
    vars.push_back(v.name);
  }
  for (const auto& a : m.args) {
    s.declare_const(a.name, a.sort);
    vars.push_back(a.name);
  }
  for (const char* suf : {"_1", "_2"}) {
    for (const auto& v : spec.state) s.declare_const(v.name + suf, v.sort);
    for (const auto& r : m.returns) s.declare_const(r.name + suf, r.sort);
  }
  for (const auto& r : m.returns) {
    vars.push_back(r.name + "_1");
    vars.push_back(r.name + "_2");
  }

  TermPtr agree =
      mk_and({base_states_equal(spec, "_1", "_2"), returns_agree(m.returns, "_1", "_2")});
  std::vector<TermPtr> hyp = {m.pre, successor_copy(spec, m, "_1"),
                              successor_copy(spec, m, "_2")};
  ValidityResult r = s.check_valid(hyp, agree, vars);
  if (r.raw != SolverStatus::Timeout) s.pop();
  switch (r.verdict) {
    case Validity::Valid:
      rep.verdict = CheckVerdict::Pass;
      break;
    case Validity::Invalid:
      rep.verdict = CheckVerdict::Fail;
      rep.detail = "two successors disagree at " + r.cex.describe();
      break;
    case Validity::Inconclusive:
      rep.verdict = CheckVerdict::Unknown;
      rep.detail = "solver answered " + to_string(r.raw);
      break;
  }
  return rep;
}

CheckReport check_consistent(SolverSession& s, const AdtSpec& spec, const MethodSpec& m) {
  CheckReport rep;
  rep.subject = spec.name + "." + m.name + ": consistency";
  s.push();
  std::vector<std::string> vars;
  for (const auto& v : spec.state) {
    s.declare_const(v.name, v.sort);
    vars.push_back(v.name);
  }
  for (const auto& a : m.args) {
    s.declare_const(a.name, a.sort);
    vars.push_back(a.name);
  }
  s.assert_term(m.pre);
  s.assert_smt(quantified_no_successor(s, spec, m, "_1"));
  SolverStatus st = s.check_sat();
  if (st == SolverStatus::Unsat) {
    rep.verdict = CheckVerdict::Pass;
  } else if (st == SolverStatus::Sat) {
    rep.verdict = CheckVerdict::Fail;
    std::string model = "(model unavailable)";
    if (auto vals = s.get_values(vars)) {
      model.clear();
      for (size_t i = 0; i < vars.size(); ++i) {
        if (i) model += ", ";
        model += vars[i] + " = " + (*vals)[i];
      }
    }
    rep.detail = "no successor from " + model;
  } else {
    rep.verdict = CheckVerdict::Unknown;
    rep.detail = "solver answered " + to_string(st);
  }
  if (st != SolverStatus::Timeout) s.pop();
  return rep;
}

std::vector<CheckReport> run_load_checks(SolverSession& s, const AdtSpec& spec,
                                         bool with_consistency) {
  std::vector<CheckReport> out;
  out.push_back(check_states_equal_reflexive(s, spec));
  for (const auto& m : spec.methods) {
    out.push_back(check_deterministic(s, spec, m));
    if (with_consistency) out.push_back(check_consistent(s, spec, m));
  }
  return out;
}

}  // namespace comsyn
