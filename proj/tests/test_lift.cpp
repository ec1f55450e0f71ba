#include "doctest.h"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <sstream>
#include <string>

#include "comsyn/lift.hpp"

using namespace comsyn;

namespace {

const std::string kSpecDir = std::string(COMSYN_SOURCE_DIR) + "/specs/";
const std::string kDataDir = std::string(COMSYN_SOURCE_DIR) + "/tests/data/";

// Formula scalars compare modulo whitespace by round-tripping through the
// s-expression parser; everything else must match exactly.
bool scalar_equiv(const std::string& a, const std::string& b) {
  if (a == b) return true;
  try {
    auto pa = parse_sexprs(a);
    auto pb = parse_sexprs(b);
    if (pa.empty() || pa.size() != pb.size()) return false;
    for (size_t i = 0; i < pa.size(); ++i)
      if (pa[i].str() != pb[i].str()) return false;
    return true;
  } catch (const SpecError&) {
    return false;
  }
}

bool node_equiv(const YAML::Node& a, const YAML::Node& b, std::string path, std::string& why) {
  if (a.Type() != b.Type()) {
    why = path + ": node kinds differ";
    return false;
  }
  switch (a.Type()) {
    case YAML::NodeType::Scalar:
      if (!scalar_equiv(a.Scalar(), b.Scalar())) {
        why = path + ": '" + a.Scalar() + "' vs '" + b.Scalar() + "'";
        return false;
      }
      return true;
    case YAML::NodeType::Sequence: {
      if (a.size() != b.size()) {
        why = path + ": sequence lengths differ";
        return false;
      }
      for (size_t i = 0; i < a.size(); ++i)
        if (!node_equiv(a[i], b[i], path + "[" + std::to_string(i) + "]", why)) return false;
      return true;
    }
    case YAML::NodeType::Map: {
      std::vector<std::string> ka, kb;
      for (const auto& kv : a) ka.push_back(kv.first.Scalar());
      for (const auto& kv : b) kb.push_back(kv.first.Scalar());
      if (ka != kb) {
        why = path + ": key order differs";
        return false;
      }
      for (const auto& k : ka)
        if (!node_equiv(a[k], b[k], path + "." + k, why)) return false;
      return true;
    }
    default:
      why = path + ": unsupported node kind";
      return false;
  }
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("lifted counter matches the published artifact output") {
  AdtSpec spec = parse_spec(kSpecDir + "counter.yml");
  std::string emitted = emit_lifted_yaml(spec);
  YAML::Node got = YAML::Load(emitted);
  YAML::Node want = YAML::Load(slurp(kDataDir + "counter_lifted_golden.yml"));
  std::string why;
  bool same = node_equiv(got, want, "$", why);
  CAPTURE(why);
  CHECK(same);

  // The emission is itself a loadable spec.
  AdtSpec lifted = parse_spec_text(emitted, "lifted");
  CHECK(lifted.state.back().name == "err");
  CHECK(lifted.find_method("increment")->pre->is_truth(true));
}

TEST_CASE("lift: shape, error-flag freshness, totality of the transformation") {
  AdtSpec spec = parse_spec(kSpecDir + "accumulator.yml");
  LiftedSpec ls = lift(spec);
  CHECK(ls.err_name == "err");
  REQUIRE(ls.methods.size() == 2);
  CHECK(ls.methods[0].lifted_requires->is_truth(true));
  // Pre ≡ true is spliced literally, keeping the three-disjunct shape.
  CHECK(print_term(ls.methods[0].lifted_ensures) ==
        "(or (and err err_new) (and (not err) (not err_new) true (and (= contents_new "
        "(+ contents n)) (= result true))) (and (not err) err_new (not true)))");
  CHECK(ls.state.back().name == "err");
  CHECK(print_term(ls.states_equal) ==
        "(or (and err_1 err_2) (and (not err_1) (not err_2) (= contents_1 contents_2)))");

  AdtSpec shadowed = parse_spec_text(
      "name: t\nstate:\n  - name: err\n    type: Int\n"
      "methods:\n  - name: m\n    ensures: (= err_new err)\n");
  CHECK(err_name_for(shadowed) == "_err");
  CHECK(err_flag(shadowed, "_0") == "_err_0");
  LiftedSpec ls2 = lift(shadowed);
  CHECK(ls2.state.back().name == "_err");
}

TEST_CASE("lifted_post retargets a method instance between snapshots") {
  AdtSpec spec = parse_spec(kSpecDir + "counter.yml");
  PairContext pc =
      make_pair_context(spec, *spec.find_method("increment"), *spec.find_method("decrement"));
  std::string post = print_term(lifted_post(spec, pc.m, "_0", "_m", "_mn"));
  CHECK(post ==
        "(or (and err_0 err_m) (and (not err_0) (not err_m) (>= contents_0 0) "
        "(and (= contents_m (+ contents_0 1)) (= r1_mn true))) "
        "(and (not err_0) err_m (not (>= contents_0 0))))");

  CHECK(print_term(lifted_states_equal(spec, "_mn", "_nm")) ==
        "(or (and err_mn err_nm) (and (not err_mn) (not err_nm) "
        "(= contents_mn contents_nm)))");
}

TEST_CASE("lift: solver-certified happy path, absorption and totality") {
  for (const char* name : {"counter", "set", "stack"}) {
    CAPTURE(name);
    AdtSpec spec = parse_spec(kSpecDir + name + std::string(".yml"));
    LiftedSpec ls = lift(spec);
    SolverSession s(default_solver_config());
    s.declare_adt(spec);
    for (const auto& v : spec.state) {
      s.declare_const(v.name, v.sort);
      s.declare_const(v.name + "_new", v.sort);
    }
    s.declare_const("err", Sort::boolean());
    s.declare_const("err_new", Sort::boolean());

    for (const auto& lm : ls.methods) {
      CAPTURE(lm.base->name);
      s.push();
      for (const auto& a : lm.base->args) s.declare_const(a.name, a.sort);
      for (const auto& r : lm.base->returns) s.declare_const(r.name, r.sort);

      // Happy path: on the err-free plane, lifted ⇔ Pre ∧ Post.
      TermPtr no_err = mk_and({mk_not(Term::var("err", Sort::boolean())),
                               mk_not(Term::var("err_new", Sort::boolean()))});
      TermPtr orig = mk_and({lm.base->pre, lm.base->post});
      CHECK(s.check_valid({no_err},
                          Term::app("=", {lm.lifted_ensures, orig}, Sort::boolean()))
                .verdict == Validity::Valid);

      // Err absorption: lifted ∧ err ⇒ err_new.
      CHECK(s.check_valid({lm.lifted_ensures, Term::var("err", Sort::boolean())},
                          Term::var("err_new", Sort::boolean()))
                .verdict == Validity::Valid);

      // Totality: some successor exists from every (state, err, args).
      std::string binders;
      std::map<std::string, std::string> ren;
      for (const auto& v : spec.state) {
        binders += "(" + v.name + "_1 " + s.lower_sort(v.sort) + ") ";
        ren[v.name + "_new"] = v.name + "_1";
      }
      for (const auto& r : lm.base->returns) {
        binders += "(" + r.name + "_1 " + s.lower_sort(r.sort) + ") ";
        ren[r.name] = r.name + "_1";
      }
      binders += "(err_1 Bool)";
      ren["err_new"] = "err_1";
      s.push();
      s.assert_smt("(forall (" + binders + ") (not " +
                   s.lower_term(rename_vars(lm.lifted_ensures, ren)) + "))");
      CHECK(s.check_sat() == SolverStatus::Unsat);
      s.pop();
      s.pop();
    }
  }
}

TEST_CASE("load checks: reflexivity and determinism pass on the bundled specs") {
  for (const char* name : {"counter", "set", "stack", "blockking"}) {
    CAPTURE(name);
    AdtSpec spec = parse_spec(kSpecDir + name + std::string(".yml"));
    SolverSession s(default_solver_config());
    s.declare_adt(spec);
    for (const auto& rep : run_load_checks(s, spec, false)) {
      CAPTURE(rep.subject);
      CAPTURE(rep.detail);
      CHECK(rep.verdict == CheckVerdict::Pass);
    }
  }
}

TEST_CASE("load checks: a promise-nothing method is flagged nondeterministic") {
  AdtSpec spec = parse_spec(kDataDir + "counter_nondet.yml");
  SolverSession s(default_solver_config());
  s.declare_adt(spec);

  CHECK(check_deterministic(s, spec, *spec.find_method("increment")).verdict ==
        CheckVerdict::Pass);
  CheckReport rep = check_deterministic(s, spec, *spec.find_method("flip"));
  CHECK(rep.verdict == CheckVerdict::Fail);
  CHECK(rep.detail.find("disagree") != std::string::npos);

  auto all = run_load_checks(s, spec, false);
  int fails = 0;
  for (const auto& r : all) fails += r.verdict == CheckVerdict::Fail;
  CHECK(fails == 1);
}

TEST_CASE("load checks: consistency verdicts") {
  AdtSpec counter = parse_spec(kSpecDir + "counter.yml");
  SolverSession s(default_solver_config());
  s.declare_adt(counter);
  CHECK(check_consistent(s, counter, *counter.find_method("decrement")).verdict ==
        CheckVerdict::Pass);

  AdtSpec acc = parse_spec(kSpecDir + "accumulator.yml");
  CHECK(check_consistent(s, acc, *acc.find_method("increase")).verdict == CheckVerdict::Pass);

  AdtSpec empty_post = parse_spec_text(
      "name: t\nstate:\n  - name: c\n    type: Int\n"
      "methods:\n  - name: stuck\n    requires: 'true'\n    ensures: 'false'\n");
  CheckReport rep = check_consistent(s, empty_post, *empty_post.find_method("stuck"));
  CHECK(rep.verdict == CheckVerdict::Fail);
  CHECK(rep.detail.find("no successor") != std::string::npos);
}
