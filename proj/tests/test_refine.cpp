#include "doctest.h"

#include <atomic>
#include <string>
#include <vector>

#include "comsyn/refine.hpp"
#include "oracle.hpp"

using namespace comsyn;

namespace {

const std::string kSpecDir = std::string(COMSYN_SOURCE_DIR) + "/specs/";
const std::string kDataDir = std::string(COMSYN_SOURCE_DIR) + "/tests/data/";

const MethodSpec& method(const AdtSpec& spec, const std::string& name) {
  const MethodSpec* m = spec.find_method(name);
  REQUIRE(m != nullptr);
  return *m;
}

Scope cond_scope(const PairContext& p) {
  Scope sc = p.adt->state_scope();
  for (const auto& a : p.m.args) sc.vars[a.name] = a.sort;
  for (const auto& a : p.n.args) sc.vars[a.name] = a.sort;
  return sc;
}

// One pair's full pipeline state: prepared session (snapshots + chain + the
// unsuffixed condition vocabulary) and the filtered predicate pool.
struct PairRun {
  PairContext pair;
  PairEncoding enc;
  SolverSession s;
  PredicatePool pool;

  PairRun(const AdtSpec& adt, const std::string& m, const std::string& n)
      : pair(make_pair_context(adt, method(adt, m), method(adt, n))),
        enc(encode_pair(pair)),
        s(default_solver_config()) {
    prepare_session(s, enc);
    for (const auto& b : adt.state) s.declare_const(b.name, b.sort);
    pool = filter_trivial(pgen(pair), s);
  }
};

// Solver-certified equivalence of a synthesized condition with its expected
// form, both rewritten onto the σ_0 snapshot.
bool equiv(PairRun& r, const TermPtr& got, const std::string& want) {
  TermPtr w = elaborate(want, cond_scope(r.pair));
  return r.s.check_valid({}, at_initial(r.enc, mk_eq(got, w))).verdict == Validity::Valid;
}

std::vector<CheckReport> fresh_validate(const PairEncoding& e, const RefineOutcome& out) {
  SolverSession v(default_solver_config());
  return validate_outcome(v, e, out);
}

bool all_pass(const std::vector<CheckReport>& reports) {
  for (const auto& r : reports) {
    if (r.verdict != CheckVerdict::Pass) {
      MESSAGE("check failed: ", r.subject, ": ", r.detail);
      return false;
    }
  }
  return true;
}

size_t pool_index(const PredicatePool& pool, const std::string& printed) {
  for (size_t i = 0; i < pool.size(); ++i)
    if (print_term(pool[i].term) == printed) return i;
  REQUIRE_MESSAGE(false, "pool atom not found: ", printed);
  return 0;
}

}  // namespace

TEST_CASE("encode: snapshot vocabulary, at_initial and the collision guard") {
  AdtSpec counter = parse_spec(kSpecDir + "counter.yml");
  PairContext pair = make_pair_context(counter, method(counter, "increment"),
                                       method(counter, "decrement"));
  PairEncoding e = encode_pair(pair);

  // 5 copies of (contents, err) plus per-order copies of both `result`s.
  CHECK(e.decls.size() == 14);
  std::vector<std::string> names;
  for (const auto& d : e.decls) names.push_back(d.name);
  for (const char* want : {"contents_0", "contents_m", "contents_mn", "contents_n",
                           "contents_nm", "err_0", "err_mn", "err_nm", "r1_mn", "r1_nm",
                           "s1_mn", "s1_nm"})
    CHECK(std::count(names.begin(), names.end(), want) == 1);

  REQUIRE(e.model_vars == std::vector<std::string>{"contents_0"});

  AdtSpec set = parse_spec(kSpecDir + "set.yml");
  PairContext sp = make_pair_context(set, method(set, "add"), method(set, "contains"));
  PairEncoding se = encode_pair(sp);
  Scope sc = cond_scope(sp);
  CHECK(print_term(at_initial(se, elaborate("(member x1 S)", sc))) == "(member x1 S_0)");
  CHECK(print_term(at_initial(se, elaborate("(= x1 y1)", sc))) == "(= x1 y1)");

  AdtSpec clash = parse_spec_text(R"yml(name: clash
state:
  - name: contents
    type: Int
  - name: contents_0
    type: Int
methods:
  - name: nop
    args: []
    return: []
    requires: "true"
    ensures: "(and (= contents_new contents) (= contents_0_new contents_0))"
)yml");
  PairContext cp = make_pair_context(clash, method(clash, "nop"), method(clash, "nop"));
  CHECK_THROWS_AS(encode_pair(cp), SpecError);
}

TEST_CASE("encode: commute check certifies and refutes the pinned examples") {
  AdtSpec counter = parse_spec(kSpecDir + "counter.yml");
  {
    PairRun r(counter, "decrement", "decrement");
    CheckQuery q = encode_commute_check(r.enc, Term::truth(true));
    CHECK(r.s.check_valid(q.hyp, q.concl).verdict == Validity::Valid);

    // A region containing an atom and its negation is vacuously certified.
    Scope sc = cond_scope(r.pair);
    TermPtr atom = elaborate("(= 0 contents)", sc);
    CheckQuery contradictory =
        encode_commute_check(r.enc, mk_and({atom, mk_not(atom)}));
    CHECK(r.s.check_valid(contradictory.hyp, contradictory.concl).verdict == Validity::Valid);
  }

  AdtSpec set = parse_spec(kSpecDir + "set.yml");
  PairRun r(set, "add", "contains");
  Scope sc = cond_scope(r.pair);
  std::vector<TermPtr> atoms = {at_initial(r.enc, elaborate("(= x1 y1)", sc)),
                                at_initial(r.enc, elaborate("(member x1 S)", sc))};
  CheckQuery q = encode_commute_check(r.enc, Term::truth(true));
  ValidityResult res = r.s.check_valid(q.hyp, q.concl, r.enc.model_vars, atoms);
  REQUIRE(res.verdict == Validity::Invalid);
  // Every point where add and contains disagree has x1 = y1 and x1 ∉ S.
  REQUIRE(res.cex.atom_values.size() == 2);
  CHECK(res.cex.atom_values[0]);
  CHECK_FALSE(res.cex.atom_values[1]);
  CHECK(res.cex.model.count("S_0"));
}

TEST_CASE("encode: non-commute check certifies the pinned examples") {
  AdtSpec counter = parse_spec(kSpecDir + "counter.yml");
  {
    // decrement and reset never commute cleanly: one order loses the
    // decrement whenever the other faults, and the final counts differ
    // elsewhere. Both orders faulting (contents = 0) satisfies the check.
    PairRun r(counter, "decrement", "reset");
    CheckQuery q = encode_noncommute_check(r.enc, Term::truth(true));
    CHECK(r.s.check_valid(q.hyp, q.concl).verdict == Validity::Valid);
  }

  AdtSpec set = parse_spec(kSpecDir + "set.yml");
  PairRun r(set, "add", "contains");
  Scope sc = cond_scope(r.pair);
  CheckQuery q = encode_noncommute_check(
      r.enc, elaborate("(and (= x1 y1) (not (member x1 S)))", sc));
  CHECK(r.s.check_valid(q.hyp, q.concl).verdict == Validity::Valid);

  TermPtr atom = elaborate("(member x1 S)", sc);
  CheckQuery contradictory = encode_noncommute_check(r.enc, mk_and({atom, mk_not(atom)}));
  CHECK(r.s.check_valid(contradictory.hyp, contradictory.concl).verdict == Validity::Valid);
}

TEST_CASE("refine: add/contains closes with the documented conditions under both heuristics") {
  AdtSpec set = parse_spec(kSpecDir + "set.yml");
  const std::string phi_want = "(or (member x1 S) (and (not (member x1 S)) (not (= y1 x1))))";
  const std::string phi_hat_want = "(and (= x1 y1) (not (member x1 S)))";

  for (Heuristic h : {Heuristic::Simple, Heuristic::Poke}) {
    const std::string hname = h == Heuristic::Simple ? "simple" : "poke";
    CAPTURE(hname);
    PairRun r(set, "add", "contains");
    RefineConfig cfg;
    cfg.heuristic = h;
    RefineOutcome out = refine(r.s, r.enc, r.pool, cfg);

    CHECK(out.complete);
    CHECK(out.stats.commute_leaves + out.stats.noncommute_leaves >= 2);
    CHECK(out.stats.unknown_leaves == 0);
    CHECK(out.stats.exhausted_leaves == 0);
    CHECK(out.stats.max_depth >= 1);
    CHECK(out.stats.query_count > 0);
    MESSAGE("add/contains ", hname, ": ", out.stats.query_count,
            " queries, phi = ", print_term(out.phi.term()));

    CHECK(equiv(r, out.phi.term(), phi_want));
    CHECK(equiv(r, out.phi_hat.term(), phi_hat_want));
    for (const auto& d : out.phi.disjuncts) CHECK(d.certificate_query >= 0);
    for (const auto& d : out.phi_hat.disjuncts) CHECK(d.certificate_query >= 0);

    CHECK(all_pass(fresh_validate(r.enc, out)));
  }
}

TEST_CASE("refine: observer and never-commuting pairs certify at the root") {
  AdtSpec set = parse_spec(kSpecDir + "set.yml");
  {
    PairRun r(set, "getsize", "getsize");
    RefineConfig cfg;
    cfg.heuristic = Heuristic::Simple;
    RefineOutcome out = refine(r.s, r.enc, r.pool, cfg);
    CHECK(out.complete);
    REQUIRE(out.phi.disjuncts.size() == 1);
    CHECK(out.phi.disjuncts[0].literals.empty());  // φ = true
    CHECK(out.phi_hat.disjuncts.empty());          // φ̂ = false
    CHECK(out.stats.commute_leaves == 1);
    CHECK(out.stats.query_count == 1);
    CHECK(out.stats.max_depth == 0);
  }

  AdtSpec counter = parse_spec(kSpecDir + "counter.yml");
  {
    PairRun r(counter, "decrement", "decrement");
    RefineOutcome out = refine(r.s, r.enc, r.pool, {AnalysisKind::Commute, Heuristic::Simple});
    CHECK(out.complete);
    REQUIRE(out.phi.disjuncts.size() == 1);
    CHECK(out.phi.disjuncts[0].literals.empty());
    CHECK(out.stats.query_count == 1);
  }
  {
    PairRun r(counter, "decrement", "reset");
    RefineOutcome out = refine(r.s, r.enc, r.pool, {AnalysisKind::Commute, Heuristic::Simple});
    CHECK(out.complete);
    CHECK(out.phi.disjuncts.empty());  // φ = false: they never commute
    REQUIRE(out.phi_hat.disjuncts.size() == 1);
    CHECK(out.phi_hat.disjuncts[0].literals.empty());  // φ̂ = true
    CHECK(out.stats.query_count == 2);
    CHECK(all_pass(fresh_validate(r.enc, out)));
  }
}

TEST_CASE("refine: counter boundary pairs match the published conditions") {
  AdtSpec counter = parse_spec(kSpecDir + "counter.yml");

  TermPtr phi_simple, phi_poke;
  for (Heuristic h : {Heuristic::Simple, Heuristic::Poke}) {
    PairRun r(counter, "increment", "zero");
    RefineOutcome out = refine(r.s, r.enc, r.pool, {AnalysisKind::Commute, h});
    CHECK(out.complete);
    CHECK(equiv(r, out.phi.term(), "(not (= 0 contents))"));
    CHECK(equiv(r, out.phi_hat.term(), "(= 0 contents)"));
    (h == Heuristic::Simple ? phi_simple : phi_poke) = out.phi.term();
  }

  {
    PairRun r(counter, "reset", "zero");
    RefineOutcome poke = refine(r.s, r.enc, r.pool, {AnalysisKind::Commute, Heuristic::Poke});
    CHECK(poke.complete);
    CHECK(equiv(r, poke.phi.term(), "(= 0 contents)"));
    MESSAGE("reset/zero poke shape: ", print_term(poke.phi.term()));

    PairRun r2(counter, "reset", "zero");
    RefineOutcome simple =
        refine(r2.s, r2.enc, r2.pool, {AnalysisKind::Commute, Heuristic::Simple});
    CHECK(simple.complete);
    CHECK(equiv(r2, simple.phi.term(), "(= 0 contents)"));
    MESSAGE("reset/zero simple shape: ", print_term(simple.phi.term()));

    // The two heuristics may disagree on syntax, never on meaning.
    CHECK(equiv(r2, simple.phi.term(), print_term(poke.phi.term())));
  }
}

TEST_CASE("refine: mover analysis synthesizes the published conditions") {
  AdtSpec counter = parse_spec(kSpecDir + "counter.yml");
  {
    PairRun r(counter, "increment", "decrement");
    RefineOutcome out =
        refine(r.s, r.enc, r.pool, {AnalysisKind::RightMover, Heuristic::Simple});
    CHECK(out.complete);
    CHECK(out.phi.kind == ConditionKind::RightMover);
    CHECK(out.phi_hat.kind == ConditionKind::NonRightMover);
    CHECK(equiv(r, out.phi.term(), "(not (= 0 contents))"));
    CHECK(all_pass(fresh_validate(r.enc, out)));
  }
  {
    // Left-mover of (increment, decrement) = right-mover of the swapped pair.
    PairRun r(counter, "decrement", "increment");
    RefineOutcome out =
        refine(r.s, r.enc, r.pool, {AnalysisKind::RightMover, Heuristic::Simple});
    CHECK(out.complete);
    REQUIRE(out.phi.disjuncts.size() == 1);
    CHECK(out.phi.disjuncts[0].literals.empty());  // Ψ = true
    CHECK(out.stats.query_count == 1);
  }
  {
    AdtSpec stack = parse_spec(kSpecDir + "stack.yml");
    PairRun r(stack, "pop", "push");
    RefineOutcome out =
        refine(r.s, r.enc, r.pool, {AnalysisKind::RightMover, Heuristic::Simple});
    CHECK(out.complete);
    CHECK(equiv(r, out.phi.term(), "(= y1 top)"));
    MESSAGE("pop/push right-mover: ", out.stats.query_count,
            " queries, psi = ", print_term(out.phi.term()));
    CHECK(all_pass(fresh_validate(r.enc, out)));
  }
}

TEST_CASE("refine: finite counter agrees with the brute-force oracle pointwise") {
  AdtSpec spec = parse_spec(kDataDir + "counter_finite.yml");
  oracle::Evaluator ev(spec, -1, 5);
  const char* names[] = {"increment", "decrement", "reset", "zero"};

  for (size_t i = 0; i < 4; ++i) {
    for (size_t j = i; j < 4; ++j) {
      const std::string mname = names[i], nname = names[j];
      CAPTURE(mname);
      CAPTURE(nname);
      PairRun r(spec, names[i], names[j]);
      RefineOutcome out =
          refine(r.s, r.enc, r.pool, {AnalysisKind::Commute, Heuristic::Simple});
      CHECK(out.complete);

      const MethodSpec& m = method(spec, names[i]);
      const MethodSpec& n = method(spec, names[j]);
      int bad = 0;
      std::string first;
      oracle::for_each_point(
          ev, m, n,
          [&](const oracle::Env& st, const std::vector<oracle::Value>& ma,
              const std::vector<oracle::Value>& na) {
            oracle::Env env = oracle::condition_env(st, ma, na);
            bool phi = ev.eval_bool(out.phi.term(), env);
            bool phi_hat = ev.eval_bool(out.phi_hat.term(), env);
            oracle::PointClass cls = oracle::classify_commute(ev, m, n, st, ma, na);
            bool ok = !(phi && cls == oracle::PointClass::NonCommute) &&
                      !(phi_hat && cls == oracle::PointClass::Commute) &&
                      (!out.complete || phi || phi_hat);
            if (!ok && bad++ == 0) first = oracle::describe_point(st, ma, na);
          });
      CHECK_MESSAGE(bad == 0, "first disagreement at ", first);
    }
  }

  // Mover analysis against the mover oracle on a few ordered pairs.
  const std::pair<const char*, const char*> mover_pairs[] = {
      {"increment", "decrement"}, {"decrement", "increment"}, {"reset", "zero"}};
  for (const auto& [mn, nn] : mover_pairs) {
    const std::string mname = mn, nname = nn;
    CAPTURE(mname);
    CAPTURE(nname);
    PairRun r(spec, mn, nn);
    RefineOutcome out =
        refine(r.s, r.enc, r.pool, {AnalysisKind::RightMover, Heuristic::Simple});
    CHECK(out.complete);

    const MethodSpec& m = method(spec, mn);
    const MethodSpec& n = method(spec, nn);
    int bad = 0;
    std::string first;
    oracle::for_each_point(
        ev, m, n,
        [&](const oracle::Env& st, const std::vector<oracle::Value>& ma,
            const std::vector<oracle::Value>& na) {
          oracle::Env env = oracle::condition_env(st, ma, na);
          bool psi = ev.eval_bool(out.phi.term(), env);
          bool psi_hat = ev.eval_bool(out.phi_hat.term(), env);
          oracle::MoverClass cls = oracle::classify_rmover(ev, m, n, st, ma, na);
          bool ok = !(psi && cls == oracle::MoverClass::Blocked) &&
                    !(psi_hat && cls == oracle::MoverClass::Moves) &&
                    (!out.complete || psi || psi_hat);
          if (!ok && bad++ == 0) first = oracle::describe_point(st, ma, na);
        });
    CHECK_MESSAGE(bad == 0, "first mover disagreement at ", first);
  }
}

TEST_CASE("refine: budget cutoff leaves a sound partial result") {
  AdtSpec set = parse_spec(kSpecDir + "set.yml");
  PairRun r(set, "add", "contains");
  RefineConfig cfg;
  cfg.heuristic = Heuristic::Simple;
  cfg.query_budget = 5;
  RefineOutcome out = refine(r.s, r.enc, r.pool, cfg);

  CHECK_FALSE(out.complete);
  CHECK(out.stats.exhausted_leaves >= 1);
  CHECK(out.phi.disjuncts.size() >= 1);  // something was still certified
  bool noted = false;
  for (const auto& n : out.notes) noted = noted || n.find("query budget") != std::string::npos;
  CHECK(noted);
  // Partial results remain sound even though coverage stopped early.
  CHECK(all_pass(fresh_validate(r.enc, out)));
}

TEST_CASE("refine: pre-set interrupt returns the empty sound outcome") {
  AdtSpec counter = parse_spec(kSpecDir + "counter.yml");
  PairRun r(counter, "increment", "zero");
  std::atomic<bool> stop{true};
  RefineConfig cfg;
  cfg.heuristic = Heuristic::Simple;
  cfg.interrupt = &stop;
  RefineOutcome out = refine(r.s, r.enc, r.pool, cfg);

  CHECK_FALSE(out.complete);
  CHECK(out.phi.disjuncts.empty());
  CHECK(out.phi_hat.disjuncts.empty());
  CHECK(out.stats.query_count == 0);
  REQUIRE(!out.notes.empty());
  CHECK(out.notes[0].find("interrupted") != std::string::npos);
}

TEST_CASE("refine: deterministic across fresh sessions") {
  AdtSpec set = parse_spec(kSpecDir + "set.yml");
  std::string phi[2], phi_hat[2];
  int queries[2];
  for (int run = 0; run < 2; ++run) {
    PairRun r(set, "add", "add");
    RefineOutcome out = refine(r.s, r.enc, r.pool, {AnalysisKind::Commute, Heuristic::Simple});
    CHECK(out.complete);
    CHECK(equiv(r, out.phi.term(), "(or (and (= y1 x1) (member y1 S)) (not (= y1 x1)))"));
    phi[run] = print_term(out.phi.term());
    phi_hat[run] = print_term(out.phi_hat.term());
    queries[run] = out.stats.query_count;
  }
  CHECK(phi[0] == phi[1]);
  CHECK(phi_hat[0] == phi_hat[1]);
  CHECK(queries[0] == queries[1]);
}

TEST_CASE("validate_outcome: flags corrupted and incoherent outcomes") {
  AdtSpec set = parse_spec(kSpecDir + "set.yml");
  PairRun r(set, "add", "contains");
  RefineOutcome out = refine(r.s, r.enc, r.pool, {AnalysisKind::Commute, Heuristic::Simple});
  REQUIRE(out.complete);
  REQUIRE(all_pass(fresh_validate(r.enc, out)));

  // Dropping a literal from a two-literal disjunct lets the region spill into
  // non-commuting points: the soundness re-check must catch it.
  RefineOutcome mutated = out;
  bool dropped = false;
  for (auto& d : mutated.phi.disjuncts) {
    if (d.literals.size() == 2) {
      d.literals.pop_back();
      dropped = true;
      break;
    }
  }
  REQUIRE(dropped);
  std::vector<CheckReport> reports = fresh_validate(r.enc, mutated);
  REQUIRE(!reports.empty());
  CHECK(reports[0].verdict == CheckVerdict::Fail);
  CHECK(reports[0].detail.find("counterexample") != std::string::npos);

  // An outcome that claims completeness with nothing certified fails the
  // coverage check (and only that one).
  RefineOutcome empty;
  empty.phi.kind = ConditionKind::Commute;
  empty.phi_hat.kind = ConditionKind::NonCommute;
  empty.complete = true;
  reports = fresh_validate(r.enc, empty);
  REQUIRE(reports.size() == 3);
  CHECK(reports[0].verdict == CheckVerdict::Pass);
  CHECK(reports[1].verdict == CheckVerdict::Pass);
  CHECK(reports[2].verdict == CheckVerdict::Fail);
}

TEST_CASE("simplify_condition: drops implied literals and coalesces siblings") {
  AdtSpec set = parse_spec(kSpecDir + "set.yml");
  PairRun r(set, "add", "contains");

  size_t singleton = pool_index(r.pool, "(= S (singleton x1))");
  size_t member_x = pool_index(r.pool, "(member x1 S)");
  size_t eq_xy = pool_index(r.pool, "(= x1 y1)");
  size_t member_y = pool_index(r.pool, "(member y1 S)");

  Condition c;
  c.kind = ConditionKind::Commute;
  c.disjuncts.push_back({{{singleton, r.pool[singleton], true}, {member_x, r.pool[member_x], true}}, 2, 0});
  c.disjuncts.push_back({{{eq_xy, r.pool[eq_xy], true}, {member_y, r.pool[member_y], true}}, 2, 0});
  c.disjuncts.push_back({{{eq_xy, r.pool[eq_xy], true}, {member_y, r.pool[member_y], false}}, 2, 0});
  TermPtr before = c.term();

  simplify_condition(r.s, r.enc, c);

  REQUIRE(c.disjuncts.size() == 2);
  // S = {x1} implies x1 ∈ S, so the second literal goes; the sibling pair
  // differing only in the (member y1 S) polarity merges.
  CHECK(print_term(c.disjuncts[0].term()) == "(= S (singleton x1))");
  CHECK(print_term(c.disjuncts[1].term()) == "(= x1 y1)");
  CHECK(r.s.check_valid({}, at_initial(r.enc, mk_eq(before, c.term()))).verdict ==
        Validity::Valid);
}

TEST_CASE("regions and conditions print and certify structurally") {
  CHECK(print_term(Region{}.term()) == "true");
  CHECK(print_term(Condition{}.term()) == "false");

  Atom a;
  a.term = mk_eq(Term::var("x1", Sort::integer()), Term::numeral(0));
  a.complexity = node_count(a.term);
  RegionLiteral pos{0, a, true};
  RegionLiteral neg{0, a, false};
  CHECK(print_term(pos.term()) == "(= x1 0)");
  CHECK(print_term(neg.term()) == "(not (= x1 0))");

  Region reg;
  reg.literals = {pos, neg};
  CHECK(print_term(reg.term()) == "(and (= x1 0) (not (= x1 0)))");

  std::vector<DistinguishingAtom> ds = {{3, true}, {1, false}};
  DistinguishingAtom picked = choose_simple(ds);
  CHECK(picked.index == 3);
  CHECK(picked.positive);
}
