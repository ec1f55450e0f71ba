#include "comsyn/report.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <iomanip>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace comsyn {

namespace {

using nlohmann::json;

const char* kind_symbol(ReportKind k) {
  switch (k) {
    case ReportKind::Commute: return "⋈";
    case ReportKind::RightMover: return "▷";
    case ReportKind::LeftMover: return "◁";
  }
  return "?";
}

std::string heuristic_name(Heuristic h) {
  return h == Heuristic::Simple ? "simple" : "poke";
}

std::optional<Heuristic> heuristic_from(const std::string& s) {
  if (s == "simple") return Heuristic::Simple;
  if (s == "poke") return Heuristic::Poke;
  return std::nullopt;
}

std::string cond_kind_name(ConditionKind k) {
  switch (k) {
    case ConditionKind::Commute: return "commute";
    case ConditionKind::NonCommute: return "noncommute";
    case ConditionKind::RightMover: return "rightmover";
    case ConditionKind::NonRightMover: return "nonrightmover";
  }
  return "commute";
}

ConditionKind cond_kind_from(const std::string& s) {
  if (s == "noncommute") return ConditionKind::NonCommute;
  if (s == "rightmover") return ConditionKind::RightMover;
  if (s == "nonrightmover") return ConditionKind::NonRightMover;
  return ConditionKind::Commute;
}

std::string verdict_name(CheckVerdict v) {
  switch (v) {
    case CheckVerdict::Pass: return "pass";
    case CheckVerdict::Fail: return "fail";
    case CheckVerdict::Unknown: return "unknown";
  }
  return "unknown";
}

CheckVerdict verdict_from(const std::string& s) {
  if (s == "pass") return CheckVerdict::Pass;
  if (s == "fail") return CheckVerdict::Fail;
  return CheckVerdict::Unknown;
}

std::string sanitize_tag(const std::string& s) {
  std::string out;
  for (char c : s) out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  return out;
}

std::string pair_label(const PairReport& r) {
  return r.first + " " + kind_symbol(r.kind) + " " + r.second;
}

// ---------------------------------------------------------------------------
// Infix rendering

// Higher binds tighter; operands are parenthesized when they bind looser
// than the position requires. ∧ under ∨ is parenthesized (the figure style),
// chains of the same associative operator are not.
enum Prec : int {
  kPrecOr = 1,
  kPrecAnd = 2,
  kPrecNot = 3,
  kPrecRel = 4,
  kPrecAdd = 5,
  kPrecMul = 6,
  kPrecAtom = 7,
};

struct Rendered {
  std::string text;
  int prec = kPrecAtom;
};

Rendered render_infix(const TermPtr& t);

std::string infix_at(const TermPtr& t, int min_prec) {
  Rendered r = render_infix(t);
  if (r.prec < min_prec) return "(" + r.text + ")";
  return r.text;
}

std::string join_infix(const std::vector<TermPtr>& xs, const char* sep, int operand_prec) {
  std::string out;
  for (size_t i = 0; i < xs.size(); ++i) {
    if (i) out += sep;
    out += infix_at(xs[i], operand_prec);
  }
  return out;
}

Rendered render_infix(const TermPtr& t) {
  if (t->kind == Term::Kind::Numeral) return {std::to_string(t->num), kPrecAtom};
  if (t->kind == Term::Kind::Var) return {t->sym, kPrecAtom};

  const std::string& op = t->sym;
  const auto& args = t->args;

  if (args.empty()) return {op, kPrecAtom};

  if (op == "not" && args.size() == 1) {
    Rendered a = render_infix(args[0]);
    if (a.prec >= kPrecAtom) return {"¬" + a.text, kPrecNot};
    return {"¬(" + a.text + ")", kPrecNot};
  }
  if (op == "and") return {join_infix(args, " ∧ ", kPrecAnd), kPrecAnd};
  if (op == "or") return {join_infix(args, " ∨ ", kPrecNot), kPrecOr};
  if (op == "=>" && args.size() == 2)
    return {infix_at(args[0], kPrecNot) + " ⇒ " + infix_at(args[1], kPrecAnd), kPrecOr};

  static const std::vector<std::pair<const char*, const char*>> rel = {
      {"=", " = "}, {"member", " ∈ "}, {"<=", " ≤ "}, {">=", " ≥ "},
      {"<", " < "}, {">", " > "}, {"distinct", " ≠ "}};
  for (const auto& [name, glyph] : rel)
    if (op == name && args.size() == 2)
      return {infix_at(args[0], kPrecAdd) + glyph + infix_at(args[1], kPrecAdd), kPrecRel};

  if (op == "+") return {join_infix(args, " + ", kPrecAdd), kPrecAdd};
  if (op == "*") return {join_infix(args, " * ", kPrecMul), kPrecMul};
  if (op == "-" && args.size() == 1) return {"-" + infix_at(args[0], kPrecAtom), kPrecAdd};
  if (op == "-" && args.size() == 2)
    return {infix_at(args[0], kPrecAdd) + " - " + infix_at(args[1], kPrecMul), kPrecAdd};

  if (op == "union") return {join_infix(args, " ∪ ", kPrecAdd), kPrecAdd};
  if (op == "intersection") return {join_infix(args, " ∩ ", kPrecMul), kPrecMul};
  if (op == "setminus" && args.size() == 2)
    return {infix_at(args[0], kPrecAdd) + " ∖ " + infix_at(args[1], kPrecMul), kPrecAdd};
  if (op == "singleton" && args.size() == 1)
    return {"{" + infix_at(args[0], 0) + "}", kPrecAtom};
  if (op == "insert" && args.size() >= 2) {
    std::string elems;
    for (size_t i = 0; i + 1 < args.size(); ++i) {
      if (i) elems += ", ";
      elems += infix_at(args[i], 0);
    }
    return {infix_at(args.back(), kPrecAdd) + " ∪ {" + elems + "}", kPrecAdd};
  }

  if (op == "select" && args.size() == 2)
    return {infix_at(args[0], kPrecAtom) + "[" + infix_at(args[1], 0) + "]", kPrecAtom};
  if (op == "store" && args.size() == 3)
    return {infix_at(args[0], kPrecAtom) + "[" + infix_at(args[1], 0) + " ← " +
                infix_at(args[2], 0) + "]",
            kPrecAtom};

  std::string call = op + "(";
  for (size_t i = 0; i < args.size(); ++i) {
    if (i) call += ", ";
    call += infix_at(args[i], 0);
  }
  call += ")";
  return {call, kPrecAtom};
}

// ---------------------------------------------------------------------------
// Structured format

json condition_to_json(const Condition& c) {
  json disjuncts = json::array();
  for (const Region& r : c.disjuncts) {
    json lits = json::array();
    for (const RegionLiteral& l : r.literals) {
      lits.push_back({{"atom", print_term(l.atom.term)},
                      {"pool_index", l.pool_index},
                      {"positive", l.positive},
                      {"complexity", l.atom.complexity},
                      {"user_hint", l.atom.user_hint},
                      {"origin", l.atom.origin}});
    }
    disjuncts.push_back(
        {{"literals", lits}, {"depth", r.depth}, {"certificate_query", r.certificate_query}});
  }
  return {{"kind", cond_kind_name(c.kind)},
          {"term", print_term(c.term())},
          {"disjuncts", disjuncts}};
}

Condition condition_from_json(const json& j, const Scope& scope) {
  Condition c;
  c.kind = cond_kind_from(j.at("kind").get<std::string>());
  for (const json& rj : j.at("disjuncts")) {
    Region r;
    r.depth = rj.at("depth").get<int>();
    r.certificate_query = rj.at("certificate_query").get<int>();
    for (const json& lj : rj.at("literals")) {
      RegionLiteral lit;
      lit.pool_index = lj.at("pool_index").get<size_t>();
      lit.positive = lj.at("positive").get<bool>();
      lit.atom.term = elaborate(lj.at("atom").get<std::string>(), scope);
      lit.atom.complexity = lj.at("complexity").get<int>();
      lit.atom.user_hint = lj.at("user_hint").get<bool>();
      lit.atom.origin = lj.at("origin").get<std::string>();
      r.literals.push_back(std::move(lit));
    }
    c.disjuncts.push_back(std::move(r));
  }
  return c;
}

json checks_to_json(const std::vector<CheckReport>& checks) {
  json out = json::array();
  for (const CheckReport& c : checks)
    out.push_back(
        {{"subject", c.subject}, {"verdict", verdict_name(c.verdict)}, {"detail", c.detail}});
  return out;
}

std::vector<CheckReport> checks_from_json(const json& j) {
  std::vector<CheckReport> out;
  for (const json& cj : j) {
    CheckReport c;
    c.subject = cj.at("subject").get<std::string>();
    c.verdict = verdict_from(cj.at("verdict").get<std::string>());
    c.detail = cj.at("detail").get<std::string>();
    out.push_back(std::move(c));
  }
  return out;
}

json stats_to_json(const RefineStats& s) {
  return {{"queries", s.query_count},
          {"wall_time_ms", s.wall_time_ms},
          {"commute_leaves", s.commute_leaves},
          {"noncommute_leaves", s.noncommute_leaves},
          {"unknown_leaves", s.unknown_leaves},
          {"exhausted_leaves", s.exhausted_leaves},
          {"max_depth", s.max_depth}};
}

RefineStats stats_from_json(const json& j) {
  RefineStats s;
  s.query_count = j.at("queries").get<int>();
  s.wall_time_ms = j.at("wall_time_ms").get<long long>();
  s.commute_leaves = j.at("commute_leaves").get<int>();
  s.noncommute_leaves = j.at("noncommute_leaves").get<int>();
  s.unknown_leaves = j.at("unknown_leaves").get<int>();
  s.exhausted_leaves = j.at("exhausted_leaves").get<int>();
  s.max_depth = j.at("max_depth").get<int>();
  return s;
}

// The scope the pair's condition atoms range over: state variables plus both
// instances' renamed arguments, in the order the analysis ran (mirrored for
// left-mover reports).
Scope report_scope(const AdtSpec& spec, const PairReport& rep) {
  const std::string& am = rep.kind == ReportKind::LeftMover ? rep.second : rep.first;
  const std::string& an = rep.kind == ReportKind::LeftMover ? rep.first : rep.second;
  const MethodSpec* m = spec.find_method(am);
  const MethodSpec* n = spec.find_method(an);
  if (!m || !n)
    throw SpecError(SpecError::Category::Reference,
                    "report names method absent from the spec: " + (m ? an : am));
  PairContext pair = make_pair_context(spec, *m, *n);
  Scope sc = spec.state_scope();
  for (const auto& a : pair.m.args) sc.vars[a.name] = a.sort;
  for (const auto& a : pair.n.args) sc.vars[a.name] = a.sort;
  return sc;
}

std::string format_seconds(long long ms) {
  std::ostringstream o;
  o << std::fixed << std::setprecision(1) << (static_cast<double>(ms) / 1000.0) << " s";
  return o.str();
}

std::string predicate_dump_text(const AdtSpec& spec,
                                const std::vector<std::pair<std::string, std::string>>& sel,
                                const RunConfig& cfg) {
  std::ostringstream o;
  for (const auto& [first, second] : sel) {
    const std::string& am = cfg.kind == ReportKind::LeftMover ? second : first;
    const std::string& an = cfg.kind == ReportKind::LeftMover ? first : second;
    PairContext pair = make_pair_context(spec, *spec.find_method(am), *spec.find_method(an));
    SolverConfig sc = cfg.solver;
    sc.log_tag = sanitize_tag(first + "-" + second) + "-pgen";
    SolverSession s(sc);
    s.declare_adt(spec);
    declare_condition_vars(s, spec, pair);
    int dropped = 0;
    PredicatePool pool = filter_trivial(pgen(pair), s, &dropped);
    o << first << " " << kind_symbol(cfg.kind) << " " << second << ": " << pool.size()
      << " atoms (" << pool.generated_count << " generated, " << dropped << " trivial)\n";
    for (size_t i = 0; i < pool.size(); ++i) {
      const Atom& a = pool[i];
      o << "  [" << i << "] c" << a.complexity << "  " << print_term(a.term);
      if (a.user_hint) o << "  (hint)";
      o << "\n";
    }
    for (const std::string& note : pool.notes) o << "  note: " << note << "\n";
  }
  return o.str();
}

}  // namespace

std::string to_string(ReportKind k) {
  switch (k) {
    case ReportKind::Commute: return "commute";
    case ReportKind::RightMover: return "rmover";
    case ReportKind::LeftMover: return "lmover";
  }
  return "commute";
}

std::optional<ReportKind> report_kind_from(const std::string& s) {
  if (s == "commute") return ReportKind::Commute;
  if (s == "rmover") return ReportKind::RightMover;
  if (s == "lmover") return ReportKind::LeftMover;
  return std::nullopt;
}

std::string condition_infix(const TermPtr& t) { return render_infix(t).text; }

std::vector<std::pair<std::string, std::string>> select_pairs(const AdtSpec& spec,
                                                              const RunConfig& cfg) {
  if (!cfg.all_pairs) {
    for (const auto& [m, n] : cfg.pairs) {
      for (const std::string& name : {m, n}) {
        if (!spec.find_method(name))
          throw SpecError(SpecError::Category::Reference,
                          "--pairs names a method absent from the spec: " + name);
      }
    }
    return cfg.pairs;
  }
  std::vector<std::pair<std::string, std::string>> out;
  const auto& ms = spec.methods;
  for (size_t i = 0; i < ms.size(); ++i) {
    // ⋈ is symmetric: unordered pairs suffice. Movers are directional.
    size_t j0 = cfg.kind == ReportKind::Commute ? i : 0;
    for (size_t j = j0; j < ms.size(); ++j) out.emplace_back(ms[i].name, ms[j].name);
  }
  return out;
}

PairReport run_pair(const AdtSpec& spec, const std::string& first, const std::string& second,
                    const RunConfig& cfg) {
  PairReport rep;
  rep.first = first;
  rep.second = second;
  rep.kind = cfg.kind;
  const bool mover = cfg.kind != ReportKind::Commute;
  const std::string& am = cfg.kind == ReportKind::LeftMover ? second : first;
  const std::string& an = cfg.kind == ReportKind::LeftMover ? first : second;
  try {
    const MethodSpec* m = spec.find_method(am);
    const MethodSpec* n = spec.find_method(an);
    if (!m || !n)
      throw SpecError(SpecError::Category::Reference,
                      "unknown method: " + std::string(m ? an : am));
    if (cfg.kind == ReportKind::LeftMover)
      rep.notes.push_back("left-mover analysis runs right-mover on the reversed pair: x1.. are " +
                          am + "'s arguments, y1.. are " + an + "'s");

    PairContext pair = make_pair_context(spec, *m, *n);
    PairEncoding enc = encode_pair(pair);

    SolverConfig sc = cfg.solver;
    sc.log_tag = sanitize_tag(first + "-" + second);
    SolverSession s(sc);
    prepare_session(s, enc);
    for (const auto& b : spec.state) s.declare_const(b.name, b.sort);
    int dropped = 0;
    PredicatePool pool = filter_trivial(pgen(pair), s, &dropped);
    rep.pool_generated = pool.generated_count;
    rep.pool_size = static_cast<int>(pool.size());

    RefineConfig rc;
    rc.kind = mover ? AnalysisKind::RightMover : AnalysisKind::Commute;
    rc.heuristic = cfg.heuristic;
    rc.query_budget = cfg.budget;
    rc.interrupt = cfg.interrupt;
    RefineOutcome out = refine(s, enc, pool, rc);
    if (cfg.simplify) {
      simplify_condition(s, enc, out.phi);
      simplify_condition(s, enc, out.phi_hat);
    }
    rep.phi = out.phi;
    rep.phi_hat = out.phi_hat;
    rep.complete = out.complete;
    rep.stats = out.stats;
    rep.notes.insert(rep.notes.end(), out.notes.begin(), out.notes.end());

    // The figure only prints a mover condition when it differs from the
    // pair's ⋈ condition; synthesize the latter and check, don't assume.
    const bool stopped = cfg.interrupt && cfg.interrupt->load();
    if (mover && !stopped) {
      RefineConfig cc = rc;
      cc.kind = AnalysisKind::Commute;
      RefineOutcome com = refine(s, enc, pool, cc);
      if (cfg.simplify) simplify_condition(s, enc, com.phi);
      rep.commute_phi = com.phi;
      rep.commute_complete = com.complete;
      rep.stats.query_count += com.stats.query_count;
      rep.stats.wall_time_ms += com.stats.wall_time_ms;
      if (out.complete && com.complete) {
        ValidityResult eq =
            s.check_valid({}, at_initial(enc, mk_eq(out.phi.term(), com.phi.term())));
        rep.stats.query_count += 1;
        if (eq.verdict == Validity::Valid)
          rep.coincides_with_commute = true;
        else if (eq.verdict == Validity::Invalid)
          rep.coincides_with_commute = false;
        else
          rep.notes.push_back("coincidence check with the ⋈ condition was inconclusive");
      } else {
        rep.notes.push_back("coincidence with the ⋈ condition left undetermined: a run is incomplete");
      }
    }

    if (cfg.validate) {
      SolverConfig vc = cfg.solver;
      vc.log_tag = sanitize_tag(first + "-" + second) + "-validate";
      SolverSession vs(vc);
      rep.validation = validate_outcome(vs, enc, out);
    }
  } catch (const SpecError& e) {
    rep.error = e.what();
  }
  return rep;
}

RunResult run(const RunConfig& cfg) {
  RunResult res;
  res.spec_path = cfg.spec_path;
  res.kind = cfg.kind;
  res.heuristic = cfg.heuristic;
  res.budget = cfg.budget;
  res.simplify = cfg.simplify;
  res.validate = cfg.validate;

  RunConfig eff = cfg;
  if (eff.solver.command.empty()) eff.solver.command = default_solver_config().command;
  res.solver_command = eff.solver.command;
  res.timeout_ms = eff.solver.timeout_ms;

  AdtSpec spec;
  try {
    spec = parse_spec(cfg.spec_path);
  } catch (const SpecError& e) {
    res.errors.push_back(e.what());
    res.hard_error = true;
    return res;
  }
  res.spec_name = spec.name;
  for (const std::string& w : spec.warnings) res.warnings.push_back(w);

  try {
    SolverConfig lc = eff.solver;
    lc.log_tag = "load";
    SolverSession ls(lc);
    res.load_checks = run_load_checks(ls, spec, false);
  } catch (const SolverFailure& e) {
    res.errors.push_back(std::string("solver launch failed: ") + e.what());
    res.hard_error = true;
    return res;
  }
  for (const CheckReport& c : res.load_checks) {
    if (c.verdict == CheckVerdict::Fail) {
      res.errors.push_back(c.subject + ": " + c.detail);
      res.hard_error = true;
    } else if (c.verdict == CheckVerdict::Unknown) {
      res.warnings.push_back(c.subject + ": solver inconclusive");
    }
  }
  if (res.hard_error) return res;  // a determinism counterexample aborts synthesis

  std::vector<std::pair<std::string, std::string>> sel;
  try {
    sel = select_pairs(spec, eff);
  } catch (const SpecError& e) {
    res.errors.push_back(e.what());
    res.hard_error = true;
    return res;
  }

  if (eff.emit_lifted) res.lifted_yaml = emit_lifted_yaml(spec);
  if (eff.dump_predicates) {
    try {
      res.predicate_dump = predicate_dump_text(spec, sel, eff);
    } catch (const SpecError& e) {
      res.errors.push_back(e.what());
      res.hard_error = true;
    }
  }
  if (eff.emit_lifted || eff.dump_predicates) return res;

  res.reports.resize(sel.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    while (true) {
      size_t i = next.fetch_add(1);
      if (i >= sel.size()) break;
      res.reports[i] = run_pair(spec, sel[i].first, sel[i].second, eff);
    }
  };
  int jobs = std::max(1, eff.jobs);
  if (jobs <= 1 || sel.size() <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    int n = std::min<int>(jobs, static_cast<int>(sel.size()));
    pool.reserve(n);
    for (int i = 0; i < n; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  for (const PairReport& rep : res.reports) {
    if (!rep.error.empty()) {
      res.errors.push_back(pair_label(rep) + ": " + rep.error);
      res.hard_error = true;
      continue;
    }
    if (!rep.complete)
      res.warnings.push_back(pair_label(rep) + ": incomplete (sound partial result)");
    for (const CheckReport& v : rep.validation) {
      if (v.verdict == CheckVerdict::Fail) {
        res.errors.push_back(pair_label(rep) + ": validation failed: " + v.subject + ": " +
                             v.detail);
        res.hard_error = true;
      } else if (v.verdict == CheckVerdict::Unknown) {
        res.warnings.push_back(pair_label(rep) + ": validation inconclusive: " + v.subject);
      }
    }
  }
  res.interrupted = cfg.interrupt && cfg.interrupt->load();
  if (res.interrupted)
    res.warnings.push_back("interrupted: remaining regions left unexplored (partial results are sound)");
  return res;
}

int exit_status(const RunResult& res) { return res.hard_error ? 1 : 0; }

std::string render_text(const RunResult& res) {
  std::ostringstream o;
  o << "spec " << res.spec_name << " — " << to_string(res.kind) << ", "
    << heuristic_name(res.heuristic) << " heuristic\n";
  if (!res.load_checks.empty()) {
    int pass = 0, fail = 0, unknown = 0;
    for (const CheckReport& c : res.load_checks) {
      if (c.verdict == CheckVerdict::Pass) ++pass;
      else if (c.verdict == CheckVerdict::Fail) ++fail;
      else ++unknown;
    }
    o << "load checks: " << pass << " pass";
    if (fail) o << ", " << fail << " fail";
    if (unknown) o << ", " << unknown << " unknown";
    o << "\n";
    for (const CheckReport& c : res.load_checks)
      if (c.verdict != CheckVerdict::Pass)
        o << "  " << verdict_name(c.verdict) << ": " << c.subject << ": " << c.detail << "\n";
  }
  if (!res.lifted_yaml.empty()) o << "\n" << res.lifted_yaml;
  if (!res.predicate_dump.empty()) o << "\n" << res.predicate_dump;

  for (const PairReport& rep : res.reports) {
    o << "\n" << pair_label(rep) << "\n";
    if (!rep.error.empty()) {
      o << "  error: " << rep.error << "\n";
      continue;
    }
    o << "  phi:     " << condition_infix(rep.phi.term()) << "\n";
    o << "  phi-hat: " << condition_infix(rep.phi_hat.term()) << "\n";
    o << "  " << (rep.complete ? "complete" : "incomplete") << ", " << rep.stats.query_count
      << " queries, " << format_seconds(rep.stats.wall_time_ms) << ", pool "
      << rep.pool_generated << " -> " << rep.pool_size << ", depth " << rep.stats.max_depth
      << "\n";
    if (rep.commute_phi) {
      o << "  ⋈ phi:   " << condition_infix(rep.commute_phi->term())
        << (rep.commute_complete ? "" : "  (incomplete)") << "\n";
      if (rep.coincides_with_commute)
        o << "  " << (*rep.coincides_with_commute ? "coincides with the ⋈ condition"
                                                  : "differs from the ⋈ condition")
          << "\n";
    }
    for (const CheckReport& v : rep.validation)
      o << "  validation " << verdict_name(v.verdict) << ": " << v.subject
        << (v.detail.empty() ? "" : ": " + v.detail) << "\n";
    for (const std::string& note : rep.notes) o << "  note: " << note << "\n";
  }

  for (const std::string& w : res.warnings) o << "\nwarning: " << w;
  for (const std::string& e : res.errors) o << "\nerror: " << e;
  if (!res.warnings.empty() || !res.errors.empty()) o << "\n";
  return o.str();
}

std::string render_structured(const RunResult& res) {
  json j;
  j["schema_version"] = 1;
  j["generator"] = "comsyn";
  j["spec_name"] = res.spec_name;
  j["spec_path"] = res.spec_path;
  j["kind"] = to_string(res.kind);
  j["heuristic"] = heuristic_name(res.heuristic);
  j["solver_command"] = res.solver_command;
  j["timeout_ms"] = res.timeout_ms;
  j["budget"] = res.budget;
  j["simplify"] = res.simplify;
  j["validate"] = res.validate;
  j["interrupted"] = res.interrupted;
  j["hard_error"] = res.hard_error;
  j["errors"] = res.errors;
  j["warnings"] = res.warnings;
  j["load_checks"] = checks_to_json(res.load_checks);
  j["lifted_yaml"] = res.lifted_yaml;
  j["predicate_dump"] = res.predicate_dump;

  json pairs = json::array();
  for (const PairReport& rep : res.reports) {
    json p;
    p["first"] = rep.first;
    p["second"] = rep.second;
    p["kind"] = to_string(rep.kind);
    p["error"] = rep.error;
    p["complete"] = rep.complete;
    p["phi"] = condition_to_json(rep.phi);
    p["phi_hat"] = condition_to_json(rep.phi_hat);
    p["phi_text"] = condition_infix(rep.phi.term());
    p["phi_hat_text"] = condition_infix(rep.phi_hat.term());
    p["stats"] = stats_to_json(rep.stats);
    p["pool"] = {{"generated", rep.pool_generated}, {"size", rep.pool_size}};
    p["notes"] = rep.notes;
    p["validation"] = checks_to_json(rep.validation);
    if (rep.commute_phi) {
      p["commute_phi"] = condition_to_json(*rep.commute_phi);
      p["commute_complete"] = rep.commute_complete;
    }
    if (rep.coincides_with_commute) p["coincides_with_commute"] = *rep.coincides_with_commute;
    pairs.push_back(std::move(p));
  }
  j["pairs"] = std::move(pairs);
  return j.dump(2) + "\n";
}

RunResult parse_report(const std::string& json_text, const AdtSpec& spec) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SpecError(SpecError::Category::Syntax, std::string("report: ") + e.what());
  }
  if (!j.is_object() || j.value("schema_version", 0) != 1)
    throw SpecError(SpecError::Category::Syntax, "report: unsupported schema_version");

  RunResult res;
  res.spec_name = j.at("spec_name").get<std::string>();
  res.spec_path = j.at("spec_path").get<std::string>();
  if (auto k = report_kind_from(j.at("kind").get<std::string>())) res.kind = *k;
  if (auto h = heuristic_from(j.at("heuristic").get<std::string>())) res.heuristic = *h;
  res.solver_command = j.at("solver_command").get<std::vector<std::string>>();
  res.timeout_ms = j.at("timeout_ms").get<int>();
  res.budget = j.at("budget").get<long long>();
  res.simplify = j.at("simplify").get<bool>();
  res.validate = j.at("validate").get<bool>();
  res.interrupted = j.at("interrupted").get<bool>();
  res.hard_error = j.at("hard_error").get<bool>();
  res.errors = j.at("errors").get<std::vector<std::string>>();
  res.warnings = j.at("warnings").get<std::vector<std::string>>();
  res.load_checks = checks_from_json(j.at("load_checks"));
  res.lifted_yaml = j.at("lifted_yaml").get<std::string>();
  res.predicate_dump = j.at("predicate_dump").get<std::string>();

  for (const json& p : j.at("pairs")) {
    PairReport rep;
    rep.first = p.at("first").get<std::string>();
    rep.second = p.at("second").get<std::string>();
    if (auto k = report_kind_from(p.at("kind").get<std::string>())) rep.kind = *k;
    rep.error = p.at("error").get<std::string>();
    rep.complete = p.at("complete").get<bool>();
    Scope scope = report_scope(spec, rep);
    rep.phi = condition_from_json(p.at("phi"), scope);
    rep.phi_hat = condition_from_json(p.at("phi_hat"), scope);
    rep.stats = stats_from_json(p.at("stats"));
    rep.pool_generated = p.at("pool").at("generated").get<int>();
    rep.pool_size = p.at("pool").at("size").get<int>();
    rep.notes = p.at("notes").get<std::vector<std::string>>();
    rep.validation = checks_from_json(p.at("validation"));
    if (p.contains("commute_phi")) {
      rep.commute_phi = condition_from_json(p.at("commute_phi"), scope);
      rep.commute_complete = p.at("commute_complete").get<bool>();
    }
    if (p.contains("coincides_with_commute"))
      rep.coincides_with_commute = p.at("coincides_with_commute").get<bool>();
    res.reports.push_back(std::move(rep));
  }
  return res;
}

}  // namespace comsyn
