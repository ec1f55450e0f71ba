#include "comsyn/refine.hpp"

#include <algorithm>
#include <chrono>
#include <limits>

namespace comsyn {

namespace {

CheckQuery positive_check(const PairEncoding& e, AnalysisKind kind, const TermPtr& region) {
  return kind == AnalysisKind::Commute ? encode_commute_check(e, region)
                                       : encode_rightmover_check(e, region);
}

CheckQuery negative_check(const PairEncoding& e, AnalysisKind kind, const TermPtr& region) {
  return kind == AnalysisKind::Commute ? encode_noncommute_check(e, region)
                                       : encode_nonrightmover_check(e, region);
}

size_t unused_count(const std::vector<bool>& used) {
  size_t n = 0;
  for (bool u : used)
    if (!u) ++n;
  return n;
}

std::string region_text(const Region& r) {
  return r.literals.empty() ? "true" : print_term(r.term());
}

}  // namespace

TermPtr RegionLiteral::term() const {
  return positive ? atom.term : mk_not(atom.term);
}

TermPtr Region::term() const {
  std::vector<TermPtr> parts;
  parts.reserve(literals.size());
  for (const auto& l : literals) parts.push_back(l.term());
  return mk_and(parts);
}

TermPtr Condition::term() const {
  if (disjuncts.empty()) return Term::truth(false);
  std::vector<TermPtr> parts;
  parts.reserve(disjuncts.size());
  for (const auto& r : disjuncts) parts.push_back(r.term());
  return mk_or(parts);
}

std::vector<DistinguishingAtom> live_distinguishing(const PredicatePool& pool,
                                                    const std::vector<bool>& used,
                                                    const Counterexample& chi_c,
                                                    const Counterexample& chi_nc,
                                                    std::vector<std::string>* warnings) {
  std::vector<DistinguishingAtom> all = distinguishing(pool, chi_c, chi_nc, warnings);
  std::vector<DistinguishingAtom> live;
  for (const auto& d : all)
    if (!used[d.index]) live.push_back(d);
  return live;
}

DistinguishingAtom choose_simple(const std::vector<DistinguishingAtom>& candidates) {
  // The pool is sorted by (complexity, term order) and `distinguishing`
  // reports in pool order, so the first candidate is the least complex.
  return candidates.front();
}

DistinguishingAtom choose_poke(SolverSession& s, const PairEncoding& e, AnalysisKind kind,
                               const PredicatePool& pool, const std::vector<bool>& used,
                               const TermPtr& region,
                               const std::vector<DistinguishingAtom>& candidates,
                               const std::vector<TermPtr>& atoms0, const RefineConfig& cfg,
                               long long queries_before) {
  const size_t pessimistic = unused_count(used);

  auto probe = [&](const TermPtr& branch, size_t candidate) -> size_t {
    CheckQuery pos = positive_check(e, kind, branch);
    ValidityResult r1 = s.check_valid(pos.hyp, pos.concl, {}, atoms0);
    if (r1.verdict == Validity::Valid) return 0;
    CheckQuery neg = negative_check(e, kind, branch);
    ValidityResult r2 = s.check_valid(neg.hyp, neg.concl, {}, atoms0);
    if (r2.verdict == Validity::Valid) return 0;
    if (r1.verdict != Validity::Invalid || r2.verdict != Validity::Invalid) return pessimistic;
    std::vector<DistinguishingAtom> next = live_distinguishing(pool, used, r1.cex, r2.cex);
    size_t n = 0;
    for (const auto& d : next)
      if (d.index != candidate) ++n;
    return n;
  };

  auto interrupted = [&] { return cfg.interrupt && cfg.interrupt->load(); };
  auto over_budget = [&] {
    return cfg.query_budget >= 0 && s.query_count() - queries_before >= cfg.query_budget;
  };

  DistinguishingAtom best = candidates.front();
  size_t best_sum = std::numeric_limits<size_t>::max();
  for (const auto& d : candidates) {
    if (interrupted() || over_budget()) break;
    const TermPtr& p = pool[d.index].term;
    size_t sum = probe(mk_and({region, p}), d.index);
    if (sum < best_sum) sum += probe(mk_and({region, mk_not(p)}), d.index);
    else sum = best_sum;  // first probe alone already ties or loses; skip the second
    if (sum < best_sum) {
      best_sum = sum;
      best = d;
    }
  }
  return best;
}

namespace {

struct Walker {
  SolverSession& s;
  const PairEncoding& e;
  const PredicatePool& pool;
  const RefineConfig& cfg;
  std::vector<TermPtr> atoms0;
  std::vector<bool> used;
  RefineOutcome out;
  long long queries_before = 0;
  int depth_limit = 0;
  bool stopped = false;

  bool interrupted() const { return cfg.interrupt && cfg.interrupt->load(); }
  bool over_budget() const {
    return cfg.query_budget >= 0 && s.query_count() - queries_before >= cfg.query_budget;
  }

  void note(std::string text) { out.notes.push_back(std::move(text)); }

  void exhausted_leaf(const Region& h, const std::string& why) {
    ++out.stats.exhausted_leaves;
    note("region " + region_text(h) + " left uncovered: " + why);
  }

  void certify(Condition& into, Region h) {
    h.certificate_query = static_cast<int>(s.query_count());
    into.disjuncts.push_back(std::move(h));
  }

  void node(const Region& h) {
    if (stopped) return;
    if (interrupted()) {
      note("interrupted at depth " + std::to_string(h.depth));
      stopped = true;
      return;
    }
    out.stats.max_depth = std::max(out.stats.max_depth, h.depth);
    if (over_budget()) {
      exhausted_leaf(h, "query budget spent");
      return;
    }

    TermPtr region = h.term();
    ValidityResult pos, neg;
    try {
      CheckQuery q = positive_check(e, cfg.kind, region);
      pos = s.check_valid(q.hyp, q.concl, e.model_vars, atoms0);
      if (pos.verdict == Validity::Valid) {
        certify(out.phi, h);
        ++out.stats.commute_leaves;
        return;
      }
      if (interrupted()) {
        note("interrupted at depth " + std::to_string(h.depth));
        stopped = true;
        return;
      }
      q = negative_check(e, cfg.kind, region);
      neg = s.check_valid(q.hyp, q.concl, e.model_vars, atoms0);
    } catch (const SolverFailure& ex) {
      note(std::string("solver failure, pair aborted: ") + ex.what());
      stopped = true;
      return;
    }
    if (neg.verdict == Validity::Valid) {
      certify(out.phi_hat, h);
      ++out.stats.noncommute_leaves;
      return;
    }
    if (pos.verdict != Validity::Invalid || neg.verdict != Validity::Invalid) {
      ++out.stats.unknown_leaves;
      note("region " + region_text(h) + " left uncovered: solver answered " +
           to_string(pos.raw) + " / " + to_string(neg.raw));
      return;
    }

    std::vector<std::string> warnings;
    std::vector<DistinguishingAtom> cands =
        live_distinguishing(pool, used, pos.cex, neg.cex, &warnings);
    for (auto& w : warnings) note(std::move(w));
    if (cands.empty()) {
      exhausted_leaf(h, "vocabulary exhausted; no pool atom separates χc = {" +
                            pos.cex.describe() + "} from χnc = {" + neg.cex.describe() +
                            "} — consider adding a hint predicate");
      return;
    }
    if (h.depth + 1 > depth_limit) {
      exhausted_leaf(h, "depth limit " + std::to_string(depth_limit) + " reached");
      return;
    }

    DistinguishingAtom choice =
        cfg.heuristic == Heuristic::Simple
            ? choose_simple(cands)
            : choose_poke(s, e, cfg.kind, pool, used, region, cands, atoms0, cfg,
                          queries_before);

    used[choice.index] = true;
    for (bool polarity : {true, false}) {
      Region child = h;
      child.literals.push_back({choice.index, pool[choice.index], polarity});
      child.depth = h.depth + 1;
      child.certificate_query = -1;
      node(child);
    }
    used[choice.index] = false;
  }
};

}  // namespace

RefineOutcome refine(SolverSession& s, const PairEncoding& e, const PredicatePool& pool,
                     const RefineConfig& cfg) {
  auto started = std::chrono::steady_clock::now();
  Walker w{s, e, pool, cfg};
  w.queries_before = s.query_count();
  w.depth_limit = cfg.max_depth >= 0 ? cfg.max_depth : static_cast<int>(pool.size());
  w.used.assign(pool.size(), false);
  w.atoms0.reserve(pool.size());
  for (const auto& a : pool.atoms) w.atoms0.push_back(at_initial(e, a.term));
  w.out.phi.kind =
      cfg.kind == AnalysisKind::Commute ? ConditionKind::Commute : ConditionKind::RightMover;
  w.out.phi_hat.kind = cfg.kind == AnalysisKind::Commute ? ConditionKind::NonCommute
                                                         : ConditionKind::NonRightMover;

  w.node(Region{});

  w.out.complete = !w.stopped && w.out.stats.unknown_leaves == 0 &&
                   w.out.stats.exhausted_leaves == 0;
  w.out.stats.query_count = static_cast<int>(s.query_count() - w.queries_before);
  w.out.stats.wall_time_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                 std::chrono::steady_clock::now() - started)
                                 .count();
  return w.out;
}

std::vector<CheckReport> validate_outcome(SolverSession& s, const PairEncoding& e,
                                          const RefineOutcome& out) {
  declare_pair(s, e);
  const AnalysisKind kind = out.phi.kind == ConditionKind::RightMover ? AnalysisKind::RightMover
                                                                      : AnalysisKind::Commute;
  const std::string pair_name = e.pair.m.name + (kind == AnalysisKind::Commute ? " ⋈ " : " ▷ ") +
                                e.pair.n.name;
  std::vector<CheckReport> reports;

  auto run = [&](const std::string& what, std::vector<TermPtr> hyp, const TermPtr& concl) {
    CheckReport rep;
    rep.subject = pair_name + ": " + what;
    ValidityResult r = s.check_valid(hyp, concl, e.model_vars);
    switch (r.verdict) {
      case Validity::Valid:
        rep.verdict = CheckVerdict::Pass;
        break;
      case Validity::Invalid:
        rep.verdict = CheckVerdict::Fail;
        rep.detail = "counterexample " + r.cex.describe();
        break;
      case Validity::Inconclusive:
        rep.verdict = CheckVerdict::Unknown;
        rep.detail = "solver answered " + to_string(r.raw);
        break;
    }
    reports.push_back(std::move(rep));
  };

  CheckQuery pos = positive_check(e, kind, out.phi.term());
  std::vector<TermPtr> hyp = {e.chain};
  hyp.insert(hyp.end(), pos.hyp.begin(), pos.hyp.end());
  run("certified positive region is sound", hyp, pos.concl);

  CheckQuery neg = negative_check(e, kind, out.phi_hat.term());
  hyp = {e.chain};
  hyp.insert(hyp.end(), neg.hyp.begin(), neg.hyp.end());
  run("certified negative region is sound", hyp, neg.concl);

  if (out.complete)
    run("complete outcome covers every state",
        {}, at_initial(e, mk_or({out.phi.term(), out.phi_hat.term()})));
  return reports;
}

void simplify_condition(SolverSession& s, const PairEncoding& e, Condition& c) {
  // Drop literals implied by the earlier literals of their region.
  for (auto& region : c.disjuncts) {
    std::vector<RegionLiteral> kept;
    for (const auto& lit : region.literals) {
      std::vector<TermPtr> earlier;
      earlier.reserve(kept.size());
      for (const auto& k : kept) earlier.push_back(at_initial(e, k.term()));
      ValidityResult r = s.check_valid(earlier, at_initial(e, lit.term()));
      if (r.verdict != Validity::Valid) kept.push_back(lit);
    }
    region.literals = std::move(kept);
  }

  // Coalesce sibling regions: same literals except one flipped polarity.
  auto siblings = [](const Region& a, const Region& b) -> int {
    if (a.literals.size() != b.literals.size()) return -1;
    int flipped = -1;
    for (size_t i = 0; i < a.literals.size(); ++i) {
      const auto& la = a.literals[i];
      const auto& lb = b.literals[i];
      if (la.pool_index != lb.pool_index || !term_equal(la.atom.term, lb.atom.term)) return -1;
      if (la.positive != lb.positive) {
        if (flipped >= 0) return -1;
        flipped = static_cast<int>(i);
      }
    }
    return flipped;
  };

  bool merged = true;
  while (merged) {
    merged = false;
    for (size_t i = 0; i < c.disjuncts.size() && !merged; ++i) {
      for (size_t j = i + 1; j < c.disjuncts.size() && !merged; ++j) {
        int flip = siblings(c.disjuncts[i], c.disjuncts[j]);
        if (flip < 0) continue;
        c.disjuncts[i].literals.erase(c.disjuncts[i].literals.begin() + flip);
        c.disjuncts.erase(c.disjuncts.begin() + j);
        merged = true;
      }
    }
  }
}

}  // namespace comsyn
