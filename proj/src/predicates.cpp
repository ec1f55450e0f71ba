#include "comsyn/predicates.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>

namespace comsyn {

namespace {

Scope pair_scope(const PairContext& pair) {
  Scope sc = pair.adt->state_scope();
  for (const auto& b : pair.m.args) sc.vars[b.name] = b.sort;
  for (const auto& b : pair.n.args) sc.vars[b.name] = b.sort;
  return sc;
}

bool mentions_only(const TermPtr& t, const std::map<std::string, Sort>& allowed) {
  std::map<std::string, Sort> free;
  collect_free_vars(t, free);
  for (const auto& [name, sort] : free) {
    (void)sort;
    if (!allowed.count(name)) return false;
  }
  return true;
}

// Symmetric operators get a canonical operand order so (= a b) and (= b a)
// collapse to one atom.
TermPtr normalize(const TermPtr& t) {
  if (t->kind == Term::Kind::App && t->sym == "=" && t->args.size() == 2 &&
      term_compare(t->args[0], t->args[1]) > 0) {
    return Term::app("=", {t->args[1], t->args[0]}, t->sort);
  }
  return t;
}

bool trivially_constant(const TermPtr& t) {
  TermPtr folded = fold_constants(t);
  if (folded->is_truth(true) || folded->is_truth(false)) return true;
  return t->kind == Term::Kind::App && t->sym == "=" && t->args.size() == 2 &&
         term_equal(t->args[0], t->args[1]);
}

}  // namespace

std::vector<TermPtr> PredicatePool::terms() const {
  std::vector<TermPtr> out;
  out.reserve(atoms.size());
  for (const auto& a : atoms) out.push_back(a.term);
  return out;
}

PredicatePool pgen(const PairContext& pair) {
  const AdtSpec& spec = *pair.adt;
  PredicatePool pool;
  Scope sc = pair_scope(pair);
  const std::map<std::string, Sort>& allowed = sc.vars;

  // Operand universe, grouped by sort: both instances' instantiated term
  // hints, then the state variables, then the argument variables.
  std::map<Sort, std::vector<TermPtr>> by_sort;
  std::set<std::string> seen_terms;
  auto add_operand = [&](const TermPtr& t, const std::string& what) {
    if (!mentions_only(t, allowed)) {
      pool.notes.push_back(what + " `" + print_term(t) +
                           "` mentions post-state or return names; skipped");
      return;
    }
    if (!seen_terms.insert(print_term(t)).second) return;
    by_sort[t->sort].push_back(t);
  };
  for (const MethodInstance* inst : {&pair.m, &pair.n}) {
    for (const auto& [sort, hints] : inst->hints) {
      (void)sort;
      for (const auto& h : hints) add_operand(h, "term hint of " + inst->name);
    }
  }
  for (const auto& b : spec.state) add_operand(Term::var(b.name, b.sort), "state variable");
  for (const auto& b : pair.m.args) add_operand(Term::var(b.name, b.sort), "argument");
  for (const auto& b : pair.n.args) add_operand(Term::var(b.name, b.sort), "argument");

  std::set<std::string> seen_atoms;
  auto emit = [&](const TermPtr& raw, bool user, std::string origin) {
    TermPtr atom = normalize(raw);
    if (trivially_constant(atom)) return;
    if (!seen_atoms.insert(print_term(atom)).second) return;
    pool.atoms.push_back(Atom{atom, node_count(atom), user, std::move(origin)});
  };

  for (const auto& sig : spec.predicates) {
    std::vector<const std::vector<TermPtr>*> buckets;
    bool missing = false;
    for (const auto& s : sig.arg_sorts) {
      auto it = by_sort.find(s);
      if (it == by_sort.end()) {
        missing = true;
        break;
      }
      buckets.push_back(&it->second);
    }
    if (missing || buckets.empty()) continue;

    std::vector<size_t> idx(buckets.size(), 0);
    while (true) {
      ++pool.generated_count;
      std::string text = "(" + sig.op;
      std::string operands;
      for (size_t i = 0; i < idx.size(); ++i) {
        const TermPtr& o = (*buckets[i])[idx[i]];
        text += " " + print_term(o);
        operands += (i ? ", " : "") + print_term(o);
      }
      text += ")";
      try {
        TermPtr atom = elaborate(text, sc);
        if (atom->sort.is_bool()) {
          emit(atom, false, sig.op + " over (" + operands + ")");
        } else {
          pool.notes.push_back("signature " + sig.op + " yields non-boolean atom `" + text +
                               "`; skipped");
        }
      } catch (const SpecError& e) {
        pool.notes.push_back("signature " + sig.op + " over (" + operands +
                             ") rejected: " + e.what());
      }
      size_t k = idx.size();
      while (k > 0) {
        if (++idx[k - 1] < buckets[k - 1]->size()) break;
        idx[k - 1] = 0;
        --k;
      }
      if (k == 0) break;
    }
  }

  for (const auto& e : spec.predicates_extra) {
    TermPtr atom;
    try {
      atom = elaborate(e, sc);
    } catch (const SpecError& err) {
      pool.notes.push_back("user hint `" + e.str() + "` does not apply to this pair: " +
                           err.what());
      continue;
    }
    if (!atom->sort.is_bool()) {
      pool.notes.push_back("user hint `" + e.str() + "` is not boolean; skipped");
      continue;
    }
    if (!mentions_only(atom, allowed)) {
      pool.notes.push_back("user hint `" + e.str() +
                           "` mentions post-state or return names; skipped");
      continue;
    }
    emit(atom, true, "user hint");
  }

  std::stable_sort(pool.atoms.begin(), pool.atoms.end(), [](const Atom& a, const Atom& b) {
    if (a.complexity != b.complexity) return a.complexity < b.complexity;
    return term_compare(a.term, b.term) < 0;
  });
  return pool;
}

PredicatePool pgen(const AdtSpec& spec, const MethodSpec& m, const MethodSpec& n) {
  PairContext pair = make_pair_context(spec, m, n);
  return pgen(pair);
}

void declare_condition_vars(SolverSession& s, const AdtSpec& spec, const PairContext& pair) {
  for (const auto& b : spec.state) s.declare_const(b.name, b.sort);
  for (const auto& b : pair.m.args) s.declare_const(b.name, b.sort);
  for (const auto& b : pair.n.args) s.declare_const(b.name, b.sort);
}

PredicatePool filter_trivial(const PredicatePool& pool, SolverSession& s, int* dropped) {
  PredicatePool out;
  out.generated_count = pool.generated_count;
  out.notes = pool.notes;
  int removed = 0;
  for (const auto& a : pool.atoms) {
    ValidityResult always = s.check_valid({}, a.term);
    if (always.verdict == Validity::Valid) {
      ++removed;
      continue;
    }
    ValidityResult never = s.check_valid({}, mk_not(a.term));
    if (never.verdict == Validity::Valid) {
      ++removed;
      continue;
    }
    out.atoms.push_back(a);
  }
  if (dropped) *dropped = removed;
  out.notes.push_back("triviality filter removed " + std::to_string(removed) + " of " +
                      std::to_string(pool.atoms.size()) + " atoms");
  return out;
}

std::vector<DistinguishingAtom> distinguishing(const PredicatePool& pool,
                                               const Counterexample& commute_cex,
                                               const Counterexample& non_commute_cex,
                                               std::vector<std::string>* warnings) {
  size_t n = pool.atoms.size();
  if (commute_cex.atom_values.size() < n || non_commute_cex.atom_values.size() < n) {
    n = std::min({n, commute_cex.atom_values.size(), non_commute_cex.atom_values.size()});
    if (warnings) {
      warnings->push_back("counterexamples evaluate only " + std::to_string(n) + " of " +
                          std::to_string(pool.atoms.size()) +
                          " pool atoms; the rest are skipped");
    }
  }
  std::vector<DistinguishingAtom> out;
  for (size_t i = 0; i < n; ++i) {
    if (commute_cex.atom_values[i] != non_commute_cex.atom_values[i]) {
      out.push_back(DistinguishingAtom{i, commute_cex.atom_values[i]});
    }
  }
  return out;
}

}  // namespace comsyn
