#pragma once

#include <string>
#include <vector>

#include "comsyn/solver.hpp"
#include "comsyn/spec.hpp"

namespace comsyn {

// One candidate predicate: a boolean term over the pre-state variables and
// the pair's renamed argument variables (x1.., y1..). Conditions synthesized
// from these atoms are preconditions, so post-state and return names never
// appear.
struct Atom {
  TermPtr term;
  int complexity = 0;  // node count of term
  bool user_hint = false;
  std::string origin;  // signature and operand tuple (or "user hint") that produced it
};

// Candidate vocabulary for one method pair, ordered by ascending complexity
// with ties broken by the fixed term order. Atoms are unique after
// normalizing symmetric operator arguments and never constant true/false.
struct PredicatePool {
  std::vector<Atom> atoms;
  int generated_count = 0;  // atoms emitted from signatures before any filtering
  std::vector<std::string> notes;  // skipped hints, filter statistics

  size_t size() const { return atoms.size(); }
  const Atom& operator[](size_t i) const { return atoms[i]; }
  std::vector<TermPtr> terms() const;
};

// Generates the pool for a pair: applies every predicate signature of the
// spec to all operand tuples drawn from the union of both instances' term
// hints, the state variables, and the argument variables, grouped by sort;
// then folds in predicates_extra user hints, deduplicates, drops
// syntactically trivial atoms, and ranks the rest.
PredicatePool pgen(const PairContext& pair);
PredicatePool pgen(const AdtSpec& spec, const MethodSpec& m, const MethodSpec& n);

// Declares the vocabulary the pool's atoms range over (state variables and
// both instances' argument variables) as constants, so triviality checks can
// be posed. The ADT's sorts and functions must already be declared.
void declare_condition_vars(SolverSession& s, const AdtSpec& spec, const PairContext& pair);

// Drops atoms the solver proves constant (valid or unsatisfiable); inconclusive
// checks keep the atom. The number removed is reported through `dropped` and a
// pool note.
PredicatePool filter_trivial(const PredicatePool& pool, SolverSession& s,
                             int* dropped = nullptr);

// An atom whose truth differs between the commute and non-commute
// counterexamples. `positive` gives the literal that sends the commute
// counterexample into the refined branch: the branch condition is
// H ∧ atom when positive, H ∧ ¬atom otherwise.
struct DistinguishingAtom {
  size_t index = 0;  // into pool.atoms
  bool positive = true;
};

// Atoms evaluated differently by the two counterexamples, in pool order.
// Each counterexample's atom_values must align with pool.atoms; entries the
// solver failed to evaluate are skipped with a warning.
std::vector<DistinguishingAtom> distinguishing(const PredicatePool& pool,
                                               const Counterexample& commute_cex,
                                               const Counterexample& non_commute_cex,
                                               std::vector<std::string>* warnings = nullptr);

}  // namespace comsyn
