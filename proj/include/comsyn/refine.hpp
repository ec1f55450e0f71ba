#pragma once

#include <atomic>
#include <string>
#include <vector>

#include "comsyn/encode.hpp"
#include "comsyn/predicates.hpp"

namespace comsyn {

// One conjunct of a region: a pool atom taken positively or negated.
struct RegionLiteral {
  size_t pool_index;
  Atom atom;
  bool positive;
  TermPtr term() const;
};

// A conjunction H of literals, in the order the refinement chose them. Along
// any root-to-leaf path no atom repeats: chosen atoms leave the pool.
struct Region {
  std::vector<RegionLiteral> literals;
  int depth = 0;
  // query_count() of the session at the moment this region was certified
  // valid; -1 until then. Points into the SMT transcript.
  int certificate_query = -1;
  TermPtr term() const;  // truth(true) when empty
};

enum class ConditionKind { Commute, NonCommute, RightMover, NonRightMover };

// DNF accumulator: φ, φ̂ or their mover analogs.
struct Condition {
  ConditionKind kind = ConditionKind::Commute;
  std::vector<Region> disjuncts;
  TermPtr term() const;  // truth(false) when empty
};

struct RefineStats {
  int query_count = 0;  // check-sat commands issued by this run
  long long wall_time_ms = 0;
  int commute_leaves = 0;
  int noncommute_leaves = 0;
  int unknown_leaves = 0;   // solver answered unknown / timed out
  int exhausted_leaves = 0;  // vocabulary, depth or budget ran out
  int max_depth = 0;
};

struct RefineOutcome {
  Condition phi;
  Condition phi_hat;
  // True iff the recursion tree closed with every leaf certified: no
  // unknown/exhausted leaves, no interrupt, no solver failure. Implies
  // φ ∨ φ̂ is valid (validate_outcome re-checks this independently).
  bool complete = false;
  RefineStats stats;
  std::vector<std::string> notes;
};

enum class AnalysisKind { Commute, RightMover };
enum class Heuristic { Simple, Poke };

struct RefineConfig {
  AnalysisKind kind = AnalysisKind::Commute;
  Heuristic heuristic = Heuristic::Poke;
  int max_depth = -1;           // < 0: number of pool atoms
  long long query_budget = -1;  // < 0: unlimited
  // Polled between solver queries; when set, refine returns the regions
  // certified so far (sound, incomplete).
  const std::atomic<bool>* interrupt = nullptr;
};

// The candidates at a node: distinguishing atoms not yet used on this path.
std::vector<DistinguishingAtom> live_distinguishing(const PredicatePool& pool,
                                                    const std::vector<bool>& used,
                                                    const Counterexample& chi_c,
                                                    const Counterexample& chi_nc,
                                                    std::vector<std::string>* warnings = nullptr);

// Lowest-complexity candidate; ties fall to the fixed term order (the pool is
// sorted that way, so this is the first candidate).
DistinguishingAtom choose_simple(const std::vector<DistinguishingAtom>& candidates);

// One-level lookahead: for each candidate p, run the positive and negative
// checks on H∧p and H∧¬p; a branch that certifies counts 0, otherwise it
// counts the distinguishing atoms of its fresh counterexample pair (solver
// unknown counts the whole remaining pool, pessimistically). Returns the
// candidate minimizing the sum; ties fall to pool order. The probe queries
// run on the same prepared session and are included in `stats`.
DistinguishingAtom choose_poke(SolverSession& s, const PairEncoding& e, AnalysisKind kind,
                               const PredicatePool& pool, const std::vector<bool>& used,
                               const TermPtr& region,
                               const std::vector<DistinguishingAtom>& candidates,
                               const std::vector<TermPtr>& atoms0, const RefineConfig& cfg,
                               long long queries_before);

// The REFINE loop over a session already prepared with prepare_session(e).
// At each region H: certify H commutes (→ φ), else certify it does not
// (→ φ̂), else split on a chosen distinguishing atom and recurse with that
// atom removed from the pool. Unknown answers, vocabulary exhaustion, depth
// and budget cutoffs leave the region uncovered and mark the outcome
// incomplete; interrupts and solver hard failures stop the walk and return
// what has been certified. Every appended disjunct carries its certificate's
// position in the query transcript.
RefineOutcome refine(SolverSession& s, const PairEncoding& e, const PredicatePool& pool,
                     const RefineConfig& cfg = {});

// Independent re-check on a fresh session (declare_pair'd, chain passed as a
// hypothesis): (a) φ implies the positive check's conclusion, (b) φ̂ implies
// the negative check's conclusion, (c) when complete, φ ∨ φ̂ is valid over
// the whole (state, args) space. Any Fail is an implementation bug; callers
// must treat it as a hard error.
std::vector<CheckReport> validate_outcome(SolverSession& s, const PairEncoding& e,
                                          const RefineOutcome& out);

// Optional DNF cleanup (--simplify): drops literals implied by earlier
// literals of the same region and coalesces sibling regions differing only in
// one literal's polarity. Pure predicate reasoning over (state, args); the
// session only needs declare_pair(e). Preserves equivalence.
void simplify_condition(SolverSession& s, const PairEncoding& e, Condition& c);

}  // namespace comsyn
