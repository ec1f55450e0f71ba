#pragma once

#include <map>
#include <string>
#include <vector>

#include "comsyn/lift.hpp"
#include "comsyn/solver.hpp"
#include "comsyn/spec.hpp"

namespace comsyn {

// Quantifier-free encoding of both execution orders of a method pair over
// five state snapshots: σ_0 (shared start), σ_m and σ_mn along the m-then-n
// order, σ_n and σ_nm along n-then-m. Universal quantification is lifted
// outside the implication, so every snapshot variable is a free constant.
//
// Each order observes its own copies of the return values (suffix _mn / _nm):
// a return value is determined by the state a method runs in, and the two
// orders run the methods in different states. Observational agreement between
// the orders is then final-state equality plus agreement of those copies;
// with the copies pinned equal this coincides with quantifying over one
// shared return vector and sending wrong-return executions to the error sink.
struct PairEncoding {
  PairContext pair;
  std::vector<Binding> decls;           // every constant the chain mentions
  std::vector<std::string> model_vars;  // σ_0 state + args: what a cex prints
  TermPtr chain;                        // the four lifted posts, conjoined
  TermPtr not_err0;                     // σ_0 is not the error state
  TermPtr not_err_mn;                   // the m-then-n order did not fault
  TermPtr both_err;                     // both orders ended in the error state
  TermPtr clean_agree;  // neither erred ∧ states equal ∧ returns agree
  TermPtr moves;        // n-then-m ran without error and agrees with m-then-n
  std::map<std::string, std::string> to_initial;  // state var -> its σ_0 copy
};

// Builds the snapshot vocabulary and chain for a renamed-apart pair.
// Throws SpecError{Reference} if a suffixed snapshot name collides with
// another declared constant or a preamble function.
PairEncoding encode_pair(const PairContext& pair);

// Rewrites a term over unsuffixed state vars (a pool atom or a region
// conjunct) onto the σ_0 snapshot; argument variables pass through.
TermPtr at_initial(const PairEncoding& e, const TermPtr& t);

// Declares the spec preamble and every snapshot constant (no assertions):
// enough to pose queries that carry the chain as an explicit hypothesis.
void declare_pair(SolverSession& s, const PairEncoding& e);

// declare_pair plus the chain asserted at prelude depth, so one session
// serves every query of a refinement run (and survives relaunch after a hard
// timeout).
void prepare_session(SolverSession& s, const PairEncoding& e);

struct CheckQuery {
  std::vector<TermPtr> hyp;  // side conditions; the chain itself is asserted
                             // by prepare_session
  TermPtr concl;
};

// The four validity checks of one region H (a term over unsuffixed state
// vars and the pair's argument variables). With the session prepared, each
// is discharged as check_valid(hyp, concl, ...).
CheckQuery encode_commute_check(const PairEncoding& e, const TermPtr& region);
CheckQuery encode_noncommute_check(const PairEncoding& e, const TermPtr& region);
CheckQuery encode_rightmover_check(const PairEncoding& e, const TermPtr& region);
CheckQuery encode_nonrightmover_check(const PairEncoding& e, const TermPtr& region);

}  // namespace comsyn
