#pragma once

#include <string>
#include <vector>

#include "comsyn/solver.hpp"
#include "comsyn/spec.hpp"

namespace comsyn {

// Totalized method: the precondition is absorbed into a three-way disjunction
// over an explicit error flag, so every (state, args) has a successor.
struct LiftedMethodSpec {
  const MethodSpec* base = nullptr;
  TermPtr lifted_requires;  // literally `true`
  TermPtr lifted_ensures;   // (err ∧ err') ∨ (¬err ∧ ¬err' ∧ Pre ∧ Post) ∨ (¬err ∧ err' ∧ ¬Pre)
};

struct LiftedSpec {
  const AdtSpec* base = nullptr;
  std::string err_name;        // "err", prefixed with '_' until fresh
  std::vector<Binding> state;  // base state plus the error flag
  TermPtr states_equal;        // lifted equality over _1/_2 copies
  std::vector<LiftedMethodSpec> methods;
};

// The error-flag base name for a spec ("err" unless that collides).
std::string err_name_for(const AdtSpec& spec);
// Error flag of one state snapshot, e.g. suffix "_mn" -> "err_mn".
std::string err_flag(const AdtSpec& spec, const std::string& suffix);

LiftedSpec lift(const AdtSpec& spec);

// The lifted ADT printed as a spec file (alphabetized keys), reparsable by
// parse_spec_text.
std::string emit_lifted_yaml(const AdtSpec& spec);

// P̂ost of a renamed method instance as a transition between two snapshots:
// state vars v -> v<from> / v_new -> v<to>, error flags err<from>/err<to>,
// and the instance's return names get `ret_suffix` appended (each execution
// order of a pair observes its own return values).
TermPtr lifted_post(const AdtSpec& spec, const MethodInstance& inst, const std::string& from,
                    const std::string& to, const std::string& ret_suffix);

// Observational equality between two snapshots; the lifted variant also
// requires the error flags to agree.
TermPtr base_states_equal(const AdtSpec& spec, const std::string& suf1, const std::string& suf2);
TermPtr lifted_states_equal(const AdtSpec& spec, const std::string& suf1,
                            const std::string& suf2);

enum class CheckVerdict { Pass, Fail, Unknown };

struct CheckReport {
  CheckVerdict verdict = CheckVerdict::Unknown;
  std::string subject;
  std::string detail;  // counterexample or solver status
};

// states_equal must be reflexive: identifying both copies yields a valid
// formula. Run once per spec at load.
CheckReport check_states_equal_reflexive(SolverSession& s, const AdtSpec& spec);

// A method is deterministic when two Post-successors of the same (state,
// args) agree under states_equal and on return values. Fail carries a model.
CheckReport check_deterministic(SolverSession& s, const AdtSpec& spec, const MethodSpec& m);

// A method is consistent when every Pre-state has some Post successor. The
// query is quantified, so Unknown is a tolerated outcome.
CheckReport check_consistent(SolverSession& s, const AdtSpec& spec, const MethodSpec& m);

// Reflexivity plus per-method determinism (always) and consistency (opt-in).
std::vector<CheckReport> run_load_checks(SolverSession& s, const AdtSpec& spec,
                                         bool with_consistency);

}  // namespace comsyn
