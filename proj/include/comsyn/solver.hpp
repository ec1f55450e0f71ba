#pragma once

#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "comsyn/spec.hpp"
#include "comsyn/term.hpp"

namespace comsyn {

// Which SMT-LIB surface the backend expects. Z3 has no native finite-set
// theory, so set sorts/operations are lowered onto arrays-of-Bool; cvc5 wants
// the set.* operation names; cvc4 takes the classic names used by the spec
// format as-is. Auto sniffs the dialect from the command line.
enum class SolverDialect { Auto, Z3, Cvc4, Cvc5 };

struct SolverConfig {
  std::vector<std::string> command;  // argv of the SMT-LIB 2 process
  int timeout_ms = 30000;            // soft per-query limit, enforced by the solver
  int hard_grace_ms = 20000;         // extra wall-clock slack before we kill the process
  SolverDialect dialect = SolverDialect::Auto;
  std::string log_dir;   // when non-empty, transcripts are written here
  std::string log_tag = "session";
};

// Honors COMSYN_SOLVER (whitespace-split argv) and COMSYN_TIMEOUT_MS; falls
// back to the bundled Node/z3 shim.
SolverConfig default_solver_config();

// SMT-LIB text of a term/sort in the given dialect (Auto behaves like Z3).
std::string dialect_term_text(const TermPtr& t, SolverDialect d);
std::string dialect_sort_text(const Sort& s, SolverDialect d);

struct SolverFailure : SpecError {
  explicit SolverFailure(const std::string& msg) : SpecError(Category::Reference, msg) {}
};

enum class SolverStatus { Sat, Unsat, Unknown, Timeout, Error };
std::string to_string(SolverStatus s);

enum class Validity { Valid, Invalid, Inconclusive };

struct Counterexample {
  std::map<std::string, std::string> model;  // requested variable -> printed value
  std::vector<bool> atom_values;             // aligned with check_valid's `atoms`
  std::string describe() const;
};

struct ValidityResult {
  Validity verdict = Validity::Inconclusive;
  SolverStatus raw = SolverStatus::Unknown;
  Counterexample cex;  // populated when verdict == Invalid
};

// One SMT solver subprocess speaking SMT-LIB 2 line protocol with
// :print-success framing (exactly one response per command). Declarations and
// assertions made outside any push scope form the session prelude; if the
// process has to be killed (hard deadline) it is relaunched transparently and
// the prelude replayed, so a timed-out query never poisons later ones.
class SolverSession {
 public:
  explicit SolverSession(SolverConfig cfg);
  ~SolverSession();
  SolverSession(const SolverSession&) = delete;
  SolverSession& operator=(const SolverSession&) = delete;

  SolverDialect dialect() const { return dialect_; }
  const SolverConfig& config() const { return cfg_; }

  // Sorts, enumerations and functions from a spec preamble.
  void declare_adt(const AdtSpec& spec);
  void declare_const(const std::string& name, const Sort& sort);
  void assert_term(const TermPtr& t);
  // Asserts already-lowered SMT-LIB text (for quantified formulas, which the
  // term language deliberately cannot express).
  void assert_smt(const std::string& formula);
  void push();
  void pop();
  SolverStatus check_sat();

  // Model values for `terms` after a Sat answer, in request order, printed as
  // the solver printed them. nullopt if the solver rejects the query.
  std::optional<std::vector<std::string>> get_values(const std::vector<std::string>& terms);

  // Validity of (hyp1 ∧ ... ∧ hypk) ⇒ concl by refuting the negation in a
  // fresh push scope. On Invalid, the counterexample carries the model of
  // `model_vars` and the truth value of each of `atoms` at that model.
  ValidityResult check_valid(const std::vector<TermPtr>& hyp, const TermPtr& concl,
                             const std::vector<std::string>& model_vars = {},
                             const std::vector<TermPtr>& atoms = {});

  int query_count() const { return query_count_; }

  // Dialect-lowered SMT-LIB text; exposed so tests can pin the lowering.
  std::string lower_term(const TermPtr& t) const;
  std::string lower_sort(const Sort& s) const;

 private:
  void launch();
  void shutdown(bool force);
  void ensure_alive();
  std::string transact(const std::string& cmd, int deadline_ms, bool replayable);
  std::string expect_success(const std::string& cmd, bool replayable);
  std::string read_response(int deadline_ms);
  void log_line(const std::string& line);

  SolverConfig cfg_;
  SolverDialect dialect_ = SolverDialect::Z3;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  bool dead_ = true;
  int depth_ = 0;
  int query_count_ = 0;
  std::string pending_;                // bytes read but not yet consumed
  std::vector<std::string> prelude_;   // depth-0 commands to replay after relaunch
  FILE* log_ = nullptr;
};

}  // namespace comsyn
