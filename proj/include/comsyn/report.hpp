#pragma once

#include <atomic>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "comsyn/refine.hpp"

namespace comsyn {

// What the driver synthesizes for a pair. Movers are directional: the pair
// (m, n) under RightMover asks when m;n can be replaced by n;m, and under
// LeftMover when n;m can be replaced by m;n (analyzed as RightMover on the
// reversed pair).
enum class ReportKind { Commute, RightMover, LeftMover };

std::string to_string(ReportKind k);
std::optional<ReportKind> report_kind_from(const std::string& s);

// The infix rendering used by the text format: ¬ ∧ ∨ ∈ ∪ ∖ {…} over the
// s-expression term, e.g. (not (= y1 x1)) -> "¬(y1 = x1)".
std::string condition_infix(const TermPtr& t);

struct PairReport {
  std::string first, second;  // as selected; display order
  ReportKind kind = ReportKind::Commute;

  // Commute: φ and φ̂. Movers: the mover condition and its complement.
  Condition phi, phi_hat;
  bool complete = false;
  RefineStats stats;
  int pool_generated = 0;  // atoms before the triviality filter
  int pool_size = 0;       // atoms the refinement chose from
  std::vector<std::string> notes;

  // --validate: independent re-check of the outcome on a fresh session.
  std::vector<CheckReport> validation;

  // Mover runs also synthesize the pair's commutativity condition so the
  // report can state whether the two coincide instead of assuming it.
  std::optional<Condition> commute_phi;
  bool commute_complete = false;
  std::optional<bool> coincides_with_commute;

  // Non-empty when this pair aborted (encoding collision, solver launch
  // failure after retries, …). The run continues with the other pairs.
  std::string error;
};

enum class RunFormat { Text, Structured };

struct RunConfig {
  std::string spec_path;
  bool all_pairs = true;
  std::vector<std::pair<std::string, std::string>> pairs;  // when !all_pairs
  ReportKind kind = ReportKind::Commute;
  Heuristic heuristic = Heuristic::Poke;
  SolverConfig solver;  // command/timeout/log_dir; env defaults applied
  long long budget = -1;
  RunFormat format = RunFormat::Text;
  bool validate = false;
  bool simplify = false;
  bool emit_lifted = false;
  bool dump_predicates = false;
  int jobs = 1;
  const std::atomic<bool>* interrupt = nullptr;
};

struct RunResult {
  std::string spec_path, spec_name;
  ReportKind kind = ReportKind::Commute;
  Heuristic heuristic = Heuristic::Poke;
  std::vector<std::string> solver_command;
  int timeout_ms = 0;
  long long budget = -1;
  bool simplify = false;
  bool validate = false;

  std::vector<CheckReport> load_checks;
  std::vector<PairReport> reports;

  // Inspection modes: filled when the corresponding flag was set; synthesis
  // is skipped for that invocation.
  std::string lifted_yaml;
  std::string predicate_dump;

  std::vector<std::string> warnings;  // incomplete pairs, unknown checks, …
  std::vector<std::string> errors;    // what made hard_error true
  bool hard_error = false;
  bool interrupted = false;
};

// The pair list a config selects: explicit pairs validated against the
// spec's method names, or — for all_pairs — unordered pairs including
// self-pairs in spec order for Commute, ordered pairs for movers.
// Throws SpecError{Reference} on unknown method names.
std::vector<std::pair<std::string, std::string>> select_pairs(const AdtSpec& spec,
                                                              const RunConfig& cfg);

// The full per-pair pipeline: encode, prepare a private session, generate
// and filter the pool, refine, then the optional simplify/validate/mover
// coincidence passes. Never throws: failures land in PairReport::error.
PairReport run_pair(const AdtSpec& spec, const std::string& first, const std::string& second,
                    const RunConfig& cfg);

// Whole run: parse, load checks (determinism), pair selection, then either
// the inspection modes (--emit-lifted / --dump-predicates) or synthesis over
// the selected pairs, `jobs` at a time in deterministic report order.
RunResult run(const RunConfig& cfg);

// 0 when the run produced sound results (complete or not); 1 on hard errors
// (parse/sort errors, determinism counterexample, launch or validation
// failure, unknown methods).
int exit_status(const RunResult& res);

std::string render_text(const RunResult& res);
std::string render_structured(const RunResult& res);  // JSON, schema_version 1

// Re-reads a structured document. The spec the run used must be supplied so
// condition atoms elaborate back into typed terms: conditions round-trip
// term-equal, stats and verdicts field-equal.
RunResult parse_report(const std::string& json_text, const AdtSpec& spec);

}  // namespace comsyn
