#include <atomic>
#include <csignal>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "comsyn/report.hpp"

namespace {

std::atomic<bool> g_interrupt{false};

void on_sigint(int) { g_interrupt.store(true); }

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

bool parse_pairs_arg(const std::string& arg, comsyn::RunConfig& cfg, std::string& err) {
  if (arg == "all") {
    cfg.all_pairs = true;
    return true;
  }
  cfg.all_pairs = false;
  std::stringstream ss(arg);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto colon = item.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == item.size()) {
      err = "expected m:n, got '" + item + "'";
      return false;
    }
    cfg.pairs.emplace_back(item.substr(0, colon), item.substr(colon + 1));
  }
  if (cfg.pairs.empty()) {
    err = "empty pair list";
    return false;
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"comsyn: synthesizes commutativity and mover conditions for ADT method pairs"};

  std::string spec_path, pairs_arg = "all", kind_arg = "commute", heuristic_arg = "poke",
              format_arg = "text", solver_arg, log_dir;
  long long budget = -1;
  int timeout_ms = -1, jobs = 1;
  bool validate = false, simplify = false, emit_lifted = false, dump_predicates = false;

  app.add_option("--spec", spec_path, "ADT spec (YAML with SMT-LIB clauses)")->required();
  app.add_option("--pairs", pairs_arg, "m:n[,m:n...] or 'all'")->capture_default_str();
  app.add_option("--kind", kind_arg, "analysis per pair")
      ->check(CLI::IsMember({"commute", "rmover", "lmover"}))
      ->capture_default_str();
  app.add_option("--heuristic", heuristic_arg, "predicate choice at splits")
      ->check(CLI::IsMember({"simple", "poke"}))
      ->capture_default_str();
  app.add_option("--solver", solver_arg,
                 "solver command, whitespace-split (overrides COMSYN_SOLVER)");
  app.add_option("--timeout-ms", timeout_ms,
                 "per-query soft timeout (overrides COMSYN_TIMEOUT_MS)");
  app.add_option("--budget", budget, "query budget per refinement run, -1 = unlimited")
      ->capture_default_str();
  app.add_option("--format", format_arg, "report format")
      ->check(CLI::IsMember({"text", "structured"}))
      ->capture_default_str();
  app.add_flag("--validate", validate, "re-check each outcome on a fresh session");
  app.add_flag("--simplify", simplify, "drop implied literals, merge sibling regions");
  app.add_flag("--emit-lifted", emit_lifted, "print the lifted spec instead of synthesizing");
  app.add_flag("--dump-predicates", dump_predicates,
               "print the filtered predicate pool per pair instead of synthesizing");
  app.add_option("--log-smt", log_dir, "write per-session SMT transcripts into this directory");
  app.add_option("--jobs", jobs, "pairs analyzed concurrently")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  comsyn::RunConfig cfg;
  cfg.spec_path = spec_path;
  std::string perr;
  if (!parse_pairs_arg(pairs_arg, cfg, perr)) {
    std::cerr << "error: --pairs: " << perr << "\n";
    return 1;
  }
  cfg.kind = *comsyn::report_kind_from(kind_arg);
  cfg.heuristic = heuristic_arg == "simple" ? comsyn::Heuristic::Simple : comsyn::Heuristic::Poke;
  cfg.solver = comsyn::default_solver_config();
  if (!solver_arg.empty()) cfg.solver.command = split_ws(solver_arg);
  if (timeout_ms >= 0) cfg.solver.timeout_ms = timeout_ms;
  if (!log_dir.empty()) cfg.solver.log_dir = log_dir;
  cfg.budget = budget;
  cfg.format = format_arg == "structured" ? comsyn::RunFormat::Structured : comsyn::RunFormat::Text;
  cfg.validate = validate;
  cfg.simplify = simplify;
  cfg.emit_lifted = emit_lifted;
  cfg.dump_predicates = dump_predicates;
  cfg.jobs = jobs;
  cfg.interrupt = &g_interrupt;
  std::signal(SIGINT, on_sigint);

  comsyn::RunResult res = comsyn::run(cfg);
  if (cfg.format == comsyn::RunFormat::Structured) {
    std::cout << comsyn::render_structured(res);
    // The text format folds these in; structured readers get them on stderr.
    for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
    for (const auto& e : res.errors) std::cerr << "error: " << e << "\n";
  } else {
    std::cout << comsyn::render_text(res);
  }
  return comsyn::exit_status(res);
}
