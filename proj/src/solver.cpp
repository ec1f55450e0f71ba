#include "comsyn/solver.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cctype>
#include <cerrno>
#include <chrono>
#include <atomic>
#include <cstdlib>
#include <cstring>
#include <set>
#include <sstream>

namespace comsyn {

namespace {

using Clock = std::chrono::steady_clock;

// Internal signal for "hard deadline expired, process killed". check_sat maps
// it to SolverStatus::Timeout; everywhere else it becomes a SolverFailure.
struct HardTimeout {};

[[noreturn]] void die(const std::string& msg) { throw SolverFailure("solver: " + msg); }

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

bool is_error_reply(const std::string& r) { return r.rfind("(error", 0) == 0; }

SolverDialect sniff_dialect(const SolverConfig& cfg) {
  if (cfg.dialect != SolverDialect::Auto) return cfg.dialect;
  for (const auto& part : cfg.command) {
    if (part.find("cvc5") != std::string::npos) return SolverDialect::Cvc5;
    if (part.find("cvc4") != std::string::npos) return SolverDialect::Cvc4;
  }
  return SolverDialect::Z3;
}

void ignore_sigpipe_once() {
  static bool done = false;
  if (done) return;
  struct sigaction sa{};
  sa.sa_handler = SIG_IGN;
  sigaction(SIGPIPE, &sa, nullptr);
  done = true;
}

std::string sort_text(const Sort& s, SolverDialect d) {
  switch (s.kind) {
    case Sort::Kind::Bool:
      return "Bool";
    case Sort::Kind::Int:
      return "Int";
    case Sort::Kind::Named:
      return s.name;
    case Sort::Kind::Set:
      if (d == SolverDialect::Z3)
        return "(Array " + sort_text(s.params[0], d) + " Bool)";
      return "(Set " + sort_text(s.params[0], d) + ")";
    case Sort::Kind::Array:
      return "(Array " + sort_text(s.params[0], d) + " " + sort_text(s.params[1], d) + ")";
  }
  return "?";
}

// z3 has no (Set E); we target its extensional arrays-of-Bool instead, with
// pointwise boolean combinators for the set algebra.
class Z3Printer {
 public:
  std::string print(const TermPtr& t) {
    out_.clear();
    rec(t);
    return out_;
  }

 private:
  void rec(const TermPtr& t) {
    switch (t->kind) {
      case Term::Kind::Numeral:
        out_ += t->num < 0 ? "(- " + std::to_string(-t->num) + ")" : std::to_string(t->num);
        return;
      case Term::Kind::Var:
        out_ += t->sym;
        return;
      case Term::Kind::App:
        break;
    }
    const std::string& op = t->sym;
    if (t->args.empty()) {
      out_ += op;
      return;
    }
    if (op == "member") {
      out_ += "(select ";
      rec(t->args[1]);
      out_ += ' ';
      rec(t->args[0]);
      out_ += ')';
      return;
    }
    if (op == "singleton") {
      out_ += "(store " + empty_set(Sort::set(t->args[0]->sort)) + ' ';
      rec(t->args[0]);
      out_ += " true)";
      return;
    }
    if (op == "union" || op == "intersection") {
      mapfold(op == "union" ? "or" : "and", t->args);
      return;
    }
    if (op == "setminus") {
      out_ += "((_ map and) ";
      rec(t->args[0]);
      out_ += " ((_ map not) ";
      rec(t->args[1]);
      out_ += "))";
      return;
    }
    if (op == "subset") {
      // a ⊆ b  ≡  a ∖ b = ∅
      out_ += "(= ((_ map and) ";
      rec(t->args[0]);
      out_ += " ((_ map not) ";
      rec(t->args[1]);
      out_ += ")) " + empty_set(t->args[0]->sort) + ')';
      return;
    }
    if (op == "insert") {
      // (insert e1 .. ek S): store each element into the array.
      size_t k = t->args.size() - 1;
      for (size_t i = 0; i < k; ++i) out_ += "(store ";
      rec(t->args[k]);
      for (size_t i = k; i-- > 0;) {
        out_ += ' ';
        rec(t->args[i]);
        out_ += " true)";
      }
      return;
    }
    out_ += '(' + op;
    for (const auto& a : t->args) {
      out_ += ' ';
      rec(a);
    }
    out_ += ')';
  }

  // Left-folds an n-ary set op into binary (_ map f) applications.
  void mapfold(const char* f, const std::vector<TermPtr>& args) {
    for (size_t i = 1; i < args.size(); ++i) out_ += std::string("((_ map ") + f + ") ";
    rec(args[0]);
    for (size_t i = 1; i < args.size(); ++i) {
      out_ += ' ';
      rec(args[i]);
      out_ += ')';
    }
  }

  std::string empty_set(const Sort& set_sort) {
    return "((as const " + sort_text(set_sort, SolverDialect::Z3) + ") false)";
  }

  std::string out_;
};

// cvc5 renamed the classic set operations into the set.* namespace.
const std::map<std::string, std::string>& cvc5_renames() {
  static const std::map<std::string, std::string> m = {
      {"member", "set.member"},       {"singleton", "set.singleton"},
      {"union", "set.union"},         {"intersection", "set.inter"},
      {"setminus", "set.minus"},      {"subset", "set.subset"},
      {"insert", "set.insert"},
  };
  return m;
}

std::string cvc5_print(const TermPtr& t) {
  if (t->kind != Term::Kind::App || t->args.empty()) return print_term(t);
  const auto& ren = cvc5_renames();
  auto it = ren.find(t->sym);
  std::string out = '(' + (it == ren.end() ? t->sym : it->second);
  for (const auto& a : t->args) out += ' ' + cvc5_print(a);
  return out + ')';
}

}  // namespace

std::string to_string(SolverStatus s) {
  switch (s) {
    case SolverStatus::Sat:
      return "sat";
    case SolverStatus::Unsat:
      return "unsat";
    case SolverStatus::Unknown:
      return "unknown";
    case SolverStatus::Timeout:
      return "timeout";
    case SolverStatus::Error:
      return "error";
  }
  return "?";
}

std::string Counterexample::describe() const {
  std::string out;
  for (const auto& [k, v] : model) {
    if (!out.empty()) out += ", ";
    out += k + " = " + v;
  }
  return out.empty() ? "(no model values requested)" : out;
}

SolverConfig default_solver_config() {
  SolverConfig cfg;
  if (const char* cmd = std::getenv("COMSYN_SOLVER")) cfg.command = split_ws(cmd);
  if (cfg.command.empty()) {
#ifdef COMSYN_SOURCE_DIR
    cfg.command = {"node", std::string(COMSYN_SOURCE_DIR) + "/tools/solver/smtlib_z3.js"};
#else
    cfg.command = {"z3", "-in"};
#endif
  }
  if (const char* t = std::getenv("COMSYN_TIMEOUT_MS")) {
    int v = std::atoi(t);
    if (v > 0) cfg.timeout_ms = v;
  }
  if (const char* dir = std::getenv("COMSYN_SMT_LOG")) cfg.log_dir = dir;
  return cfg;
}

SolverSession::SolverSession(SolverConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.command.empty()) cfg_.command = default_solver_config().command;
  dialect_ = sniff_dialect(cfg_);
  if (!cfg_.log_dir.empty()) {
    static std::atomic<int> seq{0};
    std::string path = cfg_.log_dir + "/" + cfg_.log_tag + "-" + std::to_string(getpid()) +
                       "-" + std::to_string(seq++) + ".smt2";
    log_ = std::fopen(path.c_str(), "w");
  }
  ignore_sigpipe_once();
  launch();
}

SolverSession::~SolverSession() {
  try {
    shutdown(false);
  } catch (...) {
  }
  if (log_) std::fclose(log_);
}

std::string dialect_sort_text(const Sort& s, SolverDialect d) {
  return sort_text(s, d == SolverDialect::Auto ? SolverDialect::Z3 : d);
}

std::string dialect_term_text(const TermPtr& t, SolverDialect d) {
  switch (d) {
    case SolverDialect::Cvc5:
      return cvc5_print(t);
    case SolverDialect::Cvc4:
      return print_term(t);
    default:
      return Z3Printer().print(t);
  }
}

std::string SolverSession::lower_sort(const Sort& s) const { return sort_text(s, dialect_); }

std::string SolverSession::lower_term(const TermPtr& t) const {
  return dialect_term_text(t, dialect_);
}

void SolverSession::log_line(const std::string& line) {
  if (!log_) return;
  std::fputs(line.c_str(), log_);
  std::fputc('\n', log_);
  std::fflush(log_);
}

void SolverSession::launch() {
  int inpipe[2], outpipe[2];
  if (pipe(inpipe) != 0 || pipe(outpipe) != 0) die(std::string("pipe: ") + std::strerror(errno));
  pid_t pid = fork();
  if (pid < 0) die(std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    dup2(inpipe[0], 0);
    dup2(outpipe[1], 1);
    int devnull = open("/dev/null", O_WRONLY);
    if (devnull >= 0) dup2(devnull, 2);
    close(inpipe[0]);
    close(inpipe[1]);
    close(outpipe[0]);
    close(outpipe[1]);
    std::vector<char*> argv;
    argv.reserve(cfg_.command.size() + 1);
    for (const auto& a : cfg_.command) argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(nullptr);
    execvp(argv[0], argv.data());
    _exit(127);
  }
  close(inpipe[0]);
  close(outpipe[1]);
  pid_ = pid;
  to_child_ = inpipe[1];
  from_child_ = outpipe[0];
  dead_ = false;
  depth_ = 0;
  pending_.clear();

  // Generous first deadline: a WASM-based backend pays module startup here.
  const int boot_ms = 180000;
  try {
    transact("(set-option :print-success true)", boot_ms, false);
    transact("(set-option :produce-models true)", boot_ms, false);
    if (dialect_ == SolverDialect::Cvc4 || dialect_ == SolverDialect::Cvc5)
      transact("(set-logic ALL)", boot_ms, false);
    if (cfg_.timeout_ms > 0) {
      std::string opt = dialect_ == SolverDialect::Z3 ? ":timeout" : ":tlimit-per";
      // Some builds reject the option; the hard deadline still protects us.
      transact("(set-option " + opt + " " + std::to_string(cfg_.timeout_ms) + ")", boot_ms,
               false);
    }
    for (const auto& cmd : prelude_) {
      std::string r = transact(cmd, boot_ms, false);
      if (is_error_reply(r)) die("prelude replay rejected: " + cmd + " -> " + r);
    }
  } catch (const HardTimeout&) {
    die("solver did not answer during startup (command: " + cfg_.command[0] + ")");
  }
}

void SolverSession::shutdown(bool force) {
  if (pid_ < 0) {
    dead_ = true;
    return;
  }
  if (!force && to_child_ >= 0) {
    const char bye[] = "(exit)\n";
    ssize_t ignored = write(to_child_, bye, sizeof bye - 1);
    (void)ignored;
  }
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  to_child_ = from_child_ = -1;
  if (force) kill(pid_, SIGKILL);
  int status = 0;
  for (int spin = 0; spin < 100; ++spin) {
    pid_t r = waitpid(pid_, &status, WNOHANG);
    if (r != 0) {
      pid_ = -1;
      dead_ = true;
      pending_.clear();
      return;
    }
    usleep(10000);
  }
  kill(pid_, SIGKILL);
  waitpid(pid_, &status, 0);
  pid_ = -1;
  dead_ = true;
  pending_.clear();
}

void SolverSession::ensure_alive() {
  if (dead_) launch();
}

std::string SolverSession::transact(const std::string& cmd, int deadline_ms, bool replayable) {
  if (dead_) die("attempted to talk to a dead solver session");
  log_line(cmd);
  std::string line = cmd + "\n";
  size_t off = 0;
  while (off < line.size()) {
    ssize_t n = write(to_child_, line.data() + off, line.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      int err = errno;
      shutdown(true);
      die(std::string("write to solver failed: ") + std::strerror(err));
    }
    off += static_cast<size_t>(n);
  }
  std::string resp = read_response(deadline_ms);
  log_line("; -> " + resp);
  if (replayable && depth_ == 0 && !is_error_reply(resp)) prelude_.push_back(cmd);
  return resp;
}

std::string SolverSession::read_response(int deadline_ms) {
  auto deadline = Clock::now() + std::chrono::milliseconds(deadline_ms);
  for (;;) {
    size_t start = std::string::npos, end = 0;
    int depth = 0;
    bool in_str = false, complete = false;
    for (size_t i = 0; i < pending_.size() && !complete; ++i) {
      char c = pending_[i];
      if (start == std::string::npos) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        start = i;
      }
      if (in_str) {
        if (c == '"') in_str = false;
        continue;
      }
      if (c == '"') {
        in_str = true;
      } else if (c == '(') {
        ++depth;
      } else if (c == ')') {
        if (--depth == 0) {
          complete = true;
          end = i + 1;
        }
      } else if (depth == 0 && std::isspace(static_cast<unsigned char>(c))) {
        complete = true;  // bare atom like sat/unsat/success
        end = i;
      }
    }
    if (complete) {
      std::string resp = pending_.substr(start, end - start);
      pending_.erase(0, end);
      return resp;
    }

    auto remain =
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
    if (remain <= 0) {
      shutdown(true);
      throw HardTimeout{};
    }
    struct pollfd pfd {
      from_child_, POLLIN, 0
    };
    int pr = poll(&pfd, 1, static_cast<int>(remain));
    if (pr < 0) {
      if (errno == EINTR) continue;
      int err = errno;
      shutdown(true);
      die(std::string("poll on solver pipe failed: ") + std::strerror(err));
    }
    if (pr == 0) continue;  // deadline re-checked at loop head
    char buf[4096];
    ssize_t n = read(from_child_, buf, sizeof buf);
    if (n < 0) {
      if (errno == EINTR) continue;
      int err = errno;
      shutdown(true);
      die(std::string("read from solver failed: ") + std::strerror(err));
    }
    if (n == 0) {
      shutdown(true);
      die("solver exited unexpectedly (is '" + cfg_.command[0] + "' runnable?)");
    }
    pending_.append(buf, static_cast<size_t>(n));
  }
}

std::string SolverSession::expect_success(const std::string& cmd, bool replayable) {
  ensure_alive();
  std::string resp;
  try {
    resp = transact(cmd, cfg_.timeout_ms + cfg_.hard_grace_ms, replayable);
  } catch (const HardTimeout&) {
    die("solver unresponsive on: " + cmd);
  }
  if (is_error_reply(resp)) die("solver rejected " + cmd + " with " + resp);
  return resp;
}

void SolverSession::declare_adt(const AdtSpec& spec) {
  std::set<std::string> ctors;
  for (const auto& [name, cs] : spec.enum_sorts) {
    std::string cmd = "(declare-datatypes ((" + name + " 0)) ((";
    for (size_t i = 0; i < cs.size(); ++i) {
      if (i) cmd += ' ';
      cmd += '(' + cs[i] + ')';
      ctors.insert(cs[i]);
    }
    cmd += ")))";
    expect_success(cmd, true);
  }
  for (const auto& [name, arity] : spec.decl_sorts) {
    if (spec.enum_sorts.count(name)) continue;
    expect_success("(declare-sort " + name + " " + std::to_string(arity) + ")", true);
  }
  for (const auto& [name, sig] : spec.decl_funs) {
    if (ctors.count(name)) continue;
    std::string cmd = "(declare-fun " + name + " (";
    for (size_t i = 0; i < sig.params.size(); ++i) {
      if (i) cmd += ' ';
      cmd += lower_sort(sig.params[i]);
    }
    cmd += ") " + lower_sort(sig.ret) + ")";
    expect_success(cmd, true);
  }
}

void SolverSession::declare_const(const std::string& name, const Sort& sort) {
  expect_success("(declare-const " + name + " " + lower_sort(sort) + ")", true);
}

void SolverSession::assert_term(const TermPtr& t) {
  expect_success("(assert " + lower_term(t) + ")", true);
}

void SolverSession::assert_smt(const std::string& formula) {
  expect_success("(assert " + formula + ")", true);
}

void SolverSession::push() {
  expect_success("(push 1)", false);
  ++depth_;
}

void SolverSession::pop() {
  if (depth_ == 0) die("pop with no matching push");
  expect_success("(pop 1)", false);
  --depth_;
}

SolverStatus SolverSession::check_sat() {
  ensure_alive();
  ++query_count_;
  std::string r;
  try {
    r = transact("(check-sat)", cfg_.timeout_ms + cfg_.hard_grace_ms, false);
  } catch (const HardTimeout&) {
    return SolverStatus::Timeout;
  }
  if (r == "sat") return SolverStatus::Sat;
  if (r == "unsat") return SolverStatus::Unsat;
  if (is_error_reply(r)) return SolverStatus::Error;
  return SolverStatus::Unknown;
}

std::optional<std::vector<std::string>> SolverSession::get_values(
    const std::vector<std::string>& terms) {
  if (terms.empty()) return std::vector<std::string>{};
  if (dead_) return std::nullopt;
  std::string cmd = "(get-value (";
  for (size_t i = 0; i < terms.size(); ++i) {
    if (i) cmd += ' ';
    cmd += terms[i];
  }
  cmd += "))";
  std::string r;
  try {
    r = transact(cmd, cfg_.timeout_ms + cfg_.hard_grace_ms, false);
  } catch (const HardTimeout&) {
    return std::nullopt;
  }
  if (is_error_reply(r)) return std::nullopt;
  std::vector<SExpr> parsed;
  try {
    parsed = parse_sexprs(r);
  } catch (const SpecError&) {
    return std::nullopt;
  }
  if (parsed.size() != 1 || parsed[0].is_atom) return std::nullopt;
  std::vector<std::string> out;
  out.reserve(parsed[0].items.size());
  for (const SExpr& entry : parsed[0].items) {
    if (entry.is_atom || entry.items.size() < 2) return std::nullopt;
    out.push_back(entry.items.back().str());
  }
  if (out.size() != terms.size()) return std::nullopt;
  return out;
}

ValidityResult SolverSession::check_valid(const std::vector<TermPtr>& hyp, const TermPtr& concl,
                                          const std::vector<std::string>& model_vars,
                                          const std::vector<TermPtr>& atoms) {
  ValidityResult res;
  push();
  for (const auto& h : hyp) assert_term(h);
  assert_term(mk_not(concl));
  // Tie each probe atom to a fresh Bool constant inside this scope.  Models
  // frequently leave raw theory atoms unevaluated under get-value (array
  // extensionality in particular prints as a nested term, not a literal);
  // a constrained Bool constant always comes back as true/false.
  std::vector<std::string> atom_names;
  atom_names.reserve(atoms.size());
  for (size_t i = 0; i < atoms.size(); ++i) {
    std::string nm = "cexatom_" + std::to_string(query_count_) + "_" + std::to_string(i);
    expect_success("(declare-const " + nm + " Bool)", false);
    expect_success("(assert (= " + nm + " " + lower_term(atoms[i]) + "))", false);
    atom_names.push_back(std::move(nm));
  }
  res.raw = check_sat();
  auto leave = [&] {
    if (!dead_ && depth_ > 0) pop();
  };
  if (res.raw == SolverStatus::Unsat) {
    res.verdict = Validity::Valid;
    leave();
    return res;
  }
  if (res.raw != SolverStatus::Sat) {
    leave();
    return res;  // Inconclusive
  }
  std::vector<std::string> req = model_vars;
  req.reserve(model_vars.size() + atom_names.size());
  for (const auto& nm : atom_names) req.push_back(nm);
  auto vals = get_values(req);
  if (!vals) {
    leave();
    return res;  // model extraction failed: treat the query as inconclusive
  }
  for (size_t i = 0; i < model_vars.size(); ++i) res.cex.model[model_vars[i]] = (*vals)[i];
  for (size_t i = 0; i < atoms.size(); ++i) {
    const std::string& v = (*vals)[model_vars.size() + i];
    if (v != "true" && v != "false") {
      leave();
      return res;
    }
    res.cex.atom_values.push_back(v == "true");
  }
  res.verdict = Validity::Invalid;
  leave();
  return res;
}

}  // namespace comsyn
