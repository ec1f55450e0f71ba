#include "comsyn/encode.hpp"

#include <set>
#include <utility>

namespace comsyn {

namespace {

constexpr const char* kSuffix0 = "_0";
constexpr const char* kSuffixM = "_m";
constexpr const char* kSuffixMN = "_mn";
constexpr const char* kSuffixN = "_n";
constexpr const char* kSuffixNM = "_nm";

TermPtr bvar(const std::string& name) { return Term::var(name, Sort::boolean()); }

void add_decl(PairEncoding& e, std::set<std::string>& taken, const std::string& name,
              const Sort& sort) {
  if (!taken.insert(name).second)
    throw SpecError(SpecError::Category::Reference,
                    "snapshot name `" + name + "` collides with another pair constant");
  if (e.pair.adt->decl_funs.count(name))
    throw SpecError(SpecError::Category::Reference,
                    "snapshot name `" + name + "` collides with a preamble function");
  e.decls.push_back({name, sort});
}

TermPtr returns_agree(const MethodInstance& inst) {
  std::vector<TermPtr> eqs;
  for (const auto& r : inst.returns)
    eqs.push_back(mk_eq(Term::var(r.name + kSuffixMN, r.sort), Term::var(r.name + kSuffixNM, r.sort)));
  return mk_and(eqs);
}

}  // namespace

PairEncoding encode_pair(const PairContext& pair) {
  const AdtSpec& adt = *pair.adt;
  PairEncoding e;
  e.pair = pair;

  std::set<std::string> taken;
  // Reserve the unsuffixed state names: the predicate-filter phase declares
  // them alongside the snapshots when one session serves a whole pair.
  for (const auto& v : adt.state) taken.insert(v.name);
  for (const char* suf : {kSuffix0, kSuffixM, kSuffixMN, kSuffixN, kSuffixNM}) {
    for (const auto& v : adt.state) add_decl(e, taken, v.name + suf, v.sort);
    add_decl(e, taken, err_flag(adt, suf), Sort::boolean());
  }
  for (const auto& a : e.pair.m.args) add_decl(e, taken, a.name, a.sort);
  for (const auto& a : e.pair.n.args) add_decl(e, taken, a.name, a.sort);
  for (const auto& inst : {&e.pair.m, &e.pair.n})
    for (const auto& r : inst->returns)
      for (const char* suf : {kSuffixMN, kSuffixNM}) add_decl(e, taken, r.name + suf, r.sort);

  for (const auto& v : adt.state) {
    e.model_vars.push_back(v.name + kSuffix0);
    e.to_initial[v.name] = v.name + kSuffix0;
  }
  for (const auto& a : e.pair.m.args) e.model_vars.push_back(a.name);
  for (const auto& a : e.pair.n.args) e.model_vars.push_back(a.name);

  e.chain = mk_and({lifted_post(adt, e.pair.m, kSuffix0, kSuffixM, kSuffixMN),
                    lifted_post(adt, e.pair.n, kSuffixM, kSuffixMN, kSuffixMN),
                    lifted_post(adt, e.pair.n, kSuffix0, kSuffixN, kSuffixNM),
                    lifted_post(adt, e.pair.m, kSuffixN, kSuffixNM, kSuffixNM)});

  TermPtr err_0 = bvar(err_flag(adt, kSuffix0));
  TermPtr err_mn = bvar(err_flag(adt, kSuffixMN));
  TermPtr err_nm = bvar(err_flag(adt, kSuffixNM));
  TermPtr agree = mk_and({base_states_equal(adt, kSuffixMN, kSuffixNM), returns_agree(e.pair.m),
                          returns_agree(e.pair.n)});

  e.not_err0 = mk_not(err_0);
  e.not_err_mn = mk_not(err_mn);
  e.both_err = mk_and({err_mn, err_nm});
  e.clean_agree = mk_and({mk_not(err_mn), mk_not(err_nm), agree});
  e.moves = mk_and({mk_not(err_nm), agree});
  return e;
}

TermPtr at_initial(const PairEncoding& e, const TermPtr& t) {
  return rename_vars(t, e.to_initial);
}

void declare_pair(SolverSession& s, const PairEncoding& e) {
  s.declare_adt(*e.pair.adt);
  for (const auto& d : e.decls) s.declare_const(d.name, d.sort);
}

void prepare_session(SolverSession& s, const PairEncoding& e) {
  declare_pair(s, e);
  s.assert_term(e.chain);
}

CheckQuery encode_commute_check(const PairEncoding& e, const TermPtr& region) {
  return {{at_initial(e, region)}, mk_or({e.both_err, e.clean_agree})};
}

CheckQuery encode_noncommute_check(const PairEncoding& e, const TermPtr& region) {
  return {{at_initial(e, region), e.not_err0}, mk_not(e.clean_agree)};
}

CheckQuery encode_rightmover_check(const PairEncoding& e, const TermPtr& region) {
  return {{at_initial(e, region), e.not_err0, e.not_err_mn}, e.moves};
}

CheckQuery encode_nonrightmover_check(const PairEncoding& e, const TermPtr& region) {
  return {{at_initial(e, region), e.not_err0, e.not_err_mn}, mk_not(e.moves)};
}

}  // namespace comsyn
