#include "doctest.h"

#include <string>

#include "comsyn/spec.hpp"

using namespace comsyn;

namespace {
const std::string kSpecDir = std::string(COMSYN_SOURCE_DIR) + "/specs/";
const std::string kDataDir = std::string(COMSYN_SOURCE_DIR) + "/tests/data/";
}  // namespace

TEST_CASE("counter spec parses to the expected shape") {
  AdtSpec spec = parse_spec(kSpecDir + "counter.yml");
  CHECK(spec.name == "counter");
  REQUIRE(spec.state.size() == 1);
  CHECK(spec.state[0].name == "contents");
  CHECK(spec.state[0].sort.is_int());
  REQUIRE(spec.methods.size() == 4);
  CHECK(!spec.states_equal_defaulted);
  CHECK(print_term(spec.states_equal) == "(= contents_1 contents_2)");

  const MethodSpec* inc = spec.find_method("increment");
  REQUIRE(inc != nullptr);
  CHECK(inc->args.empty());
  REQUIRE(inc->returns.size() == 1);
  CHECK(inc->returns[0].name == "result");
  CHECK(print_term(inc->pre) == "(>= contents 0)");
  CHECK(print_term(inc->post) == "(and (= contents_new (+ contents 1)) (= result true))");
  REQUIRE(inc->term_hints.size() == 1);
  CHECK(inc->term_hints[0].first.is_int());
  CHECK(inc->term_hints[0].second.size() == 3);

  REQUIRE(spec.predicates.size() == 1);
  CHECK(spec.predicates[0].op == "=");
  CHECK(spec.predicates[0].arg_sorts.size() == 2);

  CHECK(spec.find_method("pop") == nullptr);
  CHECK(spec.warnings.empty());
}

TEST_CASE("set spec: preamble sorts and hint placeholders") {
  AdtSpec spec = parse_spec(kSpecDir + "set.yml");
  CHECK(spec.decl_sorts.count("E") == 1);
  REQUIRE(spec.state.size() == 2);
  CHECK(spec.state[0].sort == Sort::set(Sort::named("E")));

  const MethodSpec* add = spec.find_method("add");
  REQUIRE(add != nullptr);
  REQUIRE(add->term_hints.size() == 3);
  // Groups in YAML order: E, Int, (Set E).
  CHECK(add->term_hints[0].first == Sort::named("E"));
  CHECK(print_term(add->term_hints[0].second[0]) == "$1");
  CHECK(add->term_hints[2].second.size() == 3);
  CHECK(print_term(add->term_hints[2].second[2]) == "(union S (singleton $1))");

  CHECK(spec.predicates.size() == 4);
  CHECK(spec.predicates[3].op == "member");
}

TEST_CASE("hashtable spec: method named like a state variable, trailing comma hint") {
  AdtSpec spec = parse_spec(kSpecDir + "hashtable.yml");
  CHECK(spec.decl_sorts.size() == 2);
  const MethodSpec* put = spec.find_method("put");
  REQUIRE(put != nullptr);
  REQUIRE(put->args.size() == 2);
  // F group: [$2, (select H $1), ] — the trailing comma is YAML noise.
  for (const auto& [sort, hints] : put->term_hints) {
    if (sort == Sort::named("F")) CHECK(hints.size() == 2);
  }
  CHECK(spec.find_method("size") != nullptr);

  const MethodSpec* get = spec.find_method("get");
  REQUIRE(get != nullptr);
  CHECK(print_term(get->pre) == "(member k0 keys)");
}

TEST_CASE("stack spec: observational states_equal") {
  AdtSpec spec = parse_spec(kSpecDir + "stack.yml");
  CHECK(spec.state.size() == 5);
  CHECK(print_term(spec.states_equal) ==
        "(and (= size_1 size_2) (or (= size_1 0) (and (= size_1 1) (= top_1 top_2)) "
        "(and (= top_1 top_2) (= nextToTop_1 nextToTop_2))))");
  // Suffix instantiation against snapshot names.
  CHECK(print_term(spec.states_equal_for("_mn", "_nm")) ==
        "(and (= size_mn size_nm) (or (= size_mn 0) (and (= size_mn 1) (= top_mn top_nm)) "
        "(and (= top_mn top_nm) (= nextToTop_mn nextToTop_nm))))");
}

TEST_CASE("blockking spec: states_equal macro and err constant folding") {
  AdtSpec spec = parse_spec(kSpecDir + "blockking.yml");
  CHECK(spec.states_equal_defaulted);
  CHECK(spec.decl_funs.count("modFn") == 1);
  REQUIRE(spec.predicates_extra.size() == 7);
  CHECK(spec.predicates_extra[0].str() == "(= x1 y1)");

  const MethodSpec* enter = spec.find_method("enter");
  REQUIRE(enter != nullptr);
  std::string post = print_term(enter->post);
  // The macro call expanded into the pointwise equality over _new copies and
  // the error-flag branch folded away entirely.
  CHECK(post.find("(= warrior warrior_new)") != std::string::npos);
  CHECK(post.find("states_equal") == std::string::npos);
  CHECK(post.find("err") == std::string::npos);

  AdtSpec fixed = parse_spec(kSpecDir + "blockking_fixed.yml");
  CHECK(fixed.state[0].sort == Sort::array(Sort::integer(), Sort::integer()));
}

TEST_CASE("all bundled specs round-trip through print_spec") {
  for (const char* name : {"counter", "accumulator", "set", "hashtable", "stack",
                           "blockking", "blockking_fixed"}) {
    CAPTURE(name);
    AdtSpec spec = parse_spec(kSpecDir + name + std::string(".yml"));
    std::string once = print_spec(spec);
    AdtSpec reparsed = parse_spec_text(once, name);
    CHECK(print_spec(reparsed) == once);
    CHECK(reparsed.methods.size() == spec.methods.size());
    CHECK(reparsed.predicates.size() == spec.predicates.size());
    CHECK(reparsed.predicates_extra.size() == spec.predicates_extra.size());
  }
  for (const char* name : {"counter_finite", "set_finite", "hashtable_finite",
                           "counter_nondet"}) {
    CAPTURE(name);
    AdtSpec spec = parse_spec(kDataDir + name + std::string(".yml"));
    std::string once = print_spec(spec);
    CHECK(print_spec(parse_spec_text(once, name)) == once);
  }
}

TEST_CASE("spec validation failures") {
  const std::string base = "name: t\nstate:\n  - name: c\n    type: Int\n";

  SUBCASE("missing ensures") {
    CHECK_THROWS_WITH_AS(
        parse_spec_text(base + "methods:\n  - name: m\n    requires: true\n"),
        doctest::Contains("missing ensures"), SpecError);
  }
  SUBCASE("unknown sort") {
    CHECK_THROWS_AS(parse_spec_text("name: t\nstate:\n  - name: c\n    type: Widget\n" +
                                    std::string("methods:\n  - name: m\n    ensures: true\n")),
                    SpecError);
  }
  SUBCASE("duplicate state variable") {
    CHECK_THROWS_AS(
        parse_spec_text("name: t\nstate:\n  - name: c\n    type: Int\n  - name: c\n"
                        "    type: Bool\nmethods:\n  - name: m\n    ensures: true\n"),
        SpecError);
  }
  SUBCASE("argument shadows state") {
    CHECK_THROWS_AS(
        parse_spec_text(base +
                        "methods:\n  - name: m\n    args:\n      - name: c\n"
                        "        type: Int\n    ensures: true\n"),
        SpecError);
  }
  SUBCASE("ill-sorted ensures") {
    CHECK_THROWS_AS(parse_spec_text(base + "methods:\n  - name: m\n    ensures: (+ c 1)\n"),
                    SpecError);
  }
  SUBCASE("states_equal macro arity") {
    CHECK_THROWS_AS(
        parse_spec_text(base + "methods:\n  - name: m\n    ensures: (states_equal c)\n"),
        SpecError);
  }
  SUBCASE("duplicate method") {
    CHECK_THROWS_AS(parse_spec_text(base +
                                    "methods:\n  - name: m\n    ensures: true\n"
                                    "  - name: m\n    ensures: true\n"),
                    SpecError);
  }
  SUBCASE("unknown keys warn but do not fail") {
    AdtSpec spec = parse_spec_text(base + "methods:\n  - name: m\n    ensures: true\n" +
                                   "author: nobody\n");
    REQUIRE(spec.warnings.size() == 1);
    CHECK(spec.warnings[0].find("author") != std::string::npos);
  }
}

TEST_CASE("pair construction renames apart") {
  AdtSpec acc = parse_spec(kSpecDir + "accumulator.yml");
  const MethodSpec* increase = acc.find_method("increase");
  REQUIRE(increase != nullptr);

  PairContext pc = make_pair_context(acc, *increase, *increase);
  REQUIRE(pc.m.args.size() == 1);
  REQUIRE(pc.n.args.size() == 1);
  CHECK(pc.m.args[0].name == "x1");
  CHECK(pc.n.args[0].name == "y1");
  CHECK(pc.m.returns[0].name == "r1");
  CHECK(pc.n.returns[0].name == "s1");
  CHECK(print_term(pc.m.post) == "(and (= contents_new (+ contents x1)) (= r1 true))");
  CHECK(print_term(pc.n.post) == "(and (= contents_new (+ contents y1)) (= s1 true))");
  // Hints: placeholders instantiated then renamed.
  CHECK(print_term(pc.m.hints[0].second[0]) == "x1");
  CHECK(print_term(pc.n.hints[0].second[2]) == "(+ contents y1)");

  SUBCASE("state variables that look like renamed args are rejected") {
    AdtSpec bad = parse_spec_text(
        "name: t\nstate:\n  - name: x1\n    type: Int\n"
        "methods:\n  - name: m\n    ensures: true\n");
    CHECK_THROWS_AS(make_pair_context(bad, bad.methods[0], bad.methods[0]), SpecError);
  }
}
