#include "support.hpp"

#include <algorithm>

using namespace statemon;
using testing::errors_of;
using testing::must_load;

namespace {


const RuleDef& rule_named(const SpecDocument& doc, std::string_view name) {
  for (const auto& e : doc.elements) {
    if (const auto* r = std::get_if<RuleDef>(&e); r && r->name == name) return *r;
  }
  FAIL("no rule " << name);
  throw;
}

}  // namespace

TEST_CASE("a rule with an if-then-else parses into the expected tree") {
  const ParseResult r = parse_spec(R"(
rule isNightMode {
  sensors {
    I1 = "000-000-001";
  }
  if isNight
  then I1 = 18.0
  else true
})");
  REQUIRE(r.document);
  REQUIRE(r.document->elements.size() == 1);
  const auto& rule = std::get<RuleDef>(r.document->elements[0]);
  CHECK(rule.name == "isNightMode");
  REQUIRE(rule.sensors.size() == 1);
  CHECK(rule.sensors[0].local_id == "I1");
  CHECK(rule.sensors[0].bms_id == "000-000-001");
  const Expr expected = Expr::if_then_else(
      Expr::ref("isNight"),
      Expr::binary(BinaryOp::Eq, Expr::ref("I1"), Expr::number_literal(18.0)), Expr::boolean(true));
  CHECK(structurally_equal(rule.body, expected));
}

TEST_CASE("empty input is an empty document") {
  const ParseResult r = parse_spec("");
  REQUIRE(r.document);
  CHECK(r.document->elements.empty());
  CHECK(pretty_print(*r.document).empty());
}

TEST_CASE("malformed expression reports the closing parenthesis") {
  const ParseResult r = parse_spec("rule r { (1 + ) }");
  CHECK_FALSE(r.document);
  REQUIRE(!r.diagnostics.empty());
  CHECK(r.diagnostics[0].severity == Severity::Error);
  CHECK(r.diagnostics[0].loc.line == 1);
  CHECK(r.diagnostics[0].loc.column == 15);
}

TEST_CASE("C-style operator spellings are aliases") {
  const auto a = parse_spec("rule r { !x && y || z }");
  const auto b = parse_spec("rule r { not x and y or z }");
  REQUIRE(a.document);
  REQUIRE(b.document);
  CHECK(structurally_equal(*a.document, *b.document));
}

TEST_CASE("precedence and associativity") {
  auto body = [](const char* text) {
    const auto r = parse_spec(std::string("rule r { ") + text + " }");
    REQUIRE(r.document);
    return std::get<RuleDef>(r.document->elements[0]).body;
  };
  SUBCASE("and binds tighter than or") {
    const Expr e = body("a or b and c");
    REQUIRE(e.kind == ExprKind::Binary);
    CHECK(e.op == BinaryOp::Or);
    CHECK(e.operands[1].op == BinaryOp::And);
  }
  SUBCASE("implies is right associative") {
    const Expr e = body("a implies b implies c");
    CHECK(e.op == BinaryOp::Implies);
    CHECK(e.operands[0].kind == ExprKind::Ref);
    CHECK(e.operands[1].op == BinaryOp::Implies);
  }
  SUBCASE("arithmetic before comparison") {
    const Expr e = body("x - 3 >= y * 2");
    CHECK(e.op == BinaryOp::Ge);
    CHECK(e.operands[0].op == BinaryOp::Sub);
    CHECK(e.operands[1].op == BinaryOp::Mul);
  }
  SUBCASE("subtraction is left associative") {
    const Expr e = body("1 - 2 - 3 > 0");
    CHECK(e.operands[0].op == BinaryOp::Sub);
    CHECK(e.operands[0].operands[0].op == BinaryOp::Sub);
  }
}

TEST_CASE("chained comparisons are rejected") {
  const auto r = parse_spec("rule r { 1 < x < 3 }");
  CHECK_FALSE(r.document);
  REQUIRE(!r.diagnostics.empty());
  CHECK(r.diagnostics[0].message.find("do not chain") != std::string::npos);
}

TEST_CASE("duplicate names and sensor ids are parse errors") {
  CHECK_FALSE(parse_spec("constant a = 1; constant a = 2;").document);
  CHECK_FALSE(parse_spec(R"(rule r { sensors { I1 = "a"; I1 = "b"; } I1 > 0 })").document);
}

TEST_CASE("reserved words cannot name elements") {
  CHECK_FALSE(parse_spec("constant if = 1;").document);
  CHECK_FALSE(parse_spec("rule satisfies { true }").document);
  CHECK(is_reserved_word("implies"));
  CHECK_FALSE(is_reserved_word("mode"));
}

TEST_CASE("time routines accept day lists and 24:00 as an end") {
  const auto r = parse_spec("timeroutine t { daily 08:00..24:00 on mon-fri; daily 22:00..06:00 on sat, sun; }");
  REQUIRE(r.document);
  const auto& tr = std::get<TimeRoutineDef>(r.document->elements[0]);
  REQUIRE(tr.windows.size() == 2);
  CHECK(tr.windows[0].end_minute == 1440);
  CHECK(*tr.windows[0].days == 0x1f);
  CHECK(*tr.windows[1].days == 0x60);
  CHECK_FALSE(parse_spec("timeroutine t { daily 24:00..06:00; }").document);
  CHECK_FALSE(parse_spec("timeroutine t { daily 25:00..06:00; }").document);
}

TEST_CASE("day ranges wrap around the week") {
  const auto r = parse_spec("timeroutine t { daily 00:00..01:00 on sat-mon; }");
  REQUIRE(r.document);
  CHECK(*std::get<TimeRoutineDef>(r.document->elements[0]).windows[0].days == 0x61);
}

TEST_CASE("the room control spec resolves") {
  const ResolvedSpec spec = must_load(testing::kRoomSpec);
  CHECK(spec.find_as<RuleDef>("isMainMode") != nullptr);
  const std::set<std::string> expected = {"000-000-001", "000-000-002", "000-000-003"};
  CHECK(required_sensor_ids(spec) == expected);
}

TEST_CASE("required sensors") {
  CHECK(required_sensor_ids(must_load("constant a = 1; constant b = 2;")).empty());

  // An unreferenced characteristic contributes nothing.
  const auto unused = must_load(R"(
characteristic c { x = "x1"; y = "y1"; points { (0, 0) (1, 1) } margin 0; }
rule r { sensors { A = "s1"; } A > 0 })");
  CHECK(required_sensor_ids(unused) == std::set<std::string>{"s1"});

  const auto used = must_load(R"(
characteristic c { x = "x1"; y = "y1"; points { (0, 0) (1, 1) } margin 0; }
rule inner { satisfies(c) }
rule r { inner })");
  CHECK(required_sensor_ids(used) == std::set<std::string>{"x1", "y1"});
}

TEST_CASE("resolver errors") {
  SUBCASE("undefined reference") {
    const auto errs = errors_of("rule r { missing }");
    REQUIRE(errs.size() == 1);
    CHECK(errs[0].message == "undefined reference 'missing'");
  }
  SUBCASE("reference cycle lists its path") {
    const auto errs = errors_of("rule a { b } rule b { a }");
    REQUIRE(!errs.empty());
    CHECK(errs[0].message.find("a -> b -> a") != std::string::npos);
  }
  SUBCASE("numeric function used as a rule body") {
    const auto errs = errors_of("function someFunction { 1 + 2 } rule r { someFunction }");
    REQUIRE(errs.size() == 1);
    CHECK(errs[0].message.find("boolean required") != std::string::npos);
  }
  SUBCASE("state space referencing a function") {
    const auto errs = errors_of(
        "function f { 1 } statespace s { state A { rules { f; } } }");
    REQUIRE(errs.size() == 1);
    CHECK(errs[0].message.find("requires a rule") != std::string::npos);
  }
  SUBCASE("comparison of booleans") {
    CHECK(!errors_of("rule r { true > false }").empty());
  }
  SUBCASE("if branches of different types") {
    CHECK(!errors_of("rule r { if true then 1 else false }").empty());
  }
  SUBCASE("characteristic used as a value") {
    const auto errs = errors_of(
        "characteristic c { x = \"a\"; y = \"b\"; points { (0, 0) (1, 1) } margin 0; } rule r { c }");
    REQUIRE(errs.size() == 1);
    CHECK(errs[0].message.find("satisfies(c)") != std::string::npos);
  }
  SUBCASE("bad characteristic") {
    CHECK(!errors_of("characteristic c { x = \"a\"; y = \"b\"; points { (1, 0) (1, 1) } margin 0; }").empty());
    CHECK(!errors_of("characteristic c { x = \"a\"; y = \"b\"; points { (0, 0) } margin 0; }").empty());
  }
  SUBCASE("duplicate markers and unknown transition endpoints") {
    CHECK(!errors_of(R"(statespace s { state A marker "M" { } state B marker "M" { } })").empty());
    CHECK(!errors_of(R"(statespace s { state A { } transition A -- Z; })").empty());
  }
}

TEST_CASE("resolver warnings") {
  const ResolvedSpec spec = must_load(R"(
rule r { true }
statespace s {
  initial state A { }
  state B { rules { r; } }
  transition A -- A;
  transition A -- B;
  transition B -- A;
})");
  std::vector<std::string> messages;
  for (const auto& w : spec.warnings) messages.push_back(w.message);
  CHECK(messages.size() == 4);
}

TEST_CASE("diagnostics carry file, line and column") {
  const ResolveResult r = load_spec("\n\nrule r { nope }", "spec.ens");
  REQUIRE(r.diagnostics.size() == 1);
  CHECK(format_diagnostic(r.diagnostics[0], "spec.ens") ==
        "spec.ens:3:10: error: undefined reference 'nope'");
}

TEST_CASE("printer uses minimal parentheses") {
  auto reprint = [](const char* text) {
    const auto r = parse_spec(std::string("rule r { ") + text + " }");
    REQUIRE(r.document);
    return pretty_print(std::get<RuleDef>(r.document->elements[0]).body);
  };
  CHECK(reprint("((I1 > 0))") == "I1 > 0.0");
  CHECK(reprint("((I1 > 0)) and (a or b) and not (c and d)") ==
        "I1 > 0.0 and (a or b) and not (c and d)");
  CHECK(reprint("x - (y - z) > -(-w)") == "x - (y - z) > - -w");
  CHECK(reprint("(a implies b) implies c") == "(a implies b) implies c");
  CHECK(reprint("a implies (b implies c)") == "a implies b implies c");
  CHECK(reprint("(if a then b else c) and d") == "(if a then b else c) and d");
}

TEST_CASE("room control spec survives a print and reparse") {
  const auto first = parse_spec(testing::kRoomSpec);
  REQUIRE(first.document);
  const std::string printed = pretty_print(*first.document);
  const auto second = parse_spec(printed);
  REQUIRE(second.document);
  CHECK(structurally_equal(*first.document, *second.document));
  CHECK(pretty_print(*second.document) == printed);
  CHECK(structurally_equal(rule_named(*second.document, "isNightMode").body,
                           rule_named(*first.document, "isNightMode").body));
}

TEST_CASE("round trip on generated documents") {
  testing::Rng rng(20240611);
  for (int i = 0; i < 500; ++i) {
    const SpecDocument doc = testing::random_document(rng);
    const std::string printed = pretty_print(doc);
    const ParseResult reparsed = parse_spec(printed);
    INFO(printed);
    REQUIRE(reparsed.document);
    CHECK(structurally_equal(doc, *reparsed.document));
    CHECK(pretty_print(*reparsed.document) == printed);
  }
}

TEST_CASE("parsing is deterministic") {
  const std::string bad = "rule a { b } rule b { a } rule c { 1 + true }";
  auto render = [&] {
    std::string s;
    for (const auto& d : load_spec(bad, "x").diagnostics) s += format_diagnostic(d, "x") + "\n";
    return s;
  };
  CHECK(render() == render());
}
