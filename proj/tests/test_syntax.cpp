#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "sessmon/errors.hpp"
#include "sessmon/lattice.hpp"
#include "sessmon/parse.hpp"
#include "sessmon/print.hpp"
#include "sessmon/syntax.hpp"

using namespace sessmon;

namespace {

Lattice two_point() { return Lattice::validate({"lo", "hi"}, {{"lo", "hi"}}); }

bool has_error(const std::vector<std::string>& errs, const std::string& part) {
  for (const auto& e : errs)
    if (e.find(part) != std::string::npos) return true;
  return false;
}

}  // namespace

// ---------------------------------------------------------------------------
// Global types.
// ---------------------------------------------------------------------------

TEST_CASE("participants of a global type") {
  CHECK(participants(g_end()).empty());
  GPtr nested = parse_global_type(
      "p -> q : { a(nat). q -> r : { m(bool). end }, b(nat). end }");
  CHECK(participants(nested) == std::set<Participant>{"p", "q", "r"});
  GPtr loop = parse_global_type("mu t. p -> q : { l(nat). t }");
  CHECK(participants(loop) == std::set<Participant>{"p", "q"});
}

TEST_CASE("global type validation") {
  CHECK(has_error(validate_global(parse_global_type(
                      "p -> p : { l(nat). end }")),
                  "self-communication"));
  CHECK(has_error(validate_global(parse_global_type(
                      "p -> q : { l(nat). end, l(bool). end }")),
                  "duplicate label 'l'"));
  CHECK(has_error(validate_global(parse_global_type("mu t. t")),
                  "unguarded recursion"));
  CHECK(has_error(validate_global(g_var("t")), "unbound recursion variable"));
  CHECK(has_error(validate_global(g_comm("p", "q", {})), "no branches"));
  // Guarded recursion and a recursion-free body are both fine.
  CHECK(validate_global(parse_global_type("mu t. p -> q : { l(nat). t }"))
            .empty());
  CHECK(validate_global(parse_global_type("end")).empty());
  // A mu binder shadows an outer one; inner uses resolve to the inner binder.
  CHECK(validate_global(
            parse_global_type(
                "mu t. p -> q : { a(nat). mu t. q -> p : { b(nat). t } }"))
            .empty());
}

TEST_CASE("global types render and parse exactly") {
  for (const std::string& s : {
           "end",
           "p -> q : { l(nat). end }",
           "p -> q : { a(nat). q -> r : { m(bool). end }, b(nat). end }",
           "mu t. p -> q : { more(nat). t, stop(bool). end }",
       }) {
    CHECK(render(parse_global_type(s)) == s);
  }
}

TEST_CASE("round trip is alpha-stable for built global types") {
  GPtr g = g_mu("loop",
                g_comm("p", "q",
                       {{"l", Sort::Nat, g_var("loop")},
                        {"quit", Sort::Bool, g_end()}}));
  CHECK(equal_global(parse_global_type(render(g)), g));
  // Alpha keys ignore the binder's spelling.
  GPtr h = g_mu("other",
                g_comm("p", "q",
                       {{"l", Sort::Nat, g_var("other")},
                        {"quit", Sort::Bool, g_end()}}));
  CHECK(equal_global(g, h));
  CHECK(canonical_key(g) == "mu t0. p -> q : { l(nat). t0, quit(bool). end }");
}

TEST_CASE("unfolding a recursive global type") {
  GPtr g = parse_global_type("mu t. p -> q : { l(nat). t }");
  GPtr unfolded = unfold_global(g);
  CHECK(render(unfolded) ==
        "p -> q : { l(nat). mu t. p -> q : { l(nat). t } }");
  CHECK(std::holds_alternative<GComm>(unfolded->node));
  // Unfolding a non-mu is the identity.
  CHECK(unfold_global(g_end()) == g_end());
}

// ---------------------------------------------------------------------------
// Processes.
// ---------------------------------------------------------------------------

TEST_CASE("processes render and parse exactly") {
  Lattice lat = two_point();
  for (const std::string& s : {
           "0",
           "y!q:l(5@hi).0",
           "y?p:l(x).y!q:m(x + 1@lo).0",
           "y?p:a(x).0 + y?p:b(x).0",
           "mu X. y?p:a(x).X + y?p:b(x).0",
           "(mu X. y?p:a(x).X) + 0",
           "if x < 2@lo then 0 else (y!q:l(1@lo).0)",
           "y?p:a(x).(y!q:b(x).0 + y?p:c(z).0)",
           "y?p:a(x).if x < 1@lo then 0 else 0",
           "s[p]!q:l(0@lo).0",
           "y!q:l(#0).0",
           "if true@hi then (y!q:a(1@lo).0) else (y!q:a(2@lo).0)",
       }) {
    CHECK(render(parse_process(s, lat)) == s);
  }
}

TEST_CASE("sum and recursion precedence") {
  Lattice lat = two_point();
  // External choice is left-associative.
  PPtr p = parse_process("0 + 0 + 0", lat);
  const auto* top = std::get_if<PSum>(&p->node);
  REQUIRE(top);
  CHECK(std::holds_alternative<PSum>(top->left->node));
  CHECK(std::holds_alternative<PNil>(top->right->node));
  // Recursion binds loosest: the whole sum is the body.
  PPtr m = parse_process("mu X. y?p:a(x).X + y?p:b(x).X", lat);
  const auto* mu = std::get_if<PMu>(&m->node);
  REQUIRE(mu);
  CHECK(std::holds_alternative<PSum>(mu->body->node));
  // A parenthesized recursion is a single summand.
  PPtr g = parse_process("(mu X. y?p:a(x).X) + 0", lat);
  const auto* gs = std::get_if<PSum>(&g->node);
  REQUIRE(gs);
  CHECK(std::holds_alternative<PMu>(gs->left->node));
}

TEST_CASE("unannotated literals default to the lattice bottom") {
  Lattice lat = two_point();
  PPtr p = parse_process("y!q:l(7).0", lat);
  const auto* s = std::get_if<PSend>(&p->node);
  REQUIRE(s);
  const auto* lit = std::get_if<ELit>(&s->expr->node);
  REQUIRE(lit);
  CHECK(std::get<Value>(lit->value) == make_nat(7, Level{"lo"}));
}

TEST_CASE("process validation") {
  Lattice lat = two_point();
  CHECK(validate_process(parse_process("mu X. y?p:l(x).X", lat)).empty());
  CHECK(has_error(validate_process(parse_process("mu X. X", lat)),
                  "unguarded recursion"));
  CHECK(has_error(validate_process(p_var("X")), "unbound process variable"));
  CHECK(has_error(
      validate_process(parse_process("y!q:l(1@lo).z!q:m(1@lo).0", lat)),
      "more than one channel"));
}

TEST_CASE("value substitution respects receive binders") {
  Lattice lat = two_point();
  PPtr p = parse_process("y!q:a(x).y?p:l(x).y!q:m(x).0", lat);
  PPtr q = subst_value(p, "x", make_nat(5, Level{"lo"}));
  // The outer occurrence is substituted; the one under the binder is not.
  CHECK(render(q) == "y!q:a(5@lo).y?p:l(x).y!q:m(x).0");
}

TEST_CASE("channel substitution engages a session channel everywhere") {
  Lattice lat = two_point();
  PPtr p = parse_process("y?p:a(x).(y!q:b(x).0 + y?p:c(z).0)", lat);
  PPtr q = subst_channel(p, session_chan("s0", "q"));
  CHECK(render(q) == "s0[q]?p:a(x).(s0[q]!q:b(x).0 + s0[q]?p:c(z).0)");
  CHECK(channel_of(q) == session_chan("s0", "q"));
  CHECK(channel_of(p_nil()) == std::nullopt);
}

TEST_CASE("process unfolding and nonce scanning") {
  Lattice lat = two_point();
  PPtr p = parse_process("mu X. y!q:l(#2).X", lat);
  CHECK(process_contains_nonce(p, 2));
  CHECK_FALSE(process_contains_nonce(p, 0));
  PPtr u = unfold_process(p);
  CHECK(std::holds_alternative<PSend>(u->node));
  CHECK(render(u) == "y!q:l(#2).(mu X. y!q:l(#2).X)");
}

// ---------------------------------------------------------------------------
// Expressions.
// ---------------------------------------------------------------------------

TEST_CASE("expressions render and parse exactly") {
  Lattice lat = two_point();
  for (const std::string& s : {
           "1@lo + 2@hi",
           "1@lo + 2@lo + 3@lo",
           "1@lo - (2@lo - 1@lo)",
           "x or y and z",
           "(x or y) and z",
           "not (x and y)",
           "x and not y",
           "x + 1@lo < 4@hi",
           "#2 + 1@lo",
           "true@hi",
           "x = 3@lo",
       }) {
    CHECK(render(parse_expr(s, lat)) == s);
  }
}

TEST_CASE("expression sorts") {
  Lattice lat = two_point();
  std::map<std::string, Sort> env{{"x", Sort::Nat}, {"b", Sort::Bool}};
  CHECK(expr_sort(parse_expr("x + 1@lo", lat), env) == Sort::Nat);
  CHECK(expr_sort(parse_expr("x < 2@lo", lat), env) == Sort::Bool);
  CHECK(expr_sort(parse_expr("b and true@lo", lat), env) == Sort::Bool);
  // A bare nonce matches every sort.
  CHECK(expr_sort(parse_expr("#0", lat), env) == std::nullopt);
  // A nonce in context takes the sort the context requires.
  CHECK(expr_sort(parse_expr("#0 + 1@lo", lat), env) == Sort::Nat);
  CHECK_THROWS_AS(expr_sort(parse_expr("z", lat), env), IllTyped);
  CHECK_THROWS_AS(expr_sort(parse_expr("x + b", lat), env), IllTyped);
  CHECK_THROWS_AS(expr_sort(parse_expr("x = b", lat), env), IllTyped);
  CHECK_THROWS_AS(expr_sort(parse_expr("not x", lat), env), IllTyped);
}

TEST_CASE("expression levels join constituent annotations") {
  Lattice lat = two_point();
  CHECK(expr_level(parse_expr("1@lo + 2@hi", lat), lat) == Level{"hi"});
  CHECK(expr_level(parse_expr("1@lo + 2@lo", lat), lat) == Level{"lo"});
  // Nonces contribute bottom.
  CHECK(expr_level(parse_expr("#0", lat), lat) == Level{"lo"});
  CHECK(expr_level(parse_expr("#0 + 3@hi", lat), lat) == Level{"hi"});
  CHECK_THROWS_AS(expr_level(parse_expr("x", lat), lat), EvalError);
}

// ---------------------------------------------------------------------------
// Parse failures.
// ---------------------------------------------------------------------------

TEST_CASE("parse errors carry positions") {
  Lattice lat = two_point();
  try {
    parse_global_type("p -> q :\n  l(nat). end }");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
    CHECK(std::string(e.what()).find("'{'") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_global_type("p -> q : { l(nat) end }"), ParseError);
  CHECK_THROWS_AS(parse_global_type("end end"), ParseError);
  CHECK_THROWS_AS(parse_process("y!q:l(1@lo)", lat), ParseError);
  CHECK_THROWS_AS(parse_process("y!q:l(1@mid).0", lat), ParseError);
  CHECK_THROWS_AS(parse_expr("1@lo +", lat), ParseError);
  CHECK_THROWS_AS(parse_ptype("?p:l(nat)"), ParseError);
  // Reserved words are not identifiers.
  CHECK_THROWS_AS(parse_global_type("mu -> q : { l(nat). end }"), ParseError);
  CHECK_THROWS_AS(parse_process("if?p:l(x).0", lat), ParseError);
}

TEST_CASE("comments and whitespace are skipped") {
  GPtr g = parse_global_type(
      "// the whole choreography\np -> q : { // branch list\n  l(nat). end }");
  CHECK(render(g) == "p -> q : { l(nat). end }");
}

// ---------------------------------------------------------------------------
// Monitors render compactly (they are produced by projection, not parsed).
// ---------------------------------------------------------------------------

TEST_CASE("monitor rendering") {
  MPtr m = m_in("p", {{"a", Sort::Nat, m_end()}, {"b", Sort::Bool, m_end()}});
  CHECK(render(m) == "p?{a(nat).end, b(bool).end}");
  MPtr o = m_mu("t", m_out("q", {{"l", Sort::Nat, m_var("t")}}));
  CHECK(render(o) == "mu t. q!{l(nat).t}");
  CHECK(canonical_key(o) == "mu t0. q!{l(nat).t0}");
  CHECK(monitor_is_end(m_mu("t", m_mu("u", m_end()))));
  CHECK_FALSE(monitor_is_end(o));
  CHECK(has_error(validate_monitor(m_in("p", {})), "no branches"));
  CHECK(has_error(validate_monitor(m_var("t")), "unbound recursion variable"));
}
