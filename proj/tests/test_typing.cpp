#include <set>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "sessmon/errors.hpp"
#include "sessmon/lattice.hpp"
#include "sessmon/parse.hpp"
#include "sessmon/print.hpp"
#include "sessmon/projection.hpp"
#include "sessmon/typing.hpp"
#include "support/oracles.hpp"

using namespace sessmon;

namespace {

Lattice two_point() { return Lattice::validate({"lo", "hi"}, {{"lo", "hi"}}); }

TPtr T(const std::string& s) { return parse_ptype(s); }

}  // namespace

// ---------------------------------------------------------------------------
// Rendering and the ACI quotient.
// ---------------------------------------------------------------------------

TEST_CASE("process types render and parse exactly") {
  for (const std::string& s : {
           "end",
           "?p:l(nat).end",
           "!q:a(nat).end | !q:b(bool).end",
           "?p:a(nat).end & ?p:b(bool).end",
           "(?p:a(nat).end | ?p:b(nat).end) & end",
           "mu t. ?p:l(nat).t",
           "?p:l(nat).(mu t. !q:m(bool).t)",
           "!q:l(nat).(?p:a(nat).end & ?p:b(bool).end)",
           "?p:a(nat).end & ?p:b(nat).end & end",
       }) {
    CHECK(render(parse_ptype(s)) == s);
  }
}

TEST_CASE("normalization realizes idempotence, commutativity, associativity") {
  CHECK(equal_type(T("?p:a(nat).end & ?p:a(nat).end"), T("?p:a(nat).end")));
  CHECK(equal_type(T("?p:a(nat).end & ?p:b(nat).end"),
                   T("?p:b(nat).end & ?p:a(nat).end")));
  CHECK(equal_type(T("(!q:a(nat).end | !q:b(nat).end) | !q:c(nat).end"),
                   T("!q:a(nat).end | (!q:b(nat).end | !q:c(nat).end)")));
  CHECK_FALSE(equal_type(T("?p:a(nat).end"), T("?p:a(bool).end")));
  // A recursion binder whose variable is unused is dropped.
  CHECK(equal_type(T("mu t. ?p:l(nat).end"), T("?p:l(nat).end")));
  // Alpha-renaming is invisible.
  CHECK(equal_type(T("mu t. ?p:l(nat).t"), T("mu u. ?p:l(nat).u")));
}

// ---------------------------------------------------------------------------
// lin / lout.
// ---------------------------------------------------------------------------

TEST_CASE("lin and lout collect top-layer choice labels") {
  CHECK(lin(T("?p:l(nat).end")) == std::set<Label>{"l"});
  CHECK(lout(T("?p:l(nat).end")).empty());
  CHECK(lout(T("!q:a(nat).end | !q:b(nat).end")) == std::set<Label>{"a", "b"});
  CHECK(lin(T("end")).empty());
  // Prefixes guard their continuations: only the first layer counts.
  CHECK(lin(T("?p:a(nat).?p:b(nat).end")) == std::set<Label>{"a"});
  // Recursion exposes its body's labels.
  CHECK(lin(T("mu t. ?p:l(nat).t")) == std::set<Label>{"l"});
  CHECK(lout(T("mu t. !q:l(nat).t")) == std::set<Label>{"l"});
}

// ---------------------------------------------------------------------------
// Validity.
// ---------------------------------------------------------------------------

TEST_CASE("intersections need disjoint labels") {
  auto err = validate_type(T("?p:l(nat).end & ?p:l(bool).end"));
  REQUIRE(err.has_value());
  CHECK(err->bullet.find("share input label 'l'") != std::string::npos);
  CHECK(is_valid_type(T("?p:a(nat).end & ?p:b(bool).end")));
  CHECK_FALSE(is_valid_type(
      T("!q:a(nat).end & !q:a(nat).!q:b(nat).end")));
}

TEST_CASE("unions need silent operands and disjoint outputs") {
  auto err = validate_type(T("?p:a(nat).end | !q:b(nat).end"));
  REQUIRE(err.has_value());
  CHECK(err->bullet.find("nonempty input labels") != std::string::npos);
  CHECK_FALSE(is_valid_type(
      T("!q:a(nat).end | !q:a(nat).!q:b(nat).end")));
  CHECK(is_valid_type(T("!q:a(nat).end | !q:b(nat).end")));
}

TEST_CASE("validity is judged modulo the quotient") {
  // (T & T) | T normalizes to T, so it is a type whenever T is.
  TPtr t = T("(!q:l(nat).end & !q:l(nat).end) | !q:l(nat).end");
  CHECK(is_valid_type(t));
  CHECK(equal_type(t, T("!q:l(nat).end")));
}

TEST_CASE("recursion must be closed and guarded") {
  auto unbound = validate_type(t_var("t"));
  REQUIRE(unbound.has_value());
  CHECK(unbound->bullet.find("unbound") != std::string::npos);
  auto unguarded = validate_type(t_mu("t", t_var("t")));
  REQUIRE(unguarded.has_value());
  CHECK(unguarded->bullet.find("unguarded") != std::string::npos);
  CHECK(is_valid_type(T("mu t. ?p:l(nat).t")));
}

// ---------------------------------------------------------------------------
// Synthesis.
// ---------------------------------------------------------------------------

TEST_CASE("synthesis follows the typing rules") {
  Lattice lat = two_point();
  Channel y = user_chan("y");
  CHECK(equal_type(synthesize(p_nil(), y), t_end()));
  CHECK(equal_type(synthesize(parse_process("y!q:l(5@lo).0", lat), y),
                   T("!q:l(nat).end")));
  CHECK(equal_type(
      synthesize(parse_process(
                     "if true@lo then (y!q:a(1@lo).0) else (y!q:b(2@lo).0)",
                     lat),
                 y),
      T("!q:a(nat).end | !q:b(nat).end")));
  // External choice of annotated inputs.
  PPtr sum = p_sum(
      p_recv(y, "p", "a", "x", Sort::Nat, p_nil()),
      p_recv(y, "p", "b", "x", Sort::Bool, p_nil()));
  CHECK(equal_type(synthesize(sum, y),
                   T("?p:a(nat).end & ?p:b(bool).end")));
  // Identical summands collapse under idempotence and stay typable.
  PPtr twice = p_sum(
      p_recv(y, "p", "a", "x", Sort::Nat, p_nil()),
      p_recv(y, "p", "a", "x", Sort::Nat, p_nil()));
  CHECK(equal_type(synthesize(twice, y), T("?p:a(nat).end")));
  // Recursion: the body is typed under an assumption for the variable.
  PPtr loop = p_mu("X", p_recv(y, "p", "l", "x", Sort::Nat, p_var("X")));
  CHECK(equal_type(synthesize(loop, y), T("mu t. ?p:l(nat).t")));
  // A loop that never recurs drops its binder.
  CHECK(equal_type(
      synthesize(parse_process("mu X. y!q:l(1@lo).0", lat), y),
      T("!q:l(nat).end")));
  // A received variable is usable at its sort in the continuation.
  PPtr fwd = p_recv(y, "p", "a", "x", Sort::Nat,
                    p_send(y, "q", "b", e_var("x"), std::nullopt, p_nil()));
  CHECK(equal_type(synthesize(fwd, y), T("?p:a(nat).!q:b(nat).end")));
}

TEST_CASE("synthesis rejects ill-typed processes") {
  Lattice lat = two_point();
  Channel y = user_chan("y");
  // Inputs need a sort annotation (from the repository's label list).
  CHECK_THROWS_AS(synthesize(parse_process("y?p:l(x).0", lat), y), IllTyped);
  // Send annotation contradicting the expression's sort.
  CHECK_THROWS_AS(
      synthesize(p_send(y, "q", "l", e_lit(make_nat(5, Level{"lo"})),
                        Sort::Bool, p_nil()),
                 y),
      IllTyped);
  // Conditional branches must form a union: inputs are not allowed.
  PPtr cond = p_cond(e_lit(make_bool(true, Level{"lo"})),
                     p_recv(y, "p", "a", "x", Sort::Nat, p_nil()),
                     p_recv(y, "p", "b", "x", Sort::Nat, p_nil()));
  CHECK_THROWS_AS(synthesize(cond, y), IllTyped);
  // External choice sharing an input label with different continuations.
  PPtr clash = p_sum(
      p_recv(y, "p", "a", "x", Sort::Nat, p_nil()),
      p_recv(y, "p", "a", "x", Sort::Nat,
             p_recv(y, "p", "b", "x", Sort::Nat, p_nil())));
  CHECK_THROWS_AS(synthesize(clash, y), IllTyped);
  CHECK_THROWS_AS(
      synthesize(parse_process("if 1@lo then 0 else 0", lat), y), IllTyped);
  CHECK_THROWS_AS(synthesize(p_var("X"), y), IllTyped);
  // Every prefix must use the channel being typed.
  CHECK_THROWS_AS(
      synthesize(parse_process("z!q:l(1@lo).0", lat), y), IllTyped);
  // Unbound expression variable in a send.
  CHECK_THROWS_AS(
      synthesize(parse_process("y!q:l(x).0", lat), y), IllTyped);
}

TEST_CASE("synthesis is stable under renaming of binders") {
  Channel y = user_chan("y");
  PPtr a = p_mu("X", p_recv(y, "p", "l", "v", Sort::Nat, p_var("X")));
  PPtr b = p_mu("Z", p_recv(y, "p", "l", "w", Sort::Nat, p_var("Z")));
  CHECK(equal_type(synthesize(a, y), synthesize(b, y)));
}

// ---------------------------------------------------------------------------
// Subtyping.
// ---------------------------------------------------------------------------

TEST_CASE("subtype axioms") {
  TPtr t1 = T("!q:a(nat).end");
  TPtr t2 = T("!q:b(nat).end");
  TPtr u1 = T("?p:a(nat).end");
  TPtr u2 = T("?p:b(nat).end");
  // T <= end, including end itself.
  for (const auto& t : {t1, u1, T("mu t. ?p:l(nat).t"), t_end()})
    CHECK(subtype(t, t_end()));
  // Intersection projections and union injections.
  CHECK(subtype(t_and(u1, u2), u1));
  CHECK(subtype(t_and(u1, u2), u2));
  CHECK(subtype(t1, t_or(t1, t2)));
  CHECK(subtype(t2, t_or(t1, t2)));
  CHECK_FALSE(subtype(t_or(t1, t2), t1));
  CHECK_FALSE(subtype(u1, t_and(u1, u2)));
  // Prefix monotonicity.
  CHECK(subtype(T("?p:l(nat).(?q:a(nat).end & ?q:b(nat).end)"),
                T("?p:l(nat).?q:a(nat).end")));
  CHECK_FALSE(subtype(T("?p:l(nat).?q:a(nat).end"),
                      T("?p:l(nat).(?q:a(nat).end & ?q:b(nat).end)")));
  // Distinct heads are unrelated (unless the right side is end).
  CHECK_FALSE(subtype(u1, u2));
  CHECK_FALSE(subtype(t1, u1));
  CHECK_FALSE(subtype(T("!q:a(nat).end"), T("!q:a(bool).end")));
  CHECK_FALSE(subtype(t_end(), t1));
}

TEST_CASE("distributivity holds in both directions") {
  TPtr t1 = T("!q:a(nat).end");
  TPtr t2 = T("!q:b(nat).end");
  TPtr t3 = T("?p:c(nat).end");
  TPtr lhs = t_and(t_or(t1, t2), t3);
  TPtr rhs = t_or(t_and(t1, t3), t_and(t2, t3));
  CHECK(subtype(lhs, rhs));
  CHECK(subtype(rhs, lhs));
  // The dual equation.
  TPtr lhs2 = t_or(t_and(t1, t3), t2);
  TPtr rhs2 = t_and(t_or(t1, t2), t_or(t3, t2));
  CHECK(subtype(lhs2, rhs2));
  CHECK(subtype(rhs2, lhs2));
}

TEST_CASE("subtyping reads recursion equi-recursively") {
  TPtr t = T("mu t. ?p:l(nat).t");
  TPtr unfolded = T("?p:l(nat).(mu t. ?p:l(nat).t)");
  CHECK(subtype(t, unfolded));
  CHECK(subtype(unfolded, t));
  // A looping intersection is below the loop of one component.
  CHECK(subtype(T("mu t. ?p:a(nat).t & ?p:b(nat).end"),
                T("mu t. ?p:a(nat).t")));
  CHECK_FALSE(subtype(T("mu t. ?p:a(nat).t"),
                      T("mu t. ?p:a(nat).t & ?p:b(nat).end")));
  // Loops with different bodies are unrelated.
  CHECK_FALSE(subtype(T("mu t. ?p:a(nat).t"), T("mu t. ?p:b(nat).t")));
}

TEST_CASE("subtype agrees with the valuation oracle on sampled types") {
  testsupport::Gen gen(20260825);
  int checked = 0;
  for (int i = 0; i < 4000 && checked < 500; ++i) {
    TPtr a = gen.type(3);
    TPtr b = gen.type(3);
    if (!is_valid_type(a) || !is_valid_type(b)) continue;
    ++checked;
    INFO("a = " << render(a) << "   b = " << render(b));
    CHECK(subtype(a, b) == testsupport::oracle_subtype(a, b));
    CHECK(subtype(b, a) == testsupport::oracle_subtype(b, a));
  }
  CHECK(checked == 500);
}

TEST_CASE("subtype is reflexive and transitive on sampled types") {
  testsupport::Gen gen(7);
  std::vector<TPtr> pool;
  while (pool.size() < 60) {
    TPtr t = gen.type(3);
    if (is_valid_type(t)) pool.push_back(t);
  }
  for (const auto& t : pool) CHECK(subtype(t, t));
  int premises = 0;
  for (const auto& a : pool)
    for (const auto& b : pool)
      for (const auto& c : pool)
        if (subtype(a, b) && subtype(b, c)) {
          ++premises;
          CHECK(subtype(a, c));
        }
  CHECK(premises > 0);
}

// ---------------------------------------------------------------------------
// Monitor types, adequacy, canonical processes.
// ---------------------------------------------------------------------------

TEST_CASE("the monitor-to-type mapping") {
  MPtr in = m_in("p", {{"a", Sort::Nat, m_end()}, {"b", Sort::Bool, m_end()}});
  CHECK(equal_type(monitor_type(in), T("?p:a(nat).end & ?p:b(bool).end")));
  MPtr out = m_out("q", {{"a", Sort::Nat, m_end()}, {"b", Sort::Bool, m_end()}});
  CHECK(equal_type(monitor_type(out), T("!q:a(nat).end | !q:b(bool).end")));
  CHECK(equal_type(monitor_type(m_end()), t_end()));
  MPtr loop = m_mu("t", m_out("q", {{"l", Sort::Nat, m_var("t")}}));
  CHECK(equal_type(monitor_type(loop), T("mu t. !q:l(nat).t")));
}

TEST_CASE("adequacy is subtyping against the monitor's type") {
  MPtr m = m_out("q", {{"a", Sort::Nat, m_end()}, {"b", Sort::Bool, m_end()}});
  CHECK(adequate(T("!q:a(nat).end"), m));
  CHECK(adequate(T("!q:b(bool).end"), m));
  CHECK_FALSE(adequate(T("!q:c(nat).end"), m_out("q", {{"a", Sort::Nat,
                                                        m_end()}})));
  CHECK(adequate(monitor_type(m), m));
}

TEST_CASE("generated monitors have valid, adequate types") {
  testsupport::Gen gen(99);
  for (int i = 0; i < 200; ++i) {
    MPtr m = gen.monitor(4);
    REQUIRE(validate_monitor(m).empty());
    TPtr t = monitor_type(m);
    INFO("monitor = " << render(m) << "   type = " << render(t));
    CHECK(is_valid_type(t));
    CHECK(adequate(t, m));
  }
}

TEST_CASE("canonical processes cover the monitor") {
  Lattice lat = two_point();
  Channel y = user_chan("y");

  CanonicalProcess nil = canonical_process(m_end(), lat);
  CHECK(render(nil.process) == "0");
  CHECK(equal_type(nil.type, t_end()));

  MPtr in = m_in("p", {{"a", Sort::Nat, m_end()}, {"b", Sort::Bool, m_end()}});
  CanonicalProcess ci = canonical_process(in, lat);
  CHECK(render(ci.process) == "y?p:a(x0).0 + y?p:b(x1).0");
  CHECK(equal_type(ci.type, T("?p:a(nat).end & ?p:b(bool).end")));
  CHECK(adequate(ci.type, in));
  CHECK(ci.label_sorts == std::map<Label, Sort>{{"a", Sort::Nat},
                                                {"b", Sort::Bool}});

  // Outputs commit to the first branch with a bottom-level default value.
  MPtr out = m_out("q", {{"a", Sort::Nat, m_end()}, {"b", Sort::Bool, m_end()}});
  CanonicalProcess co = canonical_process(out, lat);
  CHECK(render(co.process) == "y!q:a(0@lo).0");
  CHECK(equal_type(co.type, T("!q:a(nat).end")));
  CHECK(adequate(co.type, out));

  MPtr loop = m_mu("t", m_out("q", {{"l", Sort::Bool, m_var("t")}}));
  CanonicalProcess cl = canonical_process(loop, lat);
  CHECK(render(cl.process) == "mu t. y!q:l(false@lo).t");
  CHECK(adequate(cl.type, loop));

  // In bulk: the synthesized type of the canonical process is its declared
  // type, and it is adequate for the monitor it was built from.
  testsupport::Gen gen(4242);
  for (int i = 0; i < 200; ++i) {
    MPtr m = gen.monitor(4);
    CanonicalProcess cp = canonical_process(m, lat);
    INFO("monitor = " << render(m) << "   process = " << render(cp.process));
    CHECK(validate_process(cp.process).empty());
    CHECK(equal_type(synthesize(cp.process, y), cp.type));
    CHECK(adequate(cp.type, m));
  }
}

// ---------------------------------------------------------------------------
// Projection connects to adequacy: every projected monitor's own type is
// adequate, so the canonical repository construction can always serve it.
// ---------------------------------------------------------------------------

TEST_CASE("projected monitors admit adequate processes") {
  Lattice lat = two_point();
  std::vector<GPtr> globals = {
      parse_global_type("mu t. p -> q : { more(nat). t, stop(bool). end }"),
      parse_global_type(
          "p -> q : { a(nat). q -> r : { f(nat). end },"
          "           b(bool). q -> r : { f(nat). end } }"),
      parse_global_type(
          "r -> p : { kick(nat). mu t. p -> q : { l(nat). t } }"),
  };
  for (const GPtr& g : globals) {
    for (const Participant& part : participants(g)) {
      MPtr m = project(g, part);
      CanonicalProcess cp = canonical_process(m, lat);
      INFO("global = " << render(g) << "   participant = " << part);
      CHECK(adequate(cp.type, m));
      CHECK(equal_type(synthesize(cp.process, user_chan("y")), cp.type));
    }
  }
}
