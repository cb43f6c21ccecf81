// SPDX-License-Identifier: Apache-2.0

#ifndef SESSMON_SYNTAX_HPP_
#define SESSMON_SYNTAX_HPP_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sessmon/errors.hpp"
#include "sessmon/lattice.hpp"

namespace sessmon {

namespace detail {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;
}  // namespace detail

using Participant = std::string;
using Label = std::string;

enum class Sort { Nat, Bool };

inline const char* sort_name(Sort s) { return s == Sort::Nat ? "nat" : "bool"; }

// ---------------------------------------------------------------------------
// Values. A value is a level-annotated literal; an extended value is a value
// or a nonce. Nonces have level bottom and match every sort.
// ---------------------------------------------------------------------------

struct Value {
  Sort sort = Sort::Nat;
  long long nat = 0;      // payload when sort == Nat
  bool boolean = false;   // payload when sort == Bool
  Level lev;

  friend bool operator==(const Value& a, const Value& b) {
    if (a.sort != b.sort || a.lev != b.lev) return false;
    return a.sort == Sort::Nat ? a.nat == b.nat : a.boolean == b.boolean;
  }
};

struct Nonce {
  std::uint64_t index = 0;
  friend bool operator==(const Nonce& a, const Nonce& b) {
    return a.index == b.index;
  }
};

using ExtendedValue = std::variant<Value, Nonce>;

inline Value make_nat(long long n, Level lev) {
  return Value{Sort::Nat, n, false, std::move(lev)};
}
inline Value make_bool(bool b, Level lev) {
  return Value{Sort::Bool, 0, b, std::move(lev)};
}

inline bool is_nonce(const ExtendedValue& u) {
  return std::holds_alternative<Nonce>(u);
}

// lev(u): the annotation for values, bottom for nonces.
inline Level lev_of(const ExtendedValue& u, const Lattice& lat) {
  if (const auto* v = std::get_if<Value>(&u)) return v->lev;
  return lat.bottom();
}

// ---------------------------------------------------------------------------
// Expressions over naturals and booleans, plus nonce references.
// ---------------------------------------------------------------------------

enum class UnOp { Not };
enum class BinOp { Add, Sub, Lt, Eq, And, Or };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct ELit {
  ExtendedValue value;
};
struct EVar {
  std::string name;
};
struct EUn {
  UnOp op;
  ExprPtr arg;
};
struct EBin {
  BinOp op;
  ExprPtr lhs, rhs;
};

struct Expr {
  std::variant<ELit, EVar, EUn, EBin> node;
};

inline ExprPtr e_lit(ExtendedValue v) {
  return std::make_shared<Expr>(Expr{ELit{std::move(v)}});
}
inline ExprPtr e_nonce(std::uint64_t i) { return e_lit(Nonce{i}); }
inline ExprPtr e_var(std::string x) {
  return std::make_shared<Expr>(Expr{EVar{std::move(x)}});
}
inline ExprPtr e_un(UnOp op, ExprPtr a) {
  return std::make_shared<Expr>(Expr{EUn{op, std::move(a)}});
}
inline ExprPtr e_bin(BinOp op, ExprPtr l, ExprPtr r) {
  return std::make_shared<Expr>(Expr{EBin{op, std::move(l), std::move(r)}});
}

// ---------------------------------------------------------------------------
// Global types.
// ---------------------------------------------------------------------------

struct GlobalType;
using GPtr = std::shared_ptr<const GlobalType>;

struct GBranch {
  Label label;
  Sort sort = Sort::Nat;
  GPtr cont;
};
struct GComm {
  Participant from, to;
  std::vector<GBranch> branches;
};
struct GVar {
  std::string name;
};
struct GMu {
  std::string var;
  GPtr body;
};
struct GEnd {};

struct GlobalType {
  std::variant<GComm, GVar, GMu, GEnd> node;
};

inline GPtr g_comm(Participant from, Participant to,
                   std::vector<GBranch> branches) {
  return std::make_shared<GlobalType>(
      GlobalType{GComm{std::move(from), std::move(to), std::move(branches)}});
}
inline GPtr g_var(std::string t) {
  return std::make_shared<GlobalType>(GlobalType{GVar{std::move(t)}});
}
inline GPtr g_mu(std::string t, GPtr body) {
  return std::make_shared<GlobalType>(
      GlobalType{GMu{std::move(t), std::move(body)}});
}
inline GPtr g_end() {
  static const GPtr e = std::make_shared<GlobalType>(GlobalType{GEnd{}});
  return e;
}

// A security global type: a global type plus per-participant reading levels.
struct SecurityGlobalType {
  GPtr g;
  std::map<Participant, Level> levels;
};

// ---------------------------------------------------------------------------
// Monitors.
// ---------------------------------------------------------------------------

struct MonitorT;
using MPtr = std::shared_ptr<const MonitorT>;

struct MBranch {
  Label label;
  Sort sort = Sort::Nat;
  MPtr cont;
};
struct MIn {
  Participant peer;
  std::vector<MBranch> branches;
};
struct MOut {
  Participant peer;
  std::vector<MBranch> branches;
};
struct MVar {
  std::string name;
};
struct MMu {
  std::string var;
  MPtr body;
};
struct MEnd {};

struct MonitorT {
  std::variant<MIn, MOut, MVar, MMu, MEnd> node;
};

inline MPtr m_in(Participant peer, std::vector<MBranch> branches) {
  return std::make_shared<MonitorT>(
      MonitorT{MIn{std::move(peer), std::move(branches)}});
}
inline MPtr m_out(Participant peer, std::vector<MBranch> branches) {
  return std::make_shared<MonitorT>(
      MonitorT{MOut{std::move(peer), std::move(branches)}});
}
inline MPtr m_var(std::string t) {
  return std::make_shared<MonitorT>(MonitorT{MVar{std::move(t)}});
}
inline MPtr m_mu(std::string t, MPtr body) {
  return std::make_shared<MonitorT>(
      MonitorT{MMu{std::move(t), std::move(body)}});
}
inline MPtr m_end() {
  static const MPtr e = std::make_shared<MonitorT>(MonitorT{MEnd{}});
  return e;
}

// ---------------------------------------------------------------------------
// Processes and channels.
// ---------------------------------------------------------------------------

// A user channel `y`, or a session channel `s[p]` once instantiated.
struct Channel {
  std::string name;
  std::optional<Participant> part;  // engaged => session channel name[part]

  bool is_session() const { return part.has_value(); }
  friend bool operator==(const Channel& a, const Channel& b) {
    return a.name == b.name && a.part == b.part;
  }
  friend bool operator!=(const Channel& a, const Channel& b) {
    return !(a == b);
  }
};

inline Channel user_chan(std::string y) { return Channel{std::move(y), {}}; }
inline Channel session_chan(std::string s, Participant p) {
  return Channel{std::move(s), std::move(p)};
}

struct Process;
using PPtr = std::shared_ptr<const Process>;

struct PNil {};
struct PRecv {
  Channel chan;
  Participant peer;
  Label label;
  std::string var;
  std::optional<Sort> sort;  // from the repository's label-sort annotations
  PPtr cont;
};
struct PSend {
  Channel chan;
  Participant peer;
  Label label;
  ExprPtr expr;
  std::optional<Sort> sort;
  PPtr cont;
};
struct PVarRef {
  std::string name;
};
struct PMu {
  std::string var;
  PPtr body;
};
struct PCond {
  ExprPtr test;
  PPtr then_branch, else_branch;
};
struct PSum {
  PPtr left, right;
};

struct Process {
  std::variant<PNil, PRecv, PSend, PVarRef, PMu, PCond, PSum> node;
};

inline PPtr p_nil() {
  static const PPtr n = std::make_shared<Process>(Process{PNil{}});
  return n;
}
inline PPtr p_recv(Channel c, Participant peer, Label l, std::string x,
                   std::optional<Sort> sort, PPtr cont) {
  return std::make_shared<Process>(
      Process{PRecv{std::move(c), std::move(peer), std::move(l), std::move(x),
                    sort, std::move(cont)}});
}
inline PPtr p_send(Channel c, Participant peer, Label l, ExprPtr e,
                   std::optional<Sort> sort, PPtr cont) {
  return std::make_shared<Process>(
      Process{PSend{std::move(c), std::move(peer), std::move(l), std::move(e),
                    sort, std::move(cont)}});
}
inline PPtr p_var(std::string x) {
  return std::make_shared<Process>(Process{PVarRef{std::move(x)}});
}
inline PPtr p_mu(std::string x, PPtr body) {
  return std::make_shared<Process>(
      Process{PMu{std::move(x), std::move(body)}});
}
inline PPtr p_cond(ExprPtr e, PPtr t, PPtr f) {
  return std::make_shared<Process>(
      Process{PCond{std::move(e), std::move(t), std::move(f)}});
}
inline PPtr p_sum(PPtr l, PPtr r) {
  return std::make_shared<Process>(Process{PSum{std::move(l), std::move(r)}});
}

// ---------------------------------------------------------------------------
// Networks.
// ---------------------------------------------------------------------------

struct Message {
  Participant sender, receiver;
  Label label;
  ExtendedValue payload;
};

struct Member {
  MPtr monitor;
  Level reading, writing;
  PPtr process;
};

struct Session {
  std::string name;
  std::map<Participant, Member> members;
  std::vector<Message> queue;
  // The security global type this session was created from (restart policy).
  GPtr origin_global;
  std::map<Participant, Level> origin_levels;
};

struct Initiator {
  GPtr g;
  std::map<Participant, Level> levels;
};

struct Network {
  std::vector<Initiator> initiators;
  std::vector<Session> sessions;
};

struct EngineState {
  Network net;
  std::uint64_t next_nonce = 0;
  std::uint64_t next_session = 0;
};

// The nine reduction rules of the network semantics.
enum class Rule {
  Init,
  UpLev,
  In,
  Out,
  InGlob,
  OutGlob,
  Refresh,
  InLoc,
  OutLoc
};

inline const char* rule_name(Rule r) {
  switch (r) {
    case Rule::Init: return "Init";
    case Rule::UpLev: return "UpLev";
    case Rule::In: return "In";
    case Rule::Out: return "Out";
    case Rule::InGlob: return "InGlob";
    case Rule::OutGlob: return "OutGlob";
    case Rule::Refresh: return "Refresh";
    case Rule::InLoc: return "InLoc";
    case Rule::OutLoc: return "OutLoc";
  }
  return "?";
}

inline std::optional<Rule> rule_from_name(const std::string& s) {
  for (Rule r : {Rule::Init, Rule::UpLev, Rule::In, Rule::Out, Rule::InGlob,
                 Rule::OutGlob, Rule::Refresh, Rule::InLoc, Rule::OutLoc})
    if (s == rule_name(r)) return r;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Walks over expressions.
// ---------------------------------------------------------------------------

inline bool expr_contains_nonce(const ExprPtr& e, std::uint64_t index) {
  return std::visit(
      detail::overloaded{
          [&](const ELit& l) {
            const auto* n = std::get_if<Nonce>(&l.value);
            return n && n->index == index;
          },
          [&](const EVar&) { return false; },
          [&](const EUn& u) { return expr_contains_nonce(u.arg, index); },
          [&](const EBin& b) {
            return expr_contains_nonce(b.lhs, index) ||
                   expr_contains_nonce(b.rhs, index);
          }},
      e->node);
}

// lev(e): join of the levels of all literal values in e; nonces contribute
// bottom. Defined on closed expressions only.
inline Level expr_level(const ExprPtr& e, const Lattice& lat) {
  return std::visit(
      detail::overloaded{
          [&](const ELit& l) { return lev_of(l.value, lat); },
          [&](const EVar& v) -> Level {
            throw EvalError("free variable '" + v.name +
                            "' in closed expression");
          },
          [&](const EUn& u) { return expr_level(u.arg, lat); },
          [&](const EBin& b) {
            return lat.join(expr_level(b.lhs, lat), expr_level(b.rhs, lat));
          }},
      e->node);
}

// Static sort of an expression under an environment; nullopt means the
// expression is a bare nonce and matches every sort.
inline std::optional<Sort> expr_sort(const ExprPtr& e,
                                     const std::map<std::string, Sort>& env) {
  auto want = [](std::optional<Sort> got, Sort expect, const char* what) {
    if (got && *got != expect)
      throw IllTyped(std::string("operand of ") + what + " has sort " +
                     sort_name(*got) + ", expected " + sort_name(expect));
  };
  return std::visit(
      detail::overloaded{
          [&](const ELit& l) -> std::optional<Sort> {
            if (is_nonce(l.value)) return std::nullopt;
            return std::get<Value>(l.value).sort;
          },
          [&](const EVar& v) -> std::optional<Sort> {
            auto it = env.find(v.name);
            if (it == env.end())
              throw IllTyped("unbound variable '" + v.name + "'");
            return it->second;
          },
          [&](const EUn& u) -> std::optional<Sort> {
            want(expr_sort(u.arg, env), Sort::Bool, "not");
            return Sort::Bool;
          },
          [&](const EBin& b) -> std::optional<Sort> {
            auto ls = expr_sort(b.lhs, env);
            auto rs = expr_sort(b.rhs, env);
            switch (b.op) {
              case BinOp::Add:
              case BinOp::Sub:
                want(ls, Sort::Nat, "arithmetic");
                want(rs, Sort::Nat, "arithmetic");
                return Sort::Nat;
              case BinOp::Lt:
                want(ls, Sort::Nat, "<");
                want(rs, Sort::Nat, "<");
                return Sort::Bool;
              case BinOp::Eq:
                if (ls && rs && *ls != *rs)
                  throw IllTyped("'=' compares unlike sorts");
                return Sort::Bool;
              case BinOp::And:
              case BinOp::Or:
                want(ls, Sort::Bool, "boolean operator");
                want(rs, Sort::Bool, "boolean operator");
                return Sort::Bool;
            }
            return std::nullopt;
          }},
      e->node);
}

// Substitute a value for a variable in an expression.
inline ExprPtr subst_expr_var(const ExprPtr& e, const std::string& x,
                              const ExtendedValue& u) {
  return std::visit(
      detail::overloaded{
          [&](const ELit&) { return e; },
          [&](const EVar& v) { return v.name == x ? e_lit(u) : e; },
          [&](const EUn& un) {
            return e_un(un.op, subst_expr_var(un.arg, x, u));
          },
          [&](const EBin& b) {
            return e_bin(b.op, subst_expr_var(b.lhs, x, u),
                         subst_expr_var(b.rhs, x, u));
          }},
      e->node);
}

// ---------------------------------------------------------------------------
// Walks and substitutions over global types, monitors, and processes.
// ---------------------------------------------------------------------------

inline void collect_participants(const GPtr& g, std::set<Participant>& out) {
  std::visit(detail::overloaded{
                 [&](const GComm& c) {
                   out.insert(c.from);
                   out.insert(c.to);
                   for (const auto& b : c.branches)
                     collect_participants(b.cont, out);
                 },
                 [&](const GVar&) {},
                 [&](const GMu& m) { collect_participants(m.body, out); },
                 [&](const GEnd&) {}},
             g->node);
}

inline std::set<Participant> participants(const GPtr& g) {
  std::set<Participant> out;
  collect_participants(g, out);
  return out;
}

// G{G'/t}: substitute a global type for a recursion variable.
inline GPtr subst_gvar(const GPtr& g, const std::string& t, const GPtr& rep) {
  return std::visit(
      detail::overloaded{
          [&](const GComm& c) {
            std::vector<GBranch> bs;
            bs.reserve(c.branches.size());
            for (const auto& b : c.branches)
              bs.push_back({b.label, b.sort, subst_gvar(b.cont, t, rep)});
            return g_comm(c.from, c.to, std::move(bs));
          },
          [&](const GVar& v) { return v.name == t ? rep : g; },
          [&](const GMu& m) {
            if (m.var == t) return g;  // shadowed
            return g_mu(m.var, subst_gvar(m.body, t, rep));
          },
          [&](const GEnd&) { return g; }},
      g->node);
}

// One equi-recursive unfolding of a top-level mu (chains included).
inline GPtr unfold_global(GPtr g) {
  while (const auto* m = std::get_if<GMu>(&g->node))
    g = subst_gvar(m->body, m->var, g);
  return g;
}

inline MPtr subst_mvar(const MPtr& m, const std::string& t, const MPtr& rep) {
  return std::visit(
      detail::overloaded{
          [&](const MIn& in) {
            std::vector<MBranch> bs;
            bs.reserve(in.branches.size());
            for (const auto& b : in.branches)
              bs.push_back({b.label, b.sort, subst_mvar(b.cont, t, rep)});
            return m_in(in.peer, std::move(bs));
          },
          [&](const MOut& out) {
            std::vector<MBranch> bs;
            bs.reserve(out.branches.size());
            for (const auto& b : out.branches)
              bs.push_back({b.label, b.sort, subst_mvar(b.cont, t, rep)});
            return m_out(out.peer, std::move(bs));
          },
          [&](const MVar& v) { return v.name == t ? rep : m; },
          [&](const MMu& mu) {
            if (mu.var == t) return m;
            return m_mu(mu.var, subst_mvar(mu.body, t, rep));
          },
          [&](const MEnd&) { return m; }},
      m->node);
}

inline MPtr unfold_monitor(MPtr m) {
  while (const auto* mu = std::get_if<MMu>(&m->node))
    m = subst_mvar(mu->body, mu->var, m);
  return m;
}

inline bool monitor_is_end(const MPtr& m) {
  return std::holds_alternative<MEnd>(unfold_monitor(m)->node);
}

// P{P'/X}: substitute a process for a process variable.
inline PPtr subst_pvar(const PPtr& p, const std::string& x, const PPtr& rep) {
  return std::visit(
      detail::overloaded{
          [&](const PNil&) { return p; },
          [&](const PRecv& r) {
            return p_recv(r.chan, r.peer, r.label, r.var, r.sort,
                          subst_pvar(r.cont, x, rep));
          },
          [&](const PSend& s) {
            return p_send(s.chan, s.peer, s.label, s.expr, s.sort,
                          subst_pvar(s.cont, x, rep));
          },
          [&](const PVarRef& v) { return v.name == x ? rep : p; },
          [&](const PMu& m) {
            if (m.var == x) return p;
            return p_mu(m.var, subst_pvar(m.body, x, rep));
          },
          [&](const PCond& c) {
            return p_cond(c.test, subst_pvar(c.then_branch, x, rep),
                          subst_pvar(c.else_branch, x, rep));
          },
          [&](const PSum& s) {
            return p_sum(subst_pvar(s.left, x, rep),
                         subst_pvar(s.right, x, rep));
          }},
      p->node);
}

inline PPtr unfold_process(PPtr p) {
  while (const auto* m = std::get_if<PMu>(&p->node))
    p = subst_pvar(m->body, m->var, p);
  return p;
}

// P{u/x}: substitute an extended value for an expression variable,
// respecting shadowing by receive binders.
inline PPtr subst_value(const PPtr& p, const std::string& x,
                        const ExtendedValue& u) {
  return std::visit(
      detail::overloaded{
          [&](const PNil&) { return p; },
          [&](const PRecv& r) {
            if (r.var == x) return p;  // shadowed
            return p_recv(r.chan, r.peer, r.label, r.var, r.sort,
                          subst_value(r.cont, x, u));
          },
          [&](const PSend& s) {
            return p_send(s.chan, s.peer, s.label,
                          subst_expr_var(s.expr, x, u), s.sort,
                          subst_value(s.cont, x, u));
          },
          [&](const PVarRef&) { return p; },
          [&](const PMu& m) {
            return p_mu(m.var, subst_value(m.body, x, u));
          },
          [&](const PCond& c) {
            return p_cond(subst_expr_var(c.test, x, u),
                          subst_value(c.then_branch, x, u),
                          subst_value(c.else_branch, x, u));
          },
          [&](const PSum& s) {
            return p_sum(subst_value(s.left, x, u),
                         subst_value(s.right, x, u));
          }},
      p->node);
}

// P{c/y}: rewrite every communication prefix to use channel c.
inline PPtr subst_channel(const PPtr& p, const Channel& c) {
  return std::visit(
      detail::overloaded{
          [&](const PNil&) { return p; },
          [&](const PRecv& r) {
            return p_recv(c, r.peer, r.label, r.var, r.sort,
                          subst_channel(r.cont, c));
          },
          [&](const PSend& s) {
            return p_send(c, s.peer, s.label, s.expr, s.sort,
                          subst_channel(s.cont, c));
          },
          [&](const PVarRef&) { return p; },
          [&](const PMu& m) { return p_mu(m.var, subst_channel(m.body, c)); },
          [&](const PCond& cd) {
            return p_cond(cd.test, subst_channel(cd.then_branch, c),
                          subst_channel(cd.else_branch, c));
          },
          [&](const PSum& s) {
            return p_sum(subst_channel(s.left, c), subst_channel(s.right, c));
          }},
      p->node);
}

// The unique channel used by a process's communication prefixes, if any.
inline void collect_channels(const PPtr& p, std::vector<Channel>& out) {
  std::visit(detail::overloaded{
                 [&](const PNil&) {},
                 [&](const PRecv& r) {
                   out.push_back(r.chan);
                   collect_channels(r.cont, out);
                 },
                 [&](const PSend& s) {
                   out.push_back(s.chan);
                   collect_channels(s.cont, out);
                 },
                 [&](const PVarRef&) {},
                 [&](const PMu& m) { collect_channels(m.body, out); },
                 [&](const PCond& c) {
                   collect_channels(c.then_branch, out);
                   collect_channels(c.else_branch, out);
                 },
                 [&](const PSum& s) {
                   collect_channels(s.left, out);
                   collect_channels(s.right, out);
                 }},
             p->node);
}

inline std::optional<Channel> channel_of(const PPtr& p) {
  std::vector<Channel> cs;
  collect_channels(p, cs);
  if (cs.empty()) return std::nullopt;
  return cs.front();
}

inline bool process_contains_nonce(const PPtr& p, std::uint64_t index) {
  return std::visit(
      detail::overloaded{
          [&](const PNil&) { return false; },
          [&](const PRecv& r) {
            return process_contains_nonce(r.cont, index);
          },
          [&](const PSend& s) {
            return expr_contains_nonce(s.expr, index) ||
                   process_contains_nonce(s.cont, index);
          },
          [&](const PVarRef&) { return false; },
          [&](const PMu& m) { return process_contains_nonce(m.body, index); },
          [&](const PCond& c) {
            return expr_contains_nonce(c.test, index) ||
                   process_contains_nonce(c.then_branch, index) ||
                   process_contains_nonce(c.else_branch, index);
          },
          [&](const PSum& s) {
            return process_contains_nonce(s.left, index) ||
                   process_contains_nonce(s.right, index);
          }},
      p->node);
}

// ---------------------------------------------------------------------------
// Syntactic invariant validation. Errors are returned as data (complete
// lists), not thrown.
// ---------------------------------------------------------------------------

namespace detail {

template <class Branches>
inline void check_labels(const Branches& bs, const std::string& where,
                         std::vector<std::string>& errs) {
  std::set<Label> seen;
  for (const auto& b : bs)
    if (!seen.insert(b.label).second)
      errs.push_back("duplicate label '" + b.label + "' in " + where);
}

}  // namespace detail

// Checks: sender != receiver, distinct branch labels, all recursion
// variables bound, recursion guarded (a communication on every path from a
// binder to a use of its variable).
inline void validate_global_rec(const GPtr& g, std::set<std::string> bound,
                                std::set<std::string> unguarded,
                                std::vector<std::string>& errs) {
  std::visit(detail::overloaded{
                 [&](const GComm& c) {
                   if (c.from == c.to)
                     errs.push_back("self-communication by '" + c.from + "'");
                   if (c.branches.empty())
                     errs.push_back("communication with no branches");
                   detail::check_labels(c.branches,
                                        c.from + " -> " + c.to, errs);
                   for (const auto& b : c.branches)
                     validate_global_rec(b.cont, bound, {}, errs);
                 },
                 [&](const GVar& v) {
                   if (!bound.count(v.name))
                     errs.push_back("unbound recursion variable '" + v.name +
                                    "'");
                   else if (unguarded.count(v.name))
                     errs.push_back("unguarded recursion through '" + v.name +
                                    "'");
                 },
                 [&](const GMu& m) {
                   bound.insert(m.var);
                   unguarded.insert(m.var);
                   validate_global_rec(m.body, bound, unguarded, errs);
                 },
                 [&](const GEnd&) {}},
             g->node);
}

inline std::vector<std::string> validate_global(const GPtr& g) {
  std::vector<std::string> errs;
  validate_global_rec(g, {}, {}, errs);
  return errs;
}

inline void validate_monitor_rec(const MPtr& m, std::set<std::string> bound,
                                 std::set<std::string> unguarded,
                                 std::vector<std::string>& errs) {
  auto branching = [&](const Participant& peer, const auto& branches,
                       const char* dir) {
    if (branches.empty()) errs.push_back("branching with no branches");
    detail::check_labels(branches, std::string(dir) + " " + peer, errs);
    for (const auto& b : branches)
      validate_monitor_rec(b.cont, bound, {}, errs);
  };
  std::visit(detail::overloaded{
                 [&](const MIn& in) { branching(in.peer, in.branches, "?"); },
                 [&](const MOut& o) { branching(o.peer, o.branches, "!"); },
                 [&](const MVar& v) {
                   if (!bound.count(v.name))
                     errs.push_back("unbound recursion variable '" + v.name +
                                    "'");
                   else if (unguarded.count(v.name))
                     errs.push_back("unguarded recursion through '" + v.name +
                                    "'");
                 },
                 [&](const MMu& mu) {
                   bound.insert(mu.var);
                   unguarded.insert(mu.var);
                   validate_monitor_rec(mu.body, bound, unguarded, errs);
                 },
                 [&](const MEnd&) {}},
             m->node);
}

inline std::vector<std::string> validate_monitor(const MPtr& m) {
  std::vector<std::string> errs;
  validate_monitor_rec(m, {}, {}, errs);
  return errs;
}

inline void validate_process_rec(const PPtr& p, std::set<std::string> bound,
                                 std::set<std::string> unguarded,
                                 std::vector<std::string>& errs) {
  std::visit(
      detail::overloaded{
          [&](const PNil&) {},
          [&](const PRecv& r) { validate_process_rec(r.cont, bound, {}, errs); },
          [&](const PSend& s) { validate_process_rec(s.cont, bound, {}, errs); },
          [&](const PVarRef& v) {
            if (!bound.count(v.name))
              errs.push_back("unbound process variable '" + v.name + "'");
            else if (unguarded.count(v.name))
              errs.push_back("unguarded recursion through '" + v.name + "'");
          },
          [&](const PMu& m) {
            bound.insert(m.var);
            unguarded.insert(m.var);
            validate_process_rec(m.body, bound, unguarded, errs);
          },
          [&](const PCond& c) {
            validate_process_rec(c.then_branch, bound, unguarded, errs);
            validate_process_rec(c.else_branch, bound, unguarded, errs);
          },
          [&](const PSum& s) {
            validate_process_rec(s.left, bound, unguarded, errs);
            validate_process_rec(s.right, bound, unguarded, errs);
          }},
      p->node);
}

// Process invariants: closed guarded recursion and a single consistent
// channel across all communication prefixes.
inline std::vector<std::string> validate_process(const PPtr& p) {
  std::vector<std::string> errs;
  validate_process_rec(p, {}, {}, errs);
  std::vector<Channel> cs;
  collect_channels(p, cs);
  for (std::size_t i = 1; i < cs.size(); ++i)
    if (cs[i] != cs[0]) {
      errs.push_back("process uses more than one channel ('" + cs[0].name +
                     "' vs '" + cs[i].name + "')");
      break;
    }
  return errs;
}

}  // namespace sessmon

#endif  // SESSMON_SYNTAX_HPP_
