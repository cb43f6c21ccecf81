// SPDX-License-Identifier: Apache-2.0

#ifndef SESSMON_PRINT_HPP_
#define SESSMON_PRINT_HPP_

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "sessmon/syntax.hpp"

namespace sessmon {

struct RenderOpts {
  // Rename binders to a deterministic supply (t0..., X0..., x0...) so that
  // rendered strings act as alpha-equivalence keys.
  bool alpha = false;
  // Optional rewrite of session names inside session channels; used to build
  // state keys that are independent of session numbering.
  const std::map<std::string, std::string>* chan_alias = nullptr;
};

namespace detail {

struct AlphaEnv {
  bool on = false;
  std::vector<std::pair<std::string, std::string>> tvars, pvars, vvars;
  int tn = 0, pn = 0, vn = 0;

  std::string bind(std::vector<std::pair<std::string, std::string>>& env,
                   int& n, const char* prefix, const std::string& name) {
    if (!on) return name;
    std::string fresh = prefix + std::to_string(n++);
    env.emplace_back(name, fresh);
    return fresh;
  }
  static void pop(std::vector<std::pair<std::string, std::string>>& env,
                  bool on) {
    if (on) env.pop_back();
  }
  std::string look(const std::vector<std::pair<std::string, std::string>>& env,
                   const std::string& name) const {
    if (!on) return name;
    for (auto it = env.rbegin(); it != env.rend(); ++it)
      if (it->first == name) return it->second;
    return name;
  }
};

struct RenderCtx {
  RenderOpts opts;
  AlphaEnv alpha;
};

inline std::string alias_chan_name(const RenderCtx& c, const Channel& ch) {
  if (ch.is_session() && c.opts.chan_alias) {
    auto it = c.opts.chan_alias->find(ch.name);
    if (it != c.opts.chan_alias->end()) return it->second;
  }
  return ch.name;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Values and expressions.
// ---------------------------------------------------------------------------

inline void render_value(const Value& v, std::ostream& os) {
  if (v.sort == Sort::Nat)
    os << v.nat;
  else
    os << (v.boolean ? "true" : "false");
  os << '@' << v.lev.name;
}

inline void render_extended(const ExtendedValue& u, std::ostream& os) {
  if (const auto* n = std::get_if<Nonce>(&u))
    os << '#' << n->index;
  else
    render_value(std::get<Value>(u), os);
}

namespace detail {

// Precedence: or=1, and=2, comparison=3, additive=4, unary=5, atom=6.
inline int binop_prec(BinOp op) {
  switch (op) {
    case BinOp::Or: return 1;
    case BinOp::And: return 2;
    case BinOp::Lt:
    case BinOp::Eq: return 3;
    case BinOp::Add:
    case BinOp::Sub: return 4;
  }
  return 6;
}

inline const char* binop_text(BinOp op) {
  switch (op) {
    case BinOp::Or: return " or ";
    case BinOp::And: return " and ";
    case BinOp::Lt: return " < ";
    case BinOp::Eq: return " = ";
    case BinOp::Add: return " + ";
    case BinOp::Sub: return " - ";
  }
  return "?";
}

inline void render_expr_rec(const ExprPtr& e, std::ostream& os, RenderCtx& c,
                            int parent) {
  std::visit(
      overloaded{
          [&](const ELit& l) { render_extended(l.value, os); },
          [&](const EVar& v) { os << c.alpha.look(c.alpha.vvars, v.name); },
          [&](const EUn& u) {
            if (parent > 5) os << '(';
            os << "not ";
            render_expr_rec(u.arg, os, c, 5);
            if (parent > 5) os << ')';
          },
          [&](const EBin& b) {
            int prec = binop_prec(b.op);
            if (parent >= prec && parent != 0) os << '(';
            render_expr_rec(b.lhs, os, c, prec - 1);
            os << binop_text(b.op);
            render_expr_rec(b.rhs, os, c, prec);
            if (parent >= prec && parent != 0) os << ')';
          }},
      e->node);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Global types.
// ---------------------------------------------------------------------------

namespace detail {

inline void render_global_rec(const GPtr& g, std::ostream& os, RenderCtx& c) {
  std::visit(overloaded{
                 [&](const GComm& comm) {
                   os << comm.from << " -> " << comm.to << " : { ";
                   bool first = true;
                   for (const auto& b : comm.branches) {
                     if (!first) os << ", ";
                     first = false;
                     os << b.label << '(' << sort_name(b.sort) << "). ";
                     render_global_rec(b.cont, os, c);
                   }
                   os << " }";
                 },
                 [&](const GVar& v) {
                   os << c.alpha.look(c.alpha.tvars, v.name);
                 },
                 [&](const GMu& m) {
                   os << "mu "
                      << c.alpha.bind(c.alpha.tvars, c.alpha.tn, "t", m.var)
                      << ". ";
                   render_global_rec(m.body, os, c);
                   AlphaEnv::pop(c.alpha.tvars, c.alpha.on);
                 },
                 [&](const GEnd&) { os << "end"; }},
             g->node);
}

// ---------------------------------------------------------------------------
// Monitors (compact form).
// ---------------------------------------------------------------------------

inline void render_monitor_rec(const MPtr& m, std::ostream& os, RenderCtx& c) {
  auto branching = [&](const Participant& peer, const auto& branches,
                       char dir) {
    os << peer << dir << '{';
    bool first = true;
    for (const auto& b : branches) {
      if (!first) os << ", ";
      first = false;
      os << b.label << '(' << sort_name(b.sort) << ").";
      render_monitor_rec(b.cont, os, c);
    }
    os << '}';
  };
  std::visit(overloaded{
                 [&](const MIn& in) { branching(in.peer, in.branches, '?'); },
                 [&](const MOut& o) { branching(o.peer, o.branches, '!'); },
                 [&](const MVar& v) {
                   os << c.alpha.look(c.alpha.tvars, v.name);
                 },
                 [&](const MMu& mu) {
                   os << "mu "
                      << c.alpha.bind(c.alpha.tvars, c.alpha.tn, "t", mu.var)
                      << ". ";
                   render_monitor_rec(mu.body, os, c);
                   AlphaEnv::pop(c.alpha.tvars, c.alpha.on);
                 },
                 [&](const MEnd&) { os << "end"; }},
             m->node);
}

// ---------------------------------------------------------------------------
// Processes. Precedence: prefix over external choice over recursion; `if`
// branches are rendered atomically (parenthesized unless 0 or a variable).
// ---------------------------------------------------------------------------

// Rendering context for a process node: Free admits recursion and flat sums,
// LeftSummand admits flat sums only, RightSummand admits neither.
enum class PCtx { Free, LeftSummand, RightSummand };

inline void render_process_rec(const PPtr& p, std::ostream& os, RenderCtx& c,
                               PCtx ctx);

inline void render_chan(const Channel& ch, std::ostream& os, RenderCtx& c) {
  os << alias_chan_name(c, ch);
  if (ch.is_session()) os << '[' << *ch.part << ']';
}

// A prefix continuation or an if-branch: atoms (and, for continuations,
// prefixes and conditionals) stand bare, anything else is parenthesized.
inline void render_process_atomic(const PPtr& p, std::ostream& os,
                                  RenderCtx& c, bool allow_prefix) {
  bool bare =
      std::holds_alternative<PNil>(p->node) ||
      std::holds_alternative<PVarRef>(p->node) ||
      (allow_prefix && (std::holds_alternative<PRecv>(p->node) ||
                        std::holds_alternative<PSend>(p->node) ||
                        std::holds_alternative<PCond>(p->node)));
  if (bare) {
    render_process_rec(p, os, c, PCtx::RightSummand);
  } else {
    os << '(';
    render_process_rec(p, os, c, PCtx::Free);
    os << ')';
  }
}

inline void render_process_rec(const PPtr& p, std::ostream& os, RenderCtx& c,
                               PCtx ctx) {
  std::visit(
      overloaded{
          [&](const PNil&) { os << '0'; },
          [&](const PRecv& r) {
            render_chan(r.chan, os, c);
            os << '?' << r.peer << ':' << r.label << '(';
            std::string x =
                c.alpha.bind(c.alpha.vvars, c.alpha.vn, "x", r.var);
            os << x << ").";
            render_process_atomic(r.cont, os, c, /*allow_prefix=*/true);
            AlphaEnv::pop(c.alpha.vvars, c.alpha.on);
          },
          [&](const PSend& s) {
            render_chan(s.chan, os, c);
            os << '!' << s.peer << ':' << s.label << '(';
            render_expr_rec(s.expr, os, c, 0);
            os << ").";
            render_process_atomic(s.cont, os, c, /*allow_prefix=*/true);
          },
          [&](const PVarRef& v) { os << c.alpha.look(c.alpha.pvars, v.name); },
          [&](const PMu& m) {
            bool parens = ctx != PCtx::Free;
            if (parens) os << '(';
            os << "mu "
               << c.alpha.bind(c.alpha.pvars, c.alpha.pn, "X", m.var) << ". ";
            render_process_rec(m.body, os, c, PCtx::Free);
            AlphaEnv::pop(c.alpha.pvars, c.alpha.on);
            if (parens) os << ')';
          },
          [&](const PCond& cd) {
            os << "if ";
            render_expr_rec(cd.test, os, c, 0);
            os << " then ";
            render_process_atomic(cd.then_branch, os, c, false);
            os << " else ";
            render_process_atomic(cd.else_branch, os, c, false);
          },
          [&](const PSum& s) {
            bool parens = ctx == PCtx::RightSummand;
            if (parens) os << '(';
            render_process_rec(s.left, os, c, PCtx::LeftSummand);
            os << " + ";
            render_process_rec(s.right, os, c, PCtx::RightSummand);
            if (parens) os << ')';
          }},
      p->node);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Public entry points.
// ---------------------------------------------------------------------------

inline std::string render(const ExprPtr& e, RenderOpts opts = {}) {
  std::ostringstream os;
  detail::RenderCtx c{opts, {opts.alpha}};
  detail::render_expr_rec(e, os, c, 0);
  return os.str();
}

inline std::string render(const GPtr& g, RenderOpts opts = {}) {
  std::ostringstream os;
  detail::RenderCtx c{opts, {opts.alpha}};
  detail::render_global_rec(g, os, c);
  return os.str();
}

inline std::string render(const MPtr& m, RenderOpts opts = {}) {
  std::ostringstream os;
  detail::RenderCtx c{opts, {opts.alpha}};
  detail::render_monitor_rec(m, os, c);
  return os.str();
}

inline std::string render(const PPtr& p, RenderOpts opts = {}) {
  std::ostringstream os;
  detail::RenderCtx c{opts, {opts.alpha}};
  detail::render_process_rec(p, os, c, detail::PCtx::Free);
  return os.str();
}

inline std::string render(const ExtendedValue& u) {
  std::ostringstream os;
  render_extended(u, os);
  return os.str();
}

inline std::string render(const Message& m) {
  std::ostringstream os;
  os << m.sender << '>' << m.receiver << ':' << m.label << '(';
  render_extended(m.payload, os);
  os << ')';
  return os.str();
}

// Alpha-invariant keys: equal keys <=> alpha-equivalent terms (for closed,
// valid terms).
inline std::string canonical_key(const GPtr& g) {
  return render(g, RenderOpts{true, nullptr});
}
inline std::string canonical_key(const MPtr& m) {
  return render(m, RenderOpts{true, nullptr});
}
inline std::string canonical_key(const PPtr& p) {
  return render(p, RenderOpts{true, nullptr});
}

inline bool equal_global(const GPtr& a, const GPtr& b) {
  return canonical_key(a) == canonical_key(b);
}
inline bool equal_monitor(const MPtr& a, const MPtr& b) {
  return canonical_key(a) == canonical_key(b);
}
inline bool equal_process(const PPtr& a, const PPtr& b) {
  return canonical_key(a) == canonical_key(b);
}

// Session / network rendering (debugging and state keys). Members print in
// participant order; the queue prints in stored order.
inline std::string render_session(const Session& s, RenderOpts opts = {}) {
  std::ostringstream os;
  bool first = true;
  os << '{';
  for (const auto& [part, mem] : s.members) {
    if (!first) os << ", ";
    first = false;
    os << part << ':' << render(mem.monitor, opts) << "^{"
       << mem.reading.name << ',' << mem.writing.name << "}["
       << render(mem.process, opts) << ']';
  }
  os << "; queue=[";
  first = true;
  for (const auto& m : s.queue) {
    if (!first) os << ", ";
    first = false;
    os << render(m);
  }
  os << "]}";
  return os.str();
}

inline std::string render_initiator(const Initiator& ini, RenderOpts opts = {}) {
  std::ostringstream os;
  os << "new(" << render(ini.g, opts) << "; ";
  bool first = true;
  for (const auto& [p, l] : ini.levels) {
    if (!first) os << ", ";
    first = false;
    os << p << ':' << l.name;
  }
  os << ')';
  return os.str();
}

inline std::string render_network(const Network& n, RenderOpts opts = {}) {
  std::ostringstream os;
  for (const auto& s : n.sessions)
    os << s.name << render_session(s, opts) << '\n';
  for (const auto& i : n.initiators) os << render_initiator(i, opts) << '\n';
  return os.str();
}

}  // namespace sessmon

#endif  // SESSMON_PRINT_HPP_
