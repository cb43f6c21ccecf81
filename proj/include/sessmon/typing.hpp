// SPDX-License-Identifier: Apache-2.0

#ifndef SESSMON_TYPING_HPP_
#define SESSMON_TYPING_HPP_

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sessmon/print.hpp"
#include "sessmon/syntax.hpp"

namespace sessmon {

// ---------------------------------------------------------------------------
// Pre-types / process types. Intersections and unions are n-ary internally;
// the idempotence/commutativity/associativity quotient is realized by
// normalize() (flatten, sort operands canonically, deduplicate).
// ---------------------------------------------------------------------------

struct PType;
using TPtr = std::shared_ptr<const PType>;

struct TPrefix {
  bool is_in = false;
  Participant peer;
  Label label;
  Sort sort = Sort::Nat;
  TPtr cont;
};
struct TAndN {
  std::vector<TPtr> ops;
};
struct TOrN {
  std::vector<TPtr> ops;
};
struct TVarN {
  std::string name;
};
struct TMuN {
  std::string var;
  TPtr body;
};
struct TEndN {};

struct PType {
  std::variant<TPrefix, TAndN, TOrN, TVarN, TMuN, TEndN> node;
};

inline TPtr t_in(Participant peer, Label l, Sort s, TPtr cont) {
  return std::make_shared<PType>(PType{
      TPrefix{true, std::move(peer), std::move(l), s, std::move(cont)}});
}
inline TPtr t_out(Participant peer, Label l, Sort s, TPtr cont) {
  return std::make_shared<PType>(PType{
      TPrefix{false, std::move(peer), std::move(l), s, std::move(cont)}});
}
inline TPtr t_and(std::vector<TPtr> ops) {
  return std::make_shared<PType>(PType{TAndN{std::move(ops)}});
}
inline TPtr t_and(TPtr a, TPtr b) {
  return t_and(std::vector<TPtr>{std::move(a), std::move(b)});
}
inline TPtr t_or(std::vector<TPtr> ops) {
  return std::make_shared<PType>(PType{TOrN{std::move(ops)}});
}
inline TPtr t_or(TPtr a, TPtr b) {
  return t_or(std::vector<TPtr>{std::move(a), std::move(b)});
}
inline TPtr t_var(std::string t) {
  return std::make_shared<PType>(PType{TVarN{std::move(t)}});
}
inline TPtr t_mu(std::string t, TPtr body) {
  return std::make_shared<PType>(PType{TMuN{std::move(t), std::move(body)}});
}
inline TPtr t_end() {
  static const TPtr e = std::make_shared<PType>(PType{TEndN{}});
  return e;
}

// ---------------------------------------------------------------------------
// Rendering. Precedence: prefix continuation binds tightest, then '&',
// then '|', recursion loosest.
// ---------------------------------------------------------------------------

namespace detail {

enum class TCtx { Free, OrOperand, AndOperand, Continuation };

inline void render_type_rec(const TPtr& t, std::ostream& os, RenderCtx& c,
                            TCtx ctx) {
  std::visit(
      overloaded{
          [&](const TPrefix& p) {
            os << (p.is_in ? '?' : '!') << p.peer << ':' << p.label << '('
               << sort_name(p.sort) << ").";
            render_type_rec(p.cont, os, c, TCtx::Continuation);
          },
          [&](const TAndN& a) {
            bool parens = ctx == TCtx::Continuation;
            if (parens) os << '(';
            bool first = true;
            for (const auto& op : a.ops) {
              if (!first) os << " & ";
              first = false;
              render_type_rec(op, os, c, TCtx::AndOperand);
            }
            if (parens) os << ')';
          },
          [&](const TOrN& o) {
            bool parens =
                ctx == TCtx::Continuation || ctx == TCtx::AndOperand;
            if (parens) os << '(';
            bool first = true;
            for (const auto& op : o.ops) {
              if (!first) os << " | ";
              first = false;
              render_type_rec(op, os, c, TCtx::OrOperand);
            }
            if (parens) os << ')';
          },
          [&](const TVarN& v) { os << c.alpha.look(c.alpha.tvars, v.name); },
          [&](const TMuN& m) {
            bool parens = ctx != TCtx::Free;
            if (parens) os << '(';
            os << "mu "
               << c.alpha.bind(c.alpha.tvars, c.alpha.tn, "t", m.var) << ". ";
            render_type_rec(m.body, os, c, TCtx::Free);
            AlphaEnv::pop(c.alpha.tvars, c.alpha.on);
            if (parens) os << ')';
          },
          [&](const TEndN&) { os << "end"; }},
      t->node);
}

}  // namespace detail

inline std::string render(const TPtr& t, RenderOpts opts = {}) {
  std::ostringstream os;
  detail::RenderCtx c{opts, {opts.alpha}};
  detail::render_type_rec(t, os, c, detail::TCtx::Free);
  return os.str();
}

// ---------------------------------------------------------------------------
// Substitution, free variables, normalization.
// ---------------------------------------------------------------------------

inline TPtr subst_tvar(const TPtr& t, const std::string& x, const TPtr& rep) {
  return std::visit(
      detail::overloaded{
          [&](const TPrefix& p) -> TPtr {
            return std::make_shared<PType>(PType{TPrefix{
                p.is_in, p.peer, p.label, p.sort,
                subst_tvar(p.cont, x, rep)}});
          },
          [&](const TAndN& a) -> TPtr {
            std::vector<TPtr> ops;
            ops.reserve(a.ops.size());
            for (const auto& op : a.ops) ops.push_back(subst_tvar(op, x, rep));
            return t_and(std::move(ops));
          },
          [&](const TOrN& o) -> TPtr {
            std::vector<TPtr> ops;
            ops.reserve(o.ops.size());
            for (const auto& op : o.ops) ops.push_back(subst_tvar(op, x, rep));
            return t_or(std::move(ops));
          },
          [&](const TVarN& v) -> TPtr { return v.name == x ? rep : t; },
          [&](const TMuN& m) -> TPtr {
            if (m.var == x) return t;
            return t_mu(m.var, subst_tvar(m.body, x, rep));
          },
          [&](const TEndN&) -> TPtr { return t; }},
      t->node);
}

inline bool tvar_free(const TPtr& t, const std::string& x) {
  return std::visit(
      detail::overloaded{
          [&](const TPrefix& p) { return tvar_free(p.cont, x); },
          [&](const TAndN& a) {
            for (const auto& op : a.ops)
              if (tvar_free(op, x)) return true;
            return false;
          },
          [&](const TOrN& o) {
            for (const auto& op : o.ops)
              if (tvar_free(op, x)) return true;
            return false;
          },
          [&](const TVarN& v) { return v.name == x; },
          [&](const TMuN& m) { return m.var != x && tvar_free(m.body, x); },
          [&](const TEndN&) { return false; }},
      t->node);
}

// ACI normal form: flatten nested intersections/unions, order operands by
// their alpha-canonical rendering, drop duplicates, collapse singletons, and
// drop recursion binders whose variable is unused.
inline TPtr normalize(const TPtr& t) {
  auto norm_ops = [](std::vector<TPtr> raw, bool is_and) {
    std::vector<TPtr> flat;
    for (auto& op : raw) {
      if (is_and) {
        if (const auto* a = std::get_if<TAndN>(&op->node)) {
          flat.insert(flat.end(), a->ops.begin(), a->ops.end());
          continue;
        }
      } else {
        if (const auto* o = std::get_if<TOrN>(&op->node)) {
          flat.insert(flat.end(), o->ops.begin(), o->ops.end());
          continue;
        }
      }
      flat.push_back(std::move(op));
    }
    std::vector<std::pair<std::string, TPtr>> keyed;
    keyed.reserve(flat.size());
    for (auto& op : flat)
      keyed.emplace_back(render(op, RenderOpts{true, nullptr}), std::move(op));
    std::sort(keyed.begin(), keyed.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<TPtr> out;
    for (std::size_t i = 0; i < keyed.size(); ++i)
      if (i == 0 || keyed[i].first != keyed[i - 1].first)
        out.push_back(std::move(keyed[i].second));
    return out;
  };
  return std::visit(
      detail::overloaded{
          [&](const TPrefix& p) -> TPtr {
            return std::make_shared<PType>(PType{TPrefix{
                p.is_in, p.peer, p.label, p.sort, normalize(p.cont)}});
          },
          [&](const TAndN& a) -> TPtr {
            std::vector<TPtr> ops;
            ops.reserve(a.ops.size());
            for (const auto& op : a.ops) ops.push_back(normalize(op));
            auto out = norm_ops(std::move(ops), true);
            if (out.size() == 1) return out.front();
            return t_and(std::move(out));
          },
          [&](const TOrN& o) -> TPtr {
            std::vector<TPtr> ops;
            ops.reserve(o.ops.size());
            for (const auto& op : o.ops) ops.push_back(normalize(op));
            auto out = norm_ops(std::move(ops), false);
            if (out.size() == 1) return out.front();
            return t_or(std::move(out));
          },
          [&](const TVarN&) -> TPtr { return t; },
          [&](const TMuN& m) -> TPtr {
            TPtr body = normalize(m.body);
            if (!tvar_free(body, m.var)) return body;
            return t_mu(m.var, std::move(body));
          },
          [&](const TEndN&) -> TPtr { return t; }},
      t->node);
}

inline std::string canonical_key(const TPtr& t) {
  return render(normalize(t), RenderOpts{true, nullptr});
}

inline bool equal_type(const TPtr& a, const TPtr& b) {
  return canonical_key(a) == canonical_key(b);
}

// ---------------------------------------------------------------------------
// lin / lout: the choice labels offered by input (resp. output) prefixes at
// the top layer. Recursion descends into the body; variables and end carry
// no labels.
// ---------------------------------------------------------------------------

inline void lin_rec(const TPtr& t, std::set<Label>& out) {
  std::visit(detail::overloaded{
                 [&](const TPrefix& p) {
                   if (p.is_in) out.insert(p.label);
                 },
                 [&](const TAndN& a) {
                   for (const auto& op : a.ops) lin_rec(op, out);
                 },
                 [&](const TOrN& o) {
                   for (const auto& op : o.ops) lin_rec(op, out);
                 },
                 [&](const TVarN&) {},
                 [&](const TMuN& m) { lin_rec(m.body, out); },
                 [&](const TEndN&) {}},
             t->node);
}

inline void lout_rec(const TPtr& t, std::set<Label>& out) {
  std::visit(detail::overloaded{
                 [&](const TPrefix& p) {
                   if (!p.is_in) out.insert(p.label);
                 },
                 [&](const TAndN& a) {
                   for (const auto& op : a.ops) lout_rec(op, out);
                 },
                 [&](const TOrN& o) {
                   for (const auto& op : o.ops) lout_rec(op, out);
                 },
                 [&](const TVarN&) {},
                 [&](const TMuN& m) { lout_rec(m.body, out); },
                 [&](const TEndN&) {}},
             t->node);
}

inline std::set<Label> lin(const TPtr& t) {
  std::set<Label> s;
  lin_rec(t, s);
  return s;
}

inline std::set<Label> lout(const TPtr& t) {
  std::set<Label> s;
  lout_rec(t, s);
  return s;
}

// ---------------------------------------------------------------------------
// Type validity: every intersection has disjoint lin and disjoint lout
// across operands; every union has empty lin on all operands and disjoint
// lout. Checked on the ACI normal form; recursion must be closed and
// guarded.
// ---------------------------------------------------------------------------

struct TypeError {
  std::string where;   // rendering of the offending node
  std::string bullet;  // which constraint failed
};

namespace detail {

inline bool disjoint(const std::set<Label>& a, const std::set<Label>& b,
                     Label* witness) {
  for (const auto& l : a)
    if (b.count(l)) {
      if (witness) *witness = l;
      return false;
    }
  return true;
}

inline std::optional<TypeError> validate_type_rec(const TPtr& t) {
  using R = std::optional<TypeError>;
  return std::visit(
      overloaded{
          [&](const TPrefix& p) -> R { return validate_type_rec(p.cont); },
          [&](const TAndN& a) -> R {
            for (std::size_t i = 0; i < a.ops.size(); ++i)
              for (std::size_t j = i + 1; j < a.ops.size(); ++j) {
                Label w;
                if (!disjoint(lin(a.ops[i]), lin(a.ops[j]), &w))
                  return TypeError{render(t),
                                   "intersection operands share input label '" +
                                       w + "'"};
                if (!disjoint(lout(a.ops[i]), lout(a.ops[j]), &w))
                  return TypeError{
                      render(t),
                      "intersection operands share output label '" + w + "'"};
              }
            for (const auto& op : a.ops)
              if (auto e = validate_type_rec(op)) return e;
            return std::nullopt;
          },
          [&](const TOrN& o) -> R {
            for (const auto& op : o.ops)
              if (!lin(op).empty())
                return TypeError{render(t),
                                 "union operand has nonempty input labels"};
            for (std::size_t i = 0; i < o.ops.size(); ++i)
              for (std::size_t j = i + 1; j < o.ops.size(); ++j) {
                Label w;
                if (!disjoint(lout(o.ops[i]), lout(o.ops[j]), &w))
                  return TypeError{
                      render(t),
                      "union operands share output label '" + w + "'"};
              }
            for (const auto& op : o.ops)
              if (auto e = validate_type_rec(op)) return e;
            return std::nullopt;
          },
          [&](const TVarN&) -> R { return std::nullopt; },
          [&](const TMuN& m) -> R { return validate_type_rec(m.body); },
          [&](const TEndN&) -> R { return std::nullopt; }},
      t->node);
}

inline void validate_type_bindings(const TPtr& t, std::set<std::string> bound,
                                   std::set<std::string> unguarded,
                                   std::vector<std::string>& errs) {
  std::visit(overloaded{
                 [&](const TPrefix& p) {
                   validate_type_bindings(p.cont, bound, {}, errs);
                 },
                 [&](const TAndN& a) {
                   for (const auto& op : a.ops)
                     validate_type_bindings(op, bound, unguarded, errs);
                 },
                 [&](const TOrN& o) {
                   for (const auto& op : o.ops)
                     validate_type_bindings(op, bound, unguarded, errs);
                 },
                 [&](const TVarN& v) {
                   if (!bound.count(v.name))
                     errs.push_back("unbound recursion variable '" + v.name +
                                    "'");
                   else if (unguarded.count(v.name))
                     errs.push_back("unguarded recursion through '" + v.name +
                                    "'");
                 },
                 [&](const TMuN& m) {
                   bound.insert(m.var);
                   unguarded.insert(m.var);
                   validate_type_bindings(m.body, bound, unguarded, errs);
                 },
                 [&](const TEndN&) {}},
             t->node);
}

}  // namespace detail

inline std::optional<TypeError> validate_type(const TPtr& t) {
  std::vector<std::string> binding_errs;
  detail::validate_type_bindings(t, {}, {}, binding_errs);
  if (!binding_errs.empty()) return TypeError{render(t), binding_errs.front()};
  return detail::validate_type_rec(normalize(t));
}

inline bool is_valid_type(const TPtr& t) { return !validate_type(t); }

// ---------------------------------------------------------------------------
// Subtyping. The decision procedure puts both sides in an unfolded normal
// form (intersection operands are never unions-free: they may be unions, but
// never recursions; dually for unions), splits exact rules — union on the
// left, intersection on the right, and the two distributivity equivalences —
// and decides the residual intersection-of-atoms against union-of-atoms by
// exhibiting one atom pair, descending into continuations coinductively with
// an ancestor set.
// ---------------------------------------------------------------------------

namespace detail {

class SubtypeChecker {
 public:
  bool run(const TPtr& a, const TPtr& b) { return sub(a, b); }

 private:
  std::set<std::pair<std::string, std::string>> ancestors_;

  // Normal form for the procedure: no top-level recursion, and no recursion
  // operand directly under an intersection/union.
  static TPtr nf(TPtr t) {
    for (;;) {
      t = normalize(t);
      if (const auto* m = std::get_if<TMuN>(&t->node)) {
        t = subst_tvar(m->body, m->var, t);
        continue;
      }
      const auto* a = std::get_if<TAndN>(&t->node);
      const auto* o = std::get_if<TOrN>(&t->node);
      if (a || o) {
        const auto& ops = a ? a->ops : o->ops;
        std::vector<TPtr> next;
        bool changed = false;
        for (const auto& op : ops) {
          if (const auto* m = std::get_if<TMuN>(&op->node)) {
            next.push_back(subst_tvar(m->body, m->var, op));
            changed = true;
          } else {
            next.push_back(op);
          }
        }
        if (changed) {
          t = a ? t_and(std::move(next)) : t_or(std::move(next));
          continue;
        }
      }
      return t;
    }
  }

  bool sub(TPtr a, TPtr b) {
    a = nf(a);
    b = nf(b);
    auto key = std::make_pair(render(a, RenderOpts{true, nullptr}),
                              render(b, RenderOpts{true, nullptr}));
    if (key.first == key.second) return true;  // reflexivity
    if (ancestors_.count(key)) return true;    // coinductive hypothesis
    ancestors_.insert(key);
    bool r = go(a, b);
    ancestors_.erase(key);
    return r;
  }

  bool go(const TPtr& a, const TPtr& b) {
    // T <= end.
    if (std::holds_alternative<TEndN>(b->node)) return true;
    // T <= T1 & T2  iff  T <= T1 and T <= T2 (greatest lower bound).
    if (const auto* ba = std::get_if<TAndN>(&b->node)) {
      for (const auto& op : ba->ops)
        if (!sub(a, op)) return false;
      return true;
    }
    // T1 | T2 <= T  iff  T1 <= T and T2 <= T (least upper bound).
    if (const auto* ao = std::get_if<TOrN>(&a->node)) {
      for (const auto& op : ao->ops)
        if (!sub(op, b)) return false;
      return true;
    }
    // (T1 | T2) & T3 <= T  iff  T1 & T3 <= T and T2 & T3 <= T.
    if (const auto* aa = std::get_if<TAndN>(&a->node)) {
      for (std::size_t i = 0; i < aa->ops.size(); ++i) {
        if (const auto* inner = std::get_if<TOrN>(&aa->ops[i]->node)) {
          std::vector<TPtr> rest;
          for (std::size_t j = 0; j < aa->ops.size(); ++j)
            if (j != i) rest.push_back(aa->ops[j]);
          for (const auto& alt : inner->ops) {
            std::vector<TPtr> ops = rest;
            ops.push_back(alt);
            if (!sub(t_and(std::move(ops)), b)) return false;
          }
          return true;
        }
      }
    }
    // T <= (T1 & T2) | T3  iff  T <= T1 | T3 and T <= T2 | T3.
    if (const auto* bo = std::get_if<TOrN>(&b->node)) {
      for (std::size_t i = 0; i < bo->ops.size(); ++i) {
        if (const auto* inner = std::get_if<TAndN>(&bo->ops[i]->node)) {
          std::vector<TPtr> rest;
          for (std::size_t j = 0; j < bo->ops.size(); ++j)
            if (j != i) rest.push_back(bo->ops[j]);
          for (const auto& part : inner->ops) {
            std::vector<TPtr> ops = rest;
            ops.push_back(part);
            if (!sub(a, t_or(std::move(ops)))) return false;
          }
          return true;
        }
      }
    }
    // Residual: intersection of atoms against union of atoms.
    std::vector<TPtr> left, right;
    if (const auto* aa = std::get_if<TAndN>(&a->node))
      left = aa->ops;
    else
      left.push_back(a);
    if (const auto* bo = std::get_if<TOrN>(&b->node))
      right = bo->ops;
    else
      right.push_back(b);
    for (const auto& x : left)
      for (const auto& y : right)
        if (atom_sub(x, y)) return true;
    return false;
  }

  bool atom_sub(const TPtr& x, const TPtr& y) {
    if (std::holds_alternative<TEndN>(y->node)) return true;
    if (std::holds_alternative<TEndN>(x->node)) return false;
    const auto* xv = std::get_if<TVarN>(&x->node);
    const auto* yv = std::get_if<TVarN>(&y->node);
    if (xv || yv) return xv && yv && xv->name == yv->name;
    const auto* xp = std::get_if<TPrefix>(&x->node);
    const auto* yp = std::get_if<TPrefix>(&y->node);
    if (xp && yp && xp->is_in == yp->is_in && xp->peer == yp->peer &&
        xp->label == yp->label && xp->sort == yp->sort)
      return sub(xp->cont, yp->cont);
    return false;
  }
};

}  // namespace detail

// Decides the subtyping relation; total on valid, closed, guarded types.
inline bool subtype(const TPtr& a, const TPtr& b) {
  return detail::SubtypeChecker{}.run(a, b);
}

// ---------------------------------------------------------------------------
// Type synthesis for processes.
// ---------------------------------------------------------------------------

struct TypingEnv {
  std::map<std::string, Sort> vars;
  std::map<std::string, TPtr> procvars;
};

inline TPtr synthesize_rec(TypingEnv env, const PPtr& p, const Channel& c) {
  auto check_chan = [&](const Channel& ch, const char* what) {
    if (ch != c)
      throw IllTyped(std::string(what) + " uses foreign channel '" + ch.name +
                     "'");
  };
  return std::visit(
      detail::overloaded{
          [&](const PNil&) { return t_end(); },
          [&](const PRecv& r) {
            check_chan(r.chan, "input");
            if (!r.sort)
              throw IllTyped("no sort annotation for input label '" + r.label +
                             "'");
            TypingEnv inner = env;
            inner.vars[r.var] = *r.sort;
            return t_in(r.peer, r.label, *r.sort,
                        synthesize_rec(std::move(inner), r.cont, c));
          },
          [&](const PSend& s) {
            check_chan(s.chan, "output");
            std::optional<Sort> es = expr_sort(s.expr, env.vars);
            Sort sort;
            if (s.sort) {
              sort = *s.sort;
              if (es && *es != sort)
                throw IllTyped("expression of sort " +
                               std::string(sort_name(*es)) +
                               " sent under label '" + s.label +
                               "' annotated " + sort_name(sort));
            } else if (es) {
              sort = *es;
            } else {
              throw IllTyped("cannot determine sort of output '" + s.label +
                             "'");
            }
            return t_out(s.peer, s.label, sort, synthesize_rec(env, s.cont, c));
          },
          [&](const PVarRef& v) {
            auto it = env.procvars.find(v.name);
            if (it == env.procvars.end())
              throw IllTyped("unbound process variable '" + v.name + "'");
            return it->second;
          },
          [&](const PMu& m) {
            TypingEnv inner = env;
            inner.procvars[m.var] = t_var(m.var);
            TPtr body = synthesize_rec(std::move(inner), m.body, c);
            if (!tvar_free(body, m.var)) return body;
            return t_mu(m.var, std::move(body));
          },
          [&](const PCond& cd) {
            std::optional<Sort> ts = expr_sort(cd.test, env.vars);
            if (ts && *ts != Sort::Bool)
              throw IllTyped("conditional test is not boolean");
            TPtr t1 = synthesize_rec(env, cd.then_branch, c);
            TPtr t2 = synthesize_rec(env, cd.else_branch, c);
            TPtr u = normalize(t_or(std::move(t1), std::move(t2)));
            // Only the layer conditions are checked here: recursion variables
            // bound by an enclosing binder are still free at this point.
            if (auto e = detail::validate_type_rec(u))
              throw IllTyped("conditional branches do not form a type: " +
                             e->bullet);
            return u;
          },
          [&](const PSum& s) {
            TPtr t1 = synthesize_rec(env, s.left, c);
            TPtr t2 = synthesize_rec(env, s.right, c);
            TPtr u = normalize(t_and(std::move(t1), std::move(t2)));
            if (auto e = detail::validate_type_rec(u))
              throw IllTyped("external choice does not form a type: " +
                             e->bullet);
            return u;
          }},
      p->node);
}

// Synthesizes the type of p communicating on channel c; throws IllTyped.
inline TPtr synthesize(const TypingEnv& env, const PPtr& p, const Channel& c) {
  return normalize(synthesize_rec(env, p, c));
}

inline TPtr synthesize(const PPtr& p, const Channel& c) {
  return synthesize(TypingEnv{}, p, c);
}

// ---------------------------------------------------------------------------
// Monitor-to-type translation and adequacy.
// ---------------------------------------------------------------------------

inline TPtr monitor_type_rec(const MPtr& m) {
  return std::visit(
      detail::overloaded{
          [&](const MIn& in) {
            std::vector<TPtr> ops;
            ops.reserve(in.branches.size());
            for (const auto& b : in.branches)
              ops.push_back(
                  t_in(in.peer, b.label, b.sort, monitor_type_rec(b.cont)));
            if (ops.size() == 1) return ops.front();
            return t_and(std::move(ops));
          },
          [&](const MOut& out) {
            std::vector<TPtr> ops;
            ops.reserve(out.branches.size());
            for (const auto& b : out.branches)
              ops.push_back(
                  t_out(out.peer, b.label, b.sort, monitor_type_rec(b.cont)));
            if (ops.size() == 1) return ops.front();
            return t_or(std::move(ops));
          },
          [&](const MVar& v) { return t_var(v.name); },
          [&](const MMu& mu) { return t_mu(mu.var, monitor_type_rec(mu.body)); },
          [&](const MEnd&) { return t_end(); }},
      m->node);
}

inline TPtr monitor_type(const MPtr& m) {
  return normalize(monitor_type_rec(m));
}

// T is adequate for M when T <= |M|.
inline bool adequate(const TPtr& t, const MPtr& m) {
  return subtype(t, monitor_type(m));
}

// ---------------------------------------------------------------------------
// Canonical process synthesis: a process (on user channel y) adequate for a
// given monitor. Inputs become an external choice over all branches with
// fresh variables x0, x1, ...; outputs send the first branch's label with a
// bottom-level default value.
// ---------------------------------------------------------------------------

struct CanonicalProcess {
  PPtr process;
  TPtr type;
  std::map<Label, Sort> label_sorts;
};

namespace detail {

struct CanonicalBuilder {
  const Lattice& lat;
  int var_counter = 0;
  std::map<Label, Sort> sorts;

  std::pair<PPtr, TPtr> build(const MPtr& m) {
    return std::visit(
        overloaded{
            [&](const MIn& in) -> std::pair<PPtr, TPtr> {
              PPtr proc;
              std::vector<TPtr> tops;
              for (const auto& b : in.branches) {
                sorts.emplace(b.label, b.sort);
                auto [cp, ct] = build(b.cont);
                std::string x = "x" + std::to_string(var_counter++);
                PPtr leg = p_recv(user_chan("y"), in.peer, b.label, x, b.sort,
                                  cp);
                proc = proc ? p_sum(proc, leg) : leg;
                tops.push_back(t_in(in.peer, b.label, b.sort, ct));
              }
              TPtr ty = tops.size() == 1 ? tops.front() : t_and(tops);
              return {proc, ty};
            },
            [&](const MOut& out) -> std::pair<PPtr, TPtr> {
              const MBranch& b = out.branches.front();
              sorts.emplace(b.label, b.sort);
              auto [cp, ct] = build(b.cont);
              Value dflt = b.sort == Sort::Nat ? make_nat(0, lat.bottom())
                                               : make_bool(false, lat.bottom());
              PPtr proc = p_send(user_chan("y"), out.peer, b.label,
                                 e_lit(dflt), b.sort, cp);
              return {proc, t_out(out.peer, b.label, b.sort, ct)};
            },
            [&](const MVar& v) -> std::pair<PPtr, TPtr> {
              return {p_var(v.name), t_var(v.name)};
            },
            [&](const MMu& mu) -> std::pair<PPtr, TPtr> {
              auto [bp, bt] = build(mu.body);
              if (!tvar_free(bt, mu.var)) return {bp, bt};
              return {p_mu(mu.var, bp), t_mu(mu.var, bt)};
            },
            [&](const MEnd&) -> std::pair<PPtr, TPtr> {
              return {p_nil(), t_end()};
            }},
        m->node);
  }
};

}  // namespace detail

inline CanonicalProcess canonical_process(const MPtr& m, const Lattice& lat) {
  detail::CanonicalBuilder b{lat};
  auto [proc, ty] = b.build(m);
  return CanonicalProcess{proc, normalize(ty), std::move(b.sorts)};
}

}  // namespace sessmon

#endif  // SESSMON_TYPING_HPP_
