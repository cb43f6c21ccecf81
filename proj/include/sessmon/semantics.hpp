// SPDX-License-Identifier: Apache-2.0

#ifndef SESSMON_SEMANTICS_HPP_
#define SESSMON_SEMANTICS_HPP_

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sessmon/print.hpp"
#include "sessmon/projection.hpp"
#include "sessmon/scenario.hpp"
#include "sessmon/syntax.hpp"
#include "sessmon/typing.hpp"

namespace sessmon {

// ---------------------------------------------------------------------------
// Expression evaluation. Closed expressions only; any nonce operand absorbs
// the whole result (leftmost when several), subtraction on naturals is
// truncated at zero, and the result level is the join of all operand levels.
// ---------------------------------------------------------------------------

inline ExtendedValue eval_expr(const ExprPtr& e, const Lattice& lat) {
  auto as_value = [](const ExtendedValue& u, Sort s,
                     const char* what) -> const Value& {
    const auto* v = std::get_if<Value>(&u);
    if (!v) throw EvalError(std::string("nonce operand reached ") + what);
    if (v->sort != s)
      throw EvalError(std::string("operand of ") + what + " has sort " +
                      sort_name(v->sort));
    return *v;
  };
  return std::visit(
      detail::overloaded{
          [&](const ELit& l) { return l.value; },
          [&](const EVar& v) -> ExtendedValue {
            throw EvalError("free variable '" + v.name + "'");
          },
          [&](const EUn& u) -> ExtendedValue {
            ExtendedValue a = eval_expr(u.arg, lat);
            if (is_nonce(a)) return a;
            const Value& v = as_value(a, Sort::Bool, "not");
            return make_bool(!v.boolean, v.lev);
          },
          [&](const EBin& b) -> ExtendedValue {
            ExtendedValue l = eval_expr(b.lhs, lat);
            if (is_nonce(l)) return l;
            ExtendedValue r = eval_expr(b.rhs, lat);
            if (is_nonce(r)) return r;
            Level lev = lat.join(std::get<Value>(l).lev, std::get<Value>(r).lev);
            switch (b.op) {
              case BinOp::Add:
                return make_nat(as_value(l, Sort::Nat, "+").nat +
                                    as_value(r, Sort::Nat, "+").nat,
                                lev);
              case BinOp::Sub: {
                long long d = as_value(l, Sort::Nat, "-").nat -
                              as_value(r, Sort::Nat, "-").nat;
                return make_nat(d < 0 ? 0 : d, lev);
              }
              case BinOp::Lt:
                return make_bool(as_value(l, Sort::Nat, "<").nat <
                                     as_value(r, Sort::Nat, "<").nat,
                                 lev);
              case BinOp::Eq: {
                const Value& lv = std::get<Value>(l);
                const Value& rv = std::get<Value>(r);
                if (lv.sort != rv.sort)
                  throw EvalError("'=' compares unlike sorts");
                bool eq = lv.sort == Sort::Nat ? lv.nat == rv.nat
                                               : lv.boolean == rv.boolean;
                return make_bool(eq, lev);
              }
              case BinOp::And:
                return make_bool(as_value(l, Sort::Bool, "and").boolean &&
                                     as_value(r, Sort::Bool, "and").boolean,
                                 lev);
              case BinOp::Or:
                return make_bool(as_value(l, Sort::Bool, "or").boolean ||
                                     as_value(r, Sort::Bool, "or").boolean,
                                 lev);
            }
            throw EvalError("unknown operator");
          }},
      e->node);
}

inline ExtendedValue eval_expr(
    const ExprPtr& e, const std::map<std::string, ExtendedValue>& bindings,
    const Lattice& lat) {
  ExprPtr closed = e;
  for (const auto& [x, u] : bindings) closed = subst_expr_var(closed, x, u);
  return eval_expr(closed, lat);
}

// ---------------------------------------------------------------------------
// Process capabilities. Receives are kept symbolic (matched against a
// concrete payload at step time); sends evaluate their expression; a
// conditional yields the selected branch tagged with the test's level.
// External choice: a communication selects its summand and discards the
// other; a level tag rewrites in place. Recursion unfolds transparently.
// ---------------------------------------------------------------------------

struct RecvCap {
  Participant peer;
  Label label;
  std::string var;
  PPtr cont;  // binder not yet substituted
};

struct SendCap {
  Participant peer;
  Label label;
  ExtendedValue value;
  PPtr cont;
};

struct CondCap {
  Level level;
  PPtr cont;  // whole process with the conditional resolved in place
};

namespace detail {

inline void collect_inputs(const PPtr& p, std::vector<RecvCap>& out) {
  std::visit(overloaded{[&](const PRecv& r) {
                          out.push_back({r.peer, r.label, r.var, r.cont});
                        },
                        [&](const PMu&) {
                          collect_inputs(unfold_process(p), out);
                        },
                        [&](const PSum& s) {
                          collect_inputs(s.left, out);
                          collect_inputs(s.right, out);
                        },
                        [&](const auto&) {}},
             p->node);
}

inline void collect_outputs(const PPtr& p, const Lattice& lat,
                            std::vector<SendCap>& out) {
  std::visit(overloaded{[&](const PSend& s) {
                          out.push_back({s.peer, s.label,
                                         eval_expr(s.expr, lat), s.cont});
                        },
                        [&](const PMu&) {
                          collect_outputs(unfold_process(p), lat, out);
                        },
                        [&](const PSum& s) {
                          collect_outputs(s.left, lat, out);
                          collect_outputs(s.right, lat, out);
                        },
                        [&](const auto&) {}},
             p->node);
}

inline void collect_conds(const PPtr& p, const Lattice& lat,
                          std::vector<CondCap>& out) {
  std::visit(
      overloaded{
          [&](const PCond& c) {
            ExtendedValue t = eval_expr(c.test, lat);
            const auto* v = std::get_if<Value>(&t);
            if (!v || v->sort != Sort::Bool) return;  // nonce test: stuck
            out.push_back({expr_level(c.test, lat),
                           v->boolean ? c.then_branch : c.else_branch});
          },
          [&](const PMu&) { collect_conds(unfold_process(p), lat, out); },
          [&](const PSum& s) {
            // A level tag rewrites the summand in place, keeping the other.
            std::vector<CondCap> left, right;
            collect_conds(s.left, lat, left);
            collect_conds(s.right, lat, right);
            for (auto& c : left) out.push_back({c.level, p_sum(c.cont, s.right)});
            for (auto& c : right) out.push_back({c.level, p_sum(s.left, c.cont)});
          },
          [&](const auto&) {}},
      p->node);
}

}  // namespace detail

inline std::vector<RecvCap> process_inputs(const PPtr& p) {
  std::vector<RecvCap> out;
  detail::collect_inputs(p, out);
  return out;
}

inline std::vector<SendCap> process_outputs(const PPtr& p, const Lattice& lat) {
  std::vector<SendCap> out;
  detail::collect_outputs(p, lat, out);
  return out;
}

inline std::vector<CondCap> process_conds(const PPtr& p, const Lattice& lat) {
  std::vector<CondCap> out;
  detail::collect_conds(p, lat, out);
  return out;
}

// Consume a receive capability with a concrete payload.
inline PPtr deliver(const RecvCap& cap, const ExtendedValue& u) {
  return subst_value(cap.cont, cap.var, u);
}

// ---------------------------------------------------------------------------
// Monitor stepping.
// ---------------------------------------------------------------------------

struct MonitorView {
  bool is_in = false;
  Participant peer;
  std::vector<MBranch> branches;
};

inline std::optional<MonitorView> monitor_view(const MPtr& m) {
  MPtr u = unfold_monitor(m);
  if (const auto* in = std::get_if<MIn>(&u->node))
    return MonitorView{true, in->peer, in->branches};
  if (const auto* out = std::get_if<MOut>(&u->node))
    return MonitorView{false, out->peer, out->branches};
  return std::nullopt;
}

inline MPtr monitor_step(const MPtr& m, bool is_in, const Participant& peer,
                         const Label& label) {
  auto v = monitor_view(m);
  if (v && v->is_in == is_in && v->peer == peer)
    for (const auto& b : v->branches)
      if (b.label == label) return b.cont;
  throw NoSuchTransition("monitor " + render(m) + " has no transition " +
                         peer + (is_in ? "?" : "!") + label);
}

// M \ ?(sender, label): the continuation past an erased input action.
inline MPtr erase_input(const MPtr& m, const Participant& sender,
                        const Label& label) {
  auto v = monitor_view(m);
  if (!v || !v->is_in || v->peer != sender)
    throw NoSuchBranch("monitor " + render(m) + " offers no input from " +
                       sender);
  for (const auto& b : v->branches)
    if (b.label == label) return b.cont;
  throw NoSuchBranch("monitor " + render(m) + " has no branch '" + label +
                     "'");
}

// ---------------------------------------------------------------------------
// Queues: per-pair FIFO. The earliest message for a (sender, receiver) pair
// is exactly the one reachable at the head via allowed commutations.
// ---------------------------------------------------------------------------

inline std::optional<std::size_t> consumable(const std::vector<Message>& q,
                                             const Participant& sender,
                                             const Participant& receiver) {
  for (std::size_t i = 0; i < q.size(); ++i)
    if (q[i].sender == sender && q[i].receiver == receiver) return i;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Taint: who holds a nonce, and who may (transitively) hear from them.
// ---------------------------------------------------------------------------

inline void collect_peers(const MPtr& m, std::set<Participant>& out) {
  std::visit(detail::overloaded{
                 [&](const MIn& in) {
                   out.insert(in.peer);
                   for (const auto& b : in.branches)
                     collect_peers(b.cont, out);
                 },
                 [&](const MOut& o) {
                   out.insert(o.peer);
                   for (const auto& b : o.branches) collect_peers(b.cont, out);
                 },
                 [&](const MVar&) {},
                 [&](const MMu& mu) { collect_peers(mu.body, out); },
                 [&](const MEnd&) {}},
             m->node);
}

inline std::set<Participant> mentioned_peers(const MPtr& m) {
  std::set<Participant> out;
  collect_peers(m, out);
  return out;
}

// Least set containing everyone whose process holds the nonce, the receivers
// of queued messages carrying it, and (closure) everyone whose monitor
// communicates with someone already in the set.
inline std::set<Participant> taint_set(const Session& s,
                                       std::uint64_t nonce_index) {
  std::set<Participant> tainted;
  for (const auto& [p, mem] : s.members)
    if (process_contains_nonce(mem.process, nonce_index)) tainted.insert(p);
  for (const auto& msg : s.queue) {
    const auto* n = std::get_if<Nonce>(&msg.payload);
    if (n && n->index == nonce_index) tainted.insert(msg.receiver);
  }
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& [p, mem] : s.members) {
      if (tainted.count(p)) continue;
      for (const auto& peer : mentioned_peers(mem.monitor))
        if (tainted.count(peer)) {
          tainted.insert(p);
          grew = true;
          break;
        }
    }
  }
  return tainted;
}

// ---------------------------------------------------------------------------
// Reduction steps.
// ---------------------------------------------------------------------------

struct ReductionStep {
  Rule rule = Rule::Init;
  std::size_t initiator = 0;   // Init
  std::size_t session = 0;     // all other rules
  Participant p;               // primary actor (receiver for inputs)
  Participant q;               // peer
  Label label;
  std::size_t cap_index = 0;   // into the actor's capability vector
  std::uint64_t nonce = 0;     // Refresh: targeted nonce index
  std::string key;             // canonical ordering key
};

struct Applied {
  EngineState state;
  std::optional<Message> message;      // consumed or enqueued
  std::optional<std::uint64_t> nonce;  // issued (InGlob/OutGlob), or Refresh's
  std::vector<Participant> actors;
  std::string session_name;            // touched or created ("" for none)
};

namespace detail {

inline std::string step_key(const ReductionStep& s,
                            const std::string& session_name,
                            const std::string& extra) {
  std::ostringstream os;
  os << rule_name(s.rule) << '|' << session_name << '|' << s.p << '|' << s.q
     << '|' << s.label << '|' << s.cap_index << '|' << s.nonce << '|' << extra;
  return os.str();
}

// Distinct senders with pending traffic to receiver p.
inline std::vector<Participant> queue_senders(const Session& s,
                                              const Participant& receiver) {
  std::set<Participant> out;
  for (const auto& m : s.queue)
    if (m.receiver == receiver) out.insert(m.sender);
  return {out.begin(), out.end()};
}

}  // namespace detail

// Eager structural-equivalence cleanup: drop members whose monitor is end,
// then drop sessions with no members and no queued messages.
inline void gc_network(Network& net) {
  for (auto& s : net.sessions) {
    for (auto it = s.members.begin(); it != s.members.end();)
      it = monitor_is_end(it->second.monitor) ? s.members.erase(it)
                                              : std::next(it);
  }
  std::erase_if(net.sessions, [](const Session& s) {
    return s.members.empty() && s.queue.empty();
  });
}

inline EngineState initial_state(const Scenario& sc) {
  EngineState st;
  const NamedGlobal& g = sc.globals.at(sc.start_index);
  st.net.initiators.push_back(Initiator{g.g, g.levels});
  return st;
}

// ---------------------------------------------------------------------------
// Step enumeration. Deterministic: steps come out sorted by canonical key.
// ---------------------------------------------------------------------------

inline std::vector<ReductionStep> enabled_steps(const EngineState& st,
                                                const Scenario& sc) {
  const Lattice& lat = sc.lattice;
  std::vector<ReductionStep> steps;

  for (std::size_t i = 0; i < st.net.initiators.size(); ++i) {
    ReductionStep s;
    s.rule = Rule::Init;
    s.initiator = i;
    s.key = detail::step_key(s, "new" + std::to_string(i), "");
    steps.push_back(std::move(s));
  }

  for (std::size_t si = 0; si < st.net.sessions.size(); ++si) {
    const Session& sess = st.net.sessions[si];
    for (const auto& [p, mem] : sess.members) {
      // UpLev: one step per resolvable conditional.
      std::vector<CondCap> conds = process_conds(mem.process, lat);
      for (std::size_t ci = 0; ci < conds.size(); ++ci) {
        ReductionStep s;
        s.rule = Rule::UpLev;
        s.session = si;
        s.p = p;
        s.cap_index = ci;
        s.key = detail::step_key(s, sess.name,
                                 conds[ci].level.name + "|" +
                                     canonical_key(conds[ci].cont));
        steps.push_back(std::move(s));
      }

      // Input family: a consumable message per sender, gated by r.
      auto view = monitor_view(mem.monitor);
      std::vector<RecvCap> inputs = process_inputs(mem.process);
      for (const auto& q : detail::queue_senders(sess, p)) {
        auto mi = consumable(sess.queue, q, p);
        if (!mi) continue;
        const Message& msg = sess.queue[*mi];
        bool monitor_offers = view && view->is_in && view->peer == q &&
                              std::any_of(view->branches.begin(),
                                          view->branches.end(),
                                          [&](const MBranch& b) {
                                            return b.label == msg.label;
                                          });
        if (!monitor_offers) continue;
        bool readable = lat.leq(lev_of(msg.payload, lat), mem.reading);
        if (readable) {
          for (std::size_t ci = 0; ci < inputs.size(); ++ci) {
            if (inputs[ci].peer != q || inputs[ci].label != msg.label)
              continue;
            ReductionStep s;
            s.rule = Rule::In;
            s.session = si;
            s.p = p;
            s.q = q;
            s.label = msg.label;
            s.cap_index = ci;
            s.key = detail::step_key(s, sess.name, render(msg.payload));
            steps.push_back(std::move(s));
          }
        } else {
          for (std::size_t ci = 0; ci < inputs.size(); ++ci) {
            if (inputs[ci].peer != q || inputs[ci].label != msg.label)
              continue;
            ReductionStep s;
            s.rule = Rule::InGlob;
            s.session = si;
            s.p = p;
            s.q = q;
            s.label = msg.label;
            s.cap_index = ci;
            s.key = detail::step_key(s, sess.name, render(msg.payload));
            steps.push_back(std::move(s));
          }
          ReductionStep s;
          s.rule = Rule::InLoc;
          s.session = si;
          s.p = p;
          s.q = q;
          s.label = msg.label;
          s.key = detail::step_key(s, sess.name, render(msg.payload));
          steps.push_back(std::move(s));
        }
      }

      // Output family, gated by w.
      std::vector<SendCap> outputs = process_outputs(mem.process, lat);
      for (std::size_t ci = 0; ci < outputs.size(); ++ci) {
        const SendCap& cap = outputs[ci];
        bool monitor_offers = view && !view->is_in && view->peer == cap.peer &&
                              std::any_of(view->branches.begin(),
                                          view->branches.end(),
                                          [&](const MBranch& b) {
                                            return b.label == cap.label;
                                          });
        if (!monitor_offers) continue;
        bool clean = is_nonce(cap.value) ||
                     lat.leq(mem.writing, lev_of(cap.value, lat));
        if (clean) {
          ReductionStep s;
          s.rule = Rule::Out;
          s.session = si;
          s.p = p;
          s.q = cap.peer;
          s.label = cap.label;
          s.cap_index = ci;
          s.key = detail::step_key(s, sess.name, render(cap.value));
          steps.push_back(std::move(s));
        } else {
          auto rit = sess.members.find(cap.peer);
          if (rit == sess.members.end()) continue;  // no receiver: blocked
          {
            ReductionStep s;
            s.rule = Rule::OutGlob;
            s.session = si;
            s.p = p;
            s.q = cap.peer;
            s.label = cap.label;
            s.cap_index = ci;
            s.key = detail::step_key(s, sess.name, render(cap.value));
            steps.push_back(std::move(s));
          }
          auto rview = monitor_view(rit->second.monitor);
          bool receiver_at_input =
              rview && rview->is_in && rview->peer == p &&
              std::any_of(
                  rview->branches.begin(), rview->branches.end(),
                  [&](const MBranch& b) { return b.label == cap.label; });
          if (receiver_at_input) {
            ReductionStep s;
            s.rule = Rule::OutLoc;
            s.session = si;
            s.p = p;
            s.q = cap.peer;
            s.label = cap.label;
            s.cap_index = ci;
            s.key = detail::step_key(s, sess.name, render(cap.value));
            steps.push_back(std::move(s));
          }
        }
      }
    }

    // Refresh: one step per distinct nonce present in the session.
    std::set<std::uint64_t> nonces;
    for (const auto& m : sess.queue)
      if (const auto* n = std::get_if<Nonce>(&m.payload))
        nonces.insert(n->index);
    for (const auto& [p, mem] : sess.members)
      for (std::uint64_t i = 0; i < st.next_nonce; ++i)
        if (process_contains_nonce(mem.process, i)) nonces.insert(i);
    for (std::uint64_t n : nonces) {
      ReductionStep s;
      s.rule = Rule::Refresh;
      s.session = si;
      s.nonce = n;
      s.key = detail::step_key(s, sess.name, "");
      steps.push_back(std::move(s));
    }
  }

  std::sort(steps.begin(), steps.end(),
            [](const ReductionStep& a, const ReductionStep& b) {
              return a.key < b.key;
            });
  return steps;
}

// ---------------------------------------------------------------------------
// Step application. Total on steps returned by enabled_steps for the same
// state; throws InapplicableStep otherwise.
// ---------------------------------------------------------------------------

inline Applied apply_step(const EngineState& st0, const ReductionStep& step,
                          const Scenario& sc) {
  const Lattice& lat = sc.lattice;
  Applied out{st0, std::nullopt, std::nullopt, {}, ""};
  EngineState& st = out.state;

  auto need = [&](bool cond, const char* what) {
    if (!cond) throw InapplicableStep(std::string(rule_name(step.rule)) +
                                      ": " + what);
  };

  if (step.rule == Rule::Init) {
    need(step.initiator < st.net.initiators.size(), "no such initiator");
    Initiator ini = st.net.initiators[step.initiator];
    st.net.initiators.erase(st.net.initiators.begin() +
                            static_cast<std::ptrdiff_t>(step.initiator));
    Session sess;
    sess.name = "s" + std::to_string(st.next_session++);
    sess.origin_global = ini.g;
    sess.origin_levels = ini.levels;
    for (const auto& p : participants(ini.g)) {
      MPtr mon = project(ini.g, p);
      PPtr proc = subst_channel(adequate_replacement(sc.repo, mon, lat),
                                session_chan(sess.name, p));
      auto li = ini.levels.find(p);
      need(li != ini.levels.end(), "participant has no level");
      sess.members.emplace(
          p, Member{mon, li->second, lat.bottom(), proc});
      out.actors.push_back(p);
    }
    out.session_name = sess.name;
    st.net.sessions.push_back(std::move(sess));
    gc_network(st.net);
    return out;
  }

  need(step.session < st.net.sessions.size(), "no such session");
  Session& sess = st.net.sessions[step.session];
  out.session_name = sess.name;

  switch (step.rule) {
    case Rule::UpLev: {
      auto it = sess.members.find(step.p);
      need(it != sess.members.end(), "no such member");
      Member& mem = it->second;
      std::vector<CondCap> conds = process_conds(mem.process, lat);
      need(step.cap_index < conds.size(), "no such conditional");
      mem.writing = lat.join(mem.writing, conds[step.cap_index].level);
      mem.process = conds[step.cap_index].cont;
      out.actors = {step.p};
      break;
    }
    case Rule::In:
    case Rule::InGlob: {
      auto it = sess.members.find(step.p);
      need(it != sess.members.end(), "no such member");
      Member& mem = it->second;
      auto mi = consumable(sess.queue, step.q, step.p);
      need(mi.has_value(), "no consumable message");
      Message msg = sess.queue[*mi];
      need(msg.label == step.label, "label mismatch");
      bool readable = lat.leq(lev_of(msg.payload, lat), mem.reading);
      need(readable == (step.rule == Rule::In), "readability guard");
      std::vector<RecvCap> inputs = process_inputs(mem.process);
      need(step.cap_index < inputs.size(), "no such input");
      const RecvCap& cap = inputs[step.cap_index];
      need(cap.peer == step.q && cap.label == step.label, "capability mismatch");
      sess.queue.erase(sess.queue.begin() + static_cast<std::ptrdiff_t>(*mi));
      mem.monitor = monitor_step(mem.monitor, true, step.q, step.label);
      if (step.rule == Rule::In) {
        mem.process = deliver(cap, msg.payload);
      } else {
        Nonce n{st.next_nonce++};
        mem.process = deliver(cap, n);
        out.nonce = n.index;
      }
      out.message = msg;
      out.actors = {step.p, step.q};
      break;
    }
    case Rule::InLoc: {
      auto it = sess.members.find(step.p);
      need(it != sess.members.end(), "no such member");
      Member& mem = it->second;
      auto mi = consumable(sess.queue, step.q, step.p);
      need(mi.has_value(), "no consumable message");
      Message msg = sess.queue[*mi];
      need(msg.label == step.label, "label mismatch");
      need(!lat.leq(lev_of(msg.payload, lat), mem.reading),
           "message is readable");
      sess.queue.erase(sess.queue.begin() + static_cast<std::ptrdiff_t>(*mi));
      mem.monitor = monitor_step(mem.monitor, true, step.q, step.label);
      mem.process =
          subst_channel(adequate_replacement(sc.repo, mem.monitor, lat),
                        session_chan(sess.name, step.p));
      out.message = msg;
      out.actors = {step.p, step.q};
      break;
    }
    case Rule::Out:
    case Rule::OutGlob: {
      auto it = sess.members.find(step.p);
      need(it != sess.members.end(), "no such member");
      Member& mem = it->second;
      std::vector<SendCap> outputs = process_outputs(mem.process, lat);
      need(step.cap_index < outputs.size(), "no such output");
      const SendCap& cap = outputs[step.cap_index];
      need(cap.peer == step.q && cap.label == step.label, "capability mismatch");
      bool clean =
          is_nonce(cap.value) || lat.leq(mem.writing, lev_of(cap.value, lat));
      need(clean == (step.rule == Rule::Out), "writability guard");
      mem.monitor = monitor_step(mem.monitor, false, step.q, step.label);
      mem.process = cap.cont;
      Message msg{step.p, step.q, step.label, cap.value};
      if (step.rule == Rule::OutGlob) {
        auto rit = sess.members.find(step.q);
        need(rit != sess.members.end(), "receiver absent");
        Nonce n{st.next_nonce++};
        msg.payload = n;
        out.nonce = n.index;
        mem.reading = lat.meet(mem.reading, rit->second.reading);
      }
      sess.queue.push_back(msg);
      out.message = msg;
      out.actors = {step.p, step.q};
      break;
    }
    case Rule::OutLoc: {
      auto it = sess.members.find(step.p);
      need(it != sess.members.end(), "no such member");
      Member& mem = it->second;
      auto rit = sess.members.find(step.q);
      need(rit != sess.members.end(), "receiver absent");
      Member& rec = rit->second;
      std::vector<SendCap> outputs = process_outputs(mem.process, lat);
      need(step.cap_index < outputs.size(), "no such output");
      const SendCap& cap = outputs[step.cap_index];
      need(cap.peer == step.q && cap.label == step.label, "capability mismatch");
      need(!is_nonce(cap.value) &&
               !lat.leq(mem.writing, lev_of(cap.value, lat)),
           "output is writable");
      mem.monitor = monitor_step(mem.monitor, false, step.q, step.label);
      mem.process = cap.cont;
      mem.reading = lat.meet(mem.reading, rec.reading);
      rec.monitor = erase_input(rec.monitor, step.p, step.label);
      rec.process =
          subst_channel(adequate_replacement(sc.repo, rec.monitor, lat),
                        session_chan(sess.name, step.q));
      out.actors = {step.p, step.q};
      break;
    }
    case Rule::Refresh: {
      std::set<Participant> tainted = taint_set(sess, step.nonce);
      need(!tainted.empty(), "nonce not present");
      for (const auto& p : tainted) sess.members.erase(p);
      std::erase_if(sess.queue, [&](const Message& m) {
        return tainted.count(m.sender) || tainted.count(m.receiver);
      });
      if (auto rep = policy_replacement(sc, sess))
        st.net.initiators.push_back(Initiator{rep->first, rep->second});
      out.nonce = step.nonce;
      out.actors.assign(tainted.begin(), tainted.end());
      break;
    }
    default:
      throw InapplicableStep("unknown rule");
  }

  gc_network(st.net);
  return out;
}

}  // namespace sessmon

#endif  // SESSMON_SEMANTICS_HPP_
