// SPDX-License-Identifier: Apache-2.0

#ifndef SESSMON_TRACE_HPP_
#define SESSMON_TRACE_HPP_

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sessmon/print.hpp"
#include "sessmon/semantics.hpp"
#include "sessmon/syntax.hpp"
#include "sessmon/typing.hpp"

namespace sessmon {

// ---------------------------------------------------------------------------
// Trace records. One line per reduction step; fixed field order:
//   INDEX rule=R session=S actors=(p,q) msg=p>q:l(5@hi) nonce=#0
//     violation=none levels=(p:hi/lo->hi/lo,q:lo/lo->-)
// '-' stands for an absent value; in a levels entry it covers one whole side
// (a member that does not exist before or after the step).
// ---------------------------------------------------------------------------

struct LevelChange {
  std::optional<std::pair<Level, Level>> before;  // (reading, writing)
  std::optional<std::pair<Level, Level>> after;
};

enum class Violation { None, Read, Write };

inline const char* violation_name(Violation v) {
  switch (v) {
    case Violation::None: return "none";
    case Violation::Read: return "read";
    case Violation::Write: return "write";
  }
  return "?";
}

inline Violation violation_of(Rule r) {
  if (r == Rule::InGlob || r == Rule::InLoc) return Violation::Read;
  if (r == Rule::OutGlob || r == Rule::OutLoc) return Violation::Write;
  return Violation::None;
}

struct TraceRecord {
  std::size_t index = 0;
  Rule rule = Rule::Init;
  std::string session;  // empty = none
  std::vector<Participant> actors;
  std::optional<Message> message;
  std::optional<std::uint64_t> nonce;
  Violation violation = Violation::None;
  std::vector<std::pair<Participant, LevelChange>> levels;  // sorted
};

struct Trace {
  std::optional<Lattice> lattice;  // set whenever records exist
  std::vector<TraceRecord> records;
  // In-memory runs keep state checkpoints for the subject-reduction clause:
  // checkpoints[0] is the initial state, checkpoints[i+1] follows record i.
  std::vector<EngineState> checkpoints;
};

// ---------------------------------------------------------------------------
// Record construction from an applied step.
// ---------------------------------------------------------------------------

namespace detail {

inline const Session* find_session(const Network& net,
                                   const std::string& name) {
  for (const auto& s : net.sessions)
    if (s.name == name) return &s;
  return nullptr;
}

}  // namespace detail

inline TraceRecord make_record(const EngineState& pre,
                               const ReductionStep& step,
                               const Applied& applied, std::size_t index) {
  TraceRecord r;
  r.index = index;
  r.rule = step.rule;
  r.session = applied.session_name;
  r.actors = applied.actors;
  r.message = applied.message;
  r.nonce = applied.nonce;
  r.violation = violation_of(step.rule);
  const Session* before = detail::find_session(pre.net, r.session);
  const Session* after = detail::find_session(applied.state.net, r.session);
  std::map<Participant, LevelChange> changes;
  if (before)
    for (const auto& [p, mem] : before->members)
      changes[p].before = std::make_pair(mem.reading, mem.writing);
  if (after)
    for (const auto& [p, mem] : after->members)
      changes[p].after = std::make_pair(mem.reading, mem.writing);
  r.levels.assign(changes.begin(), changes.end());
  return r;
}

// ---------------------------------------------------------------------------
// Emission.
// ---------------------------------------------------------------------------

namespace detail {

inline void emit_side(const std::optional<std::pair<Level, Level>>& side,
                      std::ostream& os) {
  if (!side) {
    os << '-';
    return;
  }
  os << side->first.name << '/' << side->second.name;
}

}  // namespace detail

inline void emit_record(const TraceRecord& r, std::ostream& os) {
  os << r.index << " rule=" << rule_name(r.rule) << " session="
     << (r.session.empty() ? "-" : r.session) << " actors=";
  if (r.actors.empty()) {
    os << '-';
  } else {
    os << '(';
    for (std::size_t i = 0; i < r.actors.size(); ++i)
      os << (i ? "," : "") << r.actors[i];
    os << ')';
  }
  os << " msg=" << (r.message ? render(*r.message) : "-");
  os << " nonce=";
  if (r.nonce)
    os << '#' << *r.nonce;
  else
    os << '-';
  os << " violation=" << violation_name(r.violation);
  os << " levels=(";
  for (std::size_t i = 0; i < r.levels.size(); ++i) {
    if (i) os << ',';
    os << r.levels[i].first << ':';
    detail::emit_side(r.levels[i].second.before, os);
    os << "->";
    detail::emit_side(r.levels[i].second.after, os);
  }
  os << ")\n";
}

// Empty traces emit nothing; otherwise a lattice header line precedes the
// records so a checker can reconstruct the order.
inline void emit_trace(const Trace& t, std::ostream& os) {
  if (t.records.empty()) return;
  if (!t.lattice) throw TraceError("trace has records but no lattice");
  os << "lattice elements=";
  const auto& names = t.lattice->elements();
  for (std::size_t i = 0; i < names.size(); ++i)
    os << (i ? "," : "") << names[i];
  os << " edges=";
  const auto& edges = t.lattice->hasse();
  for (std::size_t i = 0; i < edges.size(); ++i)
    os << (i ? "," : "") << edges[i].first << '<' << edges[i].second;
  os << '\n';
  for (const auto& r : t.records) emit_record(r, os);
}

inline std::string emit_trace(const Trace& t) {
  std::ostringstream os;
  emit_trace(t, os);
  return os.str();
}

// ---------------------------------------------------------------------------
// Parsing (the exact inverse of emission).
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

inline std::string field_value(const std::string& token,
                               const std::string& name, std::size_t lineno) {
  std::string prefix = name + "=";
  if (token.rfind(prefix, 0) != 0)
    throw TraceError("line " + std::to_string(lineno) + ": expected field '" +
                     name + "', found '" + token + "'");
  return token.substr(prefix.size());
}

inline ExtendedValue parse_payload(const std::string& s, std::size_t lineno) {
  if (!s.empty() && s[0] == '#')
    return Nonce{std::stoull(s.substr(1))};
  auto at = s.find('@');
  if (at == std::string::npos)
    throw TraceError("line " + std::to_string(lineno) + ": bad payload '" + s +
                     "'");
  std::string val = s.substr(0, at);
  Level lev{s.substr(at + 1)};
  if (val == "true") return make_bool(true, lev);
  if (val == "false") return make_bool(false, lev);
  return make_nat(std::stoll(val), lev);
}

inline std::optional<std::pair<Level, Level>> parse_side(
    const std::string& s, std::size_t lineno) {
  if (s == "-") return std::nullopt;
  auto slash = s.find('/');
  if (slash == std::string::npos)
    throw TraceError("line " + std::to_string(lineno) + ": bad levels '" + s +
                     "'");
  return std::make_pair(Level{s.substr(0, slash)}, Level{s.substr(slash + 1)});
}

}  // namespace detail

inline Trace parse_trace(std::istream& in) {
  Trace t;
  std::string line;
  std::size_t lineno = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (!saw_header) {
      saw_header = true;
      std::istringstream ls(line);
      std::string word, elements_tok, edges_tok;
      ls >> word >> elements_tok >> edges_tok;
      if (word != "lattice")
        throw TraceError("line " + std::to_string(lineno) +
                         ": expected lattice header");
      std::string els = detail::field_value(elements_tok, "elements", lineno);
      std::string eds = detail::field_value(edges_tok, "edges", lineno);
      std::vector<std::string> elements = detail::split(els, ',');
      std::vector<std::pair<std::string, std::string>> edges;
      if (!eds.empty())
        for (const auto& e : detail::split(eds, ',')) {
          auto lt = e.find('<');
          if (lt == std::string::npos)
            throw TraceError("line " + std::to_string(lineno) +
                             ": bad edge '" + e + "'");
          edges.emplace_back(e.substr(0, lt), e.substr(lt + 1));
        }
      t.lattice = Lattice::validate(elements, edges);
      continue;
    }
    std::istringstream ls(line);
    std::vector<std::string> tok;
    std::string w;
    while (ls >> w) tok.push_back(w);
    if (tok.size() != 8)
      throw TraceError("line " + std::to_string(lineno) +
                       ": expected 8 fields, found " +
                       std::to_string(tok.size()));
    TraceRecord r;
    r.index = std::stoull(tok[0]);
    if (r.index != t.records.size())
      throw TraceError("line " + std::to_string(lineno) +
                       ": record indices must be dense from 0");
    std::string rname = detail::field_value(tok[1], "rule", lineno);
    auto rule = rule_from_name(rname);
    if (!rule)
      throw TraceError("line " + std::to_string(lineno) + ": unknown rule '" +
                       rname + "'");
    r.rule = *rule;
    std::string sess = detail::field_value(tok[2], "session", lineno);
    r.session = sess == "-" ? "" : sess;
    std::string actors = detail::field_value(tok[3], "actors", lineno);
    if (actors != "-") {
      if (actors.size() < 2 || actors.front() != '(' || actors.back() != ')')
        throw TraceError("line " + std::to_string(lineno) + ": bad actors '" +
                         actors + "'");
      for (const auto& a :
           detail::split(actors.substr(1, actors.size() - 2), ','))
        r.actors.push_back(a);
    }
    std::string msg = detail::field_value(tok[4], "msg", lineno);
    if (msg != "-") {
      auto gt = msg.find('>');
      auto colon = msg.find(':', gt == std::string::npos ? 0 : gt);
      auto open = msg.find('(', colon == std::string::npos ? 0 : colon);
      if (gt == std::string::npos || colon == std::string::npos ||
          open == std::string::npos || msg.back() != ')')
        throw TraceError("line " + std::to_string(lineno) + ": bad msg '" +
                         msg + "'");
      Message m;
      m.sender = msg.substr(0, gt);
      m.receiver = msg.substr(gt + 1, colon - gt - 1);
      m.label = msg.substr(colon + 1, open - colon - 1);
      m.payload = detail::parse_payload(
          msg.substr(open + 1, msg.size() - open - 2), lineno);
      r.message = m;
    }
    std::string nonce = detail::field_value(tok[5], "nonce", lineno);
    if (nonce != "-") {
      if (nonce.empty() || nonce[0] != '#')
        throw TraceError("line " + std::to_string(lineno) + ": bad nonce '" +
                         nonce + "'");
      r.nonce = std::stoull(nonce.substr(1));
    }
    std::string viol = detail::field_value(tok[6], "violation", lineno);
    if (viol == "none")
      r.violation = Violation::None;
    else if (viol == "read")
      r.violation = Violation::Read;
    else if (viol == "write")
      r.violation = Violation::Write;
    else
      throw TraceError("line " + std::to_string(lineno) +
                       ": bad violation '" + viol + "'");
    if (r.violation != violation_of(r.rule))
      throw TraceError("line " + std::to_string(lineno) + ": rule " +
                       rule_name(r.rule) + " cannot carry violation=" + viol);
    std::string levels = detail::field_value(tok[7], "levels", lineno);
    if (levels.size() < 2 || levels.front() != '(' || levels.back() != ')')
      throw TraceError("line " + std::to_string(lineno) + ": bad levels '" +
                       levels + "'");
    std::string inner = levels.substr(1, levels.size() - 2);
    if (!inner.empty()) {
      for (const auto& entry : detail::split(inner, ',')) {
        auto colon = entry.find(':');
        auto arrow = entry.find("->", colon == std::string::npos ? 0 : colon);
        if (colon == std::string::npos || arrow == std::string::npos)
          throw TraceError("line " + std::to_string(lineno) +
                           ": bad levels entry '" + entry + "'");
        LevelChange c;
        c.before = detail::parse_side(
            entry.substr(colon + 1, arrow - colon - 1), lineno);
        c.after = detail::parse_side(entry.substr(arrow + 2), lineno);
        r.levels.emplace_back(entry.substr(0, colon), c);
      }
    }
    t.records.push_back(std::move(r));
  }
  return t;
}

inline Trace parse_trace(const std::string& text) {
  std::istringstream in(text);
  return parse_trace(in);
}

// ---------------------------------------------------------------------------
// Invariant checking, independent of the engine's own guards:
//   (a) an In record's payload level is below the receiver's prior reading
//       level;
//   (b) every enqueued payload respects the sender's prior writing level or
//       is a nonce; OutGlob payloads are always nonces;
//   (c) at every state checkpoint, each member's process synthesizes a type
//       adequate for its monitor (needs in-memory checkpoints);
//   (d) writing levels never decrease, reading levels never increase, and
//       consecutive mentions of a member agree across records.
// ---------------------------------------------------------------------------

struct Breach {
  std::size_t index = 0;  // record index (clause c: checkpoint index)
  char clause = '?';
  std::string detail;
};

struct InvariantReport {
  std::vector<Breach> breaches;
  bool ok() const { return breaches.empty(); }
};

inline InvariantReport check_invariants(const Trace& t) {
  InvariantReport rep;
  if (t.records.empty() && t.checkpoints.empty()) return rep;
  if (!t.lattice) {
    rep.breaches.push_back({0, '?', "trace has no lattice header"});
    return rep;
  }
  const Lattice& lat = *t.lattice;

  auto side_of = [](const TraceRecord& r, const Participant& p, bool before)
      -> std::optional<std::pair<Level, Level>> {
    for (const auto& [name, c] : r.levels)
      if (name == p) return before ? c.before : c.after;
    return std::nullopt;
  };

  for (const auto& r : t.records) {
    // (a) reads respect the prior reading level.
    if (r.rule == Rule::In) {
      if (!r.message || r.actors.empty()) {
        rep.breaches.push_back({r.index, 'a', "In record lacks message/actors"});
      } else {
        auto side = side_of(r, r.actors.front(), true);
        if (!side) {
          rep.breaches.push_back(
              {r.index, 'a', "receiver has no recorded levels"});
        } else if (!lat.leq(lev_of(r.message->payload, lat), side->first)) {
          rep.breaches.push_back(
              {r.index, 'a',
               "payload " + render(r.message->payload) + " above reading level " +
                   side->first.name});
        }
      }
    }
    // (b) enqueues respect the prior writing level; OutGlob sends nonces.
    if (r.rule == Rule::Out || r.rule == Rule::OutGlob) {
      if (!r.message || r.actors.empty()) {
        rep.breaches.push_back({r.index, 'b', "Out record lacks message/actors"});
      } else if (r.rule == Rule::OutGlob && !is_nonce(r.message->payload)) {
        rep.breaches.push_back(
            {r.index, 'b', "OutGlob enqueued a non-nonce payload"});
      } else if (!is_nonce(r.message->payload)) {
        auto side = side_of(r, r.actors.front(), true);
        if (!side) {
          rep.breaches.push_back(
              {r.index, 'b', "sender has no recorded levels"});
        } else if (!lat.leq(side->second, lev_of(r.message->payload, lat))) {
          rep.breaches.push_back(
              {r.index, 'b',
               "payload " + render(r.message->payload) +
                   " below writing level " + side->second.name});
        }
      }
    }
  }

  // (d) per-member monotonicity and continuity.
  std::map<std::pair<std::string, Participant>,
           std::optional<std::pair<Level, Level>>>
      last;
  for (const auto& r : t.records) {
    for (const auto& [p, c] : r.levels) {
      auto key = std::make_pair(r.session, p);
      auto it = last.find(key);
      if (it != last.end()) {
        const auto& prev = it->second;
        if (prev.has_value() != c.before.has_value() ||
            (prev && c.before &&
             (prev->first != c.before->first ||
              prev->second != c.before->second)))
          rep.breaches.push_back(
              {r.index, 'd', "levels of " + p + " in " + r.session +
                                 " disagree with their previous mention"});
      }
      if (c.before && c.after) {
        if (!lat.leq(c.after->first, c.before->first))
          rep.breaches.push_back(
              {r.index, 'd', "reading level of " + p + " increased"});
        if (!lat.leq(c.before->second, c.after->second))
          rep.breaches.push_back(
              {r.index, 'd', "writing level of " + p + " decreased"});
      }
      last[key] = c.after;
    }
  }

  // (c) subject reduction at checkpoints.
  for (std::size_t i = 0; i < t.checkpoints.size(); ++i) {
    for (const auto& sess : t.checkpoints[i].net.sessions) {
      for (const auto& [p, mem] : sess.members) {
        try {
          Channel c = channel_of(mem.process)
                          .value_or(session_chan(sess.name, p));
          TPtr ty = synthesize(mem.process, c);
          if (!adequate(ty, mem.monitor))
            rep.breaches.push_back(
                {i, 'c', "process of " + p + " in " + sess.name +
                             " has type " + canonical_key(ty) +
                             " inadequate for monitor " +
                             render(mem.monitor)});
        } catch (const IllTyped& e) {
          rep.breaches.push_back(
              {i, 'c', "process of " + p + " in " + sess.name +
                           " is ill-typed: " + e.what()});
        }
      }
    }
  }
  return rep;
}

}  // namespace sessmon

#endif  // SESSMON_TRACE_HPP_
