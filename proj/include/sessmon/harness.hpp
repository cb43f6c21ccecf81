// SPDX-License-Identifier: Apache-2.0

#ifndef SESSMON_HARNESS_HPP_
#define SESSMON_HARNESS_HPP_

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sessmon/print.hpp"
#include "sessmon/scenario.hpp"
#include "sessmon/semantics.hpp"
#include "sessmon/trace.hpp"

namespace sessmon {

// ---------------------------------------------------------------------------
// Canonical state keys: a rendering of the network that is invariant under
// session renaming, alpha conversion, nonce renumbering, queue commutation
// of independent messages, and the supply counters. Used to deduplicate
// states during exploration.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string renumber_nonces(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  std::map<std::string, std::uint64_t> seen;
  for (std::size_t i = 0; i < s.size();) {
    if (s[i] == '#' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1]))) {
      std::size_t j = i + 1;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j])))
        ++j;
      std::string idx = s.substr(i + 1, j - i - 1);
      auto [it, fresh] = seen.emplace(idx, seen.size());
      out += '#';
      out += std::to_string(it->second);
      i = j;
      (void)fresh;
    } else {
      out += s[i++];
    }
  }
  return out;
}

}  // namespace detail

inline std::string canonical_state_key(const EngineState& st) {
  std::vector<std::string> session_keys;
  for (const Session& s : st.net.sessions) {
    Session sorted = s;
    std::stable_sort(sorted.queue.begin(), sorted.queue.end(),
                     [](const Message& a, const Message& b) {
                       return std::tie(a.sender, a.receiver) <
                              std::tie(b.sender, b.receiver);
                     });
    std::map<std::string, std::string> alias{{s.name, "s"}};
    session_keys.push_back(
        render_session(sorted, RenderOpts{true, &alias}));
  }
  std::sort(session_keys.begin(), session_keys.end());
  std::vector<std::string> initiator_keys;
  for (const Initiator& i : st.net.initiators)
    initiator_keys.push_back(render_initiator(i, RenderOpts{true, nullptr}));
  std::sort(initiator_keys.begin(), initiator_keys.end());
  std::ostringstream os;
  for (const auto& k : session_keys) os << k << '\n';
  os << "--\n";
  for (const auto& k : initiator_keys) os << k << '\n';
  return detail::renumber_nonces(os.str());
}

// ---------------------------------------------------------------------------
// Runs. A chooser picks one index among the (canonically ordered) enabled
// steps; the run stops at the depth bound or when nothing is enabled.
// ---------------------------------------------------------------------------

struct RunResult {
  Trace trace;
  EngineState final_state;
  bool exhausted = false;  // stopped because nothing was enabled
};

template <class Chooser>
RunResult run_with(const Scenario& sc, std::size_t depth, Chooser&& choose) {
  RunResult res;
  res.trace.lattice = sc.lattice;
  EngineState state = initial_state(sc);
  res.trace.checkpoints.push_back(state);
  for (std::size_t i = 0; i < depth; ++i) {
    std::vector<ReductionStep> steps = enabled_steps(state, sc);
    if (steps.empty()) {
      res.exhausted = true;
      break;
    }
    std::size_t pick = choose(steps);
    Applied applied = apply_step(state, steps[pick], sc);
    res.trace.records.push_back(
        make_record(state, steps[pick], applied, res.trace.records.size()));
    state = std::move(applied.state);
    res.trace.checkpoints.push_back(state);
  }
  res.final_state = std::move(state);
  return res;
}

// Uniform choice from a deterministic 64-bit generator: same seed, same trace.
inline RunResult run_random(const Scenario& sc, std::uint64_t seed,
                            std::size_t depth) {
  std::mt19937_64 gen(seed);
  return run_with(sc, depth, [&](const std::vector<ReductionStep>& steps) {
    return static_cast<std::size_t>(gen() % steps.size());
  });
}

inline RunResult run_random(const Scenario& sc) {
  return run_random(sc, sc.seed, sc.depth_bound);
}

// Scripted choice: the enabled step whose rule ranks highest in the priority
// list (unlisted rules follow in declaration order); canonical order breaks
// ties.
inline RunResult run_scripted(const Scenario& sc, std::size_t depth) {
  auto rank = [&](Rule r) -> std::size_t {
    for (std::size_t i = 0; i < sc.strategy.priority.size(); ++i)
      if (sc.strategy.priority[i] == r) return i;
    return sc.strategy.priority.size() + static_cast<std::size_t>(r);
  };
  return run_with(sc, depth, [&](const std::vector<ReductionStep>& steps) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < steps.size(); ++i)
      if (rank(steps[i].rule) < rank(steps[best].rule)) best = i;
    return best;
  });
}

// Run the scenario under its declared strategy (Exhaustive falls back to the
// seeded random schedule; exploration is a separate entry point).
inline RunResult run_scenario(const Scenario& sc,
                              std::optional<std::uint64_t> seed = {},
                              std::optional<std::size_t> depth = {}) {
  std::size_t d = depth.value_or(sc.depth_bound);
  if (sc.strategy.kind == StrategyKind::Scripted) return run_scripted(sc, d);
  return run_random(sc, seed.value_or(sc.seed), d);
}

// ---------------------------------------------------------------------------
// Bounded exhaustive exploration (breadth-first, deduplicating states up to
// structural equivalence and alpha).
// ---------------------------------------------------------------------------

struct ExplorationReport {
  std::size_t states = 0;
  std::size_t edges = 0;
  std::size_t terminal_states = 0;       // no enabled steps
  std::size_t stuck_nonterminal = 0;     // terminal but a member remains
  bool budget_exceeded = false;
  InvariantReport invariants;            // clauses (a), (b) per edge; (c) per state
  std::vector<std::string> stuck_examples;
};

inline ExplorationReport explore(const Scenario& sc, std::size_t depth_bound,
                                 std::size_t branch_cap) {
  ExplorationReport rep;
  auto check_state = [&](const EngineState& st, std::size_t at) {
    Trace probe;
    probe.lattice = sc.lattice;
    probe.checkpoints.push_back(st);
    for (auto& b : check_invariants(probe).breaches) {
      b.index = at;
      rep.invariants.breaches.push_back(std::move(b));
    }
  };
  auto check_edge = [&](const EngineState& pre, const ReductionStep& step,
                        const Applied& applied, std::size_t at) {
    Trace probe;
    probe.lattice = sc.lattice;
    probe.records.push_back(make_record(pre, step, applied, 0));
    for (auto& b : check_invariants(probe).breaches) {
      b.index = at;
      rep.invariants.breaches.push_back(std::move(b));
    }
  };

  EngineState init = initial_state(sc);
  std::set<std::string> visited{canonical_state_key(init)};
  std::deque<std::pair<EngineState, std::size_t>> frontier;
  frontier.emplace_back(init, 0);
  rep.states = 1;
  check_state(init, 0);

  while (!frontier.empty()) {
    auto [state, depth] = std::move(frontier.front());
    frontier.pop_front();
    std::vector<ReductionStep> steps = enabled_steps(state, sc);
    if (steps.empty()) {
      ++rep.terminal_states;
      bool members_left = false;
      for (const auto& s : state.net.sessions)
        if (!s.members.empty()) members_left = true;
      if (members_left) {
        ++rep.stuck_nonterminal;
        if (rep.stuck_examples.size() < 3)
          rep.stuck_examples.push_back(render_network(state.net));
      }
      continue;
    }
    if (depth >= depth_bound) continue;  // cut, not terminal
    for (const ReductionStep& step : steps) {
      Applied applied = apply_step(state, step, sc);
      ++rep.edges;
      check_edge(state, step, applied, depth);
      std::string key = canonical_state_key(applied.state);
      if (visited.count(key)) continue;
      if (visited.size() >= branch_cap) {
        rep.budget_exceeded = true;
        continue;
      }
      visited.insert(std::move(key));
      ++rep.states;
      check_state(applied.state, depth + 1);
      frontier.emplace_back(std::move(applied.state), depth + 1);
    }
  }
  return rep;
}

inline ExplorationReport explore(const Scenario& sc) {
  return explore(sc, sc.depth_bound, sc.branch_cap);
}

}  // namespace sessmon

#endif  // SESSMON_HARNESS_HPP_
