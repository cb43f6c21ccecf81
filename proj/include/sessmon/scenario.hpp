// SPDX-License-Identifier: Apache-2.0

#ifndef SESSMON_SCENARIO_HPP_
#define SESSMON_SCENARIO_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sessmon/lattice.hpp"
#include "sessmon/projection.hpp"
#include "sessmon/syntax.hpp"
#include "sessmon/typing.hpp"

namespace sessmon {

// One (P, T) pair of the process repository: a named process with its
// label-sort annotations and its declared type.
struct RepoEntry {
  std::string name;
  PPtr process;
  std::map<Label, Sort> label_sorts;
  TPtr declared_type;
};

struct NamedGlobal {
  std::string name;
  GPtr g;
  std::map<Participant, Level> levels;
};

inline SecurityGlobalType security_global(const NamedGlobal& ng) {
  return SecurityGlobalType{ng.g, ng.levels};
}

enum class StrategyKind { Random, Exhaustive, Scripted };

struct Strategy {
  StrategyKind kind = StrategyKind::Random;
  std::vector<Rule> priority;  // Scripted: highest first; the rest follow
};

// The adaptation function F: what replaces a refreshed participant group.
enum class PolicyKind { Terminate, Restart, Template };

struct Policy {
  PolicyKind kind = PolicyKind::Terminate;
  std::string template_name;  // PolicyKind::Template
};

struct Scenario {
  Lattice lattice;
  std::vector<NamedGlobal> globals;
  std::size_t start_index = 0;  // the global issued by the initial initiator
  std::vector<RepoEntry> repo;
  Policy policy;
  Strategy strategy;
  std::uint64_t seed = 0;
  std::size_t depth_bound = 100;
  std::size_t branch_cap = 10000;
};

inline const NamedGlobal* find_global(const Scenario& sc,
                                      const std::string& name) {
  for (const auto& g : sc.globals)
    if (g.name == name) return &g;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Validation. Returns a complete list of problems; empty means valid.
// ---------------------------------------------------------------------------

inline std::vector<std::string> validate_scenario(const Scenario& sc) {
  std::vector<std::string> errs;
  if (sc.globals.empty()) errs.push_back("scenario declares no global type");
  if (sc.start_index >= sc.globals.size() && !sc.globals.empty())
    errs.push_back("start global index out of range");
  {
    std::map<std::string, int> seen;
    for (const auto& g : sc.globals)
      if (++seen[g.name] == 2)
        errs.push_back("duplicate global name '" + g.name + "'");
  }
  for (const auto& g : sc.globals)
    for (const auto& e : well_formed(security_global(g), sc.lattice))
      errs.push_back("global '" + g.name + "': " + e);
  {
    std::map<std::string, int> seen;
    for (const auto& r : sc.repo)
      if (++seen[r.name] == 2)
        errs.push_back("duplicate repository name '" + r.name + "'");
  }
  for (const auto& r : sc.repo) {
    std::vector<std::string> perrs = validate_process(r.process);
    for (const auto& e : perrs) errs.push_back("process '" + r.name + "': " + e);
    if (auto ch = channel_of(r.process); ch && ch->is_session()) {
      errs.push_back("process '" + r.name +
                     "' uses a session channel; repository processes "
                     "communicate on a user channel");
      continue;
    }
    if (!r.declared_type) {
      errs.push_back("process '" + r.name + "' has no declared type");
      continue;
    }
    if (auto te = validate_type(r.declared_type)) {
      errs.push_back("type of '" + r.name + "': " + te->bullet + " in " +
                     te->where);
      continue;
    }
    if (!perrs.empty()) continue;
    try {
      Channel c = channel_of(r.process).value_or(user_chan("y"));
      TPtr synth = synthesize(r.process, c);
      if (!equal_type(synth, r.declared_type))
        errs.push_back("process '" + r.name + "' has type " +
                       canonical_key(synth) + ", not the declared " +
                       canonical_key(r.declared_type));
    } catch (const IllTyped& e) {
      errs.push_back("process '" + r.name + "': " + e.what());
    }
  }
  if (sc.policy.kind == PolicyKind::Template &&
      !find_global(sc, sc.policy.template_name))
    errs.push_back("policy names unknown global '" + sc.policy.template_name +
                   "'");
  if (sc.depth_bound < 1) errs.push_back("depth bound must be at least 1");
  {
    std::map<Rule, int> seen;
    for (Rule r : sc.strategy.priority)
      if (++seen[r] == 2)
        errs.push_back(std::string("rule '") + rule_name(r) +
                       "' listed twice in the strategy priority");
  }
  return errs;
}

// ---------------------------------------------------------------------------
// Repository lookup: the first declared pair whose type is adequate for the
// monitor, in declaration order; the canonical process as fallback.
// ---------------------------------------------------------------------------

inline PPtr adequate_replacement(const std::vector<RepoEntry>& repo,
                                 const MPtr& m, const Lattice& lat) {
  for (const auto& r : repo)
    if (adequate(r.declared_type, m)) return r.process;
  return canonical_process(m, lat).process;
}

// Resolve F for a refreshed group: the security global type of the session
// the replacement choreography is issued for, or nothing under `terminate`.
inline std::optional<std::pair<GPtr, std::map<Participant, Level>>>
policy_replacement(const Scenario& sc, const Session& session) {
  switch (sc.policy.kind) {
    case PolicyKind::Terminate:
      return std::nullopt;
    case PolicyKind::Restart:
      return std::make_pair(session.origin_global, session.origin_levels);
    case PolicyKind::Template: {
      const NamedGlobal* g = find_global(sc, sc.policy.template_name);
      if (!g) return std::nullopt;  // precluded by validate_scenario
      return std::make_pair(g->g, g->levels);
    }
  }
  return std::nullopt;
}

}  // namespace sessmon

#endif  // SESSMON_SCENARIO_HPP_
