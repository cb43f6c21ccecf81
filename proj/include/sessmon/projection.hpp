// SPDX-License-Identifier: Apache-2.0

#ifndef SESSMON_PROJECTION_HPP_
#define SESSMON_PROJECTION_HPP_

#include <map>
#include <set>
#include <string>
#include <vector>

#include "sessmon/print.hpp"
#include "sessmon/syntax.hpp"

namespace sessmon {

namespace detail {

// Whether a subterm mentions no recursion variable bound outside of it.
inline bool gtype_closed_rec(const GPtr& g, std::set<std::string>& bound) {
  return std::visit(
      overloaded{[&](const GComm& c) {
                   for (const auto& b : c.branches)
                     if (!gtype_closed_rec(b.cont, bound)) return false;
                   return true;
                 },
                 [&](const GVar& v) { return bound.count(v.name) > 0; },
                 [&](const GMu& m) {
                   auto [it, fresh] = bound.insert(m.var);
                   bool ok = gtype_closed_rec(m.body, bound);
                   if (fresh) bound.erase(it);
                   return ok;
                 },
                 [&](const GEnd&) { return true; }},
      g->node);
}

inline bool gtype_closed(const GPtr& g) {
  std::set<std::string> bound;
  return gtype_closed_rec(g, bound);
}

inline MPtr project_rec(const GPtr& g, const Participant& p,
                        const std::string& path) {
  // A participant absent from a closed subterm plays no further role. An
  // open subterm can re-involve the participant through its loop, so it is
  // projected structurally.
  if (!participants(g).count(p) && gtype_closed(g)) return m_end();
  return std::visit(
      overloaded{
          [&](const GComm& c) -> MPtr {
            auto sub_path = [&](const GBranch& b) {
              return path.empty() ? b.label : path + "." + b.label;
            };
            if (c.from == p) {
              std::vector<MBranch> bs;
              bs.reserve(c.branches.size());
              for (const auto& b : c.branches)
                bs.push_back(
                    {b.label, b.sort, project_rec(b.cont, p, sub_path(b))});
              return m_out(c.to, std::move(bs));
            }
            if (c.to == p) {
              std::vector<MBranch> bs;
              bs.reserve(c.branches.size());
              for (const auto& b : c.branches)
                bs.push_back(
                    {b.label, b.sort, project_rec(b.cont, p, sub_path(b))});
              return m_in(c.from, std::move(bs));
            }
            // Uninvolved: all branch projections must agree.
            MPtr common;
            std::string common_key;
            for (const auto& b : c.branches) {
              MPtr m = project_rec(b.cont, p, sub_path(b));
              std::string key = canonical_key(m);
              if (!common) {
                common = m;
                common_key = key;
              } else if (key != common_key) {
                throw UndefinedProjection(
                    "projection onto '" + p + "' undefined at '" +
                    (path.empty() ? std::string("<root>") : path) +
                    "': branches of " + c.from + " -> " + c.to +
                    " project to different monitors (" + common_key + " vs " +
                    key + ")");
              }
            }
            return common;
          },
          [&](const GVar& v) -> MPtr { return m_var(v.name); },
          [&](const GMu& m) -> MPtr {
            MPtr body = project_rec(m.body, p, path);
            if (const auto* v = std::get_if<MVar>(&body->node);
                v && v->name == m.var)
              return m_end();
            return m_mu(m.var, body);
          },
          [&](const GEnd&) -> MPtr { return m_end(); }},
      g->node);
}

}  // namespace detail

// G restricted to participant p. Throws UndefinedProjection when branch
// projections of a communication p is not involved in disagree.
inline MPtr project(const GPtr& g, const Participant& p) {
  return detail::project_rec(g, p, "");
}

// A security global type is well formed when the underlying global type
// satisfies its syntactic invariants, the level assignment covers exactly
// its participants, every level names a lattice element, and the projection
// onto every participant is defined.
inline std::vector<std::string> well_formed(const SecurityGlobalType& sg,
                                            const Lattice& lat) {
  std::vector<std::string> errs = validate_global(sg.g);
  std::set<Participant> parts = participants(sg.g);
  for (const auto& p : parts)
    if (!sg.levels.count(p))
      errs.push_back("no reading level assigned to participant '" + p + "'");
  for (const auto& [p, l] : sg.levels) {
    if (!parts.count(p))
      errs.push_back("level assigned to non-participant '" + p + "'");
    if (!lat.contains(l.name))
      errs.push_back("level '" + l.name + "' of participant '" + p +
                     "' is not a lattice element");
  }
  if (!errs.empty()) return errs;  // projection assumes sane syntax
  for (const auto& p : parts) {
    try {
      project(sg.g, p);
    } catch (const UndefinedProjection& e) {
      errs.push_back(e.what());
    }
  }
  return errs;
}

}  // namespace sessmon

#endif  // SESSMON_PROJECTION_HPP_
