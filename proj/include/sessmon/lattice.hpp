// SPDX-License-Identifier: Apache-2.0

#ifndef SESSMON_LATTICE_HPP_
#define SESSMON_LATTICE_HPP_

#include <cstddef>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sessmon/errors.hpp"

namespace sessmon {

// A security level, identified by name within the scenario's lattice.
struct Level {
  std::string name;

  friend bool operator==(const Level& a, const Level& b) {
    return a.name == b.name;
  }
  friend bool operator!=(const Level& a, const Level& b) { return !(a == b); }
  friend bool operator<(const Level& a, const Level& b) {
    return a.name < b.name;
  }
};

// Finite security lattice. Built from a declared element set and a Hasse
// edge list; the constructor computes the reflexive-transitive closure,
// verifies the lattice axioms, and precomputes join/meet tables.
// Immutable after construction.
class Lattice {
 public:
  static Lattice validate(const std::vector<std::string>& elements,
                          const std::vector<std::pair<std::string, std::string>>& edges) {
    Lattice lat;
    lat.edges_ = edges;
    if (elements.empty()) throw NotALattice("lattice has no elements");
    for (const auto& e : elements) {
      if (lat.index_.count(e))
        throw NotALattice("duplicate element '" + e + "'");
      lat.index_[e] = lat.names_.size();
      lat.names_.push_back(e);
    }
    const std::size_t n = lat.names_.size();
    lat.leq_.assign(n * n, false);
    for (std::size_t i = 0; i < n; ++i) lat.leq_[i * n + i] = true;
    for (const auto& [lo, hi] : edges) {
      auto a = lat.index_.find(lo);
      auto b = lat.index_.find(hi);
      if (a == lat.index_.end() || b == lat.index_.end())
        throw NotALattice("edge (" + lo + "," + hi +
                          ") references an undeclared element");
      lat.leq_[a->second * n + b->second] = true;
    }
    // Warshall closure.
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        if (lat.leq_[i * n + k])
          for (std::size_t j = 0; j < n; ++j)
            if (lat.leq_[k * n + j]) lat.leq_[i * n + j] = true;
    // Antisymmetry.
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (lat.leq_[i * n + j] && lat.leq_[j * n + i])
          throw NotALattice("order cycle through '" + lat.names_[i] +
                            "' and '" + lat.names_[j] + "'");
    // Unique least upper / greatest lower bound for every pair.
    lat.join_.assign(n * n, 0);
    lat.meet_.assign(n * n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        int jidx = lat.bound_of(i, j, /*upper=*/true);
        if (jidx < 0)
          throw NotALattice("elements '" + lat.names_[i] + "' and '" +
                            lat.names_[j] + "' have no unique join");
        int midx = lat.bound_of(i, j, /*upper=*/false);
        if (midx < 0)
          throw NotALattice("elements '" + lat.names_[i] + "' and '" +
                            lat.names_[j] + "' have no unique meet");
        lat.join_[i * n + j] = static_cast<int>(jidx);
        lat.meet_[i * n + j] = static_cast<int>(midx);
      }
    }
    // A lattice with all pairwise joins/meets has unique extrema.
    std::size_t bot = 0, top = 0;
    for (std::size_t i = 1; i < n; ++i) {
      bot = static_cast<std::size_t>(lat.meet_[bot * n + i]);
      top = static_cast<std::size_t>(lat.join_[top * n + i]);
    }
    lat.bottom_ = bot;
    lat.top_ = top;
    return lat;
  }

  bool contains(const std::string& name) const { return index_.count(name); }

  bool leq(const Level& a, const Level& b) const {
    return leq_[id(a) * names_.size() + id(b)];
  }
  Level join(const Level& a, const Level& b) const {
    return level(join_[id(a) * names_.size() + id(b)]);
  }
  Level meet(const Level& a, const Level& b) const {
    return level(meet_[id(a) * names_.size() + id(b)]);
  }
  Level bottom() const { return level(bottom_); }
  Level top() const { return level(top_); }

  const std::vector<std::string>& elements() const { return names_; }
  // The edge list the lattice was built from (pre-closure), as declared.
  const std::vector<std::pair<std::string, std::string>>& hasse() const {
    return edges_;
  }
  std::size_t size() const { return names_.size(); }

  Level level(std::size_t i) const { return Level{names_.at(i)}; }

 private:
  Lattice() = default;

  std::size_t id(const Level& l) const {
    auto it = index_.find(l.name);
    if (it == index_.end())
      throw ForeignLevel("level '" + l.name + "' is not in the lattice");
    return it->second;
  }

  // Least upper bound (upper=true) or greatest lower bound of i,j;
  // -1 when it does not exist or is not unique.
  int bound_of(std::size_t i, std::size_t j, bool upper) const {
    const std::size_t n = names_.size();
    auto le = [&](std::size_t a, std::size_t b) { return leq_[a * n + b]; };
    std::vector<std::size_t> bounds;
    for (std::size_t z = 0; z < n; ++z) {
      bool ok = upper ? (le(i, z) && le(j, z)) : (le(z, i) && le(z, j));
      if (ok) bounds.push_back(z);
    }
    for (std::size_t z : bounds) {
      bool extreme = true;
      for (std::size_t w : bounds) {
        bool zw = upper ? le(z, w) : le(w, z);
        if (!zw) {
          extreme = false;
          break;
        }
      }
      if (extreme) return static_cast<int>(z);
    }
    return -1;
  }

  std::vector<std::string> names_;
  std::vector<std::pair<std::string, std::string>> edges_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<bool> leq_;
  std::vector<int> join_;
  std::vector<int> meet_;
  std::size_t bottom_ = 0;
  std::size_t top_ = 0;
};

}  // namespace sessmon

#endif  // SESSMON_LATTICE_HPP_
