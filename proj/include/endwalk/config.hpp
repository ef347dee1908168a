#pragma once

#include <compare>
#include <string>
#include <vector>

#include "endwalk/template_graph.hpp"

namespace endwalk {

// Crossing pattern of a walk over one adhesion set: a SAW on the doubled
// adhesion graph, or empty. Vertices are positions in the canonical (A-side)
// port tuple of the gluing pair; every arc carries the absolute side its
// detour runs through (Role::A = through the A-side cone).
struct CrossingWalk {
  std::vector<int> verts;
  std::vector<Role> sides;

  bool empty() const { return verts.empty(); }
  auto operator<=>(const CrossingWalk&) const = default;
  bool operator==(const CrossingWalk&) const = default;
};

// A configuration (q, x, y) on a tree-edge type. Directions are stored as
// the class side they point toward; x points toward the start of the walk,
// y toward its end. The completion of (q, x, y) fills the cone on the
// opposite(x) side.
struct ConfigKey {
  int pair = -1;
  Role x = Role::A;
  Role y = Role::A;
  CrossingWalk q;

  bool is_empty() const { return q.empty(); }
  bool is_I() const { return x != y; }
  bool is_U() const { return x == y; }
  bool is_simple() const { return is_I() && q.verts.size() == 1; }
  // Boring: entry and exit on the same side and every detour on that side;
  // such a configuration carries no information across the edge.
  bool is_boring() const {
    if (x != y) return false;
    for (Role s : q.sides)
      if (s != x) return false;
    return true;
  }
  // Empty I-configurations admit no completion: the walk would have to reach
  // both sides without touching the separator. They are enumerated but can
  // never occur in a valid arrangement.
  bool viable() const { return !is_boring() && !q.empty(); }

  auto operator<=>(const ConfigKey&) const = default;
  bool operator==(const ConfigKey&) const = default;

  std::string to_string(const GraphTemplate& t) const;
};

// All configurations on one gluing pair (all crossing walks on the doubled
// adhesion graph, empty included, times the four direction pairs). Throws
// ResourceLimitError when the adhesion size exceeds max_k.
std::vector<ConfigKey> enumerate_configurations(const GraphTemplate& t,
                                                int pair, int max_k = 4);

// Finite symmetry group generated by the template's declared generators
// (identity only when none are declared).
struct SymmetryGroup {
  std::vector<Symmetry> elements;
};

SymmetryGroup symmetry_group(const GraphTemplate& t, size_t cap = 4096);

// Lexicographic minimum of the orbit of `key` under the group; class indices
// are keyed by canonical configurations.
ConfigKey canonical_config(const GraphTemplate& t, const SymmetryGroup& g,
                           const ConfigKey& key);

}  // namespace endwalk
