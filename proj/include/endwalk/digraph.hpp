#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "endwalk/bigint.hpp"

namespace endwalk {

// Oriented arc of a graph. Arcs come in reversal pairs (e, rev(e)) with
// swapped endpoints; parallel arcs between the same endpoints are allowed
// (adhesion graphs need them), loops are not.
struct Arc {
  int tail = -1;
  int head = -1;
  int rev = -1;     // arc id of the reversed arc
  int label = 0;    // free per-arc tag (side, port, ...), unused by core ops
};

class Digraph {
 public:
  Digraph() = default;
  explicit Digraph(int n) : out_(n) {}

  int add_vertex();
  // Adds the arc pair (u -> v, v -> u); returns the id of the u -> v arc,
  // the reverse gets the next id. Throws std::invalid_argument on loops or
  // invalid endpoints.
  int add_edge(int u, int v, int label_uv = 0, int label_vu = 0);
  // Adds a single oriented arc whose reversal must be patched later via
  // set_reversal. Used when sides of a reversal pair carry distinct labels.
  int add_arc(int u, int v, int label = 0);
  void set_reversal(int e, int f);

  int vertex_count() const { return static_cast<int>(out_.size()); }
  int arc_count() const { return static_cast<int>(arcs_.size()); }
  const Arc& arc(int e) const { return arcs_[e]; }
  // Outgoing arc ids of v in ascending id order; enumeration order of every
  // walk stream derives from this.
  const std::vector<int>& out_arcs(int v) const { return out_[v]; }

  void check_invariants() const;  // throws std::logic_error on violation

 private:
  std::vector<Arc> arcs_;
  std::vector<std::vector<int>> out_;
};

// Walk (v0, e1, v1, ..., en, vn). The empty walk has no vertices at all and
// is distinct from the trivial walk (v) of length 0.
struct Walk {
  std::vector<int> verts;
  std::vector<int> arcs;

  bool empty() const { return verts.empty(); }
  bool trivial() const { return verts.size() == 1; }
  int length() const { return static_cast<int>(arcs.size()); }
  int first() const { return verts.front(); }
  int last() const { return verts.back(); }

  bool operator==(const Walk&) const = default;
};

Walk reverse_walk(const Digraph& g, const Walk& w);
bool is_walk(const Digraph& g, const Walk& w);
bool is_saw(const Digraph& g, const Walk& w);

// Multi-walk: vertices and arcs strung together from walk components;
// component boundaries sit exactly at consecutive vertex pairs.
struct MultiWalk {
  std::vector<Walk> components;

  bool operator==(const MultiWalk&) const = default;
};

// Parses a flat alternating sequence back into walk components. Entry i of
// `is_vertex` says whether sequence[i] is a vertex id or an arc id; every
// arc must be framed by its endpoints or the input is rejected.
MultiWalk multiwalk_from_sequence(const Digraph& g,
                                  const std::vector<int>& sequence,
                                  const std::vector<bool>& is_vertex);

struct SawCounts {
  std::vector<BigInt> saw;  // saw[n] = SAWs of length n from the origin
};

struct ClosedCounts {
  std::vector<BigInt> sar;  // returns: SAWs ending at a neighbour of origin
  std::vector<BigInt> sap;  // polygons through origin, one per edge set
};

// Exhaustive DFS enumeration; the optional sink receives every SAW exactly
// once in depth-first ascending-arc-id order. c_0 = 1 (trivial walk).
SawCounts enumerate_saws(const Digraph& g, int origin, int max_len,
                         const std::function<void(const Walk&)>* sink = nullptr);

ClosedCounts enumerate_closed(const Digraph& g, int origin, int max_len);

// BFS distance; nullopt when v is unreachable from u.
std::optional<int> graph_distance(const Digraph& g, int u, int v);

std::vector<int> bfs_distances(const Digraph& g, int source);  // -1 unreachable

}  // namespace endwalk
