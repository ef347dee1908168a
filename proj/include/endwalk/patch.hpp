#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "endwalk/template_graph.hpp"

namespace endwalk {

struct ResourceLimitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One materialized copy of a part type inside a patch.
struct PartInstance {
  int part_type = -1;
  int tree_depth = 0;
  int parent = -1;       // instance id, -1 for the root
  int parent_port = -1;  // port of *this* instance used to attach to parent
  std::vector<int> verts;          // patch vertex ids, local index order
  std::vector<int> owned_arcs;     // forward arc ids of owned edges
  std::vector<int> port_neighbor;  // per port: child/parent instance, -1 dangling
};

// Finite ball of the infinite graph: the decomposition tree materialized
// breadth-first from the root part, with non-virtual edges only. Dangling
// ports mark where the tree was truncated.
class Patch {
 public:
  const GraphTemplate* tpl = nullptr;
  Digraph graph;
  std::vector<PartInstance> instances;
  std::vector<int> arc_owner;         // owning instance per arc
  std::vector<char> vertex_dangling;  // 1 iff some incident part is missing
  int root_vertex = -1;               // patch id of the template root vertex

  int local_index(int inst, int patch_vertex) const;
  // All instances containing a vertex (a connected subtree of the part tree).
  std::vector<int> instances_of_vertex(int patch_vertex) const;
  // Tree path between two instances (inclusive); instances form a tree via
  // parent pointers.
  std::vector<int> tree_path(int from, int to) const;
  // Patch vertex ids of a port tuple of an instance.
  std::vector<int> port_vertices(int inst, int port) const;
  bool has_dangling() const;

  std::multimap<int, int> vertex_instances;  // filled by the builders
};

// Breadth-first materialization out to the given tree radius. Throws
// ResourceLimitError when more than max_instances copies would be needed.
Patch build_patch(const GraphTemplate& t, int tree_radius,
                  long long max_instances = 2'000'000);

// Materializes every part instance reachable while some attach-port vertex
// lies within graph distance `target_dist` of the root vertex; afterwards
// exact_horizon(patch) >= target_dist - 1.
Patch build_patch_for_distance(const GraphTemplate& t, int target_dist,
                               long long max_instances = 8'000'000);

// Largest n such that all SAW/SAR/SAP counts of length <= n from the origin
// agree with the infinite graph; nullopt means unbounded (no dangling ports,
// the graph is finite).
std::optional<int> exact_horizon(const Patch& patch, int origin);

}  // namespace endwalk
