#pragma once

#include <climits>
#include <functional>
#include <optional>
#include <vector>

#include "endwalk/config.hpp"
#include "endwalk/patch.hpp"

namespace endwalk {

// A port of a part context. The tuple is stored in canonical (A-side)
// position order so induced crossing walks read off positions directly.
struct ContextPort {
  int pair = -1;
  Role my_role = Role::A;       // side of the part owning the port
  std::vector<int> tuple;       // context vertex per canonical position
};

// Part graph of one part (or of a merged open subtree): non-virtual owned
// arcs plus, per port, the virtual arcs of its adhesion graph. The virtual
// arcs of a port stand for detours through the neighbouring cone.
struct PartContext {
  Digraph g;
  std::vector<ContextPort> ports;
  struct ArcInfo {
    bool is_virtual = false;
    int port = -1;   // owning port for virtual arcs
    int from = -1;   // canonical positions for virtual arcs
    int to = -1;
  };
  std::vector<ArcInfo> arc_info;
  // vertex -> (port, canonical position) incidences
  std::vector<std::vector<std::pair<int, int>>> vertex_ports;

  int weight_of(const Walk& w) const;
  bool in_tuple(int port, int vertex) const;
  int tuple_position(int port, int vertex) const;  // -1 when absent
  int find_real_arc(int u, int v) const;           // -1 when absent
  int find_virtual_arc(int port, int from_pos, int to_pos) const;
};

PartContext context_for_part(const GraphTemplate& t, int part);
// Context of a single patch instance; vertices are instance-local indices.
PartContext context_for_instance(const Patch& patch, int inst);
// Patch vertex ids of a port tuple in canonical (A-side) position order.
std::vector<int> canonical_port_patch_vertices(const Patch& patch, int inst,
                                               int port);

// The unique crossing walk of a shape over one port (Q(e) of (C1)): its
// visits to the adhesion tuple in order, a far-side arc exactly where the
// shape uses that port's virtual arc, a near-side arc otherwise.
CrossingWalk induced_crossing(const PartContext& ctx, const Walk& shape,
                              int port);

ConfigKey induced_config(const PartContext& ctx, const Walk& shape, int port,
                         bool entry_out, bool exit_out);

// Compatibility of a shape with a configuration on one port: (C1) crossing
// equality, (C2)/(C3) entry and exit membership. Returns the first violated
// clause name, or nullopt when compatible.
std::optional<std::string> compatibility_violation(const PartContext& ctx,
                                                   const Walk& shape, int port,
                                                   const ConfigKey& cfg);

// Arrangement on one open star: shape plus the induced configuration on
// every port. Ports not listed carry the boring empty configuration.
struct StarArrangement {
  Walk shape;
  std::vector<std::pair<int, ConfigKey>> port_configs;  // touched ports only
  int entry_port = -1;  // -1: no port has X pointing out (walk starts here)
  int exit_port = -1;
  int weight = 0;

  const ConfigKey* config_at(int port) const {
    for (const auto& [p, c] : port_configs)
      if (p == port) return &c;
    return nullptr;
  }
};

struct StarConstraints {
  int pinned_port = -1;
  std::optional<ConfigKey> pinned;  // exact configuration at pinned_port
  int start_vertex = -1;            // fix the shape's start
  bool entries_inward = false;      // force X(e) inward on all ports
  bool exits_inward = false;        // force Y(e) inward on all ports
  std::vector<int> end_in;          // nonempty: shape must end in this set
  int max_weight = INT_MAX;
  long long max_shapes = 200'000'000;
};

// Exhaustively yields every (shape, entries, exits) satisfying (C1)-(C3),
// (D1)-(D3) and the constraints, in depth-first ascending-arc-id order.
// Throws ResourceLimitError past max_shapes.
void enumerate_star_arrangements(
    const PartContext& ctx, const StarConstraints& cons,
    const std::function<void(const StarArrangement&)>& sink);

}  // namespace endwalk
