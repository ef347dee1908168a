#pragma once

#include <map>

#include "endwalk/rootstar.hpp"
#include "endwalk/star.hpp"

namespace endwalk {

struct MalformedArrangement : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PreconditionFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Arrangement on a finite open subtree of a patch's part tree. Shapes are
// walks in instance-local coordinates; configurations are keyed by
// (instance, port) with both sides of interior edges carrying the same
// absolute ConfigKey.
struct TreeArrangement {
  std::vector<int> instances;  // sorted
  std::map<int, Walk> shapes;
  std::map<std::pair<int, int>, ConfigKey> configs;

  bool has_instance(int id) const {
    return std::find(instances.begin(), instances.end(), id) != instances.end();
  }
  int weight(const Patch& patch) const;
  bool is_complete(const Patch& patch) const;
  // The unique vertex with all entry directions pointing inward.
  int source(const Patch& patch) const;
  int target(const Patch& patch) const;
};

// Merged open subtree treated as a single pseudo-part carrying a shape.
struct MergedStar {
  std::vector<int> insts;  // sorted
  PartContext ctx;
  std::vector<int> ctx_to_patch;
  std::vector<std::pair<int, int>> port_source;  // (instance, port) per ctx port
  Walk shape;                                    // ctx coordinates
  std::map<std::pair<int, int>, ConfigKey> configs;  // boundary configurations
  std::vector<int> arc_owner;  // owning instance per ctx arc
  std::vector<int> arc_patch;  // patch arc per real ctx arc, -1 for virtual
};

MergedStar blob_for_instance(const Patch& patch, const TreeArrangement& a,
                             int inst);

// Construction: contracts one tree edge between two blobs, interleaving the
// two shapes along the crossing walk of the shared configuration. Weight is
// preserved. Throws MalformedArrangement when the input violates the
// arrangement axioms.
MergedStar contract_blobs(const Patch& patch, const MergedStar& x,
                          const MergedStar& y, int inst_x, int port_x);

// contract_arrangement specialised to the open star pair around the tree
// edge (inst_x, port_x).
MergedStar contract_arrangement(const Patch& patch, const TreeArrangement& a,
                                int inst_x, int port_x);

// Inverse construction: splits a merged star of two instances back along
// their tree edge. Throws PreconditionFailed when the shape avoids the
// adhesion set.
TreeArrangement project_arrangement(const Patch& patch, const MergedStar& m,
                                    int inst_x, int port_x);

// Contracts every interior edge (in the given order, default ascending);
// the result does not depend on the order.
MergedStar merge_all(const Patch& patch, const TreeArrangement& a,
                     const std::vector<std::pair<int, int>>* order = nullptr);

// The walk represented by the arrangement, in patch coordinates. Requires a
// complete arrangement (no virtual arcs may survive the contraction).
Walk arrangement_to_saw(const Patch& patch, const TreeArrangement& a);

// The unique complete arrangement representing a SAW of length >= 1 on the
// patch. Throws PreconditionFailed on trivial or non-self-avoiding walks.
TreeArrangement saw_to_complete_arrangement(const Patch& patch, const Walk& w);

// Exhaustively enumerates complete arrangements of weight <= max_weight
// whose represented walk starts at the given patch vertex. Mirrors the
// c-completion recursion; used by the bijection test suites.
void enumerate_complete_arrangements(
    const Patch& patch, int origin, int max_weight,
    const std::function<void(const TreeArrangement&)>& sink);

// All c-completions of an oriented boundary arc (instance, port) with the
// pinned configuration, up to the weight bound; reports each completion's
// weight. The independent route to F_c coefficients.
void enumerate_completions(const Patch& patch, int inst, int port,
                           const ConfigKey& pinned, int max_weight,
                           const std::function<void(int)>& sink);

}  // namespace endwalk
