#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "endwalk/digraph.hpp"

namespace endwalk {

// Which of the two bipartition classes of the decomposition tree a part
// belongs to. Also doubles as an absolute side tag for adhesion crossings:
// a detour "toward A" runs through the A-side cone of a tree edge.
enum class Role : uint8_t { A = 0, B = 1 };

inline Role opposite(Role r) { return r == Role::A ? Role::B : Role::A; }
inline const char* role_name(Role r) { return r == Role::A ? "A" : "B"; }

struct PartType {
  std::string id;
  Role role = Role::A;
  int n = 0;                                // vertex count
  std::vector<std::pair<int, int>> edges;   // owned (theta-assigned) edges
  std::vector<std::vector<int>> ports;      // ordered adhesion tuples
};

// One tree-edge type: glues (partA, portA) to (partB, portB), identifying
// portA[i] with portB[map[i]].
struct GluingPair {
  int part_a = -1;  // index into Template::parts, role A
  int port_a = -1;
  int part_b = -1;
  int port_b = -1;
  std::vector<int> map;
};

// Template automorphism: a class-preserving permutation of part types with
// per-part vertex and port permutations, compatible with edges, ports and
// gluing pairs. Purely an optional matrix-shrinking device.
struct Symmetry {
  std::vector<int> part_perm;               // identity when empty
  // vertex_perm[p] maps vertices of part p onto part_perm[p]; likewise
  // port_perm[p] for ports. Empty vectors mean identity.
  std::vector<std::vector<int>> vertex_perm;
  std::vector<std::vector<int>> port_perm;

  int part_image(int p) const {
    return part_perm.empty() ? p : part_perm[p];
  }
  int vertex_image(int p, int v) const {
    return vertex_perm[p].empty() ? v : vertex_perm[p][v];
  }
  int port_image(int p, int q) const {
    return port_perm[p].empty() ? q : port_perm[p][q];
  }
};

class GraphTemplate {
 public:
  std::string name;
  std::vector<PartType> parts;      // class A first, then class B
  std::vector<GluingPair> gluing;
  int root_part = -1;
  int root_vertex = -1;
  std::vector<Symmetry> symmetries;

  int part_index(const std::string& id) const;
  // Gluing pair attached to (part, port); -1 when the port is unmatched.
  int pair_at(int part, int port) const;
  // Port of `part` participating in pair g.
  int port_of(int part, int g) const;
  int adhesion_size() const;  // common port size k, 0 if the template has no ports

  static GraphTemplate from_json_text(const std::string& text);
  static GraphTemplate from_file(const std::string& path);
  std::string to_json_text() const;
};

struct ValidationIssue {
  std::string where;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
};

// Checks the standing structural assumptions: uniform port size, the
// port/gluing perfect matching, connected simple part graphs, no adjacent
// part coincidence, class bipartition, well-formed symmetries.
ValidationReport validate_template(const GraphTemplate& t);

}  // namespace endwalk
