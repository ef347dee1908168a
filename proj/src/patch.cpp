#include "endwalk/patch.hpp"

#include <algorithm>
#include <deque>

namespace endwalk {

namespace {

struct Builder {
  const GraphTemplate& t;
  Patch patch;
  long long max_instances;

  explicit Builder(const GraphTemplate& tpl, long long cap)
      : t(tpl), max_instances(cap) {
    patch.tpl = &tpl;
  }

  int new_instance(int part_type, int depth, int parent, int parent_port,
                   const std::vector<int>& preset_verts) {
    if (static_cast<long long>(patch.instances.size()) >= max_instances)
      throw ResourceLimitError("patch instance cap exceeded");
    const PartType& p = t.parts[part_type];
    PartInstance inst;
    inst.part_type = part_type;
    inst.tree_depth = depth;
    inst.parent = parent;
    inst.parent_port = parent_port;
    inst.verts.assign(p.n, -1);
    for (size_t i = 0; i < preset_verts.size(); ++i)
      if (preset_verts[i] >= 0) inst.verts[i] = preset_verts[i];
    for (int v = 0; v < p.n; ++v)
      if (inst.verts[v] < 0) inst.verts[v] = patch.graph.add_vertex();
    int id = static_cast<int>(patch.instances.size());
    for (int v = 0; v < p.n; ++v)
      patch.vertex_instances.insert({inst.verts[v], id});
    for (auto [u, v] : p.edges) {
      int e = patch.graph.add_edge(inst.verts[u], inst.verts[v]);
      inst.owned_arcs.push_back(e);
      patch.arc_owner.push_back(id);
      patch.arc_owner.push_back(id);
    }
    inst.port_neighbor.assign(p.ports.size(), -1);
    patch.instances.push_back(std::move(inst));
    return id;
  }

  // Expands one port of an existing instance, gluing a fresh copy of the
  // paired part type onto it.
  int expand_port(int inst_id, int port) {
    const PartInstance inst = patch.instances[inst_id];
    const PartType& p = t.parts[inst.part_type];
    int g = t.pair_at(inst.part_type, port);
    if (g < 0) throw std::logic_error("expand_port: unmatched port");
    const GluingPair& gp = t.gluing[g];
    bool i_am_a = (gp.part_a == inst.part_type && gp.port_a == port);
    int nbr_type = i_am_a ? gp.part_b : gp.part_a;
    int nbr_port = i_am_a ? gp.port_b : gp.port_a;
    const PartType& np = t.parts[nbr_type];
    std::vector<int> preset(np.n, -1);
    const auto& my_tuple = p.ports[port];
    const auto& nbr_tuple = np.ports[nbr_port];
    for (size_t i = 0; i < my_tuple.size(); ++i) {
      // portA[i] is identified with portB[map[i]].
      size_t j = i_am_a ? static_cast<size_t>(gp.map[i])
                        : [&] {
                            for (size_t a = 0; a < gp.map.size(); ++a)
                              if (gp.map[a] == static_cast<int>(i)) return a;
                            throw std::logic_error("gluing map not surjective");
                          }();
      preset[nbr_tuple[j]] = inst.verts[my_tuple[i]];
    }
    int nid = new_instance(nbr_type, inst.tree_depth + 1, inst_id, nbr_port,
                           preset);
    patch.instances[inst_id].port_neighbor[port] = nid;
    patch.instances[nid].port_neighbor[nbr_port] = inst_id;
    return nid;
  }

  void seed_root() {
    new_instance(t.root_part, 0, -1, -1, {});
    patch.root_vertex = patch.instances[0].verts[t.root_vertex];
  }

  void mark_dangling() {
    patch.vertex_dangling.assign(patch.graph.vertex_count(), 0);
    for (const PartInstance& inst : patch.instances) {
      const PartType& p = t.parts[inst.part_type];
      for (size_t q = 0; q < p.ports.size(); ++q)
        if (inst.port_neighbor[q] < 0)
          for (int v : p.ports[q]) patch.vertex_dangling[inst.verts[v]] = 1;
    }
  }
};

}  // namespace

Patch build_patch(const GraphTemplate& t, int tree_radius,
                  long long max_instances) {
  Builder b(t, max_instances);
  b.seed_root();
  std::deque<int> queue{0};
  while (!queue.empty()) {
    int id = queue.front();
    queue.pop_front();
    int depth = b.patch.instances[id].tree_depth;
    if (depth >= tree_radius) continue;
    int nports = static_cast<int>(
        t.parts[b.patch.instances[id].part_type].ports.size());
    for (int q = 0; q < nports; ++q) {
      if (b.patch.instances[id].port_neighbor[q] >= 0) continue;
      queue.push_back(b.expand_port(id, q));
    }
  }
  b.mark_dangling();
  return std::move(b.patch);
}

Patch build_patch_for_distance(const GraphTemplate& t, int target_dist,
                               long long max_instances) {
  Builder b(t, max_instances);
  b.seed_root();
  // New instances can add edges between existing vertices and shorten
  // distances, so expand in rounds until no port within reach remains.
  for (;;) {
    auto dist = bfs_distances(b.patch.graph, b.patch.root_vertex);
    std::vector<std::pair<int, int>> todo;
    for (size_t id = 0; id < b.patch.instances.size(); ++id) {
      const PartInstance& inst = b.patch.instances[id];
      const PartType& p = t.parts[inst.part_type];
      for (size_t q = 0; q < p.ports.size(); ++q) {
        if (inst.port_neighbor[q] >= 0) continue;
        int dmin = -1;
        for (int v : p.ports[q]) {
          int d = dist[inst.verts[v]];
          if (d >= 0 && (dmin < 0 || d < dmin)) dmin = d;
        }
        if (dmin >= 0 && dmin < target_dist)
          todo.emplace_back(static_cast<int>(id), static_cast<int>(q));
      }
    }
    if (todo.empty()) break;
    for (auto [id, q] : todo)
      if (b.patch.instances[id].port_neighbor[q] < 0) b.expand_port(id, q);
  }
  b.mark_dangling();
  return std::move(b.patch);
}

int Patch::local_index(int inst, int patch_vertex) const {
  const auto& vs = instances[inst].verts;
  for (size_t i = 0; i < vs.size(); ++i)
    if (vs[i] == patch_vertex) return static_cast<int>(i);
  return -1;
}

std::vector<int> Patch::instances_of_vertex(int patch_vertex) const {
  std::vector<int> out;
  auto range = vertex_instances.equal_range(patch_vertex);
  for (auto it = range.first; it != range.second; ++it) out.push_back(it->second);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> Patch::tree_path(int from, int to) const {
  std::vector<int> up_from{from}, up_to{to};
  int a = from, c = to;
  while (a != c) {
    if (instances[a].tree_depth >= instances[c].tree_depth) {
      a = instances[a].parent;
      up_from.push_back(a);
    } else {
      c = instances[c].parent;
      up_to.push_back(c);
    }
    if (a < 0 || c < 0) throw std::logic_error("tree_path: disjoint trees");
  }
  up_from.insert(up_from.end(), up_to.rbegin() + 1, up_to.rend());
  return up_from;
}

std::vector<int> Patch::port_vertices(int inst, int port) const {
  const PartInstance& in = instances[inst];
  const PartType& p = tpl->parts[in.part_type];
  std::vector<int> out;
  for (int v : p.ports[port]) out.push_back(in.verts[v]);
  return out;
}

bool Patch::has_dangling() const {
  for (char c : vertex_dangling)
    if (c) return true;
  return false;
}

std::optional<int> exact_horizon(const Patch& patch, int origin) {
  if (origin < 0 || origin >= patch.graph.vertex_count())
    throw std::invalid_argument("exact_horizon: bad origin");
  if (!patch.has_dangling()) return std::nullopt;
  auto dist = bfs_distances(patch.graph, origin);
  int dmin = -1;
  for (int v = 0; v < patch.graph.vertex_count(); ++v)
    if (patch.vertex_dangling[v] && dist[v] >= 0 && (dmin < 0 || dist[v] < dmin))
      dmin = dist[v];
  if (dmin < 0) return std::nullopt;  // dangling region unreachable
  return std::max(0, dmin - 1);
}

}  // namespace endwalk
