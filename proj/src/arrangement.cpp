#include "endwalk/arrangement.hpp"

#include <algorithm>
#include <set>

namespace endwalk {

namespace {

Role instance_role(const Patch& patch, int inst) {
  return patch.tpl->parts[patch.instances[inst].part_type].role;
}

int port_towards(const Patch& patch, int inst, int nbr) {
  const PartInstance& in = patch.instances[inst];
  for (size_t q = 0; q < in.port_neighbor.size(); ++q)
    if (in.port_neighbor[q] == nbr) return static_cast<int>(q);
  return -1;
}

// Splits a walk at its visits to the given vertex set (in visit order);
// returns segments [start..v1], [v1..v2], ..., [vk..end]. The first and
// last segment may be trivial.
std::vector<Walk> split_at_visits(const Walk& w,
                                  const std::vector<int>& visit_indices) {
  std::vector<Walk> segs;
  int prev = 0;
  for (size_t j = 0; j <= visit_indices.size(); ++j) {
    int stop = j < visit_indices.size() ? visit_indices[j]
                                        : static_cast<int>(w.verts.size()) - 1;
    Walk seg;
    for (int i = prev; i <= stop; ++i) {
      seg.verts.push_back(w.verts[i]);
      if (i < stop) seg.arcs.push_back(w.arcs[i]);
    }
    segs.push_back(std::move(seg));
    prev = stop;
  }
  return segs;
}

std::vector<int> visits_to(const Walk& w, const std::set<int>& vset) {
  std::vector<int> idx;
  for (size_t i = 0; i < w.verts.size(); ++i)
    if (vset.count(w.verts[i])) idx.push_back(static_cast<int>(i));
  return idx;
}

}  // namespace

int TreeArrangement::weight(const Patch& patch) const {
  int w = 0;
  for (int inst : instances) {
    PartContext ctx = context_for_instance(patch, inst);
    w += ctx.weight_of(shapes.at(inst));
  }
  return w;
}

bool TreeArrangement::is_complete(const Patch& patch) const {
  for (int inst : instances) {
    const PartInstance& in = patch.instances[inst];
    for (size_t q = 0; q < in.port_neighbor.size(); ++q) {
      int nbr = in.port_neighbor[q];
      bool interior = nbr >= 0 && has_instance(nbr);
      const ConfigKey& c = configs.at({inst, static_cast<int>(q)});
      if (interior) {
        if (c.is_boring()) return false;  // not reduced
      } else {
        // boundary: boring and entered from inside
        if (!c.is_boring() || c.x != instance_role(patch, inst)) return false;
      }
    }
  }
  return true;
}

int TreeArrangement::source(const Patch& patch) const {
  for (int inst : instances) {
    const PartInstance& in = patch.instances[inst];
    bool all_inward = true;
    for (size_t q = 0; q < in.port_neighbor.size(); ++q)
      if (configs.at({inst, static_cast<int>(q)}).x !=
          instance_role(patch, inst))
        all_inward = false;
    if (all_inward) return inst;
  }
  return -1;
}

int TreeArrangement::target(const Patch& patch) const {
  for (int inst : instances) {
    const PartInstance& in = patch.instances[inst];
    bool all_inward = true;
    for (size_t q = 0; q < in.port_neighbor.size(); ++q)
      if (configs.at({inst, static_cast<int>(q)}).y !=
          instance_role(patch, inst))
        all_inward = false;
    if (all_inward) return inst;
  }
  return -1;
}

MergedStar blob_for_instance(const Patch& patch, const TreeArrangement& a,
                             int inst) {
  MergedStar b;
  b.insts = {inst};
  b.ctx = context_for_instance(patch, inst);
  b.ctx_to_patch = patch.instances[inst].verts;
  b.shape = a.shapes.at(inst);
  const PartInstance& in = patch.instances[inst];
  for (size_t q = 0; q < in.port_neighbor.size(); ++q) {
    b.port_source.emplace_back(inst, static_cast<int>(q));
    auto it = a.configs.find({inst, static_cast<int>(q)});
    if (it == a.configs.end())
      throw MalformedArrangement("missing configuration on a port");
    b.configs[{inst, static_cast<int>(q)}] = it->second;
  }
  // Owners of arcs: real arcs belong to this instance, virtual arcs too.
  b.arc_owner.assign(b.ctx.g.arc_count(), inst);
  b.arc_patch.assign(b.ctx.g.arc_count(), -1);
  const PartType& pt = patch.tpl->parts[in.part_type];
  for (size_t ei = 0; ei < pt.edges.size(); ++ei) {
    int fwd = in.owned_arcs[ei];
    // context arcs were added in the same edge order
    b.arc_patch[2 * ei] = fwd;
    b.arc_patch[2 * ei + 1] = patch.graph.arc(fwd).rev;
  }
  return b;
}

MergedStar contract_blobs(const Patch& patch, const MergedStar& x,
                          const MergedStar& y, int inst_x, int port_x) {
  int inst_y = patch.instances[inst_x].port_neighbor[port_x];
  if (inst_y < 0) throw MalformedArrangement("contracting a dangling port");
  int port_y = port_towards(patch, inst_y, inst_x);

  int px = -1, py = -1;
  for (size_t p = 0; p < x.port_source.size(); ++p)
    if (x.port_source[p] == std::make_pair(inst_x, port_x))
      px = static_cast<int>(p);
  for (size_t p = 0; p < y.port_source.size(); ++p)
    if (y.port_source[p] == std::make_pair(inst_y, port_y))
      py = static_cast<int>(p);
  if (px < 0 || py < 0)
    throw MalformedArrangement("tree edge not on the blob boundary");

  ConfigKey cfg = x.configs.at({inst_x, port_x});
  if (!(cfg == y.configs.at({inst_y, port_y})))
    throw MalformedArrangement("the two sides disagree on the configuration");
  if (cfg.q.empty())
    throw MalformedArrangement("interior configurations must be non-empty");
  if (auto v = compatibility_violation(x.ctx, x.shape, px, cfg))
    throw MalformedArrangement("compatibility " + *v + " fails on one side");
  if (auto v = compatibility_violation(y.ctx, y.shape, py, cfg))
    throw MalformedArrangement("compatibility " + *v + " fails on one side");

  Role role_x = instance_role(patch, inst_x);

  MergedStar m;
  m.insts = x.insts;
  m.insts.insert(m.insts.end(), y.insts.begin(), y.insts.end());
  std::sort(m.insts.begin(), m.insts.end());

  // Merged vertex set (patch ids shared across the glued port coincide).
  std::set<int> vset(x.ctx_to_patch.begin(), x.ctx_to_patch.end());
  vset.insert(y.ctx_to_patch.begin(), y.ctx_to_patch.end());
  m.ctx_to_patch.assign(vset.begin(), vset.end());
  std::map<int, int> to_ctx;
  for (size_t i = 0; i < m.ctx_to_patch.size(); ++i)
    to_ctx[m.ctx_to_patch[i]] = static_cast<int>(i);
  m.ctx.g = Digraph(static_cast<int>(m.ctx_to_patch.size()));

  // Carries one blob's arcs into the merged context; returns old->new map.
  auto carry = [&](const MergedStar& src, int skip_port,
                   std::vector<int>& arc_map) {
    arc_map.assign(src.ctx.g.arc_count(), -1);
    for (int e = 0; e < src.ctx.g.arc_count(); ++e) {
      if (arc_map[e] >= 0) continue;
      const auto& info = src.ctx.arc_info[e];
      if (info.is_virtual) continue;  // handled with ports below
      int r = src.ctx.g.arc(e).rev;
      const Arc& a = src.ctx.g.arc(e);
      int ne = m.ctx.g.add_edge(to_ctx.at(src.ctx_to_patch[a.tail]),
                                to_ctx.at(src.ctx_to_patch[a.head]));
      m.ctx.arc_info.push_back({});
      m.ctx.arc_info.push_back({});
      m.arc_owner.push_back(src.arc_owner[e]);
      m.arc_owner.push_back(src.arc_owner[e]);
      m.arc_patch.push_back(src.arc_patch[e]);
      m.arc_patch.push_back(src.arc_patch[r]);
      arc_map[e] = ne;
      arc_map[r] = ne + 1;
    }
    for (size_t p = 0; p < src.ctx.ports.size(); ++p) {
      if (static_cast<int>(p) == skip_port) continue;
      const ContextPort& cp = src.ctx.ports[p];
      ContextPort np;
      np.pair = cp.pair;
      np.my_role = cp.my_role;
      for (int v : cp.tuple)
        np.tuple.push_back(to_ctx.at(src.ctx_to_patch[v]));
      int np_idx = static_cast<int>(m.ctx.ports.size());
      int k = static_cast<int>(np.tuple.size());
      for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
          int ne = m.ctx.g.add_edge(np.tuple[i], np.tuple[j]);
          m.ctx.arc_info.push_back({true, np_idx, i, j});
          m.ctx.arc_info.push_back({true, np_idx, j, i});
          int owner = src.port_source[p].first;
          m.arc_owner.push_back(owner);
          m.arc_owner.push_back(owner);
          m.arc_patch.push_back(-1);
          m.arc_patch.push_back(-1);
          int oe = src.ctx.find_virtual_arc(static_cast<int>(p), i, j);
          arc_map[oe] = ne;
          arc_map[src.ctx.g.arc(oe).rev] = ne + 1;
        }
      m.ctx.ports.push_back(std::move(np));
      m.port_source.push_back(src.port_source[p]);
      auto key = src.port_source[p];
      m.configs[key] = src.configs.at(key);
    }
  };
  std::vector<int> map_x, map_y;
  carry(x, px, map_x);
  carry(y, py, map_y);
  m.ctx.vertex_ports.resize(m.ctx.g.vertex_count());
  for (size_t q = 0; q < m.ctx.ports.size(); ++q)
    for (size_t i = 0; i < m.ctx.ports[q].tuple.size(); ++i)
      m.ctx.vertex_ports[m.ctx.ports[q].tuple[i]].push_back(
          {static_cast<int>(q), static_cast<int>(i)});

  // Interleave the two shapes along the crossing walk.
  int k = static_cast<int>(cfg.q.verts.size());
  std::vector<int> crossing_patch(k);
  for (int i = 0; i < k; ++i)
    crossing_patch[i] = x.ctx_to_patch[x.ctx.ports[px].tuple[cfg.q.verts[i]]];
  auto segments_of = [&](const MergedStar& src) {
    std::set<int> vset_local;
    for (int pv : crossing_patch) {
      // translate patch id to blob-local ctx id
      for (size_t i = 0; i < src.ctx_to_patch.size(); ++i)
        if (src.ctx_to_patch[i] == pv) vset_local.insert(static_cast<int>(i));
    }
    auto idx = visits_to(src.shape, vset_local);
    if (static_cast<int>(idx.size()) != k)
      throw MalformedArrangement("shape visit count mismatches the crossing");
    return split_at_visits(src.shape, idx);
  };
  auto segs_x = segments_of(x);
  auto segs_y = segments_of(y);

  auto blob_of_role = [&](Role r) -> int { return r == role_x ? 0 : 1; };
  auto append_seg = [&](Walk& out, const Walk& seg, const MergedStar& src,
                        const std::vector<int>& amap) {
    for (size_t i = out.verts.empty() ? 0 : 1; i < seg.verts.size(); ++i)
      out.verts.push_back(to_ctx.at(src.ctx_to_patch[seg.verts[i]]));
    for (int e : seg.arcs) {
      if (amap[e] < 0)
        throw MalformedArrangement("segment uses the contracted virtual arc");
      out.arcs.push_back(amap[e]);
    }
  };

  Walk merged;
  for (int j = 0; j <= k; ++j) {
    Role side = j == 0 ? cfg.x : (j == k ? cfg.y : cfg.q.sides[j - 1]);
    int who = blob_of_role(side);
    const MergedStar& src = who == 0 ? x : y;
    const MergedStar& other = who == 0 ? y : x;
    const auto& seg = (who == 0 ? segs_x : segs_y)[j];
    const auto& oseg = (who == 0 ? segs_y : segs_x)[j];
    // the passive side must contribute nothing here
    if (j == 0 || j == k) {
      if (oseg.length() != 0)
        throw MalformedArrangement("both sides extend past the crossing end");
    } else {
      bool ok = oseg.length() == 1 &&
                other.ctx.arc_info[oseg.arcs[0]].is_virtual;
      if (!ok)
        throw MalformedArrangement("passive side of a crossing step is not a "
                                   "virtual arc");
    }
    append_seg(merged, seg, src, who == 0 ? map_x : map_y);
  }
  m.shape = std::move(merged);

  if (m.ctx.weight_of(m.shape) != x.ctx.weight_of(x.shape) +
                                      y.ctx.weight_of(y.shape))
    throw MalformedArrangement("contraction changed the weight");
  if (!is_saw(m.ctx.g, m.shape))
    throw MalformedArrangement("contracted shape is not self-avoiding");
  return m;
}

MergedStar contract_arrangement(const Patch& patch, const TreeArrangement& a,
                                int inst_x, int port_x) {
  int inst_y = patch.instances[inst_x].port_neighbor[port_x];
  MergedStar bx = blob_for_instance(patch, a, inst_x);
  MergedStar by = blob_for_instance(patch, a, inst_y);
  return contract_blobs(patch, bx, by, inst_x, port_x);
}

TreeArrangement project_arrangement(const Patch& patch, const MergedStar& m,
                                    int inst_x, int port_x) {
  int inst_y = patch.instances[inst_x].port_neighbor[port_x];
  if (m.insts != std::vector<int>{std::min(inst_x, inst_y),
                                  std::max(inst_x, inst_y)})
    throw PreconditionFailed("projection expects the two-instance star pair");
  int port_y = port_towards(patch, inst_y, inst_x);

  std::vector<int> crossing_patch =
      canonical_port_patch_vertices(patch, inst_x, port_x);
  std::map<int, int> patch_to_ctx;
  for (size_t i = 0; i < m.ctx_to_patch.size(); ++i)
    patch_to_ctx[m.ctx_to_patch[i]] = static_cast<int>(i);
  std::set<int> vset;
  std::map<int, int> pos_of_ctx;
  for (size_t i = 0; i < crossing_patch.size(); ++i) {
    int cv = patch_to_ctx.at(crossing_patch[i]);
    vset.insert(cv);
    pos_of_ctx[cv] = static_cast<int>(i);
  }
  auto idx = visits_to(m.shape, vset);
  if (idx.empty())
    throw PreconditionFailed("shape does not meet the adhesion set");
  auto segs = split_at_visits(m.shape, idx);
  int k = static_cast<int>(idx.size());

  Role role_x = instance_role(patch, inst_x);
  auto side_of_arc = [&](int e) {
    return instance_role(patch, m.arc_owner[e]);
  };
  // Sides of the interior segments; ends get the side they belong to (or
  // the opposite of the other end for trivial ends).
  std::vector<Role> seg_side(k + 1, role_x);
  for (int j = 0; j <= k; ++j) {
    if (segs[j].length() > 0) {
      Role s = side_of_arc(segs[j].arcs[0]);
      for (int e : segs[j].arcs)
        if (side_of_arc(e) != s)
          throw MalformedArrangement("segment crosses the adhesion invisibly");
      seg_side[j] = s;
    }
  }

  // Crossing walk of the projected configuration.
  ConfigKey cfg;
  cfg.pair = patch.tpl->pair_at(patch.instances[inst_x].part_type, port_x);
  for (int i : idx) cfg.q.verts.push_back(pos_of_ctx.at(m.shape.verts[i]));
  for (int j = 1; j < k; ++j) cfg.q.sides.push_back(seg_side[j]);

  // Entry/exit directions from the merged star's boundary flags: a port is
  // the entry iff its configuration points outward.
  int entry_port = -1, exit_port = -1;
  for (size_t p = 0; p < m.ctx.ports.size(); ++p) {
    const auto key = m.port_source[p];
    const ConfigKey& c = m.configs.at(key);
    if (c.x == opposite(m.ctx.ports[p].my_role)) entry_port = static_cast<int>(p);
    if (c.y == opposite(m.ctx.ports[p].my_role)) exit_port = static_cast<int>(p);
  }
  if (entry_port >= 0)
    cfg.x = instance_role(patch, m.port_source[entry_port].first);
  else if (m.shape.length() > 0)
    cfg.x = side_of_arc(m.shape.arcs.front());
  else
    throw MalformedArrangement("trivial shape without an entry port");
  if (exit_port >= 0)
    cfg.y = instance_role(patch, m.port_source[exit_port].first);
  else if (m.shape.length() > 0)
    cfg.y = side_of_arc(m.shape.arcs.back());
  else
    throw MalformedArrangement("trivial shape without an exit port");

  // Per-side shapes: own segments verbatim, the other side's interior
  // segments as virtual arcs of the shared port.
  TreeArrangement out;
  out.instances = m.insts;
  for (int side_inst : {inst_x, inst_y}) {
    Role r = instance_role(patch, side_inst);
    PartContext ctx = context_for_instance(patch, side_inst);
    int sport = side_inst == inst_x ? port_x : port_y;
    auto patch_to_local = [&](int pv) {
      int li = patch.local_index(side_inst, pv);
      if (li < 0) throw MalformedArrangement("vertex escapes its side");
      return li;
    };
    Walk shape;
    auto push_vertex = [&](int lv) {
      if (shape.verts.empty() || shape.verts.back() != lv)
        shape.verts.push_back(lv);
    };
    for (int j = 0; j <= k; ++j) {
      if (seg_side[j] == r) {
        for (size_t i = 0; i < segs[j].verts.size(); ++i) {
          int pv = m.ctx_to_patch[segs[j].verts[i]];
          int lv = patch_to_local(pv);
          if (i > 0) {
            int e = segs[j].arcs[i - 1];
            int le;
            if (m.ctx.arc_info[e].is_virtual) {
              // boundary virtual arc of this side
              auto [src_inst, src_port] = m.port_source[m.ctx.arc_info[e].port];
              if (src_inst != side_inst)
                throw MalformedArrangement("virtual arc on the wrong side");
              le = ctx.find_virtual_arc(src_port, m.ctx.arc_info[e].from,
                                        m.ctx.arc_info[e].to);
            } else {
              int prev = patch_to_local(m.ctx_to_patch[segs[j].verts[i - 1]]);
              le = ctx.find_real_arc(prev, lv);
            }
            if (le < 0) throw MalformedArrangement("missing arc on one side");
            shape.arcs.push_back(le);
            shape.verts.push_back(lv);
          } else {
            push_vertex(lv);
          }
        }
      } else if (j >= 1 && j < k) {
        // other side's excursion: a virtual arc of the shared port
        int from = cfg.q.verts[j - 1], to = cfg.q.verts[j];
        int lu = patch_to_local(crossing_patch[from]);
        push_vertex(lu);
        int e = ctx.find_virtual_arc(sport, from, to);
        if (e < 0) throw MalformedArrangement("missing virtual arc");
        shape.arcs.push_back(e);
        shape.verts.push_back(patch_to_local(crossing_patch[to]));
      } else {
        // trivial foreign end segment: just make sure the crossing vertex
        // is present
        int pos = j == 0 ? cfg.q.verts.front() : cfg.q.verts.back();
        push_vertex(patch_to_local(crossing_patch[pos]));
      }
    }
    out.shapes[side_inst] = std::move(shape);
  }

  // Configurations: carried boundary ones plus the new one on f.
  for (const auto& [key, c] : m.configs) out.configs[key] = c;
  out.configs[{inst_x, port_x}] = cfg;
  out.configs[{inst_y, port_y}] = cfg;
  return out;
}

MergedStar merge_all(const Patch& patch, const TreeArrangement& a,
                     const std::vector<std::pair<int, int>>* order) {
  std::vector<std::pair<int, int>> edges;
  if (order) {
    edges = *order;
  } else {
    for (int inst : a.instances) {
      const PartInstance& in = patch.instances[inst];
      for (size_t q = 0; q < in.port_neighbor.size(); ++q) {
        int nbr = in.port_neighbor[q];
        if (nbr > inst && a.has_instance(nbr))
          edges.emplace_back(inst, static_cast<int>(q));
      }
    }
  }
  std::map<int, int> blob_of;
  std::vector<MergedStar> blobs;
  for (int inst : a.instances) {
    blob_of[inst] = static_cast<int>(blobs.size());
    blobs.push_back(blob_for_instance(patch, a, inst));
  }
  for (auto [inst, port] : edges) {
    int nbr = patch.instances[inst].port_neighbor[port];
    int bx = blob_of.at(inst), by = blob_of.at(nbr);
    if (bx == by) throw MalformedArrangement("duplicate interior edge");
    MergedStar merged = contract_blobs(patch, blobs[bx], blobs[by], inst, port);
    blobs.push_back(std::move(merged));
    int nb = static_cast<int>(blobs.size()) - 1;
    for (int i : blobs[nb].insts) blob_of[i] = nb;
  }
  int final_blob = blob_of.at(a.instances.front());
  for (int inst : a.instances)
    if (blob_of.at(inst) != final_blob)
      throw MalformedArrangement("arrangement instances are not connected");
  return blobs[final_blob];
}

Walk arrangement_to_saw(const Patch& patch, const TreeArrangement& a) {
  MergedStar m = merge_all(patch, a);
  Walk out;
  for (int v : m.shape.verts) out.verts.push_back(m.ctx_to_patch[v]);
  for (int e : m.shape.arcs) {
    if (m.ctx.arc_info[e].is_virtual || m.arc_patch[e] < 0)
      throw MalformedArrangement(
          "represented walk leaves the support (arrangement not complete)");
    out.arcs.push_back(m.arc_patch[e]);
  }
  return out;
}

TreeArrangement saw_to_complete_arrangement(const Patch& patch, const Walk& w) {
  if (w.length() < 1)
    throw PreconditionFailed("trivial walks have no complete arrangement");
  if (!is_saw(patch.graph, w))
    throw PreconditionFailed("walk is not a SAW on the patch");

  // Support: every instance owning an edge of the walk, plus the connecting
  // tree paths.
  std::vector<int> owners;
  for (int e : w.arcs) owners.push_back(patch.arc_owner[e]);
  std::set<int> support(owners.begin(), owners.end());
  for (size_t i = 0; i + 1 < owners.size(); ++i)
    for (int t : patch.tree_path(owners[i], owners[i + 1])) support.insert(t);

  TreeArrangement a;
  a.instances.assign(support.begin(), support.end());

  // Per-instance shapes.
  std::map<int, PartContext> ctxs;
  for (int inst : a.instances) ctxs.emplace(inst, context_for_instance(patch, inst));
  for (int inst : a.instances) {
    const PartContext& ctx = ctxs.at(inst);
    std::set<int> vset(patch.instances[inst].verts.begin(),
                       patch.instances[inst].verts.end());
    auto idx = visits_to(w, vset);
    if (idx.empty())
      throw MalformedArrangement("support instance missed by the walk");
    Walk shape;
    shape.verts.push_back(patch.local_index(inst, w.verts[idx[0]]));
    for (size_t j = 1; j < idx.size(); ++j) {
      int ia = idx[j - 1], ib = idx[j];
      int lu = patch.local_index(inst, w.verts[ia]);
      int lv = patch.local_index(inst, w.verts[ib]);
      int arc = -1;
      if (ib == ia + 1 && patch.arc_owner[w.arcs[ia]] == inst) {
        arc = ctx.find_real_arc(lu, lv);
      } else {
        // the excursion lives in the cone behind exactly one port
        int owner = patch.arc_owner[w.arcs[ia]];
        auto path = patch.tree_path(inst, owner);
        if (path.size() < 2)
          throw MalformedArrangement("excursion owner inside the instance");
        int port = port_towards(patch, inst, path[1]);
        int pu = ctx.tuple_position(port, lu);
        int pv = ctx.tuple_position(port, lv);
        if (port < 0 || pu < 0 || pv < 0)
          throw MalformedArrangement("excursion does not cross a port");
        arc = ctx.find_virtual_arc(port, pu, pv);
      }
      if (arc < 0) throw MalformedArrangement("no arc available for a step");
      shape.arcs.push_back(arc);
      shape.verts.push_back(lv);
    }
    a.shapes[inst] = std::move(shape);
  }

  // Directions: X points toward the part owning the first arc, Y toward the
  // part owning the last arc.
  int s0 = patch.arc_owner[w.arcs.front()];
  int t0 = patch.arc_owner[w.arcs.back()];
  auto towards = [&](int inst, int nbr, int target) {
    // Role of the side of edge (inst, nbr) containing `target`.
    auto path = patch.tree_path(nbr, target);
    bool through_inst =
        std::find(path.begin(), path.end(), inst) != path.end();
    int side_inst = through_inst ? inst : nbr;
    return instance_role(patch, side_inst);
  };
  for (int inst : a.instances) {
    const PartInstance& in = patch.instances[inst];
    const PartContext& ctx = ctxs.at(inst);
    for (size_t q = 0; q < in.port_neighbor.size(); ++q) {
      int nbr = in.port_neighbor[q];
      bool interior = nbr >= 0 && support.count(nbr);
      ConfigKey c;
      c.pair = ctx.ports[q].pair;
      c.q = induced_crossing(ctx, a.shapes.at(inst), static_cast<int>(q));
      if (interior) {
        c.x = towards(inst, nbr, s0);
        c.y = towards(inst, nbr, t0);
      } else {
        c.x = instance_role(patch, inst);
        c.y = instance_role(patch, inst);
      }
      auto key = std::make_pair(inst, static_cast<int>(q));
      auto it = a.configs.find(key);
      if (it != a.configs.end() && !(it->second == c))
        throw MalformedArrangement("inconsistent configuration across an edge");
      a.configs[key] = c;
    }
  }
  return a;
}

namespace {

struct CompleteEnumerator {
  const Patch& patch;
  int max_weight;
  const std::function<void(const TreeArrangement&)>& sink;
  long long guard = 0;

  struct Pending {
    int inst;
    int port;
    ConfigKey cfg;
  };

  TreeArrangement acc;
  std::vector<Pending> pending;
  int weight = 0;

  void expand() {
    if (++guard > 200'000'000)
      throw InvariantViolation("complete arrangement enumeration runaway");
    if (pending.empty()) {
      TreeArrangement copy = acc;
      std::sort(copy.instances.begin(), copy.instances.end());
      sink(copy);
      return;
    }
    Pending next = pending.back();
    pending.pop_back();
    int nbr = patch.instances[next.inst].port_neighbor[next.port];
    if (nbr < 0)
      throw ResourceLimitError(
          "patch too small for the requested arrangement enumeration");
    int nport = port_towards(patch, nbr, next.inst);
    PartContext ctx = context_for_instance(patch, nbr);

    StarConstraints cons;
    cons.pinned_port = nport;
    cons.pinned = next.cfg;
    cons.max_weight = max_weight - weight -
                      static_cast<int>(pending.size());
    enumerate_star_arrangements(ctx, cons, [&](const StarArrangement& arr) {
      int extra = 0;
      for (const auto& [p, cfg] : arr.port_configs)
        if (p != nport && !cfg.is_boring()) ++extra;
      if (weight + arr.weight + static_cast<int>(pending.size()) + extra >
          max_weight)
        return;

      acc.instances.push_back(nbr);
      acc.shapes[nbr] = arr.shape;
      size_t pushed = 0;
      const PartInstance& in = patch.instances[nbr];
      for (size_t q = 0; q < in.port_neighbor.size(); ++q) {
        if (static_cast<int>(q) == nport) {
          acc.configs[{nbr, static_cast<int>(q)}] = next.cfg;
          continue;
        }
        const ConfigKey* c = arr.config_at(static_cast<int>(q));
        ConfigKey cfg;
        if (c) {
          cfg = *c;
        } else {
          cfg.pair = ctx.ports[q].pair;
          cfg.x = cfg.y = ctx.ports[q].my_role;
        }
        acc.configs[{nbr, static_cast<int>(q)}] = cfg;
        if (!cfg.is_boring()) {
          pending.push_back({nbr, static_cast<int>(q), cfg});
          ++pushed;
        }
      }
      weight += arr.weight;
      expand();
      weight -= arr.weight;
      for (size_t i = 0; i < pushed; ++i) pending.pop_back();
      for (size_t q = 0; q < in.port_neighbor.size(); ++q)
        acc.configs.erase({nbr, static_cast<int>(q)});
      acc.shapes.erase(nbr);
      acc.instances.pop_back();
    });
    pending.push_back(next);
  }
};

}  // namespace

void enumerate_complete_arrangements(
    const Patch& patch, int origin, int max_weight,
    const std::function<void(const TreeArrangement&)>& sink) {
  for (int inst : patch.instances_of_vertex(origin)) {
    PartContext ctx = context_for_instance(patch, inst);
    StarConstraints cons;
    cons.start_vertex = patch.local_index(inst, origin);
    cons.entries_inward = true;
    cons.max_weight = max_weight;
    CompleteEnumerator en{patch, max_weight, sink, 0, {}, {}, 0};
    enumerate_star_arrangements(ctx, cons, [&](const StarArrangement& arr) {
      if (arr.shape.length() == 0) return;
      int extra = 0;
      for (const auto& [p, cfg] : arr.port_configs)
        if (!cfg.is_boring()) ++extra;
      if (arr.weight + extra > max_weight) return;

      en.acc = TreeArrangement{};
      en.pending.clear();
      en.weight = arr.weight;
      en.acc.instances.push_back(inst);
      en.acc.shapes[inst] = arr.shape;
      const PartInstance& in = patch.instances[inst];
      for (size_t q = 0; q < in.port_neighbor.size(); ++q) {
        const ConfigKey* c = arr.config_at(static_cast<int>(q));
        ConfigKey cfg;
        if (c) {
          cfg = *c;
        } else {
          cfg.pair = ctx.ports[q].pair;
          cfg.x = cfg.y = ctx.ports[q].my_role;
        }
        en.acc.configs[{inst, static_cast<int>(q)}] = cfg;
        if (!cfg.is_boring())
          en.pending.push_back({inst, static_cast<int>(q), cfg});
      }
      en.expand();
    });
  }
}

void enumerate_completions(const Patch& patch, int inst, int port,
                           const ConfigKey& pinned, int max_weight,
                           const std::function<void(int)>& sink) {
  struct Rec {
    const Patch& patch;
    int max_weight;
    const std::function<void(int)>& sink;
    int weight = 0;
    std::vector<CompleteEnumerator::Pending> pending = {};
    long long guard = 0;

    void expand() {
      if (++guard > 200'000'000)
        throw InvariantViolation("completion enumeration runaway");
      if (pending.empty()) {
        sink(weight);
        return;
      }
      auto next = pending.back();
      pending.pop_back();
      int nbr = patch.instances[next.inst].port_neighbor[next.port];
      if (nbr < 0)
        throw ResourceLimitError("patch too small for completion enumeration");
      int nport = port_towards(patch, nbr, next.inst);
      PartContext ctx = context_for_instance(patch, nbr);
      StarConstraints cons;
      cons.pinned_port = nport;
      cons.pinned = next.cfg;
      cons.max_weight =
          max_weight - weight - static_cast<int>(pending.size());
      enumerate_star_arrangements(ctx, cons, [&](const StarArrangement& arr) {
        int extra = 0;
        std::vector<CompleteEnumerator::Pending> add;
        for (const auto& [p, cfg] : arr.port_configs)
          if (p != nport && !cfg.is_boring()) {
            ++extra;
            add.push_back({nbr, p, cfg});
          }
        if (weight + arr.weight + static_cast<int>(pending.size()) + extra >
            max_weight)
          return;
        weight += arr.weight;
        for (auto& p : add) pending.push_back(p);
        expand();
        for (size_t i = 0; i < add.size(); ++i) pending.pop_back();
        weight -= arr.weight;
      });
      pending.push_back(next);
    }
  };

  Rec rec{patch, max_weight, sink};
  rec.pending.push_back({inst, port, pinned});
  rec.expand();
}

}  // namespace endwalk
