#include "endwalk/star.hpp"

#include <algorithm>
#include <stdexcept>

namespace endwalk {

int PartContext::weight_of(const Walk& w) const {
  int n = 0;
  for (int e : w.arcs)
    if (!arc_info[e].is_virtual) ++n;
  return n;
}

bool PartContext::in_tuple(int port, int vertex) const {
  return tuple_position(port, vertex) >= 0;
}

int PartContext::tuple_position(int port, int vertex) const {
  for (auto [p, pos] : vertex_ports[vertex])
    if (p == port) return pos;
  return -1;
}

int PartContext::find_real_arc(int u, int v) const {
  for (int e : g.out_arcs(u))
    if (g.arc(e).head == v && !arc_info[e].is_virtual) return e;
  return -1;
}

int PartContext::find_virtual_arc(int port, int from_pos, int to_pos) const {
  int u = ports[port].tuple[from_pos];
  for (int e : g.out_arcs(u)) {
    const ArcInfo& info = arc_info[e];
    if (info.is_virtual && info.port == port && info.from == from_pos &&
        info.to == to_pos)
      return e;
  }
  return -1;
}

PartContext context_for_part(const GraphTemplate& t, int part) {
  const PartType& p = t.parts[part];
  PartContext ctx;
  ctx.g = Digraph(p.n);
  for (auto [u, v] : p.edges) {
    ctx.g.add_edge(u, v);
    ctx.arc_info.push_back({});
    ctx.arc_info.push_back({});
  }
  for (size_t q = 0; q < p.ports.size(); ++q) {
    int pair = t.pair_at(part, static_cast<int>(q));
    if (pair < 0) throw std::logic_error("context_for_part: unmatched port");
    const GluingPair& gp = t.gluing[pair];
    ContextPort port;
    port.pair = pair;
    port.my_role = p.role;
    int k = static_cast<int>(p.ports[q].size());
    port.tuple.resize(k);
    for (int i = 0; i < k; ++i) {
      int local = (p.role == Role::A) ? p.ports[q][i] : p.ports[q][gp.map[i]];
      port.tuple[i] = local;
    }
    int port_idx = static_cast<int>(ctx.ports.size());
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j) {
        int e = ctx.g.add_edge(port.tuple[i], port.tuple[j]);
        ctx.arc_info.push_back({true, port_idx, i, j});
        ctx.arc_info.push_back({true, port_idx, j, i});
        (void)e;
      }
    ctx.ports.push_back(std::move(port));
  }
  ctx.vertex_ports.resize(p.n);
  for (size_t q = 0; q < ctx.ports.size(); ++q)
    for (size_t i = 0; i < ctx.ports[q].tuple.size(); ++i)
      ctx.vertex_ports[ctx.ports[q].tuple[i]].push_back(
          {static_cast<int>(q), static_cast<int>(i)});
  return ctx;
}

PartContext context_for_instance(const Patch& patch, int inst) {
  return context_for_part(*patch.tpl, patch.instances[inst].part_type);
}

std::vector<int> canonical_port_patch_vertices(const Patch& patch, int inst,
                                               int port) {
  const PartInstance& in = patch.instances[inst];
  const PartType& p = patch.tpl->parts[in.part_type];
  int pair = patch.tpl->pair_at(in.part_type, port);
  const GluingPair& gp = patch.tpl->gluing[pair];
  int k = static_cast<int>(p.ports[port].size());
  std::vector<int> out(k);
  for (int i = 0; i < k; ++i) {
    int local = (p.role == Role::A) ? p.ports[port][i] : p.ports[port][gp.map[i]];
    out[i] = in.verts[local];
  }
  return out;
}

CrossingWalk induced_crossing(const PartContext& ctx, const Walk& shape,
                              int port) {
  CrossingWalk q;
  const ContextPort& cp = ctx.ports[port];
  int prev_shape_idx = -1;
  for (size_t i = 0; i < shape.verts.size(); ++i) {
    int pos = -1;
    for (auto [p, tpos] : ctx.vertex_ports[shape.verts[i]])
      if (p == port) pos = tpos;
    if (pos < 0) continue;
    if (!q.verts.empty()) {
      bool far = (static_cast<int>(i) == prev_shape_idx + 1);
      if (far) {
        const auto& info = ctx.arc_info[shape.arcs[prev_shape_idx]];
        far = info.is_virtual && info.port == port;
      }
      q.sides.push_back(far ? opposite(cp.my_role) : cp.my_role);
    }
    q.verts.push_back(pos);
    prev_shape_idx = static_cast<int>(i);
  }
  return q;
}

ConfigKey induced_config(const PartContext& ctx, const Walk& shape, int port,
                         bool entry_out, bool exit_out) {
  const ContextPort& cp = ctx.ports[port];
  ConfigKey c;
  c.pair = cp.pair;
  c.x = entry_out ? opposite(cp.my_role) : cp.my_role;
  c.y = exit_out ? opposite(cp.my_role) : cp.my_role;
  c.q = induced_crossing(ctx, shape, port);
  return c;
}

std::optional<std::string> compatibility_violation(const PartContext& ctx,
                                                   const Walk& shape, int port,
                                                   const ConfigKey& cfg) {
  const ContextPort& cp = ctx.ports[port];
  if (cfg.pair != cp.pair) return "pair mismatch";
  if (induced_crossing(ctx, shape, port) != cfg.q) return "C1";
  bool entry_out = cfg.x == opposite(cp.my_role);
  bool exit_out = cfg.y == opposite(cp.my_role);
  if (entry_out && (shape.empty() || !ctx.in_tuple(port, shape.first())))
    return "C2";
  if (exit_out && (shape.empty() || !ctx.in_tuple(port, shape.last())))
    return "C3";
  return std::nullopt;
}

namespace {

struct Enumerator {
  const PartContext& ctx;
  const StarConstraints& cons;
  const std::function<void(const StarArrangement&)>& sink;
  long long emitted_shapes = 0;
  bool pinned_entry_out = false;
  bool pinned_exit_out = false;

  void process_shape(const Walk& w, int weight) {
    if (++emitted_shapes > cons.max_shapes)
      throw ResourceLimitError("star arrangement shape cap exceeded");
    if (!cons.end_in.empty() &&
        std::find(cons.end_in.begin(), cons.end_in.end(), w.last()) ==
            cons.end_in.end())
      return;

    // Touched ports and their crossing walks.
    std::vector<int> touched;
    for (int v : w.verts)
      for (auto [p, pos] : ctx.vertex_ports[v])
        if (std::find(touched.begin(), touched.end(), p) == touched.end())
          touched.push_back(p);
    std::sort(touched.begin(), touched.end());
    std::vector<CrossingWalk> crossing(touched.size());
    for (size_t i = 0; i < touched.size(); ++i)
      crossing[i] = induced_crossing(ctx, w, touched[i]);

    auto crossing_of = [&](int port) -> const CrossingWalk* {
      for (size_t i = 0; i < touched.size(); ++i)
        if (touched[i] == port) return &crossing[i];
      return nullptr;
    };

    if (cons.pinned) {
      static const CrossingWalk kEmpty{};
      const CrossingWalk* qc = crossing_of(cons.pinned_port);
      const CrossingWalk& have = qc ? *qc : kEmpty;
      if (!(have == cons.pinned->q)) return;
    }

    bool starts_real = !w.arcs.empty() && !ctx.arc_info[w.arcs.front()].is_virtual;
    bool ends_real = !w.arcs.empty() && !ctx.arc_info[w.arcs.back()].is_virtual;

    // Entry options under (C2)/(D2).
    std::vector<int> entry_opts;  // -2 = none
    if (cons.pinned && pinned_entry_out) {
      if (!cons.entries_inward && ctx.in_tuple(cons.pinned_port, w.first()))
        entry_opts.push_back(cons.pinned_port);
    } else {
      if (!cons.entries_inward)
        for (auto [p, pos] : ctx.vertex_ports[w.first()])
          if (p != cons.pinned_port) entry_opts.push_back(p);
      if (starts_real) entry_opts.push_back(-2);
      std::sort(entry_opts.begin(), entry_opts.end());
    }

    std::vector<int> exit_opts;
    if (cons.pinned && pinned_exit_out) {
      if (!cons.exits_inward && ctx.in_tuple(cons.pinned_port, w.last()))
        exit_opts.push_back(cons.pinned_port);
    } else {
      if (!cons.exits_inward)
        for (auto [p, pos] : ctx.vertex_ports[w.last()])
          if (p != cons.pinned_port) exit_opts.push_back(p);
      if (ends_real) exit_opts.push_back(-2);
      std::sort(exit_opts.begin(), exit_opts.end());
    }

    for (int entry : entry_opts)
      for (int exit : exit_opts) {
        StarArrangement arr;
        arr.shape = w;
        arr.weight = weight;
        arr.entry_port = entry == -2 ? -1 : entry;
        arr.exit_port = exit == -2 ? -1 : exit;
        for (size_t i = 0; i < touched.size(); ++i) {
          int p = touched[i];
          const ContextPort& cp = ctx.ports[p];
          ConfigKey c;
          c.pair = cp.pair;
          c.x = (p == arr.entry_port) ? opposite(cp.my_role) : cp.my_role;
          c.y = (p == arr.exit_port) ? opposite(cp.my_role) : cp.my_role;
          c.q = crossing[i];
          arr.port_configs.emplace_back(p, std::move(c));
        }
        sink(arr);
      }
  }

  void run() {
    std::vector<int> starts;
    if (cons.start_vertex >= 0) {
      starts.push_back(cons.start_vertex);
    } else if (cons.pinned && pinned_entry_out) {
      if (cons.pinned->q.empty()) return;  // (C2) unsatisfiable
      starts.push_back(
          ctx.ports[cons.pinned_port].tuple[cons.pinned->q.verts.front()]);
    } else {
      starts.resize(ctx.g.vertex_count());
      for (int v = 0; v < ctx.g.vertex_count(); ++v) starts[v] = v;
    }

    for (int s : starts) {
      std::vector<char> used(ctx.g.vertex_count(), 0);
      Walk w;
      w.verts.push_back(s);
      used[s] = 1;
      dfs(w, used, 0);
    }
  }

  void dfs(Walk& w, std::vector<char>& used, int weight) {
    process_shape(w, weight);
    for (int e : ctx.g.out_arcs(w.last())) {
      int to = ctx.g.arc(e).head;
      if (used[to]) continue;
      int dw = ctx.arc_info[e].is_virtual ? 0 : 1;
      if (weight + dw > cons.max_weight) continue;
      used[to] = 1;
      w.verts.push_back(to);
      w.arcs.push_back(e);
      dfs(w, used, weight + dw);
      w.verts.pop_back();
      w.arcs.pop_back();
      used[to] = 0;
    }
  }
};

}  // namespace

void enumerate_star_arrangements(
    const PartContext& ctx, const StarConstraints& cons,
    const std::function<void(const StarArrangement&)>& sink) {
  if (cons.pinned) {
    if (cons.pinned_port < 0 ||
        cons.pinned_port >= static_cast<int>(ctx.ports.size()))
      throw std::invalid_argument("pinned port out of range");
    if (cons.pinned->pair != ctx.ports[cons.pinned_port].pair)
      throw std::invalid_argument("pinned configuration pair mismatch");
  }
  Enumerator en{ctx, cons, sink};
  if (cons.pinned) {
    Role r = ctx.ports[cons.pinned_port].my_role;
    en.pinned_entry_out = cons.pinned->x == opposite(r);
    en.pinned_exit_out = cons.pinned->y == opposite(r);
  }
  en.run();
}

}  // namespace endwalk
