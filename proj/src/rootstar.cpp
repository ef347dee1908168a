#include "endwalk/rootstar.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace endwalk {

RootStar root_contract(const GraphTemplate& t, RootLimits lim) {
  RootStar root;
  // Distances out to 3 are exact on this patch, and every part containing a
  // vertex at distance <= 2 is materialized (such vertices are not dangling).
  root.patch = build_patch_for_distance(t, 4, lim.max_instances);
  const Patch& patch = root.patch;
  auto dist = bfs_distances(patch.graph, patch.root_vertex);

  std::set<int> in_s;
  for (size_t id = 0; id < patch.instances.size(); ++id)
    for (int v : patch.instances[id].verts)
      if (dist[v] >= 0 && dist[v] <= 2) {
        in_s.insert(static_cast<int>(id));
        break;
      }
  root.instances.assign(in_s.begin(), in_s.end());

  // Merged vertex set.
  std::set<int> vset;
  for (int id : root.instances)
    for (int v : patch.instances[id].verts) vset.insert(v);
  if (static_cast<int>(vset.size()) > lim.max_vertices)
    throw ResourceLimitError("root star exceeds vertex cap");
  root.ctx_to_patch.assign(vset.begin(), vset.end());
  std::map<int, int> to_ctx;
  for (size_t i = 0; i < root.ctx_to_patch.size(); ++i)
    to_ctx[root.ctx_to_patch[i]] = static_cast<int>(i);

  PartContext& ctx = root.ctx;
  ctx.g = Digraph(static_cast<int>(vset.size()));
  for (int id : root.instances)
    for (int e : patch.instances[id].owned_arcs) {
      const Arc& a = patch.graph.arc(e);
      ctx.g.add_edge(to_ctx.at(a.tail), to_ctx.at(a.head));
      ctx.arc_info.push_back({});
      ctx.arc_info.push_back({});
    }

  for (int id : root.instances) {
    const PartInstance& in = patch.instances[id];
    const PartType& p = t.parts[in.part_type];
    for (size_t q = 0; q < p.ports.size(); ++q) {
      int nbr = in.port_neighbor[q];
      if (nbr >= 0 && in_s.count(nbr)) continue;  // interior tree edge
      ContextPort port;
      port.pair = t.pair_at(in.part_type, static_cast<int>(q));
      port.my_role = p.role;
      for (int pv : canonical_port_patch_vertices(patch, id, static_cast<int>(q)))
        port.tuple.push_back(to_ctx.at(pv));
      int pidx = static_cast<int>(ctx.ports.size());
      int k = static_cast<int>(port.tuple.size());
      for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
          ctx.g.add_edge(port.tuple[i], port.tuple[j]);
          ctx.arc_info.push_back({true, pidx, i, j});
          ctx.arc_info.push_back({true, pidx, j, i});
        }
      ctx.ports.push_back(std::move(port));
      root.port_source.emplace_back(id, static_cast<int>(q));
    }
  }
  ctx.vertex_ports.resize(ctx.g.vertex_count());
  for (size_t q = 0; q < ctx.ports.size(); ++q)
    for (size_t i = 0; i < ctx.ports[q].tuple.size(); ++i)
      ctx.vertex_ports[ctx.ports[q].tuple[i]].push_back(
          {static_cast<int>(q), static_cast<int>(i)});

  root.origin = to_ctx.at(patch.root_vertex);

  // Every edge at o or a neighbour of o must be internal, and o must stay
  // clear of all boundary adhesions; both are what makes the merged part the
  // source of every complete arrangement from o.
  for (int e = 0; e < patch.graph.arc_count(); ++e) {
    const Arc& a = patch.graph.arc(e);
    if (dist[a.tail] <= 1 && !in_s.count(patch.arc_owner[e]))
      throw InvariantViolation("root star misses an edge near the origin");
  }
  for (const ContextPort& p : ctx.ports)
    for (int v : p.tuple)
      if (v == root.origin)
        throw InvariantViolation("origin lies in a boundary adhesion");

  return root;
}

Polynomial root_walk_polynomial(const PolynomialSystem& sys,
                                const RootStar& root, int max_weight,
                                bool returns_only, long long max_shapes) {
  const GraphTemplate& t = *sys.tpl;
  SymmetryGroup group = symmetry_group(t);

  StarConstraints cons;
  cons.start_vertex = root.origin;
  cons.entries_inward = true;
  cons.max_weight = max_weight;
  cons.max_shapes = max_shapes;
  if (returns_only) {
    cons.exits_inward = true;
    for (int e : root.ctx.g.out_arcs(root.origin))
      if (!root.ctx.arc_info[e].is_virtual)
        cons.end_in.push_back(root.ctx.g.arc(e).head);
    std::sort(cons.end_in.begin(), cons.end_in.end());
    cons.end_in.erase(std::unique(cons.end_in.begin(), cons.end_in.end()),
                      cons.end_in.end());
  }

  Polynomial out;
  enumerate_star_arrangements(root.ctx, cons, [&](const StarArrangement& arr) {
    if (arr.shape.length() == 0) return;  // the trivial walk is not counted
    std::vector<std::pair<int, int>> yf;
    for (const auto& [p, cfg] : arr.port_configs) {
      if (cfg.is_boring()) continue;
      if (returns_only && !cfg.is_U())
        throw InvariantViolation("SAR assembly produced a non-U factor");
      int idx = sys.class_index(canonical_config(t, group, cfg));
      if (idx < 0) return;  // factor has no completions: term vanishes
      bool merged = false;
      for (auto& [i, pow] : yf)
        if (i == idx) {
          ++pow;
          merged = true;
        }
      if (!merged) yf.emplace_back(idx, 1);
    }
    std::sort(yf.begin(), yf.end());
    out.add_term(arr.weight, std::move(yf), 1);
  });
  return out;
}

namespace {

std::vector<BigInt> assemble(const PolynomialSystem& sys, const RootStar& root,
                             int N, bool returns_only, long long max_shapes) {
  std::vector<TruncatedSeries> f = series_fixed_point(sys, N);
  Polynomial p = root_walk_polynomial(sys, root, N, returns_only, max_shapes);
  TruncatedSeries s = eval_polynomial(p, f, N);
  return std::vector<BigInt>(s.coef.begin() + 1, s.coef.end());
}

}  // namespace

std::vector<BigInt> series_coefficients(const PolynomialSystem& sys,
                                        const RootStar& root, int N,
                                        long long max_shapes) {
  if (N < 1) throw std::invalid_argument("series_coefficients: N must be >= 1");
  return assemble(sys, root, N, false, max_shapes);
}

std::vector<BigInt> series_returns(const PolynomialSystem& sys,
                                   const RootStar& root, int N,
                                   long long max_shapes) {
  if (N < 1) throw std::invalid_argument("series_returns: N must be >= 1");
  return assemble(sys, root, N, true, max_shapes);
}

}  // namespace endwalk
