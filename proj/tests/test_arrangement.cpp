#include <map>
#include <set>

#include "doctest.h"
#include "endwalk/arrangement.hpp"
#include "endwalk/oracle.hpp"

using namespace endwalk;

namespace {

GraphTemplate load(const char* name) {
  return GraphTemplate::from_file(std::string(ENDWALK_DATA_DIR) + "/" + name);
}

std::vector<Walk> all_saws(const Patch& patch, int origin, int max_len) {
  std::vector<Walk> walks;
  std::function<void(const Walk&)> sink = [&](const Walk& w) {
    if (w.length() >= 1) walks.push_back(w);
  };
  enumerate_saws(patch.graph, origin, max_len, &sink);
  return walks;
}

std::string walk_fingerprint(const Walk& w) {
  std::string s;
  for (size_t i = 0; i < w.verts.size(); ++i) {
    s += std::to_string(w.verts[i]);
    s += i + 1 < w.verts.size() ? "," : "";
  }
  return s;
}

// All arrangements on the open star pair around the tree edge
// (inst_x, port_x): enumerate both sides independently and join them on the
// shared configuration.
std::vector<TreeArrangement> star_pair_arrangements(const Patch& patch,
                                                    int inst_x, int port_x) {
  int inst_y = patch.instances[inst_x].port_neighbor[port_x];
  PartContext cx = context_for_instance(patch, inst_x);
  PartContext cy = context_for_instance(patch, inst_y);
  int port_y = -1;
  for (size_t q = 0; q < patch.instances[inst_y].port_neighbor.size(); ++q)
    if (patch.instances[inst_y].port_neighbor[q] == inst_x)
      port_y = static_cast<int>(q);
  REQUIRE(port_y >= 0);

  auto collect = [&](const PartContext& ctx) {
    std::vector<StarArrangement> all;
    enumerate_star_arrangements(ctx, {}, [&](const StarArrangement& a) {
      all.push_back(a);
    });
    return all;
  };
  auto ax = collect(cx);
  auto ay = collect(cy);

  auto config_at_edge = [&](const PartContext& ctx, const StarArrangement& a,
                            int port) {
    const ConfigKey* c = a.config_at(port);
    if (c) return *c;
    ConfigKey cfg;
    cfg.pair = ctx.ports[port].pair;
    cfg.x = cfg.y = ctx.ports[port].my_role;
    return cfg;
  };

  std::multimap<ConfigKey, size_t> by_cfg;
  for (size_t j = 0; j < ay.size(); ++j)
    by_cfg.insert({config_at_edge(cy, ay[j], port_y), j});

  std::vector<TreeArrangement> out;
  for (const StarArrangement& a : ax) {
    ConfigKey cfg = config_at_edge(cx, a, port_x);
    if (cfg.q.empty()) continue;  // interior edges carry non-empty crossings
    auto range = by_cfg.equal_range(cfg);
    for (auto it = range.first; it != range.second; ++it) {
      const StarArrangement& b = ay[it->second];
      TreeArrangement t;
      t.instances = {std::min(inst_x, inst_y), std::max(inst_x, inst_y)};
      t.shapes[inst_x] = a.shape;
      t.shapes[inst_y] = b.shape;
      for (size_t q = 0; q < cx.ports.size(); ++q)
        t.configs[{inst_x, static_cast<int>(q)}] =
            config_at_edge(cx, a, static_cast<int>(q));
      for (size_t q = 0; q < cy.ports.size(); ++q)
        t.configs[{inst_y, static_cast<int>(q)}] =
            config_at_edge(cy, b, static_cast<int>(q));
      out.push_back(std::move(t));
    }
  }
  return out;
}

bool same_arrangement(const TreeArrangement& a, const TreeArrangement& b) {
  return a.instances == b.instances && a.shapes == b.shapes &&
         a.configs == b.configs;
}

}  // namespace

TEST_CASE("saw to complete arrangement round trip") {
  for (const char* name : {"triangle_edge.json", "ladder.json", "t3.json"}) {
    auto t = load(name);
    auto patch = build_patch_for_distance(t, 8);
    int max_len = 6;
    REQUIRE(*exact_horizon(patch, patch.root_vertex) >= max_len);
    auto walks = all_saws(patch, patch.root_vertex, max_len);
    for (const Walk& w : walks) {
      TreeArrangement a = saw_to_complete_arrangement(patch, w);
      CHECK(a.is_complete(patch));
      CHECK(a.weight(patch) == w.length());
      Walk back = arrangement_to_saw(patch, a);
      CHECK(back == w);
      // the source part owns the first arc of the walk
      CHECK(a.source(patch) == patch.arc_owner[w.arcs.front()]);
      CHECK(a.target(patch) == patch.arc_owner[w.arcs.back()]);
      // empty configurations occur only on boundary arcs
      for (const auto& [key, cfg] : a.configs) {
        int nbr = patch.instances[key.first].port_neighbor[key.second];
        bool interior = nbr >= 0 && a.has_instance(nbr);
        if (interior) CHECK(!cfg.q.empty());
      }
    }
  }
}

TEST_CASE("trivial walks are rejected") {
  auto t = load("triangle_edge.json");
  auto patch = build_patch_for_distance(t, 4);
  Walk w;
  w.verts = {patch.root_vertex};
  CHECK_THROWS_AS(saw_to_complete_arrangement(patch, w), PreconditionFailed);
}

TEST_CASE("complete arrangement enumeration is the SAW bijection") {
  auto t = load("triangle_edge.json");
  auto patch = build_patch_for_distance(t, 8);
  int max_w = 4;
  std::map<std::string, int> seen;
  std::vector<TreeArrangement> arrangements;
  enumerate_complete_arrangements(patch, patch.root_vertex, max_w,
                                  [&](const TreeArrangement& a) {
                                    arrangements.push_back(a);
                                  });
  for (const auto& a : arrangements) {
    CHECK(a.is_complete(patch));
    Walk w = arrangement_to_saw(patch, a);
    CHECK(w.length() == a.weight(patch));
    seen[walk_fingerprint(w)]++;
    // the enumerated arrangement matches the direct construction
    TreeArrangement direct = saw_to_complete_arrangement(patch, w);
    CHECK(same_arrangement(a, direct));
  }
  auto walks = all_saws(patch, patch.root_vertex, max_w);
  CHECK(walks.size() == arrangements.size());
  for (const Walk& w : walks) {
    auto it = seen.find(walk_fingerprint(w));
    REQUIRE(it != seen.end());
    CHECK(it->second == 1);  // exactly one complete arrangement per walk
  }
}

TEST_CASE("contraction and projection are mutually inverse") {
  long long checked = 0;
  struct Spot {
    const char* name;
    int radius;
  };
  for (Spot spot : {Spot{"ladder.json", 3}, Spot{"triangle_edge.json", 2},
                    Spot{"k4_edge.json", 2}, Spot{"prism.json", 3},
                    Spot{"t3.json", 3}, Spot{"double_ray.json", 3}}) {
    auto t = load(spot.name);
    auto patch = build_patch(t, spot.radius);
    for (size_t inst = 0; inst < patch.instances.size(); ++inst) {
      const PartInstance& in = patch.instances[inst];
      for (size_t q = 0; q < in.port_neighbor.size(); ++q) {
        if (in.port_neighbor[q] < static_cast<int>(inst)) continue;
        if (in.port_neighbor[q] < 0) continue;
        int inst_x = static_cast<int>(inst);
        int port_x = static_cast<int>(q);
        auto arrangements = star_pair_arrangements(patch, inst_x, port_x);
        for (const auto& a : arrangements) {
          MergedStar m = contract_arrangement(patch, a, inst_x, port_x);
          CHECK(m.ctx.weight_of(m.shape) == a.weight(patch));
          TreeArrangement back = project_arrangement(patch, m, inst_x, port_x);
          CHECK(same_arrangement(a, back));
          MergedStar m2 = contract_arrangement(patch, back, inst_x, port_x);
          CHECK(m2.shape == m.shape);
          CHECK(m2.configs == m.configs);
          ++checked;
        }
      }
    }
  }
  MESSAGE("checked ", checked, " star-pair arrangements");
  CHECK(checked > 10000);
}

TEST_CASE("projection needs the shape to meet the adhesion") {
  auto t = load("ladder.json");
  auto patch = build_patch(t, 2);
  auto arrangements = star_pair_arrangements(patch, 0, 0);
  REQUIRE(!arrangements.empty());
  MergedStar m = contract_arrangement(patch, arrangements.front(), 0, 0);
  // strip the shape down to a vertex away from the adhesion
  std::vector<int> crossing = canonical_port_patch_vertices(patch, 0, 0);
  std::set<int> cross(crossing.begin(), crossing.end());
  int far = -1;
  for (size_t i = 0; i < m.ctx_to_patch.size(); ++i)
    if (!cross.count(m.ctx_to_patch[i])) far = static_cast<int>(i);
  REQUIRE(far >= 0);
  m.shape = Walk{{far}, {}};
  CHECK_THROWS_AS(project_arrangement(patch, m, 0, 0), PreconditionFailed);
}

TEST_CASE("contraction order does not matter") {
  auto t = load("triangle_edge.json");
  auto patch = build_patch_for_distance(t, 8);
  auto walks = all_saws(patch, patch.root_vertex, 6);
  int step = std::max<size_t>(1, walks.size() / 100);
  int tried = 0;
  for (size_t i = 0; i < walks.size(); i += step) {
    TreeArrangement a = saw_to_complete_arrangement(patch, walks[i]);
    std::vector<std::pair<int, int>> edges;
    for (int inst : a.instances) {
      const PartInstance& in = patch.instances[inst];
      for (size_t q = 0; q < in.port_neighbor.size(); ++q)
        if (in.port_neighbor[q] > inst && a.has_instance(in.port_neighbor[q]))
          edges.emplace_back(inst, static_cast<int>(q));
    }
    if (edges.size() < 2) continue;
    auto forward = merge_all(patch, a, &edges);
    std::reverse(edges.begin(), edges.end());
    auto backward = merge_all(patch, a, &edges);
    // same represented walk in patch coordinates
    Walk wf, wb;
    for (int v : forward.shape.verts) wf.verts.push_back(forward.ctx_to_patch[v]);
    for (int v : backward.shape.verts) wb.verts.push_back(backward.ctx_to_patch[v]);
    CHECK(wf.verts == wb.verts);
    ++tried;
  }
  CHECK(tried > 10);
}

TEST_CASE("completion enumeration matches the F series") {
  for (const char* name : {"triangle_edge.json", "ladder.json"}) {
    auto t = load(name);
    auto sys = prune_unproductive(build_system(t));
    int W = 5;
    auto f = series_fixed_point(sys, W);
    auto patch = build_patch(t, 3 * W + 6);
    // completions of class c hang off any tree arc of the right pair type
    // and orientation; pick one per class
    for (size_t ci = 0; ci < sys.classes.size(); ++ci) {
      const ConfigKey& c = sys.classes[ci];
      int inst = -1, port = -1;
      for (size_t id = 0; id < patch.instances.size() && inst < 0; ++id) {
        const PartInstance& in = patch.instances[id];
        Role r = t.parts[in.part_type].role;
        if (r != c.x) continue;  // the entry arc points toward this side
        for (size_t q = 0; q < in.port_neighbor.size(); ++q) {
          if (in.port_neighbor[q] < 0) continue;
          if (patch.tpl->pair_at(in.part_type, static_cast<int>(q)) == c.pair &&
              patch.instances[id].tree_depth <= 2) {
            inst = static_cast<int>(id);
            port = static_cast<int>(q);
            break;
          }
        }
      }
      REQUIRE(inst >= 0);
      std::vector<BigInt> counts(W + 1, 0);
      enumerate_completions(patch, inst, port, c, W,
                            [&](int w) { counts[w] += 1; });
      for (int w = 1; w <= W; ++w) CHECK(counts[w] == f[ci].coef[w]);
      CHECK(counts[0] == 0);
    }
  }
}
