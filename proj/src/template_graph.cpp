#include "endwalk/template_graph.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace endwalk {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

int GraphTemplate::part_index(const std::string& id) const {
  for (size_t i = 0; i < parts.size(); ++i)
    if (parts[i].id == id) return static_cast<int>(i);
  return -1;
}

int GraphTemplate::pair_at(int part, int port) const {
  for (size_t g = 0; g < gluing.size(); ++g) {
    const GluingPair& p = gluing[g];
    if ((p.part_a == part && p.port_a == port) ||
        (p.part_b == part && p.port_b == port))
      return static_cast<int>(g);
  }
  return -1;
}

int GraphTemplate::port_of(int part, int g) const {
  const GluingPair& p = gluing[g];
  if (p.part_a == part) return p.port_a;
  if (p.part_b == part) return p.port_b;
  return -1;
}

int GraphTemplate::adhesion_size() const {
  for (const PartType& p : parts)
    if (!p.ports.empty()) return static_cast<int>(p.ports.front().size());
  return 0;
}

namespace {

void expect_keys(const json& j, const std::set<std::string>& allowed,
                 const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw std::runtime_error("template: unknown key '" + it.key() + "' in " +
                               where);
}

PartType parse_part(const json& j, Role role) {
  expect_keys(j, {"id", "n", "edges", "ports"}, "part");
  PartType p;
  p.role = role;
  p.id = j.at("id").get<std::string>();
  p.n = j.at("n").get<int>();
  for (const auto& e : j.at("edges"))
    p.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  for (const auto& q : j.at("ports"))
    p.ports.push_back(q.get<std::vector<int>>());
  return p;
}

}  // namespace

GraphTemplate GraphTemplate::from_json_text(const std::string& text) {
  json j = json::parse(text);
  expect_keys(j, {"name", "classA", "classB", "gluing", "root", "symmetries"},
              "top level");
  GraphTemplate t;
  t.name = j.value("name", "");
  for (const auto& p : j.at("classA")) t.parts.push_back(parse_part(p, Role::A));
  for (const auto& p : j.at("classB")) t.parts.push_back(parse_part(p, Role::B));
  for (const auto& g : j.at("gluing")) {
    expect_keys(g, {"a", "b", "map"}, "gluing");
    GluingPair gp;
    gp.part_a = t.part_index(g.at("a").at(0).get<std::string>());
    gp.port_a = g.at("a").at(1).get<int>();
    gp.part_b = t.part_index(g.at("b").at(0).get<std::string>());
    gp.port_b = g.at("b").at(1).get<int>();
    gp.map = g.at("map").get<std::vector<int>>();
    t.gluing.push_back(gp);
  }
  const auto& r = j.at("root");
  expect_keys(r, {"part", "vertex"}, "root");
  t.root_part = t.part_index(r.at("part").get<std::string>());
  t.root_vertex = r.at("vertex").get<int>();
  if (j.contains("symmetries")) {
    for (const auto& s : j.at("symmetries")) {
      expect_keys(s, {"part_perm", "vertex_perm", "port_perm"}, "symmetry");
      Symmetry sym;
      sym.vertex_perm.resize(t.parts.size());
      sym.port_perm.resize(t.parts.size());
      if (s.contains("part_perm")) {
        sym.part_perm.assign(t.parts.size(), -1);
        for (auto it = s.at("part_perm").begin(); it != s.at("part_perm").end();
             ++it) {
          int from = t.part_index(it.key());
          int to = t.part_index(it.value().get<std::string>());
          if (from < 0 || to < 0)
            throw std::runtime_error("symmetry: unknown part id in part_perm");
          sym.part_perm[from] = to;
        }
        for (size_t p = 0; p < t.parts.size(); ++p)
          if (sym.part_perm[p] < 0) sym.part_perm[p] = static_cast<int>(p);
      }
      for (size_t p = 0; p < t.parts.size(); ++p) {
        const std::string& id = t.parts[p].id;
        if (s.contains("vertex_perm") && s.at("vertex_perm").contains(id))
          sym.vertex_perm[p] = s.at("vertex_perm").at(id).get<std::vector<int>>();
        if (s.contains("port_perm") && s.at("port_perm").contains(id))
          sym.port_perm[p] = s.at("port_perm").at(id).get<std::vector<int>>();
      }
      t.symmetries.push_back(std::move(sym));
    }
  }
  return t;
}

GraphTemplate GraphTemplate::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open template file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string GraphTemplate::to_json_text() const {
  ordered_json j;
  j["name"] = name;
  for (const PartType& p : parts) {
    ordered_json pj;
    pj["id"] = p.id;
    pj["n"] = p.n;
    pj["edges"] = p.edges;
    pj["ports"] = p.ports;
    j[p.role == Role::A ? "classA" : "classB"].push_back(pj);
  }
  j["gluing"] = ordered_json::array();
  for (const GluingPair& g : gluing) {
    ordered_json gj;
    gj["a"] = {parts[g.part_a].id, g.port_a};
    gj["b"] = {parts[g.part_b].id, g.port_b};
    gj["map"] = g.map;
    j["gluing"].push_back(gj);
  }
  j["root"] = {{"part", parts[root_part].id}, {"vertex", root_vertex}};
  return j.dump(2);
}

namespace {

bool is_permutation(const std::vector<int>& p, int n) {
  if (static_cast<int>(p.size()) != n) return false;
  std::vector<char> seen(n, 0);
  for (int x : p) {
    if (x < 0 || x >= n || seen[x]) return false;
    seen[x] = 1;
  }
  return true;
}

// Connectivity of the part graph, virtual arcs included: each port tuple
// carries the complete adhesion graph.
bool part_connected(const PartType& p) {
  if (p.n == 0) return false;
  std::vector<std::vector<int>> adj(p.n);
  for (auto [u, v] : p.edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  for (const auto& port : p.ports)
    for (size_t i = 0; i < port.size(); ++i)
      for (size_t j = i + 1; j < port.size(); ++j) {
        if (port[i] < 0 || port[j] < 0 || port[i] >= p.n || port[j] >= p.n)
          continue;
        adj[port[i]].push_back(port[j]);
        adj[port[j]].push_back(port[i]);
      }
  std::vector<char> seen(p.n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int u : adj[v])
      if (!seen[u]) {
        seen[u] = 1;
        ++count;
        stack.push_back(u);
      }
  }
  return count == p.n;
}

}  // namespace

ValidationReport validate_template(const GraphTemplate& t) {
  ValidationReport rep;
  auto issue = [&](const std::string& where, const std::string& msg) {
    rep.issues.push_back({where, msg});
  };

  if (t.parts.empty()) {
    issue("template", "no part types");
    return rep;
  }

  // Per-part structural checks.
  std::set<std::string> ids;
  for (size_t pi = 0; pi < t.parts.size(); ++pi) {
    const PartType& p = t.parts[pi];
    if (!ids.insert(p.id).second) issue(p.id, "duplicate part id");
    if (p.n <= 0) issue(p.id, "part has no vertices");
    std::set<std::pair<int, int>> edge_set;
    for (auto [u, v] : p.edges) {
      if (u < 0 || v < 0 || u >= p.n || v >= p.n) {
        issue(p.id, "edge endpoint out of range");
        continue;
      }
      if (u == v) issue(p.id, "loop edge");
      auto key = std::minmax(u, v);
      if (!edge_set.insert(key).second) issue(p.id, "duplicate edge");
    }
    if (p.n > 0 && !part_connected(p)) issue(p.id, "part graph is disconnected");
    for (size_t q = 0; q < p.ports.size(); ++q) {
      std::set<int> seen;
      for (int v : p.ports[q]) {
        if (v < 0 || v >= p.n) issue(p.id, "port vertex out of range");
        if (!seen.insert(v).second) issue(p.id, "port tuple repeats a vertex");
      }
      if (p.ports[q].empty()) issue(p.id, "empty port tuple");
    }
  }

  // Uniform adhesion size.
  int k = -1;
  for (const PartType& p : t.parts)
    for (const auto& q : p.ports) {
      if (k < 0) k = static_cast<int>(q.size());
      if (static_cast<int>(q.size()) != k) {
        issue(p.id, "port sizes differ");
        k = std::max(k, static_cast<int>(q.size()));
      }
    }

  // Gluing pairs: perfect matching of (part, port)s across the two classes.
  std::map<std::pair<int, int>, int> port_uses;
  for (size_t gi = 0; gi < t.gluing.size(); ++gi) {
    const GluingPair& g = t.gluing[gi];
    const std::string where = "gluing[" + std::to_string(gi) + "]";
    if (g.part_a < 0 || g.part_a >= static_cast<int>(t.parts.size()) ||
        g.part_b < 0 || g.part_b >= static_cast<int>(t.parts.size())) {
      issue(where, "unknown part id");
      continue;
    }
    const PartType& pa = t.parts[g.part_a];
    const PartType& pb = t.parts[g.part_b];
    if (pa.role != Role::A || pb.role != Role::B)
      issue(where, "gluing must pair a classA port with a classB port");
    if (g.port_a < 0 || g.port_a >= static_cast<int>(pa.ports.size()) ||
        g.port_b < 0 || g.port_b >= static_cast<int>(pb.ports.size())) {
      issue(where, "port index out of range");
      continue;
    }
    port_uses[{g.part_a, g.port_a}]++;
    port_uses[{g.part_b, g.port_b}]++;
    size_t ka = pa.ports[g.port_a].size();
    if (!is_permutation(g.map, static_cast<int>(ka)) ||
        g.map.size() != pb.ports[g.port_b].size())
      issue(where, "map is not a bijection between the port tuples");
    // Adjacent parts must not coincide: that happens exactly when both
    // parts equal the glued adhesion set.
    if (ka == static_cast<size_t>(pa.n) &&
        pb.ports[g.port_b].size() == static_cast<size_t>(pb.n))
      issue(where, "adjacent parts coincide");
  }
  for (size_t pi = 0; pi < t.parts.size(); ++pi)
    for (size_t q = 0; q < t.parts[pi].ports.size(); ++q) {
      int uses = 0;
      auto it = port_uses.find({static_cast<int>(pi), static_cast<int>(q)});
      if (it != port_uses.end()) uses = it->second;
      if (uses == 0)
        issue(t.parts[pi].id,
              "port " + std::to_string(q) + " occurs in no gluing pair");
      if (uses > 1)
        issue(t.parts[pi].id,
              "port " + std::to_string(q) + " occurs in several gluing pairs");
    }

  if (t.root_part < 0 || t.root_part >= static_cast<int>(t.parts.size()))
    issue("root", "unknown root part");
  else if (t.root_vertex < 0 || t.root_vertex >= t.parts[t.root_part].n)
    issue("root", "root vertex out of range");

  // Local finiteness: the parts containing a fixed vertex must form a
  // finite subtree. Walk the slot graph (part, vertex, arrival port) across
  // gluing identifications; a directed cycle means some vertex lies in
  // infinitely many parts.
  if (rep.ok()) {
    struct Slot {
      int part, vertex, via_port;
    };
    auto slot_id = [&](const Slot& s) {
      long long id = s.part;
      id = id * 1000 + s.vertex;
      id = id * 1000 + (s.via_port + 1);
      return id;
    };
    std::map<long long, int> state;  // 0 unvisited, 1 on stack, 2 done
    bool cyclic = false;
    auto neighbors = [&](const Slot& s, auto&& visit) {
      const PartType& p = t.parts[s.part];
      for (size_t q = 0; q < p.ports.size(); ++q) {
        if (static_cast<int>(q) == s.via_port) continue;
        int pos = -1;
        for (size_t i = 0; i < p.ports[q].size(); ++i)
          if (p.ports[q][i] == s.vertex) pos = static_cast<int>(i);
        if (pos < 0) continue;
        int g = t.pair_at(s.part, static_cast<int>(q));
        const GluingPair& gp = t.gluing[g];
        bool i_am_a = gp.part_a == s.part && gp.port_a == static_cast<int>(q);
        int np = i_am_a ? gp.part_b : gp.part_a;
        int nq = i_am_a ? gp.port_b : gp.port_a;
        int npos;
        if (i_am_a) {
          npos = gp.map[pos];
        } else {
          npos = -1;
          for (size_t a = 0; a < gp.map.size(); ++a)
            if (gp.map[a] == pos) npos = static_cast<int>(a);
        }
        visit(Slot{np, t.parts[np].ports[nq][npos], nq});
      }
    };
    std::function<void(const Slot&)> dfs = [&](const Slot& s) {
      long long id = slot_id(s);
      state[id] = 1;
      neighbors(s, [&](const Slot& n) {
        if (cyclic) return;
        long long nid = slot_id(n);
        auto it = state.find(nid);
        if (it == state.end())
          dfs(n);
        else if (it->second == 1)
          cyclic = true;
      });
      state[id] = 2;
    };
    for (size_t p = 0; p < t.parts.size() && !cyclic; ++p)
      for (int v = 0; v < t.parts[p].n && !cyclic; ++v) {
        Slot s{static_cast<int>(p), v, -1};
        if (!state.count(slot_id(s))) dfs(s);
      }
    if (cyclic)
      issue("template",
            "a vertex lies in infinitely many parts (graph not locally finite)");
  }

  // Symmetries must be template automorphisms.
  for (size_t si = 0; si < t.symmetries.size(); ++si) {
    const Symmetry& s = t.symmetries[si];
    const std::string where = "symmetry[" + std::to_string(si) + "]";
    if (s.vertex_perm.size() != t.parts.size() ||
        s.port_perm.size() != t.parts.size() ||
        (!s.part_perm.empty() &&
         !is_permutation(s.part_perm, static_cast<int>(t.parts.size())))) {
      issue(where, "permutation tables sized wrong");
      continue;
    }
    bool shape_ok = true;
    for (size_t pi = 0; pi < t.parts.size(); ++pi) {
      const PartType& p = t.parts[pi];
      const PartType& tgt = t.parts[s.part_image(static_cast<int>(pi))];
      if (p.role != tgt.role || p.n != tgt.n ||
          p.ports.size() != tgt.ports.size() ||
          p.edges.size() != tgt.edges.size()) {
        issue(where, "part " + p.id + " mapped onto incompatible part " + tgt.id);
        shape_ok = false;
        continue;
      }
      std::vector<int> vp = s.vertex_perm[pi];
      std::vector<int> qp = s.port_perm[pi];
      if (vp.empty()) {
        vp.resize(p.n);
        for (int i = 0; i < p.n; ++i) vp[i] = i;
      }
      if (qp.empty()) {
        qp.resize(p.ports.size());
        for (size_t i = 0; i < p.ports.size(); ++i) qp[i] = static_cast<int>(i);
      }
      if (!is_permutation(vp, p.n) ||
          !is_permutation(qp, static_cast<int>(p.ports.size()))) {
        issue(where, "not a permutation on part " + p.id);
        shape_ok = false;
        continue;
      }
      std::set<std::pair<int, int>> edge_set;
      for (auto [u, v] : tgt.edges) edge_set.insert(std::minmax(u, v));
      for (auto [u, v] : p.edges)
        if (!edge_set.count(std::minmax(vp[u], vp[v]))) {
          issue(where, "does not preserve edges of part " + p.id);
          break;
        }
      for (size_t q = 0; q < p.ports.size(); ++q) {
        const auto& src = p.ports[q];
        const auto& dst = tgt.ports[qp[q]];
        if (src.size() != dst.size()) {
          issue(where, "port sizes differ under symmetry for part " + p.id);
          continue;
        }
        // The vertex permutation must map the port tuple onto the target
        // tuple as a set (positions may shuffle).
        std::set<int> dst_set(dst.begin(), dst.end());
        for (int v : src)
          if (!dst_set.count(vp[v])) {
            issue(where, "does not preserve port tuples of part " + p.id);
            break;
          }
      }
    }
    if (!shape_ok) continue;
    // Gluing pairs must map onto gluing pairs.
    for (const GluingPair& g : t.gluing) {
      bool found = false;
      for (const GluingPair& h : t.gluing)
        if (h.part_a == s.part_image(g.part_a) &&
            h.port_a == s.port_image(g.part_a, g.port_a) &&
            h.part_b == s.part_image(g.part_b) &&
            h.port_b == s.port_image(g.part_b, g.port_b))
          found = true;
      if (!found) issue(where, "does not preserve gluing pairs");
    }
  }

  return rep;
}

}  // namespace endwalk
