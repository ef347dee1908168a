#include "endwalk/config.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "endwalk/patch.hpp"

namespace endwalk {

std::string ConfigKey::to_string(const GraphTemplate& t) const {
  std::ostringstream os;
  const GluingPair& g = t.gluing[pair];
  os << t.parts[g.part_a].id << ":" << g.port_a << "~" << t.parts[g.part_b].id
     << ":" << g.port_b << " x->" << role_name(x) << " y->" << role_name(y)
     << " q=";
  if (q.empty()) {
    os << "()";
  } else {
    os << "(" << q.verts[0];
    for (size_t i = 0; i < q.sides.size(); ++i)
      os << (q.sides[i] == Role::A ? " -A- " : " -B- ") << q.verts[i + 1];
    os << ")";
  }
  return os.str();
}

std::vector<ConfigKey> enumerate_configurations(const GraphTemplate& t,
                                                int pair, int max_k) {
  const GluingPair& g = t.gluing.at(pair);
  int k = static_cast<int>(t.parts[g.part_a].ports[g.port_a].size());
  if (k > max_k)
    throw ResourceLimitError("adhesion size " + std::to_string(k) +
                             " exceeds configuration cap " +
                             std::to_string(max_k));

  // All SAWs on the doubled complete graph on k vertices: an ordered
  // selection of distinct positions with a side choice per step.
  std::vector<CrossingWalk> walks;
  walks.push_back({});  // the empty walk
  std::vector<int> verts;
  std::vector<Role> sides;
  std::vector<char> used(k, 0);
  std::function<void()> extend = [&]() {
    walks.push_back({verts, sides});
    for (int v = 0; v < k; ++v) {
      if (used[v]) continue;
      used[v] = 1;
      verts.push_back(v);
      if (verts.size() == 1) {
        extend();
      } else {
        for (Role s : {Role::A, Role::B}) {
          sides.push_back(s);
          extend();
          sides.pop_back();
        }
      }
      verts.pop_back();
      used[v] = 0;
    }
  };
  for (int v = 0; v < k; ++v) {
    used[v] = 1;
    verts.push_back(v);
    extend();
    verts.pop_back();
    used[v] = 0;
  }

  std::vector<ConfigKey> out;
  for (const CrossingWalk& w : walks)
    for (Role x : {Role::A, Role::B})
      for (Role y : {Role::A, Role::B}) out.push_back({pair, x, y, w});
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

Symmetry identity_symmetry(const GraphTemplate& t) {
  Symmetry s;
  s.vertex_perm.resize(t.parts.size());
  s.port_perm.resize(t.parts.size());
  return s;
}

Symmetry compose(const GraphTemplate& t, const Symmetry& a, const Symmetry& b) {
  // c = a after b
  Symmetry c;
  size_t np = t.parts.size();
  c.part_perm.resize(np);
  c.vertex_perm.resize(np);
  c.port_perm.resize(np);
  for (size_t p = 0; p < np; ++p) {
    int mid = b.part_image(static_cast<int>(p));
    c.part_perm[p] = a.part_image(mid);
    const PartType& pt = t.parts[p];
    c.vertex_perm[p].resize(pt.n);
    for (int v = 0; v < pt.n; ++v)
      c.vertex_perm[p][v] = a.vertex_image(mid, b.vertex_image(p, v));
    c.port_perm[p].resize(pt.ports.size());
    for (size_t q = 0; q < pt.ports.size(); ++q)
      c.port_perm[p][q] = a.port_image(mid, b.port_image(p, static_cast<int>(q)));
  }
  return c;
}

std::string encode(const GraphTemplate& t, const Symmetry& s) {
  std::ostringstream os;
  for (size_t p = 0; p < t.parts.size(); ++p) {
    os << s.part_image(static_cast<int>(p)) << "|";
    for (int v = 0; v < t.parts[p].n; ++v) os << s.vertex_image(p, v) << ",";
    os << "|";
    for (size_t q = 0; q < t.parts[p].ports.size(); ++q)
      os << s.port_image(p, static_cast<int>(q)) << ",";
    os << ";";
  }
  return os.str();
}

}  // namespace

SymmetryGroup symmetry_group(const GraphTemplate& t, size_t cap) {
  SymmetryGroup grp;
  std::map<std::string, size_t> seen;
  Symmetry id = identity_symmetry(t);
  grp.elements.push_back(id);
  seen[encode(t, id)] = 0;
  std::vector<size_t> frontier{0};
  while (!frontier.empty()) {
    std::vector<size_t> next;
    for (size_t idx : frontier)
      for (const Symmetry& gen : t.symmetries) {
        Symmetry comp = compose(t, gen, grp.elements[idx]);
        std::string code = encode(t, comp);
        if (seen.count(code)) continue;
        if (grp.elements.size() >= cap)
          throw ResourceLimitError("symmetry group exceeds cap");
        seen[code] = grp.elements.size();
        next.push_back(grp.elements.size());
        grp.elements.push_back(std::move(comp));
      }
    frontier = std::move(next);
  }
  return grp;
}

ConfigKey canonical_config(const GraphTemplate& t, const SymmetryGroup& grp,
                           const ConfigKey& key) {
  if (grp.elements.size() <= 1) return key;
  ConfigKey best = key;
  const GluingPair& g = t.gluing[key.pair];
  for (const Symmetry& s : grp.elements) {
    int pa = s.part_image(g.part_a);
    int qa = s.port_image(g.part_a, g.port_a);
    int image_pair = -1;
    for (size_t h = 0; h < t.gluing.size(); ++h)
      if (t.gluing[h].part_a == pa && t.gluing[h].port_a == qa)
        image_pair = static_cast<int>(h);
    if (image_pair < 0) continue;  // validator reports this; skip here
    const GluingPair& gh = t.gluing[image_pair];
    // Position i of the source tuple lands at the position of the image
    // vertex in the target tuple.
    ConfigKey cand = key;
    cand.pair = image_pair;
    const auto& src_tuple = t.parts[g.part_a].ports[g.port_a];
    const auto& dst_tuple = t.parts[gh.part_a].ports[gh.port_a];
    bool ok = true;
    for (size_t i = 0; i < cand.q.verts.size(); ++i) {
      int v = s.vertex_image(g.part_a, src_tuple[key.q.verts[i]]);
      int pos = -1;
      for (size_t j = 0; j < dst_tuple.size(); ++j)
        if (dst_tuple[j] == v) pos = static_cast<int>(j);
      if (pos < 0) {
        ok = false;
        break;
      }
      cand.q.verts[i] = pos;
    }
    if (ok && cand < best) best = cand;
  }
  return best;
}

}  // namespace endwalk
