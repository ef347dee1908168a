#include "endwalk/gensys.hpp"

#include <algorithm>
#include <set>

namespace endwalk {

void Polynomial::add_term(int zdeg, std::vector<std::pair<int, int>> yf,
                          BigInt c) {
  Monomial m{zdeg, std::move(yf), std::move(c)};
  auto it = std::lower_bound(monomials.begin(), monomials.end(), m,
                             [](const Monomial& a, const Monomial& b) {
                               if (a.zdeg != b.zdeg) return a.zdeg < b.zdeg;
                               return a.yfactors < b.yfactors;
                             });
  if (it != monomials.end() && it->same_support(m)) {
    it->coeff += m.coeff;
    if (it->coeff == 0) monomials.erase(it);
  } else {
    monomials.insert(it, std::move(m));
  }
}

int PolynomialSystem::class_index(const ConfigKey& key) const {
  auto it = std::lower_bound(classes.begin(), classes.end(), key);
  if (it == classes.end() || !(*it == key)) return -1;
  return static_cast<int>(it - classes.begin());
}

namespace {

// Completion-side part of a class: the cone of (q, x, y) hangs on the side
// x points away from.
int completion_part(const GraphTemplate& t, const ConfigKey& c) {
  const GluingPair& g = t.gluing[c.pair];
  return c.x == Role::A ? g.part_b : g.part_a;
}

struct ClassTable {
  std::vector<ConfigKey> classes;
  SymmetryGroup group;
};

ClassTable enumerate_classes(const GraphTemplate& t, const BuildLimits& lim) {
  ClassTable table;
  table.group = symmetry_group(t);
  std::set<ConfigKey> seen;
  for (size_t g = 0; g < t.gluing.size(); ++g)
    for (const ConfigKey& c :
         enumerate_configurations(t, static_cast<int>(g), lim.max_k))
      if (c.viable()) seen.insert(canonical_config(t, table.group, c));
  table.classes.assign(seen.begin(), seen.end());
  return table;
}

}  // namespace

PolynomialSystem build_system(const GraphTemplate& t, BuildLimits lim) {
  ClassTable table = enumerate_classes(t, lim);
  PolynomialSystem sys;
  sys.tpl = &t;
  sys.classes = table.classes;
  sys.rows.resize(sys.classes.size());

  for (size_t ci = 0; ci < sys.classes.size(); ++ci) {
    const ConfigKey& c = sys.classes[ci];
    int part = completion_part(t, c);
    PartContext ctx = context_for_part(t, part);
    int pinned_port = -1;
    for (size_t p = 0; p < ctx.ports.size(); ++p)
      if (ctx.ports[p].pair == c.pair) pinned_port = static_cast<int>(p);
    if (pinned_port < 0) throw std::logic_error("build_system: missing port");

    StarConstraints cons;
    cons.pinned_port = pinned_port;
    cons.pinned = c;
    cons.max_shapes = lim.max_shapes;
    enumerate_star_arrangements(ctx, cons, [&](const StarArrangement& arr) {
      std::vector<std::pair<int, int>> yf;
      for (const auto& [p, cfg] : arr.port_configs) {
        if (p == pinned_port || cfg.is_boring()) continue;
        ConfigKey canon = canonical_config(t, table.group, cfg);
        int idx = sys.class_index(canon);
        if (idx < 0)
          throw InvariantViolation("factor configuration missing from index: " +
                                   canon.to_string(t));
        bool merged = false;
        for (auto& [i, pow] : yf)
          if (i == idx) {
            ++pow;
            merged = true;
          }
        if (!merged) yf.emplace_back(idx, 1);
      }
      std::sort(yf.begin(), yf.end());
      sys.rows[ci].add_term(arr.weight, std::move(yf), 1);
    });
  }
  return sys;
}

PolynomialSystem prune_unproductive(const PolynomialSystem& sys) {
  size_t n = sys.classes.size();
  std::vector<char> productive(n, 0);
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t c = 0; c < n; ++c) {
      if (productive[c]) continue;
      for (const Monomial& m : sys.rows[c].monomials) {
        bool ok = true;
        for (auto [i, pow] : m.yfactors)
          if (!productive[i]) ok = false;
        if (ok) {
          productive[c] = 1;
          changed = true;
          break;
        }
      }
    }
  }

  PolynomialSystem out;
  out.tpl = sys.tpl;
  std::vector<int> remap(n, -1);
  for (size_t c = 0; c < n; ++c)
    if (productive[c]) {
      remap[c] = static_cast<int>(out.classes.size());
      out.classes.push_back(sys.classes[c]);
    }
  out.rows.resize(out.classes.size());
  for (size_t c = 0; c < n; ++c) {
    if (!productive[c]) continue;
    for (const Monomial& m : sys.rows[c].monomials) {
      bool keep = true;
      std::vector<std::pair<int, int>> yf;
      for (auto [i, pow] : m.yfactors) {
        if (!productive[i]) {
          keep = false;  // variable replaced by zero, monomial vanishes
          break;
        }
        yf.emplace_back(remap[i], pow);
      }
      if (keep) out.rows[remap[c]].add_term(m.zdeg, std::move(yf), m.coeff);
    }
  }
  return out;
}

DependencyDigraph build_dependency_digraph(const PolynomialSystem& sys) {
  size_t n = sys.classes.size();
  DependencyDigraph d;
  d.adj.resize(n);
  for (size_t c = 0; c < n; ++c) {
    std::set<int> refs;
    for (const Monomial& m : sys.rows[c].monomials)
      for (auto [i, pow] : m.yfactors) refs.insert(i);
    d.adj[c].assign(refs.begin(), refs.end());
  }

  // Lemma: no arcs from U-configurations to I-configurations.
  for (size_t c = 0; c < n; ++c)
    if (sys.classes[c].is_U())
      for (int to : d.adj[c])
        if (sys.classes[to].is_I())
          throw InvariantViolation("arc from U-class to I-class: " +
                                   std::to_string(c) + " -> " +
                                   std::to_string(to));

  // Tarjan strong components (iterative).
  d.component_of.assign(n, -1);
  std::vector<int> index(n, -1), low(n, 0), on_stack(n, 0), stack;
  int next_index = 0;
  struct Frame {
    int v;
    size_t child;
  };
  for (size_t root = 0; root < n; ++root) {
    if (index[root] >= 0) continue;
    std::vector<Frame> call{{static_cast<int>(root), 0}};
    while (!call.empty()) {
      Frame& fr = call.back();
      int v = fr.v;
      if (fr.child == 0) {
        index[v] = low[v] = next_index++;
        stack.push_back(v);
        on_stack[v] = 1;
      }
      bool descended = false;
      while (fr.child < d.adj[v].size()) {
        int w = d.adj[v][fr.child++];
        if (index[w] < 0) {
          call.push_back({w, 0});
          descended = true;
          break;
        }
        if (on_stack[w]) low[v] = std::min(low[v], index[w]);
      }
      if (descended) continue;
      if (low[v] == index[v]) {
        StrongComponent comp;
        for (;;) {
          int w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          d.component_of[w] = static_cast<int>(d.components.size());
          comp.members.push_back(w);
          if (w == v) break;
        }
        std::sort(comp.members.begin(), comp.members.end());
        d.components.push_back(std::move(comp));
      }
      call.pop_back();
      if (!call.empty()) {
        Frame& parent = call.back();
        low[parent.v] = std::min(low[parent.v], low[v]);
      }
    }
  }

  // Persistent classes: those on a directed walk between simple classes.
  std::vector<char> fwd(n, 0), bwd(n, 0);
  std::vector<std::vector<int>> radj(n);
  for (size_t c = 0; c < n; ++c)
    for (int to : d.adj[c]) radj[to].push_back(static_cast<int>(c));
  auto bfs = [&](const std::vector<std::vector<int>>& adj,
                 std::vector<char>& seen) {
    std::vector<int> queue;
    for (size_t c = 0; c < n; ++c)
      if (sys.classes[c].is_simple()) {
        seen[c] = 1;
        queue.push_back(static_cast<int>(c));
      }
    for (size_t h = 0; h < queue.size(); ++h)
      for (int to : adj[queue[h]])
        if (!seen[to]) {
          seen[to] = 1;
          queue.push_back(to);
        }
  };
  bfs(d.adj, fwd);
  bfs(radj, bwd);

  for (size_t k = 0; k < d.components.size(); ++k) {
    StrongComponent& comp = d.components[k];
    bool any_u = false, any_i = false, any_pers = false, all_pers = true;
    for (int c : comp.members) {
      if (sys.classes[c].is_U())
        any_u = true;
      else
        any_i = true;
      bool pers = sys.classes[c].is_I() && fwd[c] && bwd[c];
      any_pers |= pers;
      all_pers &= pers;
    }
    if (any_u && any_i)
      throw InvariantViolation("strong component mixes U and I classes");
    if (any_pers && !all_pers)
      throw InvariantViolation("strong component mixes persistent and transient");
    if (any_u)
      comp.cls = ComponentClass::U;
    else if (any_pers)
      comp.cls = ComponentClass::IPersistent;
    else
      comp.cls = ComponentClass::ITransient;
  }
  // With the full symmetry group declared the persistent classes form a
  // single strong component. Without it, a two-ended graph legitimately
  // splits them by travel direction, so several persistent components are
  // tolerated here; the critical point is then the smallest crossing.
  return d;
}

std::vector<std::vector<Polynomial>> jacobian_symbolic(
    const PolynomialSystem& sys) {
  size_t n = sys.classes.size();
  std::vector<std::vector<Polynomial>> jac(n, std::vector<Polynomial>(n));
  for (size_t c = 0; c < n; ++c)
    for (const Monomial& m : sys.rows[c].monomials)
      for (size_t fi = 0; fi < m.yfactors.size(); ++fi) {
        auto [var, pow] = m.yfactors[fi];
        std::vector<std::pair<int, int>> rest;
        for (size_t fj = 0; fj < m.yfactors.size(); ++fj) {
          if (fj == fi && m.yfactors[fj].second == 1) continue;
          auto f = m.yfactors[fj];
          if (fj == fi) f.second -= 1;
          rest.push_back(f);
        }
        jac[c][var].add_term(m.zdeg, std::move(rest), m.coeff * pow);
      }
  return jac;
}

std::vector<std::vector<Polynomial>> jacobian_by_enumeration(
    const PolynomialSystem& sys, BuildLimits lim) {
  const GraphTemplate& t = *sys.tpl;
  SymmetryGroup group = symmetry_group(t);
  size_t n = sys.classes.size();
  std::vector<std::vector<Polynomial>> jac(n, std::vector<Polynomial>(n));
  for (size_t ci = 0; ci < n; ++ci) {
    const ConfigKey& c = sys.classes[ci];
    int part = completion_part(t, c);
    PartContext ctx = context_for_part(t, part);
    int pinned_port = -1;
    for (size_t p = 0; p < ctx.ports.size(); ++p)
      if (ctx.ports[p].pair == c.pair) pinned_port = static_cast<int>(p);

    StarConstraints cons;
    cons.pinned_port = pinned_port;
    cons.pinned = c;
    cons.max_shapes = lim.max_shapes;
    enumerate_star_arrangements(ctx, cons, [&](const StarArrangement& arr) {
      // Each non-boring port can play the designated target arc f of a
      // c--c'-completion of length 1; the rest stay as y-factors.
      std::vector<std::pair<int, int>> factors;  // (port, class index)
      for (const auto& [p, cfg] : arr.port_configs) {
        if (p == pinned_port || cfg.is_boring()) continue;
        int idx = sys.class_index(canonical_config(t, group, cfg));
        if (idx < 0) return;  // factor pruned as unproductive: term vanishes
        factors.emplace_back(p, idx);
      }
      for (size_t fi = 0; fi < factors.size(); ++fi) {
        std::vector<std::pair<int, int>> yf;
        for (size_t fj = 0; fj < factors.size(); ++fj) {
          if (fj == fi) continue;
          bool merged = false;
          for (auto& [i, pow] : yf)
            if (i == factors[fj].second) {
              ++pow;
              merged = true;
            }
          if (!merged) yf.emplace_back(factors[fj].second, 1);
        }
        std::sort(yf.begin(), yf.end());
        jac[ci][factors[fi].second].add_term(arr.weight, std::move(yf), 1);
      }
    });
  }
  return jac;
}

}  // namespace endwalk
