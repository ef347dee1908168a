#include "endwalk/digraph.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace endwalk {

int Digraph::add_vertex() {
  out_.emplace_back();
  return static_cast<int>(out_.size()) - 1;
}

int Digraph::add_arc(int u, int v, int label) {
  if (u < 0 || v < 0 || u >= vertex_count() || v >= vertex_count())
    throw std::invalid_argument("add_arc: endpoint out of range");
  if (u == v) throw std::invalid_argument("add_arc: loops are forbidden");
  int id = static_cast<int>(arcs_.size());
  arcs_.push_back(Arc{u, v, -1, label});
  out_[u].push_back(id);
  return id;
}

int Digraph::add_edge(int u, int v, int label_uv, int label_vu) {
  int e = add_arc(u, v, label_uv);
  int f = add_arc(v, u, label_vu);
  set_reversal(e, f);
  return e;
}

void Digraph::set_reversal(int e, int f) {
  arcs_[e].rev = f;
  arcs_[f].rev = e;
}

void Digraph::check_invariants() const {
  for (int e = 0; e < arc_count(); ++e) {
    const Arc& a = arcs_[e];
    if (a.rev < 0 || a.rev >= arc_count())
      throw std::logic_error("arc without reversal partner");
    const Arc& b = arcs_[a.rev];
    if (b.rev != e || b.tail != a.head || b.head != a.tail)
      throw std::logic_error("reversal involution broken");
    if (a.tail == a.head) throw std::logic_error("loop arc");
  }
}

Walk reverse_walk(const Digraph& g, const Walk& w) {
  Walk r;
  r.verts.assign(w.verts.rbegin(), w.verts.rend());
  for (auto it = w.arcs.rbegin(); it != w.arcs.rend(); ++it)
    r.arcs.push_back(g.arc(*it).rev);
  return r;
}

bool is_walk(const Digraph& g, const Walk& w) {
  if (w.empty()) return w.arcs.empty();
  if (w.verts.size() != w.arcs.size() + 1) return false;
  for (size_t i = 0; i < w.arcs.size(); ++i) {
    const Arc& a = g.arc(w.arcs[i]);
    if (a.tail != w.verts[i] || a.head != w.verts[i + 1]) return false;
  }
  return true;
}

bool is_saw(const Digraph& g, const Walk& w) {
  if (!is_walk(g, w)) return false;
  std::vector<int> seen(w.verts.begin(), w.verts.end());
  std::sort(seen.begin(), seen.end());
  return std::adjacent_find(seen.begin(), seen.end()) == seen.end();
}

namespace {

// Shared DFS core. Uses an explicit stack so deep patches cannot overflow
// the call stack. visit(depth, vertex, incoming_arc) fires once per visited
// SAW prefix below the origin.
struct DfsFrame {
  int vertex;
  size_t next_arc_idx;
};

template <typename Visit, typename Close>
void dfs_saws(const Digraph& g, int origin, int max_len, Visit&& visit,
              Close&& close_step) {
  std::vector<char> used(g.vertex_count(), 0);
  std::vector<DfsFrame> stack;
  std::vector<int> walk_verts{origin};
  std::vector<int> walk_arcs;
  used[origin] = 1;
  stack.push_back({origin, 0});
  visit(walk_verts, walk_arcs);
  while (!stack.empty()) {
    DfsFrame& fr = stack.back();
    int depth = static_cast<int>(stack.size()) - 1;
    const auto& outs = g.out_arcs(fr.vertex);
    if (depth >= max_len || fr.next_arc_idx >= outs.size()) {
      used[fr.vertex] = 0;
      stack.pop_back();
      walk_verts.pop_back();
      if (!walk_arcs.empty()) walk_arcs.pop_back();
      continue;
    }
    int e = outs[fr.next_arc_idx++];
    int to = g.arc(e).head;
    if (used[to]) {
      close_step(depth + 1, e, to);
      continue;
    }
    used[to] = 1;
    walk_verts.push_back(to);
    walk_arcs.push_back(e);
    stack.push_back({to, 0});
    visit(walk_verts, walk_arcs);
  }
}

}  // namespace

SawCounts enumerate_saws(const Digraph& g, int origin, int max_len,
                         const std::function<void(const Walk&)>* sink) {
  if (origin < 0 || origin >= g.vertex_count())
    throw std::invalid_argument("enumerate_saws: bad origin");
  SawCounts out;
  out.saw.assign(max_len + 1, BigInt(0));
  dfs_saws(
      g, origin, max_len,
      [&](const std::vector<int>& vs, const std::vector<int>& as) {
        out.saw[as.size()] += 1;
        if (sink) {
          Walk w{vs, as};
          (*sink)(w);
        }
      },
      [](int, int, int) {});
  return out;
}

ClosedCounts enumerate_closed(const Digraph& g, int origin, int max_len) {
  if (origin < 0 || origin >= g.vertex_count())
    throw std::invalid_argument("enumerate_closed: bad origin");
  std::vector<char> near_origin(g.vertex_count(), 0);
  for (int e : g.out_arcs(origin)) near_origin[g.arc(e).head] = 1;
  ClosedCounts out;
  out.sar.assign(max_len + 1, BigInt(0));
  out.sap.assign(max_len + 1, BigInt(0));
  std::vector<BigInt> closed(max_len + 1, BigInt(0));
  dfs_saws(
      g, origin, max_len,
      [&](const std::vector<int>& vs, const std::vector<int>& as) {
        if (!as.empty() && near_origin[vs.back()]) out.sar[as.size()] += 1;
      },
      [&](int depth, int /*arc*/, int to) {
        // A closed SAW of length >= 3 through the origin; each polygon edge
        // set is hit once per direction, so halve at the end.
        if (to == origin && depth >= 3) closed[depth] += 1;
      });
  for (int n = 0; n <= max_len; ++n) out.sap[n] = closed[n] / 2;
  return out;
}

MultiWalk multiwalk_from_sequence(const Digraph& g,
                                  const std::vector<int>& sequence,
                                  const std::vector<bool>& is_vertex) {
  if (sequence.size() != is_vertex.size())
    throw std::invalid_argument("multiwalk: mismatched sequence lengths");
  MultiWalk out;
  Walk cur;
  for (size_t i = 0; i < sequence.size(); ++i) {
    if (is_vertex[i]) {
      // two consecutive vertices mark a component boundary
      if (!cur.verts.empty() && (i == 0 || is_vertex[i - 1])) {
        out.components.push_back(std::move(cur));
        cur = Walk{};
      }
      if (cur.verts.empty()) cur.verts.push_back(sequence[i]);
    } else {
      const Arc& a = g.arc(sequence[i]);
      if (cur.verts.empty() || cur.verts.back() != a.tail)
        throw std::invalid_argument("multiwalk: arc not preceded by its tail");
      if (i + 1 >= sequence.size() || !is_vertex[i + 1] ||
          sequence[i + 1] != a.head)
        throw std::invalid_argument("multiwalk: arc not followed by its head");
      cur.arcs.push_back(sequence[i]);
      cur.verts.push_back(a.head);
      ++i;  // consume the head vertex
    }
  }
  if (!cur.verts.empty()) out.components.push_back(std::move(cur));
  return out;
}

std::vector<int> bfs_distances(const Digraph& g, int source) {
  std::vector<int> dist(g.vertex_count(), -1);
  std::deque<int> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (int e : g.out_arcs(v)) {
      int to = g.arc(e).head;
      if (dist[to] < 0) {
        dist[to] = dist[v] + 1;
        queue.push_back(to);
      }
    }
  }
  return dist;
}

std::optional<int> graph_distance(const Digraph& g, int u, int v) {
  if (u < 0 || v < 0 || u >= g.vertex_count() || v >= g.vertex_count())
    throw std::invalid_argument("graph_distance: bad vertex");
  if (u == v) return 0;
  auto dist = bfs_distances(g, u);
  if (dist[v] < 0) return std::nullopt;
  return dist[v];
}

}  // namespace endwalk
