#include "endwalk/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <atomic>
#include <thread>

namespace endwalk {

namespace {

// Per-branch counters; __int128 cannot overflow on any enumeration that
// terminates, totals are merged into BigInt afterwards.
struct Tally {
  std::vector<unsigned __int128> saw, sar, closed;
  std::vector<std::vector<unsigned __int128>> disp;

  explicit Tally(int N) {
    saw.assign(N + 1, 0);
    sar.assign(N + 1, 0);
    closed.assign(N + 1, 0);
    disp.assign(N + 1, {});
    for (int n = 0; n <= N; ++n) disp[n].assign(n + 1, 0);
  }
};

// Iterative DFS over SAWs from origin, restricted to first arc `first`
// (-1: all), accumulating into the tally.
void dfs_range(const Digraph& g, int origin, int N,
               const std::vector<int>& dist, const std::vector<char>& near,
               int first, Tally& t) {
  struct Frame {
    int vertex;
    size_t next;
  };
  std::vector<char> used(g.vertex_count(), 0);
  std::vector<Frame> stack;
  auto account = [&](int depth, int vertex) {
    t.saw[depth] += 1;
    if (depth > 0 && near[vertex]) t.sar[depth] += 1;
    int d = dist[vertex];
    if (d >= 0 && d <= depth) t.disp[depth][d] += 1;
  };
  used[origin] = 1;
  if (first < 0) {
    stack.push_back({origin, 0});
    account(0, origin);
  } else {
    const Arc& a = g.arc(first);
    stack.push_back({origin, 0});  // placeholder for the origin frame
    stack.back().next = g.out_arcs(origin).size();  // origin fully consumed
    used[a.head] = 1;
    stack.push_back({a.head, 0});
    account(1, a.head);
  }
  while (!stack.empty()) {
    Frame& fr = stack.back();
    int depth = static_cast<int>(stack.size()) - 1;
    const auto& outs = g.out_arcs(fr.vertex);
    if (depth >= N || fr.next >= outs.size()) {
      used[fr.vertex] = 0;
      stack.pop_back();
      continue;
    }
    int e = outs[fr.next++];
    int to = g.arc(e).head;
    if (used[to]) {
      if (to == origin && depth + 1 >= 3) t.closed[depth + 1] += 1;
      continue;
    }
    used[to] = 1;
    stack.push_back({to, 0});
    account(depth + 1, to);
  }
}

BigInt to_big(unsigned __int128 v) {
  BigInt out = static_cast<uint64_t>(v >> 64);
  out <<= 64;
  out += static_cast<uint64_t>(v);
  return out;
}

}  // namespace

OracleReport brute_counts(const Patch& patch, int origin, int N, int jobs) {
  auto horizon = exact_horizon(patch, origin);
  if (horizon && N > *horizon)
    throw HorizonExceeded("requested N=" + std::to_string(N) +
                          " beyond exact horizon " + std::to_string(*horizon));
  const Digraph& g = patch.graph;
  auto dist = bfs_distances(g, origin);
  std::vector<char> near(g.vertex_count(), 0);
  for (int e : g.out_arcs(origin)) near[g.arc(e).head] = 1;

  const auto& first_arcs = g.out_arcs(origin);
  std::vector<Tally> tallies;
  if (jobs <= 1 || first_arcs.size() <= 1) {
    tallies.emplace_back(N);
    dfs_range(g, origin, N, dist, near, -1, tallies[0]);
  } else {
    // One tally per first arc plus one for the trivial walk, merged in
    // fixed arc order so totals stay deterministic.
    tallies.assign(first_arcs.size(), Tally(N));
    std::vector<std::thread> pool;
    std::atomic<size_t> cursor{0};
    int workers = std::min<int>(jobs, static_cast<int>(first_arcs.size()));
    for (int wkr = 0; wkr < workers; ++wkr)
      pool.emplace_back([&]() {
        for (;;) {
          size_t i = cursor.fetch_add(1);
          if (i >= first_arcs.size()) return;
          dfs_range(g, origin, N, dist, near, first_arcs[i], tallies[i]);
        }
      });
    for (auto& th : pool) th.join();
    tallies.emplace_back(N);
    tallies.back().saw[0] = 1;
    tallies.back().disp[0][0] = 1;
  }

  OracleReport rep;
  rep.horizon = horizon;
  rep.saw.assign(N + 1, 0);
  rep.sar.assign(N + 1, 0);
  rep.sap.assign(N + 1, 0);
  rep.displacement.assign(N + 1, {});
  for (int n = 0; n <= N; ++n) rep.displacement[n].assign(n + 1, 0);
  for (const Tally& t : tallies)
    for (int n = 0; n <= N; ++n) {
      rep.saw[n] += to_big(t.saw[n]);
      rep.sar[n] += to_big(t.sar[n]);
      rep.sap[n] += to_big(t.closed[n]);
      for (int d = 0; d <= n; ++d)
        rep.displacement[n][d] += to_big(t.disp[n][d]);
    }
  for (int n = 0; n <= N; ++n) rep.sap[n] /= 2;

  rep.growth_saw.assign(N + 1, 0.0);
  rep.growth_sar.assign(N + 1, 0.0);
  for (int n = 1; n <= N; ++n) {
    if (rep.saw[n] > 0)
      rep.growth_saw[n] =
          std::pow(rep.saw[n].convert_to<double>(), 1.0 / n);
    if (rep.sar[n] > 0)
      rep.growth_sar[n] =
          std::pow(rep.sar[n].convert_to<double>(), 1.0 / n);
  }
  return rep;
}

DisplacementStats displacement_stats(const OracleReport& rep, int n, double c) {
  if (n < 0 || n >= static_cast<int>(rep.displacement.size()))
    throw HorizonExceeded("displacement_stats: n beyond computed range");
  DisplacementStats st;
  st.n = n;
  st.c = c;
  st.histogram = rep.displacement[n];
  BigInt total = 0, below = 0;
  double weighted = 0;
  for (int d = 0; d <= n; ++d) {
    total += st.histogram[d];
    if (d < c * n) below += st.histogram[d];
    weighted += d * st.histogram[d].convert_to<double>();
  }
  if (total > 0) {
    st.mean_over_n = n > 0 ? weighted / total.convert_to<double>() / n : 0.0;
    st.below_fraction =
        below.convert_to<double>() / total.convert_to<double>();
  }
  return st;
}

GrowthReport growth_report(const OracleReport& rep,
                           std::optional<double> mu_w) {
  GrowthReport g;
  g.growth_saw = rep.growth_saw;
  g.growth_sar = rep.growth_sar;
  int N = static_cast<int>(rep.sap.size()) - 1;
  g.growth_sap.assign(N + 1, 0.0);
  for (int n = 1; n <= N; ++n)
    if (rep.sap[n] > 0)
      g.growth_sap[n] = std::pow(rep.sap[n].convert_to<double>(), 1.0 / n);
  // The polygon-gap witness concerns genuine polygon lengths: returns of
  // length 1 and 2 are single edges and backtracks, and their growth root
  // (the vertex degree) exceeds mu_w on every graph.
  for (int n = 3; n <= N; ++n)
    g.max_sar_growth = std::max(g.max_sar_growth, g.growth_sar[n]);
  if (mu_w) g.sar_gap = g.max_sar_growth < *mu_w;
  return g;
}

}  // namespace endwalk
