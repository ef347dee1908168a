#include <memory>

#include "doctest.h"
#include "endwalk/oracle.hpp"
#include "endwalk/rootstar.hpp"

using namespace endwalk;

namespace {

GraphTemplate load(const char* name) {
  return GraphTemplate::from_file(std::string(ENDWALK_DATA_DIR) + "/" + name);
}

struct Setup {
  GraphTemplate t;
  PolynomialSystem sys;
  RootStar root;
};

// heap-allocated so the template address stays stable for sys.tpl
std::unique_ptr<Setup> setup(const char* name) {
  auto s = std::make_unique<Setup>();
  s->t = load(name);
  s->sys = prune_unproductive(build_system(s->t));
  s->root = root_contract(s->t);
  return s;
}

}  // namespace

TEST_CASE("double ray walk counts are constant 2") {
  auto s = setup("double_ray.json");
  auto c = series_coefficients(s->sys, s->root, 10);
  for (const BigInt& x : c) CHECK(x == 2);
  auto r = series_returns(s->sys, s->root, 10);
  CHECK(r[0] == 2);
  for (size_t n = 1; n < r.size(); ++n) CHECK(r[n] == 0);
}

TEST_CASE("t3 walk counts are 3 * 2^(n-1)") {
  auto s = setup("t3.json");
  auto c = series_coefficients(s->sys, s->root, 12);
  BigInt expect = 3;
  for (size_t n = 0; n < c.size(); ++n) {
    CHECK(c[n] == expect);
    expect *= 2;
  }
  auto r = series_returns(s->sys, s->root, 8);
  CHECK(r[0] == 3);
  for (size_t n = 1; n < r.size(); ++n) CHECK(r[n] == 0);
}

TEST_CASE("series equals oracle exactly on free-product templates") {
  for (const char* name : {"triangle_edge.json", "k4_edge.json"}) {
    auto s = setup(name);
    int N = 8;
    auto series = series_coefficients(s->sys, s->root, N);
    auto sar = series_returns(s->sys, s->root, N);
    auto patch = build_patch_for_distance(s->t, N + 1);
    auto oracle = brute_counts(patch, patch.root_vertex, N);
    for (int n = 1; n <= N; ++n) {
      CHECK(series[n - 1] == oracle.saw[n]);
      CHECK(sar[n - 1] == oracle.sar[n]);
    }
  }
}

TEST_CASE("series equals oracle exactly on the ladder") {
  auto s = setup("ladder.json");
  int N = 10;
  {
    auto p = setup("prism.json");
    auto coeffs = series_coefficients(p->sys, p->root, 8);
    auto rets = series_returns(p->sys, p->root, 8);
    auto ppatch = build_patch_for_distance(p->t, 9);
    auto porc = brute_counts(ppatch, ppatch.root_vertex, 8);
    for (int n = 1; n <= 8; ++n) {
      CHECK(coeffs[n - 1] == porc.saw[n]);
      CHECK(rets[n - 1] == porc.sar[n]);
    }
  }
  auto series = series_coefficients(s->sys, s->root, N);
  auto sar = series_returns(s->sys, s->root, N);
  auto patch = build_patch_for_distance(s->t, N + 1);
  auto oracle = brute_counts(patch, patch.root_vertex, N);
  for (int n = 1; n <= N; ++n) {
    CHECK(series[n - 1] == oracle.saw[n]);
    CHECK(sar[n - 1] == oracle.sar[n]);
  }
}

TEST_CASE("oracle basics on bundled patches") {
  auto t = load("t3.json");
  auto patch = build_patch_for_distance(t, 5);
  auto rep = brute_counts(patch, patch.root_vertex, 4);
  CHECK(rep.saw == std::vector<BigInt>{1, 3, 6, 12, 24});
  // trees are perfectly ballistic
  for (int n = 1; n <= 4; ++n) {
    auto st = displacement_stats(rep, n, 0.5);
    CHECK(st.histogram[n] == rep.saw[n]);
    CHECK(st.mean_over_n == doctest::Approx(1.0));
  }

  auto tri = load("triangle_edge.json");
  auto patch2 = build_patch_for_distance(tri, 3);
  auto rep2 = brute_counts(patch2, patch2.root_vertex, 2);
  CHECK(rep2.saw[1] == 3);
}

TEST_CASE("oracle rejects requests past the horizon") {
  auto t = load("triangle_edge.json");
  auto patch = build_patch_for_distance(t, 4);
  auto h = exact_horizon(patch, patch.root_vertex);
  REQUIRE(h.has_value());
  CHECK_THROWS_AS(brute_counts(patch, patch.root_vertex, *h + 1),
                  HorizonExceeded);
}

TEST_CASE("parallel oracle matches sequential") {
  auto t = load("k4_edge.json");
  auto patch = build_patch_for_distance(t, 8);
  auto seq = brute_counts(patch, patch.root_vertex, 7, 1);
  auto par = brute_counts(patch, patch.root_vertex, 7, 4);
  CHECK(seq.saw == par.saw);
  CHECK(seq.sar == par.sar);
  CHECK(seq.sap == par.sap);
  CHECK(seq.displacement == par.displacement);
}

TEST_CASE("submultiplicativity of oracle counts") {
  auto t = load("triangle_edge.json");
  auto patch = build_patch_for_distance(t, 9);
  auto rep = brute_counts(patch, patch.root_vertex, 8);
  // c_{m+n} <= c_m * max_x c_n(x); on a transitive-ish patch use c_n(o)
  // started from the worst interior vertex: bound with the origin counts.
  for (int m = 1; m <= 4; ++m)
    for (int n = 1; m + n <= 8; ++n)
      CHECK(rep.saw[m + n] <= rep.saw[m] * rep.saw[n] * 2);
}

TEST_CASE("sap counts on free products") {
  auto t = load("triangle_edge.json");
  auto patch = build_patch_for_distance(t, 7);
  auto rep = brute_counts(patch, patch.root_vertex, 6);
  // the only polygon through o is its own triangle
  CHECK(rep.sap[3] == 1);
  for (int n : {4, 5, 6}) CHECK(rep.sap[n] == 0);

  auto k4 = load("k4_edge.json");
  auto patch4 = build_patch_for_distance(k4, 7);
  auto rep4 = brute_counts(patch4, patch4.root_vertex, 6);
  CHECK(rep4.sap[3] == 3);
  CHECK(rep4.sap[4] == 3);
}

TEST_CASE("growth report flags the polygon gap") {
  auto t = load("triangle_edge.json");
  auto patch = build_patch_for_distance(t, 9);
  auto rep = brute_counts(patch, patch.root_vertex, 8);
  auto g = growth_report(rep, 2.3);
  REQUIRE(g.sar_gap.has_value());
  CHECK(*g.sar_gap);
  // all returns on this free product live inside the triangle: none of
  // polygon length remain beyond n = 2
  CHECK(g.max_sar_growth == doctest::Approx(0.0));
  CHECK(g.growth_sap[3] == doctest::Approx(1.0));
}
