#include <Eigen/Dense>
#include <memory>
#include <random>

#include "doctest.h"
#include "endwalk/rootstar.hpp"
#include "endwalk/solver.hpp"

using namespace endwalk;

namespace {

GraphTemplate load(const char* name) {
  return GraphTemplate::from_file(std::string(ENDWALK_DATA_DIR) + "/" + name);
}

struct Sys {
  GraphTemplate t;
  PolynomialSystem sys;
  DependencyDigraph dep;
};

// heap-allocated so the template address stays stable for sys.tpl
std::unique_ptr<Sys> make(const char* name) {
  auto s = std::make_unique<Sys>();
  s->t = load(name);
  s->sys = prune_unproductive(build_system(s->t));
  s->dep = build_dependency_digraph(s->sys);
  return s;
}

double eigen_spectral_radius(const std::vector<std::vector<double>>& m) {
  size_t n = m.size();
  Eigen::MatrixXd em(n, n);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) em(i, j) = m[i][j];
  auto eig = em.eigenvalues();
  double rho = 0;
  for (int i = 0; i < eig.size(); ++i) rho = std::max(rho, std::abs(eig[i]));
  return rho;
}

}  // namespace

TEST_CASE("spectral radius against a dense eigensolver") {
  CHECK(spectral_radius({{0, 0.3}, {0.3, 0}}) == doctest::Approx(0.3));
  CHECK(spectral_radius({{0, 0}, {0, 0}}) == doctest::Approx(0.0));
  CHECK(spectral_radius({{0, 1}, {0, 0}}) == doctest::Approx(0.0));  // nilpotent

  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    size_t n = 2 + trial % 4;
    std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
    for (auto& row : m)
      for (double& x : row) x = dist(rng) < 0.4 ? 0.0 : dist(rng);
    CHECK(std::abs(spectral_radius(m) - eigen_spectral_radius(m)) <= 1e-7);
  }
}

TEST_CASE("fixed point values on the double ray") {
  auto s = make("double_ray.json");
  auto val = evaluate_fixed_point(s->sys, s->dep, 0.5);
  for (size_t c = 0; c < s->sys.classes.size(); ++c) {
    CHECK(!val.divergent[c]);
    CHECK(val.values[c] == doctest::Approx(1.0));  // z/(1-z) at z = 1/2
  }
  auto zero = evaluate_fixed_point(s->sys, s->dep, 0.0);
  for (double v : zero.values) CHECK(v == 0.0);

  auto past = evaluate_fixed_point(s->sys, s->dep, 1.2);
  bool any_divergent = false;
  for (char d : past.divergent) any_divergent |= d;
  CHECK(any_divergent);
  for (size_t k = 0; k < s->dep.components.size(); ++k)
    if (s->dep.components[k].cls == ComponentClass::IPersistent)
      CHECK(!past.component_converged[k]);
}

TEST_CASE("monotone iteration in z and in iteration count") {
  auto s = make("triangle_edge.json");
  double prev = -1;
  for (double z : {0.1, 0.2, 0.3}) {
    auto val = evaluate_fixed_point(s->sys, s->dep, z);
    double sum = 0;
    for (size_t c = 0; c < val.values.size(); ++c) {
      CHECK(!val.divergent[c]);
      sum += val.values[c];
    }
    CHECK(sum > prev);
    prev = sum;
  }
}

TEST_CASE("Jacobian at zero is nilpotent") {
  for (const char* name : {"double_ray.json", "t3.json", "triangle_edge.json",
                           "ladder.json"}) {
    auto s = make(name);
    auto jac = jacobian_symbolic(s->sys);
    auto val = evaluate_fixed_point(s->sys, s->dep, 0.0);
    for (const auto& comp : s->dep.components) {
      auto m = jacobian_at(s->sys, jac, comp.members, 0.0, val);
      CHECK(spectral_radius(m) == doctest::Approx(0.0));
    }
  }
}

TEST_CASE("critical point of the double ray") {
  auto s = make("double_ray.json");
  auto rep = find_critical_point(s->sys, s->dep);
  CHECK(rep.R == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(rep.mu_w == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(std::abs(rep.lambda_persistent - 1.0) <= 1e-6);
}

TEST_CASE("critical point of the 3-regular tree") {
  auto s = make("t3.json");
  auto rep = find_critical_point(s->sys, s->dep);
  CHECK(rep.R == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(rep.mu_w == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("criticality certificate on the free product") {
  auto s = make("triangle_edge.json");
  auto rep = find_critical_point(s->sys, s->dep);
  CHECK(std::abs(rep.lambda_persistent - 1.0) <= 1e-6);
  // mu_w within 2% of the oracle growth extrapolation c_{n}/c_{n-1}
  auto root = root_contract(s->t);
  auto c = series_coefficients(s->sys, root, 14);
  double ratio = c[13].convert_to<double>() / c[12].convert_to<double>();
  CHECK(rep.mu_w == doctest::Approx(ratio).epsilon(0.02));
}

TEST_CASE("lambda increases strictly on the persistent component") {
  auto s = make("triangle_edge.json");
  auto jac = jacobian_symbolic(s->sys);
  int pers = -1;
  for (size_t k = 0; k < s->dep.components.size(); ++k)
    if (s->dep.components[k].cls == ComponentClass::IPersistent)
      pers = static_cast<int>(k);
  REQUIRE(pers >= 0);
  double prev = -1;
  for (double z : {0.05, 0.1, 0.15, 0.2, 0.25}) {
    double l = component_lambda(s->sys, s->dep, jac, pers, z);
    CHECK(l > prev);
    prev = l;
  }
}

TEST_CASE("U components stay subcritical at R on the ladder") {
  auto s = make("ladder.json");
  auto rep = find_critical_point(s->sys, s->dep);
  CHECK(std::abs(rep.lambda_persistent - 1.0) <= 1e-6);
  for (const auto& comp : rep.components)
    if (comp.cls != ComponentClass::IPersistent)
      CHECK(comp.lambda_at_R <= 1.0 - 1e-3);
}

TEST_CASE("bounded entries of irreducible Jacobians at R") {
  auto s = make("triangle_edge.json");
  auto rep = find_critical_point(s->sys, s->dep);
  auto jac = jacobian_symbolic(s->sys);
  auto val = evaluate_fixed_point(s->sys, s->dep, rep.R * 0.999999);
  for (const auto& comp : s->dep.components) {
    if (comp.cls != ComponentClass::IPersistent) continue;
    auto m = jacobian_at(s->sys, jac, comp.members, rep.R, val);
    double mx = 0, mn = 1e300;
    for (const auto& row : m)
      for (double x : row) {
        mx = std::max(mx, x);
        if (x > 0) mn = std::min(mn, x);
      }
    CHECK(mx <= std::pow(mn, -static_cast<double>(comp.members.size())));
  }
}

TEST_CASE("amplitude estimates") {
  auto s = make("t3.json");
  auto root = root_contract(s->t);
  auto c = series_coefficients(s->sys, root, 12);
  auto est = amplitude_periodic(c, 2.0, 3);
  REQUIRE(est.conclusive);
  CHECK(est.period == 1);
  CHECK(est.amplitudes[0] == doctest::Approx(1.5));

  auto s2 = make("double_ray.json");
  auto root2 = root_contract(s2->t);
  auto c2 = series_coefficients(s2->sys, root2, 12);
  auto est2 = amplitude_periodic(c2, 1.0, 3);
  REQUIRE(est2.conclusive);
  CHECK(est2.period == 1);
  CHECK(est2.amplitudes[0] == doctest::Approx(2.0));

  auto few = amplitude_periodic({BigInt(2), BigInt(2)}, 1.0, 3);
  CHECK(!few.conclusive);
}

TEST_CASE("bracket failure without a persistent component") {
  // a finite graph template yields no configuration classes at all
  GraphTemplate t;
  t.parts.push_back({"a", Role::A, 2, {{0, 1}}, {{0}}});
  t.parts.push_back({"b", Role::B, 2, {{0, 1}}, {{1}}});
  t.gluing.push_back({0, 0, 1, 0, {0}});
  t.root_part = 0;
  t.root_vertex = 0;
  auto sys = prune_unproductive(build_system(t));
  auto dep = build_dependency_digraph(sys);
  CHECK_THROWS_AS(find_critical_point(sys, dep), BracketFailure);
}

TEST_CASE("SAR partial sums stabilize at the critical point") {
  for (const char* name : {"triangle_edge.json", "ladder.json"}) {
    auto s = make(name);
    auto rep = find_critical_point(s->sys, s->dep);
    auto root = root_contract(s->t);
    auto rets = series_returns(s->sys, root, 16);
    double acc = 0;
    std::vector<double> partial;
    for (int n = 1; n <= 16; ++n) {
      acc += rets[n - 1].convert_to<double>() * std::pow(rep.R, n);
      partial.push_back(acc);
    }
    // increments shrink: F_SAR stays analytic at R
    double last = std::abs(partial[15] - partial[14]);
    double mid = std::abs(partial[11] - partial[10]);
    CHECK(last <= mid + 1e-12);
    CHECK(std::isfinite(acc));
  }
}

TEST_CASE("dependency arcs respect the radius ordering") {
  // estimate each class's divergence threshold by bisection on the Kleene
  // iteration and check r_c <= r_c' along every dependency arc
  auto s = make("ladder.json");
  size_t n = s->sys.classes.size();
  auto diverges_at = [&](size_t cls, double z) {
    SolverOptions opt;
    opt.max_iter = 4000;
    auto val = evaluate_fixed_point(s->sys, s->dep, z, opt);
    return val.divergent[cls] != 0;
  };
  std::vector<double> radius(n);
  for (size_t c = 0; c < n; ++c) {
    double lo = 0.0, hi = 4.0;
    for (int it = 0; it < 24; ++it) {
      double mid = 0.5 * (lo + hi);
      if (diverges_at(c, mid))
        hi = mid;
      else
        lo = mid;
    }
    radius[c] = 0.5 * (lo + hi);
  }
  auto dep = build_dependency_digraph(s->sys);
  for (size_t c = 0; c < n; ++c)
    for (int to : dep.adj[c]) CHECK(radius[c] <= radius[to] + 2e-3);
}
