#include "endwalk/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace endwalk {

namespace {

double eval_poly_num(const Polynomial& p, double z,
                     const std::vector<double>& y) {
  double acc = 0;
  for (const Monomial& m : p.monomials) {
    double term = m.coeff.convert_to<double>() * std::pow(z, m.zdeg);
    for (auto [var, pow] : m.yfactors)
      term *= std::pow(y[var], pow);
    acc += term;
  }
  return acc;
}

std::vector<int> poly_vars(const Polynomial& p) {
  std::vector<int> vars;
  for (const Monomial& m : p.monomials)
    for (auto [v, pow] : m.yfactors) vars.push_back(v);
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  return vars;
}

}  // namespace

Valuation evaluate_fixed_point(const PolynomialSystem& sys,
                               const DependencyDigraph& dep, double z,
                               const SolverOptions& opt) {
  size_t n = sys.classes.size();
  Valuation val;
  val.z = z;
  val.values.assign(n, 0.0);
  val.divergent.assign(n, 0);
  const double inf = std::numeric_limits<double>::infinity();
  int it = 0;
  for (; it < opt.max_iter; ++it) {
    double delta = 0;
    std::vector<double> next(n);
    for (size_t c = 0; c < n; ++c) {
      next[c] = eval_poly_num(sys.rows[c], z, val.values);
      if (!(next[c] <= opt.ceiling)) {  // catches inf and nan as divergent
        next[c] = inf;
        val.divergent[c] = 1;
      } else {
        delta = std::max(delta, next[c] - val.values[c]);
      }
    }
    val.values = std::move(next);
    if (delta < opt.inner_tol) break;
  }
  val.iterations = it;
  val.component_converged.assign(dep.components.size(), 1);
  for (size_t k = 0; k < dep.components.size(); ++k)
    for (int c : dep.components[k].members)
      if (val.divergent[c]) val.component_converged[k] = 0;
  return val;
}

std::vector<std::vector<double>> jacobian_at(
    const PolynomialSystem& /*sys*/,
    const std::vector<std::vector<Polynomial>>& jac,
    const std::vector<int>& members, double z, const Valuation& val) {
  size_t m = members.size();
  std::vector<std::vector<double>> out(m, std::vector<double>(m, 0.0));
  for (size_t i = 0; i < m; ++i)
    for (size_t j = 0; j < m; ++j) {
      const Polynomial& p = jac[members[i]][members[j]];
      for (int v : poly_vars(p))
        if (val.divergent[v])
          throw MissingDependency("Jacobian entry needs divergent F_" +
                                  std::to_string(v));
      out[i][j] = eval_poly_num(p, z, val.values);
    }
  return out;
}

double spectral_radius(const std::vector<std::vector<double>>& m, double tol) {
  // Power iteration on M + I from the all-ones vector. The shift turns any
  // imprimitive period into a strictly dominant Perron root (rho(M + I) =
  // rho(M) + 1 for nonnegative M), where plain Rayleigh-quotient averaging
  // can cycle; two consecutive quotients are still averaged to smooth
  // defective blocks.
  size_t n = m.size();
  if (n == 0) return 0.0;
  std::vector<double> v(n, 1.0), w(n, 0.0);
  // Nonnegative entries cannot cancel, so n applications of M annihilate
  // the all-ones vector exactly when M is nilpotent.
  for (size_t step = 0; step < n; ++step) {
    for (size_t i = 0; i < n; ++i) {
      w[i] = 0;
      for (size_t j = 0; j < n; ++j) w[i] += m[i][j] * v[j];
    }
    v = w;
  }
  bool dead = true;
  for (double x : v)
    if (x != 0.0) dead = false;
  if (dead) return 0.0;
  std::fill(v.begin(), v.end(), 1.0);
  double prev_rq = 1.0, prev_avg = -1.0;
  double last = 1.0;
  for (long it = 0; it < 2000000; ++it) {
    double dot_vw = 0, dot_vv = 0, norm = 0;
    for (size_t i = 0; i < n; ++i) {
      w[i] = v[i];
      for (size_t j = 0; j < n; ++j) w[i] += m[i][j] * v[j];
    }
    for (size_t i = 0; i < n; ++i) {
      dot_vw += v[i] * w[i];
      dot_vv += v[i] * v[i];
      norm = std::max(norm, std::abs(w[i]));
    }
    if (norm == 0.0) return 0.0;
    double rq = dot_vw / dot_vv;
    double avg = 0.5 * (rq + prev_rq);
    if (it > 4 && std::abs(avg - prev_avg) <= tol * 0.5) return avg - 1.0;
    prev_avg = avg;
    prev_rq = rq;
    last = rq;
    for (size_t i = 0; i < n; ++i) v[i] = w[i] / norm;
  }
  return last - 1.0;
}

namespace {

// U-classes form a closed subsystem (no arcs from U to I), so their values
// remain evaluable past the critical point of the persistent component.
struct USolver {
  std::vector<int> u_classes;
  std::vector<char> is_u;

  explicit USolver(const PolynomialSystem& sys) {
    is_u.assign(sys.classes.size(), 0);
    for (size_t c = 0; c < sys.classes.size(); ++c)
      if (sys.classes[c].is_U()) {
        is_u[c] = 1;
        u_classes.push_back(static_cast<int>(c));
      }
    for (int c : u_classes)
      for (int v : poly_vars(sys.rows[c]))
        if (!is_u[v])
          throw InvariantViolation("U-row references an I-variable");
  }

  // Returns per-class values (I-classes stay zero and must not be read);
  // false when the U subsystem diverges at this z.
  bool solve(const PolynomialSystem& sys, double z, const SolverOptions& opt,
             std::vector<double>& out) const {
    out.assign(sys.classes.size(), 0.0);
    for (int it = 0; it < opt.max_iter; ++it) {
      double delta = 0;
      for (int c : u_classes) {
        double next = eval_poly_num(sys.rows[c], z, out);
        if (!(next <= opt.ceiling)) return false;
        delta = std::max(delta, next - out[c]);
        out[c] = next;
      }
      if (delta < opt.inner_tol) return true;
    }
    return true;  // slow convergence: treat the last iterate as the value
  }
};

void check_component_jacobian_vars(const PolynomialSystem& sys,
                                   const DependencyDigraph& dep,
                                   const std::vector<std::vector<Polynomial>>& jac) {
  // Within-component Jacobian entries may depend only on U-class values;
  // the paper uses this implicitly, we refuse to continue if it fails.
  for (const StrongComponent& comp : dep.components)
    for (int r : comp.members)
      for (int c : comp.members)
        for (int v : poly_vars(jac[r][c]))
          if (!sys.classes[v].is_U())
            throw InvariantViolation(
                "component Jacobian depends on a non-U variable");
}

}  // namespace

double component_lambda(const PolynomialSystem& sys,
                        const DependencyDigraph& dep,
                        const std::vector<std::vector<Polynomial>>& jac,
                        int component, double z, const SolverOptions& opt) {
  USolver usolver(sys);
  std::vector<double> values;
  if (!usolver.solve(sys, z, opt, values))
    return std::numeric_limits<double>::infinity();
  Valuation val;
  val.z = z;
  val.values = values;
  val.divergent.assign(sys.classes.size(), 0);
  auto m = jacobian_at(sys, jac, dep.components[component].members, z, val);
  return spectral_radius(m, opt.spectral_tol);
}

SpectralReport find_critical_point(const PolynomialSystem& sys,
                                   const DependencyDigraph& dep,
                                   const SolverOptions& opt) {
  std::vector<int> persistent;
  for (size_t k = 0; k < dep.components.size(); ++k)
    if (dep.components[k].cls == ComponentClass::IPersistent)
      persistent.push_back(static_cast<int>(k));
  if (persistent.empty())
    throw BracketFailure("system has no persistent component");

  auto jac = jacobian_symbolic(sys);
  check_component_jacobian_vars(sys, dep, jac);
  USolver usolver(sys);

  // R is the first z where some persistent component reaches spectral
  // radius 1 (one component when the declared symmetries are complete).
  auto lambda_p = [&](double z) -> double {
    std::vector<double> values;
    if (!usolver.solve(sys, z, opt, values))
      return std::numeric_limits<double>::infinity();
    Valuation val;
    val.z = z;
    val.values = std::move(values);
    val.divergent.assign(sys.classes.size(), 0);
    double best = 0;
    for (int k : persistent) {
      auto m = jacobian_at(sys, jac, dep.components[k].members, z, val);
      best = std::max(best, spectral_radius(m, opt.spectral_tol));
    }
    return best;
  };

  double hi = 1.0 / 64.0;
  while (lambda_p(hi) < 1.0) {
    hi *= 1.5;
    if (hi > opt.z_ceiling)
      throw BracketFailure("no upper bracket with lambda > 1 below z ceiling");
  }
  double lo = 0.0;
  while (hi - lo > opt.outer_tol * std::max(1.0, hi)) {
    double mid = 0.5 * (lo + hi);
    if (lambda_p(mid) >= 1.0)
      hi = mid;
    else
      lo = mid;
  }

  SpectralReport rep;
  rep.bracket_lo = lo;
  rep.bracket_hi = hi;
  rep.tol = opt.outer_tol;
  rep.R = 0.5 * (lo + hi);
  rep.mu_w = 1.0 / rep.R;
  rep.lambda_persistent = lambda_p(rep.R);
  for (size_t k = 0; k < dep.components.size(); ++k) {
    ComponentReport cr;
    cr.cls = dep.components[k].cls;
    cr.size = static_cast<int>(dep.components[k].members.size());
    cr.lambda_at_R =
        component_lambda(sys, dep, jac, static_cast<int>(k), rep.R, opt);
    rep.components.push_back(cr);
  }
  return rep;
}

AmplitudeEstimate amplitude_periodic(const std::vector<BigInt>& coeffs,
                                     double mu, int k_max) {
  AmplitudeEstimate est;
  int n = static_cast<int>(coeffs.size());
  if (n < 3 * k_max) {
    est.note = "inconclusive: need at least 3*k_max coefficients";
    return est;
  }
  std::vector<double> rho(n + 1, 0.0);  // rho[i] for c_i, i = 1..n
  for (int i = 1; i <= n; ++i)
    rho[i] = coeffs[i - 1].convert_to<double>() / std::pow(mu, i);
  double scale = 0;
  for (int i = 1; i <= n; ++i) scale = std::max(scale, std::abs(rho[i]));

  for (int k = 1; k <= k_max; ++k) {
    bool stable = true;
    double decay_sum = 0;
    int decay_cnt = 0;
    for (int r = 0; r < k && stable; ++r) {
      std::vector<double> s;
      for (int i = 1; i <= n; ++i)
        if (i % k == r % k) s.push_back(rho[i]);
      if (s.size() < 3) {
        stable = false;
        break;
      }
      double d_prev = std::abs(s[s.size() - 2] - s[s.size() - 3]);
      double d_last = std::abs(s[s.size() - 1] - s[s.size() - 2]);
      // the flat threshold sits above the linear drift caused by the
      // uncertainty of mu and well below any genuine residue signal
      bool flat = d_last <= 1e-9 * std::max(1.0, scale);
      bool shrinking = d_prev > 0 && d_last <= 0.95 * d_prev;
      if (!(flat || shrinking)) stable = false;
      if (d_prev > 0) {
        decay_sum += d_last / d_prev;
        ++decay_cnt;
      }
    }
    if (stable) {
      est.period = k;
      est.conclusive = true;
      est.residual_decay = decay_cnt ? decay_sum / decay_cnt : 0.0;
      est.amplitudes.assign(k, 0.0);
      for (int r = 0; r < k; ++r)
        for (int i = n; i >= 1; --i)
          if (i % k == r) {
            est.amplitudes[r] = rho[i];
            break;
          }
      return est;
    }
  }
  est.note = "inconclusive: no period up to k_max stabilized";
  return est;
}

}  // namespace endwalk
