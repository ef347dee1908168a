#pragma once

#include <optional>
#include <string>
#include <vector>

#include "endwalk/gensys.hpp"

namespace endwalk {

struct BracketFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MissingDependency : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numeric evaluation of F(z) by Kleene iteration from zero.
struct Valuation {
  double z = 0;
  std::vector<double> values;          // per class; meaningless when divergent
  std::vector<char> divergent;         // per class
  std::vector<char> component_converged;  // per strong component
  int iterations = 0;
};

struct SolverOptions {
  double inner_tol = 1e-12;
  double outer_tol = 1e-9;       // bisection width on z
  double ceiling = 1e12;         // divergence detection
  int max_iter = 2'000'000;
  double z_ceiling = 8.0;        // bracket search limit
  double spectral_tol = 1e-12;
};

Valuation evaluate_fixed_point(const PolynomialSystem& sys,
                               const DependencyDigraph& dep, double z,
                               const SolverOptions& opt = {});

// Numeric Jacobian submatrix for one strong component, with every variable
// outside the component taken from the valuation. Throws MissingDependency
// when a needed value diverged.
std::vector<std::vector<double>> jacobian_at(
    const PolynomialSystem& sys, const std::vector<std::vector<Polynomial>>& jac,
    const std::vector<int>& members, double z, const Valuation& val);

// Perron root of a nonnegative square matrix: power iteration from the
// all-ones vector, averaging two consecutive Rayleigh quotients to absorb
// periodicity.
double spectral_radius(const std::vector<std::vector<double>>& m,
                       double tol = 1e-12);

struct ComponentReport {
  ComponentClass cls;
  int size = 0;
  double lambda_at_R = 0;
};

struct SpectralReport {
  double R = 0;
  double mu_w = 0;
  double lambda_persistent = 0;
  std::vector<ComponentReport> components;
  double bracket_lo = 0, bracket_hi = 0;
  double tol = 0;
};

// Bisection on lambda_{I_p}(z) = 1. The Jacobian restricted to I-classes
// depends only on z and U-class values (asserted structurally), so it stays
// evaluable past the critical point.
SpectralReport find_critical_point(const PolynomialSystem& sys,
                                   const DependencyDigraph& dep,
                                   const SolverOptions& opt = {});

// lambda of one component at a given z, evaluating only the closed U
// subsystem. Exposed for grids and tests.
double component_lambda(const PolynomialSystem& sys,
                        const DependencyDigraph& dep,
                        const std::vector<std::vector<Polynomial>>& jac,
                        int component, double z, const SolverOptions& opt = {});

struct AmplitudeEstimate {
  int period = 0;
  std::vector<double> amplitudes;       // a_0..a_{k-1} by residue class of n
  double residual_decay = 0;            // mean ratio of successive diffs
  bool conclusive = false;
  std::string note;
};

// Detects the minimal period k <= k_max for which c_n / mu^n stabilizes per
// residue class (successive-difference criterion).
AmplitudeEstimate amplitude_periodic(const std::vector<BigInt>& coeffs,
                                     double mu, int k_max);

}  // namespace endwalk
