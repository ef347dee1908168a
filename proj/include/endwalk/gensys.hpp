#pragma once

#include <map>
#include <string>
#include <vector>

#include "endwalk/bigint.hpp"
#include "endwalk/star.hpp"

namespace endwalk {

struct InvariantViolation : std::logic_error {
  using std::logic_error::logic_error;
};

// Sparse monomial coeff * z^zdeg * prod y_c^pow with exact coefficients.
struct Monomial {
  int zdeg = 0;
  std::vector<std::pair<int, int>> yfactors;  // (class index, power), sorted
  BigInt coeff = 0;

  bool same_support(const Monomial& o) const {
    return zdeg == o.zdeg && yfactors == o.yfactors;
  }
};

struct Polynomial {
  std::vector<Monomial> monomials;  // sorted by (zdeg, yfactors), merged

  void add_term(int zdeg, std::vector<std::pair<int, int>> yf, BigInt c);
  bool zero() const { return monomials.empty(); }
};

enum class ComponentClass { U, IPersistent, ITransient };

struct StrongComponent {
  std::vector<int> members;  // class indices
  ComponentClass cls = ComponentClass::U;
};

struct DependencyDigraph {
  std::vector<std::vector<int>> adj;       // class -> classes referenced
  std::vector<int> component_of;           // class -> component index
  std::vector<StrongComponent> components;  // reverse topological order
};

// The generating system: one polynomial P_c per non-boring configuration
// class, F_c(z) = P_c(z, F(z)).
struct PolynomialSystem {
  const GraphTemplate* tpl = nullptr;
  std::vector<ConfigKey> classes;  // canonical, sorted
  std::vector<Polynomial> rows;

  int class_index(const ConfigKey& key) const;
};

struct BuildLimits {
  int max_k = 4;
  long long max_shapes = 200'000'000;
};

// Builds P_c for every viable configuration class by exhaustive star
// enumeration on the completion-side part of each class.
PolynomialSystem build_system(const GraphTemplate& t, BuildLimits limits = {});

// Least-fixed-point productivity: classes whose generating function is
// identically zero are removed and their variables replaced by zero.
PolynomialSystem prune_unproductive(const PolynomialSystem& sys);

// Dependency digraph plus Tarjan components and their classification.
// Throws InvariantViolation when an arc from a U-class to an I-class exists
// or the persistent classes fail to form one strong component.
DependencyDigraph build_dependency_digraph(const PolynomialSystem& sys);

// Formal partial derivatives dP_c / dy_{c'} for all class pairs.
std::vector<std::vector<Polynomial>> jacobian_symbolic(
    const PolynomialSystem& sys);

// Independent route to the same matrix: re-enumerates star arrangements with
// a designated second port instead of differentiating P_c. Used as the
// oracle for the Jacobian identities.
std::vector<std::vector<Polynomial>> jacobian_by_enumeration(
    const PolynomialSystem& sys, BuildLimits limits = {});

}  // namespace endwalk
