#pragma once

#include <vector>

#include "endwalk/gensys.hpp"

namespace endwalk {

// Power series in z truncated at a fixed degree, exact integer coefficients.
struct TruncatedSeries {
  std::vector<BigInt> coef;  // coef[n] multiplies z^n; size = degree + 1

  static TruncatedSeries zero(int degree) {
    TruncatedSeries s;
    s.coef.assign(degree + 1, BigInt(0));
    return s;
  }
  int degree() const { return static_cast<int>(coef.size()) - 1; }
  bool operator==(const TruncatedSeries&) const = default;
};

TruncatedSeries mul(const TruncatedSeries& a, const TruncatedSeries& b);
void add_in_place(TruncatedSeries& a, const TruncatedSeries& b);
// a += c * z^shift * b
void add_scaled_shifted(TruncatedSeries& a, const TruncatedSeries& b,
                        const BigInt& c, int shift);
double eval_double(const TruncatedSeries& s, double z);

// Kleene iteration of F = P(z, F) in the truncated polynomial ring; the
// iterates are non-decreasing and stabilize because the Jacobian at z = 0 is
// nilpotent. Throws InvariantViolation if the hard iteration cap is hit.
std::vector<TruncatedSeries> series_fixed_point(const PolynomialSystem& sys,
                                                int degree);

// Evaluates a system polynomial at concrete series values.
TruncatedSeries eval_polynomial(const Polynomial& p,
                                const std::vector<TruncatedSeries>& values,
                                int degree);

}  // namespace endwalk
